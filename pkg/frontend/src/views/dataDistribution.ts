/** Data distribution view: one table row per field with a histogram. */

import type { DatasetSchema, Distribution, FieldRole } from '../types.js';

export interface HistogramBar {
  label: string;
  count: number;
  /** height normalized to the tallest bar of the field, in [0, 1] */
  height: number;
}

export interface FieldRow {
  name: string;
  role: FieldRole;
  range: string;
  included: boolean;
  bars: HistogramBar[];
}

export interface DataDistributionView {
  kind: 'dataDistribution';
  state: 'loading' | 'error' | 'ready';
  rows: FieldRow[];
  scrollable: boolean;
  message?: string;
}

const SCROLL_AFTER = 12;

export function loadingDistribution(): DataDistributionView {
  return { kind: 'dataDistribution', state: 'loading', rows: [],
           scrollable: false };
}

export function errorDistribution(message: string): DataDistributionView {
  return { kind: 'dataDistribution', state: 'error', rows: [],
           scrollable: false, message };
}

function rangeLabel(domain: Array<string | number>, role: FieldRole): string {
  if (domain.length === 0) {
    return '';
  }
  if (role === 'measure') {
    const first = domain[0];
    const last = domain[domain.length - 1];
    return `${first} .. ${last}`;
  }
  return `${domain.length} values`;
}

export function renderDataDistribution(
  schema: DatasetSchema,
  distributions: Record<string, Distribution>,
  included: Set<string>,
): DataDistributionView {
  const rows: FieldRow[] = schema.fields.map((field) => {
    const dist = distributions[field.name];
    const bins = dist ? dist.bins : [];
    const max = bins.reduce((m, [, count]) => Math.max(m, count), 0);
    return {
      name: field.name,
      role: field.role,
      range: rangeLabel(field.domain, field.role),
      included: included.has(field.name),
      bars: bins.map(([label, count]) => ({
        label: String(label),
        count,
        height: max > 0 ? count / max : 0,
      })),
    };
  });
  return {
    kind: 'dataDistribution',
    state: 'ready',
    rows,
    scrollable: rows.length > SCROLL_AFTER,
  };
}

/** Clicking a field name toggles its inclusion. */
export function toggleField(included: Set<string>, name: string): Set<string> {
  const next = new Set(included);
  if (next.has(name)) {
    next.delete(name);
  } else {
    next.add(name);
  }
  return next;
}
