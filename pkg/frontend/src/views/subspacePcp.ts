/** Subspace filtering view: parallel coordinates over the dimensions.
 *
 * Each axis carries the field's domain plus a "*" tick at the bottom
 * meaning "no restriction on that field"; each subspace is a polyline
 * through one tick per axis.
 */

import type { DatasetSchema, SubspaceEntry } from '../types.js';

export const NO_RESTRICTION = '*';

export interface PcpAxis {
  field: string;
  /** tick labels bottom-up; ticks[0] is always "*" */
  ticks: string[];
}

export interface PcpPolyline {
  filters: Array<[string, string]>;
  /** tick index per axis, aligned with axes */
  path: number[];
  rowCount: number;
  insightCount: number;
  highlighted: boolean;
}

export interface SubspacePcpView {
  kind: 'subspacePcp';
  axes: PcpAxis[];
  polylines: PcpPolyline[];
}

/**
 * Conjunctive brush semantics, mirroring the API: a subspace matches
 * when, for every brushed field, its filter value is selected, or it is
 * unfiltered on that field and "*" is selected.
 */
export function matchesBrush(
  filters: Array<[string, string | number]>,
  brush: Record<string, string[]>,
): boolean {
  const byField = new Map(filters.map(([f, v]) => [f, String(v)]));
  for (const [field, values] of Object.entries(brush)) {
    const value = byField.get(field);
    if (value === undefined) {
      if (!values.includes(NO_RESTRICTION)) {
        return false;
      }
    } else if (!values.includes(value)) {
      return false;
    }
  }
  return true;
}

export function renderSubspacePcp(
  schema: DatasetSchema,
  subspaces: SubspaceEntry[],
  brush: Record<string, string[]>,
): SubspacePcpView {
  const dimensions = schema.fields.filter((f) => f.role === 'dimension');
  const axes: PcpAxis[] = dimensions.map((f) => ({
    field: f.name,
    ticks: [NO_RESTRICTION, ...f.domain.map(String)],
  }));
  const polylines: PcpPolyline[] = subspaces.map((sub) => {
    const byField = new Map(sub.filters.map(([f, v]) => [f, String(v)]));
    const path = axes.map((axis) => {
      const value = byField.get(axis.field);
      return value === undefined ? 0 : axis.ticks.indexOf(value);
    });
    return {
      filters: sub.filters.map(([f, v]) => [f, String(v)]),
      path,
      rowCount: sub.rowCount,
      insightCount: sub.insightCount,
      highlighted: matchesBrush(sub.filters, brush),
    };
  });
  return { kind: 'subspacePcp', axes, polylines };
}
