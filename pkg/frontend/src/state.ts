/** Client view state and its mapping onto /insights query parameters.
 *
 * The UI never filters insights locally: every filter change re-derives
 * the visible set from the API, so the server's query semantics are the
 * single source of truth.
 */

import type { InsightType } from './types.js';

/** Rectangle in (significance, impact) space; x = significance. */
export interface ScoreBrush {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export interface ViewState {
  datasetId: string | null;
  catalogId: string | null;
  /** field -> selected values; "*" admits insights unfiltered on the field */
  brush: Record<string, string[]>;
  scoreBrush: ScoreBrush | null;
  typeFilter: InsightType[];
  /** insights with score strictly above this render as glyphs */
  glyphThreshold: number;
  selectedInsight: string | null;
  projectionMethod: 'tsne' | 'mds';
}

export function initialState(): ViewState {
  return {
    datasetId: null,
    catalogId: null,
    brush: {},
    scoreBrush: null,
    typeFilter: [],
    glyphThreshold: 0,
    selectedInsight: null,
    projectionMethod: 'tsne',
  };
}

function clamp01(x: number): number {
  return Math.min(1, Math.max(0, x));
}

export function withBrush(
  state: ViewState, field: string, values: string[],
): ViewState {
  const brush = { ...state.brush };
  if (values.length === 0) {
    delete brush[field];
  } else {
    brush[field] = [...new Set(values)].sort();
  }
  return { ...state, brush };
}

export function withScoreBrush(
  state: ViewState, rect: ScoreBrush | null,
): ViewState {
  if (rect === null) {
    return { ...state, scoreBrush: null };
  }
  const scoreBrush = {
    x0: clamp01(Math.min(rect.x0, rect.x1)),
    y0: clamp01(Math.min(rect.y0, rect.y1)),
    x1: clamp01(Math.max(rect.x0, rect.x1)),
    y1: clamp01(Math.max(rect.y0, rect.y1)),
  };
  return { ...state, scoreBrush };
}

export function withTypeFilter(
  state: ViewState, types: InsightType[],
): ViewState {
  return { ...state, typeFilter: [...new Set(types)].sort() };
}

export function withGlyphThreshold(
  state: ViewState, threshold: number,
): ViewState {
  return { ...state, glyphThreshold: clamp01(threshold) };
}

export function withSelection(
  state: ViewState, insightId: string | null,
): ViewState {
  return { ...state, selectedInsight: insightId };
}

export function clearFilters(state: ViewState): ViewState {
  return { ...state, brush: {}, scoreBrush: null, typeFilter: [] };
}

/**
 * Deterministic /insights query parameters for the current filters.
 * Fields and values are sorted so equal states produce equal URLs.
 */
export function insightQueryParams(state: ViewState): Array<[string, string]> {
  const params: Array<[string, string]> = [];
  if (state.typeFilter.length > 0) {
    params.push(['types', [...state.typeFilter].sort().join(',')]);
  }
  if (state.scoreBrush !== null) {
    params.push(['minSignificance', String(state.scoreBrush.x0)]);
    params.push(['minImpact', String(state.scoreBrush.y0)]);
  }
  for (const field of Object.keys(state.brush).sort()) {
    const values = [...state.brush[field]].sort().join('|');
    params.push(['brush', `${field}:${values}`]);
  }
  return params;
}

/** Keeps only the latest response per view when fetches race. */
export class RequestSequencer {
  private issued = 0;
  private applied = 0;

  issue(): number {
    this.issued += 1;
    return this.issued;
  }

  /** True when `seq` is newer than anything applied so far. */
  accept(seq: number): boolean {
    if (seq <= this.applied) {
      return false;
    }
    this.applied = seq;
    return true;
  }
}
