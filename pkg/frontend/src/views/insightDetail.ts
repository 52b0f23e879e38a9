/** Individual insight view: one chart per insight type plus the
 * catalog's description sentence on hover. */

import type { Insight, InsightType } from '../types.js';

export type ChartKind = 'line' | 'pie' | 'bar' | 'scatter';

export const DEFAULT_CHART: Record<InsightType, ChartKind> = {
  Trend: 'line',
  Correlation: 'line',
  ChangePoint: 'line',
  Attribution: 'pie',
  TopOne: 'bar',
  Outlier: 'bar',
  Clustering: 'bar',
  CrossMeasureCorrelation: 'scatter',
};

export interface SeriesPoint {
  label: string;
  value: number;
}

export interface InsightDetailView {
  kind: 'insightDetail';
  state: 'empty' | 'ready';
  insightId: string | null;
  chartKind: ChartKind | null;
  series: SeriesPoint[];
  /** x position of the vertical split rule (ChangePoint only) */
  splitRule: number | null;
  description: string;
}

export function emptyDetail(): InsightDetailView {
  return {
    kind: 'insightDetail',
    state: 'empty',
    insightId: null,
    chartKind: null,
    series: [],
    splitRule: null,
    description: 'Select an insight to see its chart.',
  };
}

export function renderInsightDetail(
  insight: Insight | null,
  seriesData: SeriesPoint[],
  chartKind?: ChartKind,
): InsightDetailView {
  if (insight === null) {
    return emptyDetail();
  }
  const payload = insight.payload;
  const splitRule = insight.type === 'ChangePoint'
    && typeof payload['split_index'] === 'number'
    ? (payload['split_index'] as number)
    : null;
  return {
    kind: 'insightDetail',
    state: 'ready',
    insightId: insight.id,
    chartKind: chartKind ?? DEFAULT_CHART[insight.type],
    series: seriesData,
    splitRule,
    description: insight.description ?? '',
  };
}

/** User-initiated chart-kind switch; everything else is preserved. */
export function switchChart(
  view: InsightDetailView, chartKind: ChartKind,
): InsightDetailView {
  if (view.state === 'empty') {
    return view;
  }
  return { ...view, chartKind };
}
