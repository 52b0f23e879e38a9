/** Fixed palettes so the same catalog always renders identically. */

import type { InsightType } from './types.js';

export type IconShape =
  | 'triangle'
  | 'ring'
  | 'step'
  | 'diamond'
  | 'slope'
  | 'link'
  | 'cross'
  | 'blob';

/** Center-icon shape per insight type (8 entries, one per type). */
export const TYPE_ICONS: Record<InsightType, IconShape> = {
  TopOne: 'triangle',
  Attribution: 'ring',
  ChangePoint: 'step',
  Outlier: 'diamond',
  Trend: 'slope',
  Correlation: 'link',
  CrossMeasureCorrelation: 'cross',
  Clustering: 'blob',
};

/** Breakdown-field colors, assigned by field position modulo 8. */
export const BREAKDOWN_COLORS: string[] = [
  '#4e79a7', '#f28e2b', '#59a14f', '#e15759',
  '#b07aa1', '#76b7b2', '#edc948', '#9c755f',
];

export const UNFILTERED_GRAY = '#c7c7c7';
export const DOT_GRAY = '#9a9a9a';
export const LINK_GRAY = '#b0b0b0';

export function breakdownColor(fieldIndex: number): string {
  return BREAKDOWN_COLORS[
    ((fieldIndex % BREAKDOWN_COLORS.length) + BREAKDOWN_COLORS.length)
    % BREAKDOWN_COLORS.length];
}
