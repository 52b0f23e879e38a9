/** Insight score view: significance on x, impact on y, one dot each. */

import { DOT_GRAY } from '../palettes.js';
import type { ScoreBrush } from '../state.js';
import type { Insight } from '../types.js';

export interface ScoreDot {
  id: string;
  /** significance */
  x: number;
  /** impact */
  y: number;
  color: string;
  brushed: boolean;
}

export interface ScoreScatterView {
  kind: 'scoreScatter';
  dots: ScoreDot[];
  brush: ScoreBrush | null;
}

export function insideBrush(
  dot: { x: number; y: number }, brush: ScoreBrush | null,
): boolean {
  if (brush === null) {
    return true;
  }
  return dot.x >= brush.x0 && dot.x <= brush.x1
    && dot.y >= brush.y0 && dot.y <= brush.y1;
}

export function renderScoreScatter(
  insights: Insight[], brush: ScoreBrush | null,
): ScoreScatterView {
  const dots = insights.map((insight) => {
    const dot = {
      id: insight.id,
      x: insight.significance,
      y: insight.impact,
      color: DOT_GRAY,
      brushed: false,
    };
    dot.brushed = insideBrush(dot, brush);
    return dot;
  });
  return { kind: 'scoreScatter', dots, brush };
}
