/** Insight map view: the 2D projection with glyphs, density contours,
 * same-breakdown link curves, and the adjacent subspace list. */

import {
  breakdownColor,
  IconShape,
  LINK_GRAY,
  TYPE_ICONS,
  UNFILTERED_GRAY,
} from '../palettes.js';
import type { ViewState } from '../state.js';
import type {
  DatasetSchema,
  DensityDoc,
  Insight,
  ProjectionDoc,
  SubspaceEntry,
} from '../types.js';

export const LINK_CAP = 50;
const MAX_GLYPH_RINGS = 8;

export interface GlyphRing {
  field: string;
  color: string;
  /** filtered value's arc as [startFraction, endFraction); null = full
   * gray ring (unfiltered, or the aggregate ring of a wide schema) */
  span: [number, number] | null;
}

export interface MapMark {
  id: string;
  x: number;
  y: number;
  mode: 'glyph' | 'dot';
  rings: GlyphRing[];
  icon: IconShape | null;
  iconColor: string | null;
  selected: boolean;
}

export interface LinkCurve {
  fromId: string;
  toId: string;
  from: [number, number];
  to: [number, number];
  color: string;
}

export interface ContourPath {
  level: number;
  points: Array<[number, number]>;
}

export interface SubspaceListItem {
  label: string;
  filters: Array<[string, string]>;
  rowCount: number;
  insightCount: number;
  highlighted: boolean;
}

export interface InsightMapView {
  kind: 'insightMap';
  marks: MapMark[];
  contours: ContourPath[];
  links: LinkCurve[];
  /** count of related insights beyond the link cap ("+N more") */
  moreLinks: number;
  subspaceList: SubspaceListItem[];
}

export function glyphRings(
  schema: DatasetSchema, insight: Insight,
): GlyphRing[] {
  const dimensions = schema.fields.filter((f) => f.role === 'dimension');
  const filtered = new Map(insight.subspace.map(([f, v]) => [f, String(v)]));
  const ring = (field: typeof dimensions[number], index: number): GlyphRing => {
    const value = filtered.get(field.name);
    if (value === undefined) {
      return { field: field.name, color: UNFILTERED_GRAY, span: null };
    }
    const domain = field.domain.map(String);
    const at = Math.max(0, domain.indexOf(value));
    const width = domain.length > 0 ? 1 / domain.length : 1;
    return {
      field: field.name,
      color: breakdownColor(index),
      span: [at * width, (at + 1) * width],
    };
  };
  if (dimensions.length <= MAX_GLYPH_RINGS) {
    return dimensions.map(ring);
  }
  // wide schema: rings for the filtered fields plus one aggregate ring
  const rings = dimensions
    .map((f, i) => [f, i] as const)
    .filter(([f]) => filtered.has(f.name))
    .map(([f, i]) => ring(f, i));
  rings.push({ field: '', color: UNFILTERED_GRAY, span: null });
  return rings;
}

function iconColor(schema: DatasetSchema, insight: Insight): string | null {
  if (insight.breakdown === null) {
    return null;
  }
  const dimensions = schema.fields.filter((f) => f.role === 'dimension');
  const index = dimensions.findIndex((f) => f.name === insight.breakdown);
  return index >= 0 ? breakdownColor(index) : null;
}

function subspaceLabel(filters: Array<[string, string | number]>): string {
  if (filters.length === 0) {
    return '(whole dataset)';
  }
  return filters.map(([f, v]) => `${f}=${v}`).join(', ');
}

export function renderInsightMap(
  schema: DatasetSchema,
  projection: ProjectionDoc | null,
  density: DensityDoc | null,
  insights: Insight[],
  subspaces: SubspaceEntry[],
  related: Insight[],
  state: ViewState,
): InsightMapView {
  const coordsById = new Map<string, [number, number]>();
  if (projection !== null) {
    insights.forEach((insight, i) => {
      if (i < projection.coords.length) {
        coordsById.set(insight.id, projection.coords[i]);
      }
    });
  }

  const marks: MapMark[] = insights.map((insight, i) => {
    const at = coordsById.get(insight.id) ?? [i, 0];
    const asGlyph = insight.score > state.glyphThreshold;
    return {
      id: insight.id,
      x: at[0],
      y: at[1],
      mode: asGlyph ? 'glyph' : 'dot',
      rings: asGlyph ? glyphRings(schema, insight) : [],
      icon: asGlyph ? TYPE_ICONS[insight.type] : null,
      iconColor: asGlyph ? iconColor(schema, insight) : null,
      selected: insight.id === state.selectedInsight,
    };
  });

  const contours: ContourPath[] = density === null ? [] :
    density.contours.flatMap((c) =>
      c.polylines.map((points) => ({ level: c.level, points })));

  let links: LinkCurve[] = [];
  let moreLinks = 0;
  const origin = state.selectedInsight !== null
    ? coordsById.get(state.selectedInsight) : undefined;
  if (state.selectedInsight !== null && origin !== undefined) {
    const targets = related.filter(
      (r) => r.id !== state.selectedInsight && coordsById.has(r.id));
    moreLinks = Math.max(0, targets.length - LINK_CAP);
    links = targets.slice(0, LINK_CAP).map((r) => ({
      fromId: state.selectedInsight as string,
      toId: r.id,
      from: origin,
      to: coordsById.get(r.id) as [number, number],
      color: LINK_GRAY,
    }));
  }

  const subspaceList: SubspaceListItem[] = [...subspaces]
    .sort((a, b) => b.insightCount - a.insightCount)
    .map((sub) => ({
      label: subspaceLabel(sub.filters),
      filters: sub.filters.map(
        ([f, v]) => [f, String(v)] as [string, string]),
      rowCount: sub.rowCount,
      insightCount: sub.insightCount,
      highlighted: false,
    }));

  return { kind: 'insightMap', marks, contours, links, moreLinks,
           subspaceList };
}
