/** Wire types for the /api/v1 endpoints. */

export type FieldRole = 'dimension' | 'measure';

export interface FieldSchema {
  name: string;
  role: FieldRole;
  valueKind: string;
  domain: Array<string | number>;
}

export interface DatasetSchema {
  name: string;
  rowCount: number;
  fields: FieldSchema[];
}

export interface Distribution {
  field: string;
  kind: string;
  bins: Array<[string | number, number]>;
}

export type InsightType =
  | 'TopOne'
  | 'Attribution'
  | 'ChangePoint'
  | 'Outlier'
  | 'Trend'
  | 'Correlation'
  | 'CrossMeasureCorrelation'
  | 'Clustering';

export const INSIGHT_TYPES: InsightType[] = [
  'TopOne', 'Attribution', 'ChangePoint', 'Outlier', 'Trend',
  'Correlation', 'CrossMeasureCorrelation', 'Clustering',
];

export type SubspaceFilters = Array<[string, string | number]>;

export interface Insight {
  id: string;
  type: InsightType;
  subspace: SubspaceFilters;
  breakdown: string | null;
  measure: string | [string, string] | null;
  agg: string;
  significance: number;
  impact: number;
  score: number;
  payload: Record<string, unknown>;
  description?: string;
}

export interface InsightPage {
  total: number;
  insights: Insight[];
}

export interface SubspaceEntry {
  filters: SubspaceFilters;
  rowCount: number;
  insightCount: number;
}

export interface ProjectionDoc {
  method: string;
  embeddingKind: string;
  coords: Array<[number, number]>;
  seed: number;
  params: Record<string, unknown>;
}

export interface ContourLevel {
  level: number;
  polylines: Array<Array<[number, number]>>;
}

export interface DensityDoc {
  grid: number[][];
  bounds: [number, number, number, number];
  bandwidth: number;
  contours: ContourLevel[];
}

export interface JobStatus {
  id: string;
  datasetId: string;
  state: 'pending' | 'running' | 'done' | 'failed';
  progress: number;
  error: string | null;
  resultCatalogId: string | null;
}
