/** Thin typed client for the /api/v1 endpoints. */

import { insightQueryParams, ViewState } from './state.js';
import type {
  DatasetSchema,
  DensityDoc,
  Distribution,
  Insight,
  InsightPage,
  JobStatus,
  ProjectionDoc,
  SubspaceEntry,
} from './types.js';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let code = 'http_error';
    let message = response.statusText;
    try {
      const body = await response.json();
      code = body.code ?? code;
      message = body.message ?? message;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, code, message);
  }
  return response.json() as Promise<T>;
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private url(path: string, params?: Array<[string, string]>): string {
    const query = params && params.length > 0
      ? '?' + new URLSearchParams(params).toString()
      : '';
    return `${this.baseUrl}/api/v1${path}${query}`;
  }

  async health(): Promise<{ status: string }> {
    return asJson(await fetch(this.url('/health')));
  }

  async uploadDataset(
    name: string, csv: string, overrides: Record<string, string> = {},
  ): Promise<{ datasetId: string; rowCount: number }> {
    const form = new FormData();
    form.append('file', new Blob([csv], { type: 'text/csv' }), name);
    form.append('overrides', JSON.stringify(overrides));
    return asJson(await fetch(this.url('/datasets'), {
      method: 'POST',
      body: form,
    }));
  }

  async schema(datasetId: string): Promise<DatasetSchema> {
    return asJson(await fetch(this.url(`/datasets/${datasetId}/schema`)));
  }

  async distribution(
    datasetId: string, field: string, bins = 10,
  ): Promise<Distribution> {
    return asJson(await fetch(this.url(
      `/datasets/${datasetId}/fields/${field}/distribution`,
      [['bins', String(bins)]])));
  }

  async mine(
    datasetId: string, config: Record<string, unknown> = {},
  ): Promise<{ jobId: string }> {
    return asJson(await fetch(this.url(`/datasets/${datasetId}/mine`), {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(config),
    }));
  }

  async job(jobId: string): Promise<JobStatus> {
    return asJson(await fetch(this.url(`/jobs/${jobId}`)));
  }

  async waitForJob(jobId: string, pollMs = 50): Promise<JobStatus> {
    for (;;) {
      const status = await this.job(jobId);
      if (status.state === 'done' || status.state === 'failed') {
        return status;
      }
      await new Promise((resolve) => setTimeout(resolve, pollMs));
    }
  }

  async insights(
    catalogId: string, params: Array<[string, string]> = [],
  ): Promise<InsightPage> {
    return asJson(await fetch(
      this.url(`/catalogs/${catalogId}/insights`, params)));
  }

  /** The visible insight set for the current filters. */
  async visibleInsights(state: ViewState): Promise<InsightPage> {
    if (state.catalogId === null) {
      return { total: 0, insights: [] };
    }
    return this.insights(state.catalogId, insightQueryParams(state));
  }

  async insight(catalogId: string, insightId: string): Promise<Insight> {
    return asJson(await fetch(this.url(
      `/catalogs/${catalogId}/insights/${encodeURIComponent(insightId)}`)));
  }

  async related(
    catalogId: string, insightId: string,
    relation: 'sameBreakdownValue' | 'nearestK' = 'sameBreakdownValue',
    k = 5,
  ): Promise<{ related: Insight[] }> {
    return asJson(await fetch(this.url(
      `/catalogs/${catalogId}/insights/${encodeURIComponent(insightId)}`
      + '/related',
      [['relation', relation], ['k', String(k)]])));
  }

  async projection(catalogId: string): Promise<ProjectionDoc | null> {
    return asJson(await fetch(this.url(`/catalogs/${catalogId}/projection`)));
  }

  async density(catalogId: string): Promise<DensityDoc | null> {
    return asJson(await fetch(this.url(`/catalogs/${catalogId}/density`)));
  }

  async subspaces(
    catalogId: string, sort: 'insightCount' | 'filters' = 'insightCount',
  ): Promise<{ subspaces: SubspaceEntry[] }> {
    return asJson(await fetch(this.url(
      `/catalogs/${catalogId}/subspaces`, [['sort', sort]])));
  }
}
