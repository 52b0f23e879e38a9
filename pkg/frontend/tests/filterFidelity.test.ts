/** Filter fidelity against the live API: brushing the PCP, the score
 * scatter, and the type filter in any order must yield the identical
 * visible-insight id set, equal to a direct API oracle query. */

import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import {
  initialState,
  insightQueryParams,
  RequestSequencer,
  ViewState,
  withBrush,
  withScoreBrush,
  withTypeFilter,
} from '../src/state.js';
import { leagueCsv, RunningServer, startServer } from './helpers/server.js';

let server: RunningServer;
let api: ApiClient;
let catalogId: string;

beforeAll(async () => {
  server = await startServer();
  api = new ApiClient(server.baseUrl);
  const { datasetId } = await api.uploadDataset(
    'league.csv', leagueCsv(), { year: 'dimension' });
  const { jobId } = await api.mine(datasetId, { maxDepth: 1, minRows: 5 });
  const job = await api.waitForJob(jobId);
  expect(job.state).toBe('done');
  catalogId = job.resultCatalogId as string;
}, 60_000);

afterAll(() => {
  server?.stop();
});

type FilterStep = (state: ViewState) => ViewState;

const applyPcpBrush: FilterStep =
  (s) => withBrush(s, 'league', ['NBA', '*']);
const applyScoreBrush: FilterStep =
  (s) => withScoreBrush(s, { x0: 0.2, y0: 0, x1: 1, y1: 1 });
const applyTypeFilter: FilterStep =
  (s) => withTypeFilter(s, ['TopOne', 'ChangePoint', 'Attribution']);

function permutations<T>(items: T[]): T[][] {
  if (items.length <= 1) {
    return [items];
  }
  return items.flatMap((item, i) =>
    permutations([...items.slice(0, i), ...items.slice(i + 1)])
      .map((rest) => [item, ...rest]));
}

describe('filter fidelity', () => {
  it('all 6 filter orders yield the identical visible set, equal to '
     + 'the API oracle', async () => {
    const steps = [applyPcpBrush, applyScoreBrush, applyTypeFilter];
    const orders = permutations(steps);
    expect(orders).toHaveLength(6);

    const idSets: string[][] = [];
    for (const order of orders) {
      let state = { ...initialState(), catalogId };
      for (const step of order) {
        state = step(state);
        // the UI re-derives the visible set after every filter change
        await api.visibleInsights(state);
      }
      const page = await api.visibleInsights(state);
      idSets.push(page.insights.map((i) => i.id).sort());
    }

    for (const ids of idSets.slice(1)) {
      expect(ids).toEqual(idSets[0]);
    }

    const oracle = await api.insights(catalogId, [
      ['types', 'Attribution,ChangePoint,TopOne'],
      ['minSignificance', '0.2'],
      ['minImpact', '0'],
      ['brush', 'league:*|NBA'],
    ]);
    expect(idSets[0]).toEqual(oracle.insights.map((i) => i.id).sort());
    expect(idSets[0].length).toBeGreaterThan(0);
    expect(oracle.total).toBeGreaterThan(0);
  }, 60_000);

  it('brushing "*" only keeps insights from unfiltered subspaces',
     async () => {
    const state = withBrush(
      { ...initialState(), catalogId }, 'league', ['*']);
    const page = await api.visibleInsights(state);
    expect(page.total).toBeGreaterThan(0);
    for (const insight of page.insights) {
      expect(insight.subspace.some(([f]) => f === 'league')).toBe(false);
    }
  });

  it('empty filters show the whole catalog', async () => {
    const all = await api.insights(catalogId);
    const visible = await api.visibleInsights(
      { ...initialState(), catalogId });
    expect(visible.total).toBe(all.total);
  });

  it('stale responses are discarded by sequence number', () => {
    const seq = new RequestSequencer();
    const first = seq.issue();
    const second = seq.issue();
    expect(seq.accept(second)).toBe(true);
    expect(seq.accept(first)).toBe(false);
  });

  it('query params are order-independent for equal states', () => {
    let a = { ...initialState(), catalogId };
    a = applyPcpBrush(applyScoreBrush(applyTypeFilter(a)));
    let b = { ...initialState(), catalogId };
    b = applyTypeFilter(applyScoreBrush(applyPcpBrush(b)));
    expect(insightQueryParams(a)).toEqual(insightQueryParams(b));
  });
});
