import math

import numpy as np
import pytest

from insightmap import (
    attribute_embedding,
    enumerate_subspaces,
    extract_contours,
    instance_embedding,
    kde_density,
    make_subspace,
    pairwise_distance,
    project_mds,
    project_tsne,
)
from insightmap.errors import (
    MixedKinds,
    NoPoints,
    NotSymmetric,
    PerplexityTooLarge,
    TooFewPoints,
)
from insightmap.geometry import (
    DensityField,
    gaussian_kde_eval,
    row_perplexities,
    tsne_affinities,
)
from tests.conftest import random_dataset


class TestInstanceEmbedding:
    def test_unrestricted(self, t4):
        e = instance_embedding(t4, make_subspace(t4, []))
        assert e.values.tolist() == [1, 1, 1, 1]

    def test_single_filter(self, t4):
        e = instance_embedding(t4, make_subspace(t4, [("color", "red")]))
        assert e.values.tolist() == [1, 1, 0, 0]

    def test_two_filters(self, t4):
        sub = make_subspace(t4, [("color", "red"), ("size", "L")])
        assert instance_embedding(t4, sub).values.tolist() == [0, 1, 0, 0]

    def test_sum_equals_rowset(self):
        rng = np.random.default_rng(0)
        ds = random_dataset(rng, n_rows=20, n_dims=3)
        for sub in enumerate_subspaces(ds, 2, 0):
            e = instance_embedding(ds, sub)
            assert set(np.unique(e.values)) <= {0.0, 1.0}
            assert e.values.sum() == sub.row_count


class TestAttributeEmbedding:
    def test_single_filter(self, t4):
        e = attribute_embedding(t4, make_subspace(t4, [("color", "red")]))
        # component order: color blue,red then size L,S
        assert e.values.tolist() == [0.0, 0.5, 0.25, 0.25]
        assert e.component_index == (("color", "blue"), ("color", "red"),
                                     ("size", "L"), ("size", "S"))

    def test_unrestricted(self, t4):
        e = attribute_embedding(t4, make_subspace(t4, []))
        assert e.values.tolist() == [0.5, 0.5, 0.5, 0.5]

    def test_empty_rowset_zero_vector(self, t4):
        sub = make_subspace(t4, [("color", "red"), ("size", "S")])
        # red,S matches row 0; craft an empty one via impossible combo
        empty = make_subspace(t4, [("color", "blue"), ("size", "L")])
        assert sub.row_count == 1
        e = attribute_embedding(
            t4, type(sub)(filters=sub.filters, rows=()))
        assert not e.values.any()

    def test_component_sums(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            ds = random_dataset(rng, n_rows=20, n_dims=3)
            for sub in enumerate_subspaces(ds, 1, 0):
                e = attribute_embedding(ds, sub)
                offset = 0
                for f in ds.dimensions:
                    part = e.values[offset:offset + len(f.domain)]
                    assert part.sum() == pytest.approx(
                        sub.row_count / ds.row_count, abs=1e-12)
                    offset += len(f.domain)

    def test_measure_components_flag(self, t4):
        e = attribute_embedding(t4, make_subspace(t4, []),
                                include_measures=True, measure_bins=8)
        assert len(e.values) == 4 + 8
        assert e.values[4:].sum() == pytest.approx(1.0)


class TestPairwiseDistance:
    def test_zero_diagonal(self, t4):
        subs = enumerate_subspaces(t4, 1, 0)
        emb = [instance_embedding(t4, s) for s in subs]
        d = pairwise_distance(emb)
        assert np.all(np.diag(d) == 0.0)

    def test_red_blue_distance(self, t4):
        red = instance_embedding(t4, make_subspace(t4, [("color", "red")]))
        blue = instance_embedding(t4, make_subspace(t4, [("color", "blue")]))
        d = pairwise_distance([red, blue])
        assert d[0, 1] == pytest.approx(2.0)

    def test_symmetry_random(self, t4):
        rng = np.random.default_rng(2)
        from insightmap.geometry import InsightEmbedding
        emb = [InsightEmbedding("", "instanceCoverage", rng.normal(size=12))
               for _ in range(10)]
        d = pairwise_distance(emb)
        assert np.allclose(d, d.T)

    def test_mixed_kinds_rejected(self, t4):
        a = instance_embedding(t4, make_subspace(t4, []))
        b = attribute_embedding(t4, make_subspace(t4, []))
        with pytest.raises(MixedKinds):
            pairwise_distance([a, b])


def coords_distances(coords):
    diff = coords[:, None, :] - coords[None, :, :]
    return np.sqrt((diff ** 2).sum(axis=2))


class TestMDS:
    def test_right_triangle(self):
        d = np.array([[0, 3, 4], [3, 0, 5], [4, 5, 0]], dtype=float)
        proj = project_mds(d)
        out = coords_distances(proj.coords)
        assert np.allclose(np.sort(out[np.triu_indices(3, 1)]),
                           [3, 4, 5], atol=1e-6)

    def test_zero_matrix(self):
        proj = project_mds(np.zeros((4, 4)))
        assert np.allclose(proj.coords, 0.0)

    def test_recovers_planar_configuration(self):
        rng = np.random.default_rng(3)
        pts = rng.normal(size=(12, 2)) * 5
        d = coords_distances(pts)
        proj = project_mds(d)
        out = coords_distances(proj.coords)
        assert np.allclose(out, d, atol=1e-6)

    def test_not_symmetric(self):
        d = np.array([[0, 1, 2], [3, 0, 1], [2, 1, 0]], dtype=float)
        with pytest.raises(NotSymmetric):
            project_mds(d)

    def test_too_few_points(self):
        with pytest.raises(TooFewPoints):
            project_mds(np.zeros((2, 2)))

    def test_deterministic_sign(self):
        rng = np.random.default_rng(4)
        pts = rng.normal(size=(8, 2))
        d = coords_distances(pts)
        a = project_mds(d).coords
        b = project_mds(d).coords
        assert np.array_equal(a, b)
        for c in range(2):
            peak = np.argmax(np.abs(a[:, c]))
            assert a[peak, c] >= 0


class TestTSNE:
    def test_affinities_properties(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=(15, 4))
        p = tsne_affinities(x, perplexity=4)
        assert np.allclose(p, p.T)
        assert np.all(p >= 0)
        assert p.sum() == pytest.approx(1.0, abs=1e-9)

    def test_row_perplexity_target(self):
        rng = np.random.default_rng(6)
        x = rng.normal(size=(20, 3))
        achieved = row_perplexities(x, perplexity=5.0)
        assert np.allclose(achieved, 5.0, atol=1e-3)

    def test_deterministic_for_fixed_seed(self):
        rng = np.random.default_rng(7)
        x = rng.normal(size=(10, 5))
        a = project_tsne(x, perplexity=3.0, seed=9, iters=150)
        b = project_tsne(x, perplexity=3.0, seed=9, iters=150)
        assert np.array_equal(a.coords, b.coords)

    def test_perplexity_too_large(self):
        with pytest.raises(PerplexityTooLarge):
            project_tsne(np.zeros((6, 2)), perplexity=3.0)

    def test_too_few_points(self):
        with pytest.raises(TooFewPoints):
            project_tsne(np.zeros((3, 2)), perplexity=0.5)

    def test_two_blob_separation(self):
        rng = np.random.default_rng(8)
        a = rng.normal(size=(20, 6)) * 0.1
        b = rng.normal(size=(20, 6)) * 0.1 + 10.0
        x = np.vstack([a, b])
        proj = project_tsne(x, perplexity=10.0, seed=1, iters=1000)
        d = coords_distances(proj.coords)
        intra = max(d[:20, :20].max(), d[20:, 20:].max())
        inter = d[:20, 20:].mean()
        assert inter > intra

    def test_kl_decreases(self):
        rng = np.random.default_rng(9)
        x = rng.normal(size=(12, 4))
        _, (kl_first, kl_last) = project_tsne(
            x, perplexity=3.0, seed=2, iters=1000, return_kl=True)
        assert math.isfinite(kl_first) and math.isfinite(kl_last)
        assert kl_last < kl_first


class TestKDE:
    def test_single_point_value(self):
        field = kde_density(np.array([[0.0, 0.0]]), bandwidth=1.0,
                            grid_w=65, grid_h=65)
        # odd grid puts a sample exactly on the point
        assert field.grid.max() == pytest.approx(1 / (2 * math.pi),
                                                 abs=1e-12)

    def test_density_non_negative(self):
        rng = np.random.default_rng(10)
        field = kde_density(rng.normal(size=(30, 2)), grid_w=32, grid_h=32)
        assert np.all(field.grid >= 0)

    def test_normalization(self):
        rng = np.random.default_rng(11)
        pts = rng.normal(size=(100, 2))
        field = kde_density(pts, grid_w=128, grid_h=128)
        xmin, xmax, ymin, ymax = field.bounds
        dx = (xmax - xmin) / 127
        dy = (ymax - ymin) / 127
        assert field.grid.sum() * dx * dy == pytest.approx(1.0, rel=0.02)

    def test_no_points(self):
        with pytest.raises(NoPoints):
            kde_density(np.zeros((0, 2)))

    def test_linearity_in_points(self):
        rng = np.random.default_rng(12)
        a = rng.normal(size=(10, 2))
        b = rng.normal(size=(15, 2)) + 1.0
        queries = rng.normal(size=(40, 2))
        h = 0.7
        fa = gaussian_kde_eval(a, h, queries)
        fb = gaussian_kde_eval(b, h, queries)
        fu = gaussian_kde_eval(np.vstack([a, b]), h, queries)
        blended = (len(a) * fa + len(b) * fb) / (len(a) + len(b))
        assert np.allclose(fu, blended, atol=1e-12)


class TestContours:
    def test_single_bump_nested_rings(self):
        field = kde_density(np.array([[0.0, 0.0]]), bandwidth=1.0,
                            grid_w=64, grid_h=64)
        for level, polys in field.contours:
            assert len(polys) == 1
            ring = polys[0]
            assert np.allclose(ring[0], ring[-1])
        radii = [np.abs(polys[0]).max()
                 for _, polys in field.contours]
        assert radii == sorted(radii, reverse=True)

    def test_flat_field_no_contours(self):
        field = DensityField(grid=np.zeros((8, 8)),
                             bounds=(0, 1, 0, 1), bandwidth=1.0)
        assert extract_contours(field) == ()

    def test_two_bumps_two_rings(self):
        pts = np.vstack([np.zeros((5, 2)), np.full((5, 2), 10.0)])
        field = kde_density(pts, bandwidth=1.0, grid_w=96, grid_h=96)
        top = [polys for level, polys in field.contours][-1]
        assert len(top) == 2
