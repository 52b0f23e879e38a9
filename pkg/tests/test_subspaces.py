import itertools
import math

import numpy as np
import pytest

from insightmap import (
    enumerate_subspaces,
    ingest_csv,
    make_subspace,
    series_values,
    sibling_groups,
)
from insightmap.errors import BreakdownFiltered
from tests.conftest import random_dataset


def brute_force_count(cardinalities, max_depth):
    """Closed-form subspace count with minRows = 0."""
    total = 0
    dims = range(len(cardinalities))
    for depth in range(max_depth + 1):
        for combo in itertools.combinations(dims, depth):
            total += math.prod(cardinalities[d] for d in combo)
    return total


class TestEnumerate:
    def test_two_by_two_count(self):
        ds = ingest_csv(b"a,b\nx,p\nx,q\ny,p\ny,q\n")
        subs = enumerate_subspaces(ds, max_depth=2, min_rows=0)
        assert len(subs) == 9  # 1 + 4 + 4

    def test_depth_zero(self, t4):
        subs = enumerate_subspaces(t4, max_depth=0, min_rows=0)
        assert len(subs) == 1
        assert subs[0].filters == ()
        assert subs[0].rows == (0, 1, 2, 3)

    def test_min_rows_prunes(self):
        ds = ingest_csv(b"color,n\nred,1\nblue,2\nblue,3\n",
                        {"n": "measure"})
        subs = enumerate_subspaces(ds, max_depth=2, min_rows=2)
        assert all(("color", "red") not in s.filters for s in subs)

    def test_matches_closed_form(self):
        rng = np.random.default_rng(3)
        for _ in range(8):
            n_dims = int(rng.integers(1, 5))
            ds = random_dataset(rng, n_rows=40, n_dims=n_dims)
            cards = [len(f.domain) for f in ds.dimensions]
            for depth in range(4):
                subs = enumerate_subspaces(ds, max_depth=depth, min_rows=0)
                assert len(subs) == brute_force_count(cards, depth)

    def test_nesting_monotone(self):
        rng = np.random.default_rng(5)
        ds = random_dataset(rng, n_rows=30, n_dims=3)
        subs = enumerate_subspaces(ds, max_depth=2, min_rows=0)
        by_filters = {s.filters: set(s.rows) for s in subs}
        for s in subs:
            for k in range(s.depth):
                parent = tuple(f for i, f in enumerate(s.filters) if i != k)
                assert set(s.rows) <= by_filters[parent]

    def test_deterministic_order(self, t4):
        a = enumerate_subspaces(t4, 2, 0)
        b = enumerate_subspaces(t4, 2, 0)
        assert [s.filters for s in a] == [s.filters for s in b]
        depths = [s.depth for s in a]
        assert depths == sorted(depths)


class TestSiblingGroups:
    def test_empty_subspace_breakdown(self, t4):
        group = sibling_groups(t4, make_subspace(t4, []), "color")
        assert group.series == (("blue", (2, 3)), ("red", (0, 1)))

    def test_filtered_subspace(self, t4):
        sub = make_subspace(t4, [("color", "red")])
        group = sibling_groups(t4, sub, "size")
        assert group.series == (("L", (1,)), ("S", (0,)))

    def test_breakdown_already_filtered(self, t4):
        sub = make_subspace(t4, [("color", "red")])
        with pytest.raises(BreakdownFiltered):
            sibling_groups(t4, sub, "color")

    def test_partition_covers_subspace(self):
        rng = np.random.default_rng(9)
        ds = random_dataset(rng, n_rows=25, n_dims=3)
        for sub in enumerate_subspaces(ds, 1, 0):
            for dim in ds.dimensions:
                if dim.name in sub.filter_fields():
                    continue
                group = sibling_groups(ds, sub, dim.name)
                members = [set(rows) for _, rows in group.series]
                for a, b in itertools.combinations(members, 2):
                    assert not (a & b)
                union = set().union(*members) if members else set()
                missing = set(np.flatnonzero(ds.missing_mask(dim.name)))
                assert union == set(sub.rows) - missing


class TestSeriesValues:
    def test_sum_series(self, t4):
        group = sibling_groups(t4, make_subspace(t4, []), "color")
        assert series_values(t4, group, "val", "sum") == [
            ("blue", 7.0), ("red", 3.0)]

    def test_count_series(self, t4):
        group = sibling_groups(t4, make_subspace(t4, []), "color")
        assert series_values(t4, group, None, "count") == [
            ("blue", 2.0), ("red", 2.0)]

    def test_empty_series_omitted(self):
        ds = ingest_csv(b"d,e,m\nx,p,1\nx,p,2\ny,q,3\n", {"m": "measure"})
        sub = make_subspace(ds, [("d", "x")])
        group = sibling_groups(ds, sub, "e")
        # no x-rows carry e=q, so only the p series remains
        assert series_values(ds, group, "m", "sum") == [("p", 3.0)]
