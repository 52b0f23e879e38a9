"""Subspace lattice enumeration and sibling-group construction.

A subspace is a conjunction of field=value equality filters in canonical
form (filter fields sorted by schema order, at most one per field).
Enumeration walks the lattice depth-first in deterministic order and
prunes anti-monotonically on the minimum row count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BreakdownFiltered
from .tabular import aggregate


@dataclass(frozen=True)
class Subspace:
    # ordered (dimension name, domain value) pairs, schema order
    filters: tuple
    # resolved, sorted row indices
    rows: tuple

    @property
    def depth(self):
        return len(self.filters)

    @property
    def row_count(self):
        return len(self.rows)

    def filter_fields(self):
        return tuple(f for f, _ in self.filters)

    def key(self) -> str:
        """Canonical text form, used in insight ids and JSON."""
        if not self.filters:
            return "*"
        return ",".join(f"{f}={v}" for f, v in self.filters)


@dataclass(frozen=True)
class SiblingGroup:
    subspace: Subspace
    breakdown: str
    # ordered (breakdown value, row-index tuple) pairs, domain order,
    # empty series omitted
    series: tuple


def resolve_rows(dataset, filters):
    """Row indices matching every filter; rows missing a filtered field
    are excluded."""
    mask = np.ones(dataset.row_count, dtype=bool)
    for field_name, value in filters:
        schema = dataset.field(field_name)
        code = schema.domain.index(value)
        mask &= dataset.codes(field_name) == code
    return tuple(int(i) for i in np.flatnonzero(mask))


def make_subspace(dataset, filters) -> Subspace:
    """Build a canonical subspace from (field, value) pairs."""
    order = {f.name: i for i, f in enumerate(dataset.fields)}
    filters = tuple(sorted(filters, key=lambda fv: order[fv[0]]))
    fields = [f for f, _ in filters]
    if len(set(fields)) != len(fields):
        raise ValueError("at most one filter per field")
    return Subspace(filters=filters, rows=resolve_rows(dataset, filters))


def enumerate_subspaces(dataset, max_depth=2, min_rows=5):
    """All canonical subspaces with depth <= max_depth and at least
    min_rows rows, in deterministic (depth, schema, domain) order.

    A subspace below min_rows is not emitted and not extended.
    """
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    dims = dataset.dimensions
    out = []

    def extend(filters, mask, start, depth):
        subspace = Subspace(
            filters=tuple(filters),
            rows=tuple(int(i) for i in np.flatnonzero(mask)),
        )
        if subspace.row_count < min_rows:
            return
        out.append((depth, subspace))
        if depth == max_depth:
            return
        for di in range(start, len(dims)):
            dim = dims[di]
            codes = dataset.codes(dim.name)
            for k, value in enumerate(dim.domain):
                child = mask & (codes == k)
                if not child.any() and min_rows > 0:
                    continue
                extend(filters + [(dim.name, value)], child, di + 1,
                       depth + 1)

    extend([], np.ones(dataset.row_count, dtype=bool), 0, 0)
    out.sort(key=lambda pair: pair[0])  # stable: keeps DFS order per depth
    return [s for _, s in out]


def sibling_groups(dataset, subspace, breakdown) -> SiblingGroup:
    """Partition a subspace by the values of an unfiltered dimension."""
    if breakdown in subspace.filter_fields():
        raise BreakdownFiltered(breakdown)
    schema = dataset.field(breakdown)
    codes = dataset.codes(breakdown)
    rows = np.asarray(subspace.rows, dtype=np.int64)
    series = []
    for k, value in enumerate(schema.domain):
        member = rows[codes[rows] == k] if len(rows) else rows
        if len(member):
            series.append((value, tuple(int(i) for i in member)))
    return SiblingGroup(subspace=subspace, breakdown=breakdown,
                        series=tuple(series))


def series_values(dataset, group, measure=None, agg="sum", order_by=None):
    """Aggregate each sibling series; one (breakdown value, number) pair
    per non-empty series in domain order."""
    out = []
    for value, rows in group.series:
        out.append((value, aggregate(dataset, rows, measure=measure,
                                     agg=agg, order_by=order_by)))
    return out
