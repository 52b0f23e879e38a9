"""Columnar table loading, role inference, aggregation and field distributions.

A dataset is an immutable row-major table whose fields are split into
dimensions (categorical or ordinal) and measures (numeric).  Dimension
domains are fixed at ingest time in a deterministic order so every
downstream vector is reproducible.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AllMissing,
    EmptyInput,
    EmptyRowSet,
    MissingOrderBy,
    RaggedRow,
    UnknownOverrideField,
)

DIMENSION = "dimension"
MEASURE = "measure"

CATEGORICAL = "categorical"
ORDINAL = "ordinal"
NUMERIC = "numeric"

AGGREGATIONS = ("sum", "average", "minimum", "count", "gradient")

# All-numeric columns with at most this many distinct integer values are
# treated as ordinal dimensions (year-like, rating-like columns).
ORDINAL_DISTINCT_CUTOFF = 12


def _parse_number(text):
    """Parse a decimal number, or return None.

    Decimal point only; inf/nan tokens are rejected so they read as
    categorical text rather than numeric values.
    """
    try:
        value = float(text)
    except ValueError:
        return None
    if math.isnan(value) or math.isinf(value):
        return None
    return value


def _canonical_number(value: float):
    """Ints stay ints so domains and CSV round-trips are exact."""
    if float(value).is_integer():
        return int(value)
    return float(value)


@dataclass(frozen=True)
class FieldSchema:
    name: str
    role: str
    value_kind: str
    # dimensions: ordered tuple of distinct values; measures: (min, max)
    domain: tuple

    @property
    def is_dimension(self):
        return self.role == DIMENSION


@dataclass(frozen=True)
class FieldDistribution:
    field: str
    bins: tuple  # of (label-or-(lo, hi), count)
    kind: str  # "histogram" | "frequency"


class Dataset:
    """Immutable typed table.

    Dimension cells are held as integer codes into the field's domain
    (-1 for missing); measure cells as float arrays with NaN for missing.
    """

    def __init__(self, name, fields, columns):
        self.name = name
        self.fields = list(fields)
        self._by_name = {f.name: f for f in self.fields}
        if len(self._by_name) != len(self.fields):
            raise ValueError("duplicate field names")
        self._columns = columns  # name -> np.ndarray (codes or floats)
        lengths = {len(c) for c in columns.values()}
        if len(lengths) != 1:
            raise ValueError("column length mismatch")
        self.row_count = lengths.pop()
        if self.row_count < 1:
            raise EmptyInput("dataset must contain at least one row")

    # -- schema access -------------------------------------------------

    def field(self, name) -> FieldSchema:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"no such field: {name}") from None

    @property
    def dimensions(self):
        return [f for f in self.fields if f.role == DIMENSION]

    @property
    def measures(self):
        return [f for f in self.fields if f.role == MEASURE]

    # -- cell access ---------------------------------------------------

    def codes(self, name) -> np.ndarray:
        """Integer domain codes for a dimension field (-1 = missing)."""
        f = self.field(name)
        if f.role != DIMENSION:
            raise ValueError(f"{name} is not a dimension")
        return self._columns[name]

    def measure_values(self, name) -> np.ndarray:
        f = self.field(name)
        if f.role != MEASURE:
            raise ValueError(f"{name} is not a measure")
        return self._columns[name]

    def missing_mask(self, name) -> np.ndarray:
        f = self.field(name)
        col = self._columns[name]
        if f.role == DIMENSION:
            return col < 0
        return np.isnan(col)

    def cell(self, row, name):
        f = self.field(name)
        col = self._columns[name]
        if f.role == DIMENSION:
            code = int(col[row])
            return None if code < 0 else f.domain[code]
        value = float(col[row])
        return None if math.isnan(value) else value

    # -- serialization back to CSV ------------------------------------

    def to_csv(self) -> bytes:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f.name for f in self.fields])
        for i in range(self.row_count):
            row = []
            for f in self.fields:
                value = self.cell(i, f.name)
                if value is None:
                    row.append("")
                elif isinstance(value, float):
                    row.append(repr(_canonical_number(value)))
                else:
                    row.append(str(value))
            writer.writerow(row)
        return buf.getvalue().encode("utf-8")


def infer_role(column):
    """Infer (role, value_kind) from raw cell strings.

    Missing cells (empty string / None) are ignored.  All-numeric columns
    with few distinct integer values become ordinal dimensions; other
    all-numeric columns are measures; anything else is categorical.
    """
    present = [c for c in column if c is not None and c != ""]
    if not present:
        raise AllMissing("column has no non-missing values")
    numbers = []
    integer_literals = True
    for c in present:
        value = _parse_number(c)
        if value is None:
            return DIMENSION, CATEGORICAL
        numbers.append(value)
        text = str(c).strip()
        if not (text.lstrip("+-").isdigit() and float(value).is_integer()):
            integer_literals = False
    if integer_literals:
        distinct = {int(v) for v in numbers}
        if len(distinct) <= ORDINAL_DISTINCT_CUTOFF:
            return DIMENSION, ORDINAL
    return MEASURE, NUMERIC


def _build_dimension(name, raw, kind):
    values = []
    for c in raw:
        if c is None or c == "":
            values.append(None)
        elif kind == ORDINAL:
            number = _parse_number(c)
            values.append(_canonical_number(number) if number is not None else c)
        else:
            values.append(c)
    present = [v for v in values if v is not None]
    if kind == ORDINAL and all(isinstance(v, (int, float)) for v in present):
        domain = tuple(sorted(set(present)))
    else:
        kind = CATEGORICAL
        domain = tuple(sorted({str(v) for v in present}))
        values = [None if v is None else str(v) for v in values]
    index = {v: i for i, v in enumerate(domain)}
    codes = np.array([index[v] if v is not None else -1 for v in values],
                     dtype=np.int32)
    schema = FieldSchema(name=name, role=DIMENSION, value_kind=kind,
                         domain=domain)
    return schema, codes


def _build_measure(name, raw):
    values = np.full(len(raw), np.nan)
    for i, c in enumerate(raw):
        if c is None or c == "":
            continue
        number = _parse_number(c)
        if number is None:
            raise ValueError(f"field {name}: non-numeric value {c!r} "
                             "in measure column")
        values[i] = number
    finite = values[~np.isnan(values)]
    domain = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 0.0)
    schema = FieldSchema(name=name, role=MEASURE, value_kind=NUMERIC,
                         domain=domain)
    return schema, values


def ingest_csv(source, typing_overrides=None, name="dataset"):
    """Load a Dataset from an RFC-4180 CSV byte stream with a header row.

    `typing_overrides` maps field name to role ("dimension"/"measure")
    and wins over inference.  Empty string cells are missing.
    """
    if isinstance(source, (bytes, bytearray)):
        text = source.decode("utf-8")
    elif hasattr(source, "read"):
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    else:
        raise TypeError("source must be bytes or a readable stream")

    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise EmptyInput("no header row")
    header = rows[0]
    data_rows = rows[1:]
    if not data_rows:
        raise EmptyInput("no data rows")
    for i, row in enumerate(data_rows):
        if len(row) != len(header):
            raise RaggedRow(i, len(header), len(row))

    overrides = dict(typing_overrides or {})
    for key in overrides:
        if key not in header:
            raise UnknownOverrideField(key)

    fields = []
    columns = {}
    for j, col_name in enumerate(header):
        raw = [row[j] for row in data_rows]
        inferred_role, kind = infer_role(raw)
        role = overrides.get(col_name, inferred_role)
        if role == DIMENSION:
            if kind == NUMERIC:
                # numeric column forced to dimension: ordinal
                kind = ORDINAL
            schema, col = _build_dimension(col_name, raw, kind)
        else:
            schema, col = _build_measure(col_name, raw)
        fields.append(schema)
        columns[col_name] = col
    return Dataset(name=name, fields=fields, columns=columns)


def _least_squares_slope(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xm = x - x.mean()
    denom = float(xm @ xm)
    if denom == 0.0:
        return 0.0
    return float(xm @ (y - y.mean())) / denom


def aggregate(dataset, rows, measure=None, agg="sum", order_by=None):
    """Aggregate a measure over a row-index set.

    `count` needs no measure and counts rows; every other aggregation
    skips missing cells.  `gradient` is the least-squares slope of the
    measure against the order-by field's domain rank.
    """
    if agg not in AGGREGATIONS:
        raise ValueError(f"unknown aggregation: {agg}")
    rows = np.asarray(sorted(rows), dtype=np.int64)
    if agg == "count":
        if measure is None:
            return float(len(rows))
        present = ~dataset.missing_mask(measure)[rows] if len(rows) else np.array([], bool)
        return float(present.sum())
    if measure is None:
        raise ValueError(f"aggregation {agg} requires a measure")
    values = dataset.measure_values(measure)[rows] if len(rows) else np.array([])
    keep = ~np.isnan(values)
    values = values[keep]
    rows = rows[keep]
    if agg == "gradient":
        if order_by is None:
            raise MissingOrderBy("gradient requires an order-by field")
        if len(values) < 2:
            raise EmptyRowSet("gradient requires at least two rows")
        codes = dataset.codes(order_by)[rows]
        ok = codes >= 0
        if int(ok.sum()) < 2:
            raise EmptyRowSet("gradient requires at least two ordered rows")
        return _least_squares_slope(codes[ok], values[ok])
    if len(values) == 0:
        raise EmptyRowSet(f"{agg} over an empty row set")
    if agg == "sum":
        return float(values.sum())
    if agg == "average":
        return float(values.mean())
    return float(values.min())  # minimum


def field_distribution(dataset, field_name, bin_count=10) -> FieldDistribution:
    """Per-value frequencies for dimensions, equi-width bins for measures."""
    schema = dataset.field(field_name)
    if schema.role == DIMENSION:
        codes = dataset.codes(field_name)
        counts = np.bincount(codes[codes >= 0], minlength=len(schema.domain))
        bins = tuple((value, int(counts[k]))
                     for k, value in enumerate(schema.domain))
        return FieldDistribution(field=field_name, bins=bins, kind="frequency")
    if bin_count < 1:
        raise ValueError("bin_count must be >= 1 for measures")
    values = dataset.measure_values(field_name)
    values = values[~np.isnan(values)]
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        return FieldDistribution(field=field_name,
                                 bins=(((lo, hi), int(values.size)),),
                                 kind="histogram")
    edges = np.linspace(lo, hi, bin_count + 1)
    # right-inclusive only on the last bin
    idx = np.clip(np.searchsorted(edges, values, side="right") - 1,
                  0, bin_count - 1)
    counts = np.bincount(idx, minlength=bin_count)
    bins = tuple(((float(edges[k]), float(edges[k + 1])), int(counts[k]))
                 for k in range(bin_count))
    return FieldDistribution(field=field_name, bins=bins, kind="histogram")
