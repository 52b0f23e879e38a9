"""Insight embeddings, similarity, 2D projection and density estimation.

Two embeddings are supported: instance coverage (binary row-membership
vector of length N) and attribute coverage (per dimension-value covered
fraction over N).  Similarity is Euclidean distance; projections are
exact t-SNE and classical (Torgerson) MDS; density is an isotropic
Gaussian KDE with marching-squares contour extraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from skimage import measure as _sk_measure

from .errors import (
    MixedKinds,
    NoPoints,
    NotSymmetric,
    PerplexityTooLarge,
    TooFewPoints,
)

INSTANCE_COVERAGE = "instanceCoverage"
ATTRIBUTE_COVERAGE = "attributeCoverage"


@dataclass(frozen=True)
class InsightEmbedding:
    insight_id: str
    kind: str
    values: np.ndarray
    # attributeCoverage: position -> (field, value); None otherwise
    component_index: tuple | None = None


@dataclass(frozen=True)
class Projection:
    method: str  # "tsne" | "mds"
    embedding_kind: str
    coords: np.ndarray  # (M, 2)
    seed: int
    params: dict


@dataclass(frozen=True)
class DensityField:
    grid: np.ndarray  # (H, W), row index = y
    bounds: tuple  # (xmin, xmax, ymin, ymax)
    bandwidth: float
    contours: tuple = ()


# -- embeddings --------------------------------------------------------


def instance_embedding(dataset, subspace, insight_id=""):
    """Binary length-N row-membership vector."""
    values = np.zeros(dataset.row_count)
    if subspace.rows:
        values[np.asarray(subspace.rows, dtype=np.int64)] = 1.0
    return InsightEmbedding(insight_id=insight_id, kind=INSTANCE_COVERAGE,
                            values=values)


def attribute_component_index(dataset):
    """(field, value) pairs in schema order then domain order, one per
    dimension value."""
    index = []
    for f in dataset.dimensions:
        for value in f.domain:
            index.append((f.name, value))
    return tuple(index)


def attribute_embedding(dataset, subspace, insight_id="",
                        include_measures=False, measure_bins=8):
    """Per dimension-value covered-row fraction over the dataset size.

    With include_measures, appends equi-width-binned coverage components
    for each measure field (measures have unbounded domains, so they are
    excluded by default).
    """
    rows = np.asarray(subspace.rows, dtype=np.int64)
    parts = []
    index = list(attribute_component_index(dataset))
    for f in dataset.dimensions:
        counts = np.zeros(len(f.domain))
        if len(rows):
            codes = dataset.codes(f.name)[rows]
            codes = codes[codes >= 0]
            counts = np.bincount(codes, minlength=len(f.domain)).astype(float)
        parts.append(counts / dataset.row_count)
    if include_measures:
        for f in dataset.measures:
            lo, hi = f.domain
            counts = np.zeros(measure_bins)
            if len(rows) and hi > lo:
                vals = dataset.measure_values(f.name)[rows]
                vals = vals[~np.isnan(vals)]
                edges = np.linspace(lo, hi, measure_bins + 1)
                idx = np.clip(np.searchsorted(edges, vals, side="right") - 1,
                              0, measure_bins - 1)
                counts = np.bincount(idx, minlength=measure_bins).astype(float)
            elif len(rows):
                vals = dataset.measure_values(f.name)[rows]
                counts[0] = float(np.count_nonzero(~np.isnan(vals)))
            parts.append(counts / dataset.row_count)
            index.extend((f.name, b) for b in range(measure_bins))
    values = np.concatenate(parts) if parts else np.zeros(0)
    return InsightEmbedding(insight_id=insight_id, kind=ATTRIBUTE_COVERAGE,
                            values=values, component_index=tuple(index))


def pairwise_distance(embeddings):
    """Symmetric Euclidean distance matrix with an exactly zero diagonal."""
    if not embeddings:
        return np.zeros((0, 0))
    kinds = {e.kind for e in embeddings}
    if len(kinds) != 1:
        raise MixedKinds(str(sorted(kinds)))
    lengths = {len(e.values) for e in embeddings}
    if len(lengths) != 1:
        raise MixedKinds("embedding lengths differ")
    x = np.stack([e.values for e in embeddings])
    sq = np.sum(x * x, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d2, 0.0, out=d2)
    d = np.sqrt(d2)
    d = 0.5 * (d + d.T)
    np.fill_diagonal(d, 0.0)
    return d


# -- classical MDS -----------------------------------------------------


def project_mds(distance_matrix, embedding_kind=ATTRIBUTE_COVERAGE):
    """Classical (Torgerson) MDS to 2D.

    Double-centers the squared distances, takes the top-2 eigenpairs of
    the Gram matrix, scales eigenvectors by sqrt(eigenvalue) (negatives
    clamped to 0) and fixes the sign so the largest-magnitude coordinate
    in each column is positive.
    """
    d = np.asarray(distance_matrix, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1] or not np.allclose(d, d.T):
        raise NotSymmetric("distance matrix must be square and symmetric")
    m = d.shape[0]
    if m < 3:
        raise TooFewPoints(f"MDS needs >= 3 points, got {m}")
    j = np.eye(m) - np.ones((m, m)) / m
    b = -0.5 * j @ (d * d) @ j
    b = 0.5 * (b + b.T)
    evals, evecs = np.linalg.eigh(b)
    order = np.argsort(evals)[::-1][:2]
    coords = np.zeros((m, 2))
    for c, idx in enumerate(order):
        lam = max(float(evals[idx]), 0.0)
        col = evecs[:, idx] * math.sqrt(lam)
        peak = int(np.argmax(np.abs(col)))
        if col[peak] < 0:
            col = -col
        coords[:, c] = col
    return Projection(method="mds", embedding_kind=embedding_kind,
                      coords=coords, seed=0, params={})


# -- exact t-SNE -------------------------------------------------------


def _conditional_affinities(sq_dist, perplexity, tol=1e-5, max_iter=100):
    """Per-point conditional P with bandwidths found by binary search so
    each row's entropy matches log(perplexity) within tol."""
    m = sq_dist.shape[0]
    target = math.log(perplexity)
    p = np.zeros((m, m))
    for i in range(m):
        d = np.delete(sq_dist[i], i)
        beta, beta_lo, beta_hi = 1.0, 0.0, math.inf
        for _ in range(max_iter):
            w = np.exp(-d * beta)
            s = w.sum()
            if s <= 0:
                h, row = 0.0, w
            else:
                row = w / s
                h = float(beta * (d @ row) + math.log(s))
            if abs(h - target) < tol:
                break
            if h > target:
                beta_lo = beta
                beta = beta * 2.0 if beta_hi is math.inf else 0.5 * (beta + beta_hi)
            else:
                beta_hi = beta
                beta = beta / 2.0 if beta_lo == 0.0 else 0.5 * (beta + beta_lo)
        row = np.insert(row, i, 0.0)
        p[i] = row
    return p


def tsne_affinities(points, perplexity):
    """Symmetrized joint P matrix: (P_{j|i} + P_{i|j}) / (2M)."""
    x = np.asarray(points, dtype=float)
    sq = np.sum(x * x, axis=1)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (x @ x.T), 0.0)
    cond = _conditional_affinities(d2, perplexity)
    return (cond + cond.T) / (2.0 * x.shape[0])


def row_perplexities(points, perplexity):
    """Achieved per-row perplexity of the conditional affinities."""
    x = np.asarray(points, dtype=float)
    sq = np.sum(x * x, axis=1)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (x @ x.T), 0.0)
    cond = _conditional_affinities(d2, perplexity)
    out = []
    for i in range(cond.shape[0]):
        row = np.delete(cond[i], i)
        row = row[row > 0]
        h = float(-(row @ np.log(row)))
        out.append(math.exp(h))
    return np.array(out)


def project_tsne(embeddings, perplexity=30.0, seed=42, iters=1000,
                 learning_rate=200.0, early_exaggeration=12.0,
                 exaggeration_iters=250, return_kl=False):
    """Exact t-SNE with momentum gradient descent.

    Momentum 0.5 switching to 0.8 at iteration 250; early exaggeration
    multiplies P for the first `exaggeration_iters` iterations; the
    layout is initialized from a seeded Gaussian scaled by 1e-4 and is
    deterministic for a fixed seed.
    """
    if isinstance(embeddings, np.ndarray):
        x = embeddings.astype(float)
        kind = "raw"
    else:
        kinds = {e.kind for e in embeddings}
        if len(kinds) > 1:
            raise MixedKinds(str(sorted(kinds)))
        x = np.stack([e.values for e in embeddings])
        kind = kinds.pop() if kinds else ATTRIBUTE_COVERAGE
    m = x.shape[0]
    if m < 4:
        raise TooFewPoints(f"t-SNE needs >= 4 points, got {m}")
    if perplexity > (m - 1) / 3.0:
        raise PerplexityTooLarge(
            f"perplexity {perplexity} > (M-1)/3 = {(m - 1) / 3.0:.2f}")

    p = tsne_affinities(x, perplexity)
    p = np.maximum(p, 1e-12)

    rng = np.random.default_rng(seed)
    y = rng.standard_normal((m, 2)) * 1e-4
    update = np.zeros_like(y)
    gains = np.ones_like(y)
    kl_first = None
    kl_last = None

    for it in range(iters):
        pm = p * early_exaggeration if it < exaggeration_iters else p
        sq = np.sum(y * y, axis=1)
        num = 1.0 / (1.0 + sq[:, None] + sq[None, :] - 2.0 * (y @ y.T))
        np.fill_diagonal(num, 0.0)
        q_norm = num.sum()
        q = np.maximum(num / q_norm, 1e-12)
        w = (pm - q) * num
        grad = 4.0 * (y * w.sum(axis=1)[:, None] - w @ y)
        momentum = 0.5 if it < 250 else 0.8
        # adaptive per-coordinate gains keep lr 200 stable
        same_sign = np.sign(grad) == np.sign(update)
        gains = np.where(same_sign, gains * 0.8, gains + 0.2)
        np.maximum(gains, 0.01, out=gains)
        update = momentum * update - learning_rate * gains * grad
        y = y + update
        y = y - y.mean(axis=0)
        if return_kl and (it == 0 or it == iters - 1):
            kl = float(np.sum(p * np.log(p / q)))
            if it == 0:
                kl_first = kl
            kl_last = kl

    proj = Projection(
        method="tsne", embedding_kind=kind, coords=y, seed=seed,
        params={
            "perplexity": perplexity,
            "iters": iters,
            "learning_rate": learning_rate,
            "early_exaggeration": early_exaggeration,
            "exaggeration_iters": exaggeration_iters,
        },
    )
    if return_kl:
        return proj, (kl_first, kl_last)
    return proj


# -- KDE and contours --------------------------------------------------


def gaussian_kde_eval(points, bandwidth, queries):
    """Density of an isotropic 2D Gaussian KDE at the query points."""
    points = np.asarray(points, dtype=float)
    queries = np.asarray(queries, dtype=float)
    h2 = bandwidth * bandwidth
    d2 = np.sum((queries[:, None, :] - points[None, :, :]) ** 2, axis=2)
    k = np.exp(-d2 / (2.0 * h2))
    return k.sum(axis=1) / (len(points) * 2.0 * math.pi * h2)


def silverman_bandwidth(points):
    """Mean of the per-axis Silverman rule-of-thumb bandwidths,
    floored at 1e-6."""
    points = np.asarray(points, dtype=float)
    m = len(points)
    hs = []
    for axis in range(2):
        col = points[:, axis]
        std = float(col.std(ddof=1)) if m > 1 else 0.0
        iqr = float(np.subtract(*np.percentile(col, [75, 25])))
        spread = min(std, iqr / 1.34) if iqr > 0 else std
        hs.append(0.9 * spread * m ** (-0.2) if spread > 0 else 0.0)
    return max(float(np.mean(hs)), 1e-6)


def kde_density(coords, bandwidth=None, grid_w=128, grid_h=128,
                contour_levels=(0.25, 0.5, 0.75)):
    """Gaussian KDE sampled on a grid over the bounding box padded by
    3h per side, plus marching-squares contours at fractions of the
    grid maximum."""
    points = np.asarray(coords, dtype=float).reshape(-1, 2)
    if len(points) == 0:
        raise NoPoints("KDE needs at least one point")
    h = float(bandwidth) if bandwidth is not None else silverman_bandwidth(points)
    if h <= 0:
        raise ValueError("bandwidth must be > 0")
    pad = 3.0 * h
    xmin, ymin = points.min(axis=0) - pad
    xmax, ymax = points.max(axis=0) + pad
    xs = np.linspace(xmin, xmax, grid_w)
    ys = np.linspace(ymin, ymax, grid_h)
    gx, gy = np.meshgrid(xs, ys)
    queries = np.column_stack([gx.ravel(), gy.ravel()])
    grid = gaussian_kde_eval(points, h, queries).reshape(grid_h, grid_w)
    field = DensityField(grid=grid, bounds=(float(xmin), float(xmax),
                                            float(ymin), float(ymax)),
                         bandwidth=h)
    contours = extract_contours(field, contour_levels)
    return DensityField(grid=grid, bounds=field.bounds, bandwidth=h,
                        contours=contours)


def extract_contours(field, levels=(0.25, 0.5, 0.75)):
    """Marching-squares iso-lines at `level * max(grid)` for each level.

    Returns a tuple of (level value, polyline list); polylines are
    (x, y) arrays, closed when first == last vertex.  A flat field
    yields no contours.
    """
    grid = field.grid
    peak = float(grid.max())
    if peak <= 0.0:
        return ()
    xmin, xmax, ymin, ymax = field.bounds
    h, w = grid.shape
    dx = (xmax - xmin) / (w - 1) if w > 1 else 0.0
    dy = (ymax - ymin) / (h - 1) if h > 1 else 0.0
    out = []
    for frac in levels:
        iso = frac * peak
        lines = _sk_measure.find_contours(grid, iso)
        polys = []
        for line in lines:
            xy = np.column_stack([xmin + line[:, 1] * dx,
                                  ymin + line[:, 0] * dy])
            polys.append(xy)
        out.append((float(iso), tuple(polys)))
    return tuple(out)
