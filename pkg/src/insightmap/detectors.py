"""Insight detectors over aggregated sibling series.

Each detector takes an ordered list of (breakdown value, number) pairs
and either fires with a significance in [0, 1] plus a type-specific
payload, or stays silent.  Firing thresholds are calibration knobs held
in DetectorConfig.  Final insights carry score = significance * impact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

INSIGHT_TYPES = (
    "TopOne",
    "Attribution",
    "ChangePoint",
    "Outlier",
    "Trend",
    "Correlation",
    "CrossMeasureCorrelation",
    "Clustering",
)


@dataclass(frozen=True)
class DetectorConfig:
    top_one_z: float = 3.0
    attribution_share: float = 0.5
    change_point_p: float = 0.01
    outlier_z: float = 3.0
    trend_r: float = 0.7
    trend_p: float = 0.05
    correlation_r: float = 0.8
    # calibrated so iid-noise series of moderate length rarely fire
    clustering_gap_ratio: float = 6.0


@dataclass(frozen=True)
class Detection:
    type: str
    significance: float
    payload: dict


@dataclass(frozen=True)
class Insight:
    id: str
    type: str
    subspace: object  # Subspace
    breakdown: str
    measure: object  # str, (str, str) for cross-measure, or None
    agg: str
    significance: float
    impact: float
    score: float
    payload: dict


def normal_cdf(z):
    """Standard normal CDF via the error function (|error| <= 1e-7)."""
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def student_t_sf2(t, df):
    """Two-sided Student-t p-value via the regularized incomplete beta."""
    if df <= 0:
        return 1.0
    if math.isinf(t):
        return 0.0
    x = df / (df + t * t)
    return float(betainc(df / 2.0, 0.5, x))


def pearson_r(x, y):
    """Pearson correlation; 0 when either side is constant."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xm = x - x.mean()
    ym = y - y.mean()
    denom = math.sqrt(float(xm @ xm) * float(ym @ ym))
    if denom == 0.0:
        return 0.0
    return float(xm @ ym) / denom


def _labels_values(series):
    labels = [label for label, _ in series]
    values = np.array([v for _, v in series], dtype=float)
    return labels, values


def detect_top_one(series, config=DetectorConfig()):
    """Fires when the unique maximum stands >= z_threshold sample
    standard deviations above the rest."""
    if len(series) < 4:
        return None
    labels, values = _labels_values(series)
    order = np.argsort(-values, kind="stable")
    top, second = order[0], order[1]
    if values[top] <= values[second]:
        return None  # no strict maximum
    rest = np.delete(values, top)
    std = float(rest.std(ddof=1))
    if std <= 0.0:
        z = math.inf
    else:
        z = (float(values[top]) - float(rest.mean())) / std
    if z < config.top_one_z:
        return None
    return Detection(
        type="TopOne",
        significance=normal_cdf(z) if math.isfinite(z) else 1.0,
        payload={
            "breakdown_value": labels[top],
            "z": z if math.isfinite(z) else 1e9,
            "value": float(values[top]),
        },
    )


def detect_attribution(series, config=DetectorConfig()):
    """Fires when one share of a non-negative total reaches the share
    threshold; ties go to the lexicographically smallest label."""
    if len(series) < 2:
        return None
    labels, values = _labels_values(series)
    if np.any(values < 0):
        return None
    total = float(values.sum())
    if total <= 0.0:
        return None
    shares = values / total
    max_share = float(shares.max())
    tied = [i for i in range(len(series)) if shares[i] == max_share]
    best = min(tied, key=lambda i: str(labels[i]))
    if shares[best] < config.attribution_share:
        return None
    return Detection(
        type="Attribution",
        significance=float(shares[best]),
        payload={
            "breakdown_value": labels[best],
            "share": float(shares[best]),
            "shares": [[labels[i], float(shares[i])] for i in range(len(series))],
        },
    )


def welch_t(prefix, suffix):
    """Welch t statistic and Welch-Satterthwaite df; (inf, df) when both
    segments are constant but their means differ."""
    a = np.asarray(prefix, dtype=float)
    b = np.asarray(suffix, dtype=float)
    va = float(a.var(ddof=1))
    vb = float(b.var(ddof=1))
    diff = float(a.mean() - b.mean())
    sa, sb = va / len(a), vb / len(b)
    if sa + sb == 0.0:
        if diff == 0.0:
            return 0.0, 1.0
        return math.inf, float(len(a) + len(b) - 2)
    t = diff / math.sqrt(sa + sb)
    df = (sa + sb) ** 2 / (sa * sa / (len(a) - 1) + sb * sb / (len(b) - 1))
    return t, df


def detect_change_point(series, config=DetectorConfig()):
    """Best mean-shift split under a Welch two-sample test; fires when
    the two-sided p-value clears the threshold.  Ordinal series only."""
    if len(series) < 6:
        return None
    labels, values = _labels_values(series)
    best = None
    for s in range(2, len(values) - 1):
        t, df = welch_t(values[:s], values[s:])
        stat = abs(t)
        if best is None or stat > best[0]:
            best = (stat, s, df)
    stat, s, df = best
    p = student_t_sf2(stat, df)
    if p > config.change_point_p:
        return None
    return Detection(
        type="ChangePoint",
        significance=1.0 - p,
        payload={
            "split_index": int(s),
            "breakdown_value": labels[s],
            "mean_before": float(values[:s].mean()),
            "mean_after": float(values[s:].mean()),
            "t": stat if math.isfinite(stat) else 1e9,
            "p": p,
        },
    )


def detect_outlier(series, config=DetectorConfig()):
    """Robust z-score (0.6745 |v - median| / MAD) outlier test."""
    if len(series) < 5:
        return None
    labels, values = _labels_values(series)
    med = float(np.median(values))
    mad = float(np.median(np.abs(values - med)))
    if mad > 0.0:
        z = 0.6745 * np.abs(values - med) / mad
    else:
        # MAD = 0: any value off the median is infinitely surprising
        z = np.where(values != med, math.inf, 0.0)
    zmax = float(np.max(z))
    if zmax < config.outlier_z:
        return None
    outliers = [labels[i] for i in range(len(series))
                if z[i] >= config.outlier_z]
    return Detection(
        type="Outlier",
        significance=min(1.0, zmax / 6.0),
        payload={
            "breakdown_value": outliers[0],
            "outliers": outliers,
            "max_z": zmax if math.isfinite(zmax) else 1e9,
            "median": med,
        },
    )


def trend_statistics(values):
    """Least-squares slope, Pearson r, and slope-test p against rank."""
    values = np.asarray(values, dtype=float)
    n = len(values)
    ranks = np.arange(n, dtype=float)
    r = pearson_r(ranks, values)
    rm = ranks - ranks.mean()
    slope = float(rm @ (values - values.mean())) / float(rm @ rm)
    if abs(r) >= 1.0:
        p = 0.0
    elif r == 0.0:
        p = 1.0
    else:
        t = r * math.sqrt((n - 2) / (1.0 - r * r))
        p = student_t_sf2(abs(t), n - 2)
    return slope, r, p


def detect_trend(series, config=DetectorConfig()):
    """Linear trend against the ordinal rank; fires on strong, significant
    correlation."""
    if len(series) < 5:
        return None
    labels, values = _labels_values(series)
    slope, r, p = trend_statistics(values)
    if abs(r) < config.trend_r or p > config.trend_p:
        return None
    return Detection(
        type="Trend",
        significance=abs(r),
        payload={
            "slope": slope,
            "r": r,
            "p": p,
            "direction": "increasing" if slope > 0 else "decreasing",
        },
    )


def detect_correlation(series_a, series_b, config=DetectorConfig()):
    """Pearson correlation between two aligned series over a shared
    breakdown; fires on |r| >= threshold."""
    common = [label for label, _ in series_a
              if label in {l for l, _ in series_b}]
    if len(common) < 5:
        return None
    a_map = dict(series_a)
    b_map = dict(series_b)
    a = [a_map[l] for l in common]
    b = [b_map[l] for l in common]
    r = pearson_r(a, b)
    if abs(r) < config.correlation_r:
        return None
    return Detection(
        type="Correlation",
        significance=abs(r),
        payload={
            "r": r,
            "labels": list(common),
            "series_a": [float(v) for v in a],
            "series_b": [float(v) for v in b],
        },
    )


def detect_cross_measure_correlation(series_a, series_b,
                                     config=DetectorConfig()):
    """Same statistic as detect_correlation, across two measures within
    one subspace."""
    hit = detect_correlation(series_a, series_b, config)
    if hit is None:
        return None
    return Detection(type="CrossMeasureCorrelation",
                     significance=hit.significance,
                     payload=hit.payload)


def detect_clustering(series, config=DetectorConfig()):
    """Splits sorted values at the dominant consecutive gap; fires when
    the gap dwarfs the remaining gaps and both clusters have >= 2
    members."""
    if len(series) < 4:
        return None
    labels, values = _labels_values(series)
    order = np.argsort(values, kind="stable")
    ordered = values[order]
    gaps = np.diff(ordered)
    j = int(np.argmax(gaps))
    g = float(gaps[j])
    others = np.delete(gaps, j)
    mean_other = float(others.mean())
    if mean_other <= 0.0:
        return None
    left = j + 1
    right = len(values) - left
    if left < 2 or right < 2:
        return None
    if g < config.clustering_gap_ratio * mean_other:
        return None
    low = [labels[i] for i in order[:left]]
    high = [labels[i] for i in order[left:]]
    return Detection(
        type="Clustering",
        significance=min(1.0, g / (2.0 * config.clustering_gap_ratio
                                   * mean_other)),
        payload={
            "gap": g,
            "gap_ratio": g / mean_other,
            "low_cluster": low,
            "high_cluster": high,
        },
    )


def impact(dataset, subspace, measure=None):
    """Fraction of the dataset the subspace covers: measure mass when a
    measure is given, row count otherwise."""
    if measure is None:
        if dataset.row_count == 0:
            return 0.0
        return subspace.row_count / dataset.row_count
    values = dataset.measure_values(measure)
    total = float(np.nansum(np.abs(values)))
    if total == 0.0:
        return 0.0
    rows = np.asarray(subspace.rows, dtype=np.int64)
    part = float(np.nansum(np.abs(values[rows]))) if len(rows) else 0.0
    return part / total


def make_insight(detection, dataset, subspace, breakdown, measure, agg):
    """Attach impact and a deterministic id to a raw detection."""
    impact_measure = None
    if isinstance(measure, str):
        impact_measure = measure
    elif isinstance(measure, tuple):
        impact_measure = measure[0]
    imp = impact(dataset, subspace, impact_measure)
    significance = min(1.0, max(0.0, detection.significance))
    measure_key = "|".join(measure) if isinstance(measure, tuple) else (measure or "")
    extra = detection.payload.get("other_subspace_key", "")
    insight_id = ";".join([
        detection.type, subspace.key(), breakdown or "", measure_key,
        agg, extra,
    ]).rstrip(";")
    return Insight(
        id=insight_id,
        type=detection.type,
        subspace=subspace,
        breakdown=breakdown,
        measure=measure,
        agg=agg,
        significance=significance,
        impact=imp,
        score=significance * imp,
        payload=detection.payload,
    )
