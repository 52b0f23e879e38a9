"""Catalog assembly, querying, text descriptions and JSON persistence.

A catalog bundles the dataset summary, the mined insights, the 2D
projection and density field, and the full mining configuration into an
immutable, JSON-serializable artifact.  Identical inputs and seeds
produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field, replace

import numpy as np

from . import detectors as det
from . import geometry as geo
from .errors import (
    MalformedCatalog,
    SchemaVersionMismatch,
    UnknownField,
    UnknownInsight,
    UnknownType,
)
from .subspaces import (
    Subspace,
    enumerate_subspaces,
    series_values,
    sibling_groups,
)
from .tabular import DIMENSION, ORDINAL, field_distribution

SCHEMA_VERSION = "1.0"

NO_RESTRICTION = "*"


@dataclass(frozen=True)
class MiningConfig:
    max_depth: int = 2
    min_rows: int = 5
    aggregations: tuple = ("sum",)
    include_count: bool = True
    keep_threshold: float = 0.0
    embedding: str = "attribute"  # "attribute" | "instance"
    projection: str = "tsne"  # "tsne" | "mds"
    perplexity: float = 30.0
    seed: int = 42
    iters: int = 1000
    grid_w: int = 64
    grid_h: int = 64
    contour_levels: tuple = (0.25, 0.5, 0.75)
    detector: det.DetectorConfig = dc_field(default_factory=det.DetectorConfig)


@dataclass(frozen=True)
class InsightQuery:
    types: tuple | None = None
    min_score: float | None = None
    min_significance: float | None = None
    min_impact: float | None = None
    # field -> set of allowed values, possibly including "*"
    subspace_brush: dict | None = None
    breakdown_value: object = None
    limit: int | None = None
    offset: int = 0


@dataclass(frozen=True)
class Catalog:
    schema_version: str
    dataset: dict  # summary: name, rowCount, fields, distributions
    insights: tuple  # of detectors.Insight, score-descending
    subspaces: tuple  # of (Subspace, insight count), count-descending
    projection: geo.Projection | None
    density: geo.DensityField | None
    config: MiningConfig

    def insight_by_id(self, insight_id):
        for ins in self.insights:
            if ins.id == insight_id:
                return ins
        raise UnknownInsight(insight_id)

    def __eq__(self, other):
        if not isinstance(other, Catalog):
            return NotImplemented
        return to_jsonable(self) == to_jsonable(other)


# -- mining ------------------------------------------------------------


def _detector_contexts(dataset, config):
    """(measure, agg) contexts evaluated in every sibling group."""
    contexts = []
    for f in dataset.measures:
        for agg in config.aggregations:
            contexts.append((f.name, agg))
    if config.include_count:
        contexts.append((None, "count"))
    return contexts


def _run_series_detectors(dataset, subspace, breakdown_schema, series,
                          measure, agg, config):
    cfg = config.detector
    ordinal = breakdown_schema.value_kind == ORDINAL
    hits = []
    for fn in (det.detect_top_one, det.detect_attribution,
               det.detect_outlier, det.detect_clustering):
        hit = fn(series, cfg)
        if hit:
            hits.append(hit)
    if ordinal:
        for fn in (det.detect_trend, det.detect_change_point):
            hit = fn(series, cfg)
            if hit:
                hits.append(hit)
    out = []
    for hit in hits:
        payload = dict(hit.payload)
        payload.setdefault("series", [[l, float(v)] for l, v in series])
        out.append(det.make_insight(
            replace(hit, payload=payload), dataset, subspace,
            breakdown_schema.name, measure, agg))
    return out


def mine_insights(dataset, config=MiningConfig()):
    """Run enumerate -> sibling groups -> detectors over the dataset."""
    subspaces = enumerate_subspaces(dataset, config.max_depth,
                                    config.min_rows)
    contexts = _detector_contexts(dataset, config)
    insights = []
    # cache: (subspace key, breakdown, measure, agg) -> series
    series_cache = {}

    def get_series(subspace, breakdown, measure, agg):
        key = (subspace.key(), breakdown, measure, agg)
        if key not in series_cache:
            group = sibling_groups(dataset, subspace, breakdown)
            series_cache[key] = series_values(dataset, group,
                                              measure=measure, agg=agg)
        return series_cache[key]

    for subspace in subspaces:
        filtered = set(subspace.filter_fields())
        for dim in dataset.dimensions:
            if dim.name in filtered:
                continue
            for measure, agg in contexts:
                series = get_series(subspace, dim.name, measure, agg)
                if not series:
                    continue
                insights.extend(_run_series_detectors(
                    dataset, subspace, dim, series, measure, agg, config))
            # cross-measure correlation within this subspace/breakdown
            names = [f.name for f in dataset.measures]
            for i in range(len(names)):
                for j in range(i + 1, len(names)):
                    for agg in config.aggregations:
                        sa = get_series(subspace, dim.name, names[i], agg)
                        sb = get_series(subspace, dim.name, names[j], agg)
                        hit = det.detect_cross_measure_correlation(
                            sa, sb, config.detector)
                        if hit:
                            payload = dict(hit.payload)
                            payload["measure_a"] = names[i]
                            payload["measure_b"] = names[j]
                            insights.append(det.make_insight(
                                replace(hit, payload=payload), dataset,
                                subspace, dim.name,
                                (names[i], names[j]), agg))

    # correlation between sibling subspaces (differ in exactly one
    # filter value)
    groups = {}
    for idx, subspace in enumerate(subspaces):
        if subspace.depth == 0:
            continue
        for pos in range(subspace.depth):
            template = tuple(
                (f, v if k != pos else None)
                for k, (f, v) in enumerate(subspace.filters))
            groups.setdefault(template, []).append((idx, subspace))
    for template, members in sorted(groups.items(),
                                    key=lambda kv: str(kv[0])):
        if len(members) < 2:
            continue
        filtered = {f for f, _ in template}
        for ai in range(len(members)):
            for bi in range(ai + 1, len(members)):
                sub_a = members[ai][1]
                sub_b = members[bi][1]
                for dim in dataset.dimensions:
                    if dim.name in filtered:
                        continue
                    for measure, agg in contexts:
                        sa = get_series(sub_a, dim.name, measure, agg)
                        sb = get_series(sub_b, dim.name, measure, agg)
                        hit = det.detect_correlation(sa, sb,
                                                     config.detector)
                        if hit:
                            payload = dict(hit.payload)
                            payload["other_subspace_key"] = sub_b.key()
                            payload["other_subspace"] = [
                                [f, v] for f, v in sub_b.filters]
                            insights.append(det.make_insight(
                                replace(hit, payload=payload), dataset,
                                sub_a, dim.name, measure, agg))

    insights = [i for i in insights if i.score > config.keep_threshold]
    insights.sort(key=lambda i: (-i.score, i.id))
    return subspaces, insights


def build_catalog(dataset, config=MiningConfig()) -> Catalog:
    """Full pipeline: enumerate, detect, embed, project, estimate density."""
    enumerated, insights = mine_insights(dataset, config)

    projection = None
    density = None
    if insights:
        if config.embedding == "instance":
            embeddings = [geo.instance_embedding(dataset, i.subspace, i.id)
                          for i in insights]
        else:
            embeddings = [geo.attribute_embedding(dataset, i.subspace, i.id)
                          for i in insights]
        m = len(embeddings)
        if config.projection == "mds" and m >= 3:
            projection = geo.project_mds(geo.pairwise_distance(embeddings),
                                         embedding_kind=embeddings[0].kind)
        elif config.projection == "tsne" and m >= 4:
            perplexity = min(config.perplexity, (m - 1) / 3.0)
            projection = geo.project_tsne(embeddings, perplexity=perplexity,
                                          seed=config.seed,
                                          iters=config.iters)
        if projection is not None:
            density = geo.kde_density(projection.coords,
                                      grid_w=config.grid_w,
                                      grid_h=config.grid_h,
                                      contour_levels=config.contour_levels)

    by_key = {s.key(): s for s in enumerated}
    counts = {key: 0 for key in by_key}
    for ins in insights:
        key = ins.subspace.key()
        counts[key] = counts.get(key, 0) + 1
        by_key.setdefault(key, ins.subspace)
    subspace_list = sorted(
        ((by_key[k], n) for k, n in counts.items()),
        key=lambda pair: (-pair[1], pair[0].depth, pair[0].key()))

    dataset_summary = {
        "name": dataset.name,
        "rowCount": dataset.row_count,
        "fields": [
            {
                "name": f.name,
                "role": f.role,
                "valueKind": f.value_kind,
                "domain": list(f.domain),
            }
            for f in dataset.fields
        ],
        "distributions": [
            _distribution_jsonable(field_distribution(
                dataset, f.name, bin_count=10))
            for f in dataset.fields
        ],
    }
    return Catalog(
        schema_version=SCHEMA_VERSION,
        dataset=dataset_summary,
        insights=tuple(insights),
        subspaces=tuple(subspace_list),
        projection=projection,
        density=density,
        config=config,
    )


# -- descriptions ------------------------------------------------------


def _fmt(x):
    """Numbers rendered with 4 significant digits, trailing zeros kept."""
    return format(float(x), "#.4g").rstrip(".")


def _subspace_phrase(subspace):
    if not subspace.filters:
        return "the whole dataset"
    return " and ".join(f"{f} = {v}" for f, v in subspace.filters)


def _measure_phrase(insight):
    if insight.measure is None:
        return "record count"
    if isinstance(insight.measure, tuple):
        return f"{insight.agg} of {insight.measure[0]} and {insight.measure[1]}"
    return f"{insight.agg} of {insight.measure}"


def describe_insight(insight, dataset=None) -> str:
    """One-sentence English description from a per-type template."""
    where = _subspace_phrase(insight.subspace)
    what = _measure_phrase(insight)
    p = insight.payload
    t = insight.type
    if t == "TopOne":
        return (f"Within {where}, {p['breakdown_value']} has the highest "
                f"{what} across {insight.breakdown} "
                f"({_fmt(p['value'])}, {_fmt(p['z'])} standard deviations "
                f"above the rest).")
    if t == "Attribution":
        return (f"Within {where}, {p['breakdown_value']} accounts for "
                f"{_fmt(p['share'] * 100)}% of the total {what} across "
                f"{insight.breakdown}.")
    if t == "ChangePoint":
        return (f"Within {where}, {what} shifts abruptly at "
                f"{insight.breakdown} = {p['breakdown_value']} "
                f"(mean {_fmt(p['mean_before'])} before vs "
                f"{_fmt(p['mean_after'])} after).")
    if t == "Outlier":
        return (f"Within {where}, {p['breakdown_value']} is an outlier in "
                f"{what} across {insight.breakdown} "
                f"(robust z {_fmt(p['max_z'])}).")
    if t == "Trend":
        return (f"Within {where}, {what} shows an {p['direction']} trend "
                f"across {insight.breakdown} (slope {_fmt(p['slope'])}).")
    if t == "Correlation":
        other = ", ".join(f"{f} = {v}" for f, v in p["other_subspace"])
        return (f"{what.capitalize()} across {insight.breakdown} is "
                f"{'positively' if p['r'] >= 0 else 'negatively'} correlated "
                f"between {where} and {other} (r = {_fmt(p['r'])}).")
    if t == "CrossMeasureCorrelation":
        return (f"Within {where}, {insight.agg} of {p['measure_a']} and "
                f"{insight.agg} of {p['measure_b']} are "
                f"{'positively' if p['r'] >= 0 else 'negatively'} correlated "
                f"across {insight.breakdown} (r = {_fmt(p['r'])}).")
    if t == "Clustering":
        return (f"Within {where}, {what} across {insight.breakdown} splits "
                f"into two clusters of {len(p['low_cluster'])} and "
                f"{len(p['high_cluster'])} values "
                f"(gap {_fmt(p['gap'])}).")
    raise UnknownType(t)


# -- querying ----------------------------------------------------------


def query_insights(catalog, query=InsightQuery()):
    """Conjunctive filtering over the catalog; returns (page, total)."""
    known_fields = {f["name"] for f in catalog.dataset["fields"]}
    if query.types is not None:
        for t in query.types:
            if t not in det.INSIGHT_TYPES:
                raise UnknownType(t)
    if query.subspace_brush:
        for f in query.subspace_brush:
            if f not in known_fields:
                raise UnknownField(f)

    def keep(ins):
        if query.types is not None and ins.type not in query.types:
            return False
        if query.min_score is not None and ins.score < query.min_score:
            return False
        if (query.min_significance is not None
                and ins.significance < query.min_significance):
            return False
        if query.min_impact is not None and ins.impact < query.min_impact:
            return False
        if query.breakdown_value is not None:
            if ins.payload.get("breakdown_value") != query.breakdown_value:
                return False
        if query.subspace_brush:
            filters = dict(ins.subspace.filters)
            for f, allowed in query.subspace_brush.items():
                allowed = set(allowed)
                if f in filters:
                    value = filters[f]
                    if value not in allowed and str(value) not in {
                            str(a) for a in allowed}:
                        return False
                elif NO_RESTRICTION not in allowed:
                    return False
        return True

    matched = [i for i in catalog.insights if keep(i)]
    total = len(matched)
    page = matched[query.offset:]
    if query.limit is not None:
        page = page[:query.limit]
    return page, total


def related_insights(catalog, insight_id, relation="sameBreakdownValue",
                     k=5):
    """Ids related to an insight: shared breakdown value, or nearest in
    the projected plane."""
    target = catalog.insight_by_id(insight_id)
    if relation == "sameBreakdownValue":
        value = target.payload.get("breakdown_value")
        if value is None:
            return []
        return [i.id for i in catalog.insights
                if i.id != insight_id and i.breakdown == target.breakdown
                and i.payload.get("breakdown_value") == value]
    if relation == "nearestK":
        if catalog.projection is None:
            return []
        ids = [i.id for i in catalog.insights]
        coords = np.asarray(catalog.projection.coords)
        ti = ids.index(insight_id)
        dists = np.linalg.norm(coords - coords[ti], axis=1)
        order = sorted((float(dists[i]), ids[i])
                       for i in range(len(ids)) if i != ti)
        return [iid for _, iid in order[:k]]
    raise ValueError(f"unknown relation: {relation}")


# -- JSON persistence --------------------------------------------------


def _jsonable_value(v):
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.ndarray):
        return [_jsonable_value(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_jsonable_value(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable_value(x) for k, x in v.items()}
    return v


def _distribution_jsonable(dist):
    return {
        "field": dist.field,
        "kind": dist.kind,
        "bins": [[_jsonable_value(label), count]
                 for label, count in dist.bins],
    }


def _subspace_jsonable(subspace):
    return [[f, _jsonable_value(v)] for f, v in subspace.filters]


def _insight_jsonable(ins):
    measure = ins.measure
    if isinstance(measure, tuple):
        measure = list(measure)
    return {
        "id": ins.id,
        "type": ins.type,
        "subspace": _subspace_jsonable(ins.subspace),
        "breakdown": ins.breakdown,
        "measure": measure,
        "agg": ins.agg,
        "significance": float(ins.significance),
        "impact": float(ins.impact),
        "score": float(ins.score),
        "payload": _jsonable_value(ins.payload),
    }


def to_jsonable(catalog) -> dict:
    cfg = catalog.config
    doc = {
        "schemaVersion": catalog.schema_version,
        "dataset": _jsonable_value(catalog.dataset),
        "insights": [_insight_jsonable(i) for i in catalog.insights],
        "subspaces": [
            {
                "filters": _subspace_jsonable(s),
                "rowCount": s.row_count,
                "insightCount": n,
            }
            for s, n in catalog.subspaces
        ],
        "projection": None,
        "density": None,
        "config": {
            "maxDepth": cfg.max_depth,
            "minRows": cfg.min_rows,
            "aggregations": list(cfg.aggregations),
            "includeCount": cfg.include_count,
            "keepThreshold": cfg.keep_threshold,
            "embedding": cfg.embedding,
            "projection": cfg.projection,
            "perplexity": cfg.perplexity,
            "seed": cfg.seed,
            "iters": cfg.iters,
            "gridW": cfg.grid_w,
            "gridH": cfg.grid_h,
            "contourLevels": list(cfg.contour_levels),
            "detector": {
                "topOneZ": cfg.detector.top_one_z,
                "attributionShare": cfg.detector.attribution_share,
                "changePointP": cfg.detector.change_point_p,
                "outlierZ": cfg.detector.outlier_z,
                "trendR": cfg.detector.trend_r,
                "trendP": cfg.detector.trend_p,
                "correlationR": cfg.detector.correlation_r,
                "clusteringGapRatio": cfg.detector.clustering_gap_ratio,
            },
        },
    }
    if catalog.projection is not None:
        proj = catalog.projection
        doc["projection"] = {
            "method": proj.method,
            "embeddingKind": proj.embedding_kind,
            "coords": [[float(x), float(y)] for x, y in proj.coords],
            "seed": proj.seed,
            "params": _jsonable_value(proj.params),
        }
    if catalog.density is not None:
        den = catalog.density
        doc["density"] = {
            "grid": [[float(v) for v in row] for row in den.grid],
            "bounds": [float(b) for b in den.bounds],
            "bandwidth": float(den.bandwidth),
            "contours": [
                {
                    "level": level,
                    "polylines": [
                        [[float(x), float(y)] for x, y in poly]
                        for poly in polys
                    ],
                }
                for level, polys in den.contours
            ],
        }
    return doc


def serialize(catalog) -> bytes:
    """Canonical UTF-8 JSON: sorted keys, shortest round-trip decimals."""
    return json.dumps(to_jsonable(catalog), sort_keys=True,
                      separators=(",", ":"), ensure_ascii=False,
                      allow_nan=False).encode("utf-8")


_TOP_KEYS = {"schemaVersion", "dataset", "insights", "subspaces",
             "projection", "density", "config"}
_INSIGHT_KEYS = {"id", "type", "subspace", "breakdown", "measure", "agg",
                 "significance", "impact", "score", "payload"}


def _require(cond, message, path):
    if not cond:
        raise MalformedCatalog(message, path)


def deserialize(data) -> Catalog:
    """Parse and validate catalog JSON; unknown keys are rejected."""
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedCatalog(f"invalid JSON: {exc}", "") from exc
    _require(isinstance(doc, dict), "top level must be an object", "")
    version = doc.get("schemaVersion")
    _require(version is not None, "missing schemaVersion", "/schemaVersion")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"catalog version {version!r}, reader supports {SCHEMA_VERSION!r}")
    extra = set(doc) - _TOP_KEYS
    _require(not extra, f"unknown keys {sorted(extra)}", "")
    missing = _TOP_KEYS - set(doc)
    _require(not missing, f"missing keys {sorted(missing)}", "")
    _require(isinstance(doc["dataset"], dict), "dataset must be an object",
             "/dataset")
    _require(isinstance(doc["insights"], list), "insights must be a list",
             "/insights")

    insights = []
    for n, item in enumerate(doc["insights"]):
        path = f"/insights/{n}"
        _require(isinstance(item, dict), "insight must be an object", path)
        extra = set(item) - _INSIGHT_KEYS
        _require(not extra, f"unknown keys {sorted(extra)}", path)
        missing = _INSIGHT_KEYS - set(item)
        _require(not missing, f"missing keys {sorted(missing)}", path)
        _require(item["type"] in det.INSIGHT_TYPES,
                 f"unknown insight type {item['type']!r}", path + "/type")
        filters = tuple(
            (f, v if not isinstance(v, float) or not v.is_integer() else int(v))
            for f, v in item["subspace"])
        measure = item["measure"]
        if isinstance(measure, list):
            measure = tuple(measure)
        insights.append(det.Insight(
            id=item["id"],
            type=item["type"],
            subspace=Subspace(filters=filters, rows=()),
            breakdown=item["breakdown"],
            measure=measure,
            agg=item["agg"],
            significance=item["significance"],
            impact=item["impact"],
            score=item["score"],
            payload=item["payload"],
        ))

    subspaces = []
    for n, item in enumerate(doc["subspaces"]):
        path = f"/subspaces/{n}"
        _require(isinstance(item, dict), "subspace must be an object", path)
        extra = set(item) - {"filters", "rowCount", "insightCount"}
        _require(not extra, f"unknown keys {sorted(extra)}", path)
        filters = tuple(
            (f, v if not isinstance(v, float) or not v.is_integer() else int(v))
            for f, v in item["filters"])
        sub = Subspace(filters=filters,
                       rows=tuple(range(item["rowCount"])))
        subspaces.append((sub, item["insightCount"]))

    projection = None
    if doc["projection"] is not None:
        p = doc["projection"]
        _require(isinstance(p, dict), "projection must be an object",
                 "/projection")
        projection = geo.Projection(
            method=p["method"], embedding_kind=p["embeddingKind"],
            coords=np.asarray(p["coords"], dtype=float),
            seed=p["seed"], params=p["params"])

    density = None
    if doc["density"] is not None:
        d = doc["density"]
        _require(isinstance(d, dict), "density must be an object", "/density")
        density = geo.DensityField(
            grid=np.asarray(d["grid"], dtype=float),
            bounds=tuple(d["bounds"]),
            bandwidth=d["bandwidth"],
            contours=tuple(
                (c["level"],
                 tuple(np.asarray(poly, dtype=float)
                       for poly in c["polylines"]))
                for c in d["contours"]),
        )

    c = doc["config"]
    config = MiningConfig(
        max_depth=c["maxDepth"], min_rows=c["minRows"],
        aggregations=tuple(c["aggregations"]),
        include_count=c["includeCount"],
        keep_threshold=c["keepThreshold"], embedding=c["embedding"],
        projection=c["projection"], perplexity=c["perplexity"],
        seed=c["seed"], iters=c["iters"], grid_w=c["gridW"],
        grid_h=c["gridH"], contour_levels=tuple(c["contourLevels"]),
        detector=det.DetectorConfig(
            top_one_z=c["detector"]["topOneZ"],
            attribution_share=c["detector"]["attributionShare"],
            change_point_p=c["detector"]["changePointP"],
            outlier_z=c["detector"]["outlierZ"],
            trend_r=c["detector"]["trendR"],
            trend_p=c["detector"]["trendP"],
            correlation_r=c["detector"]["correlationR"],
            clustering_gap_ratio=c["detector"]["clusteringGapRatio"],
        ),
    )
    return Catalog(
        schema_version=version,
        dataset=doc["dataset"],
        insights=tuple(insights),
        subspaces=tuple(subspaces),
        projection=projection,
        density=density,
        config=config,
    )
