"""HTTP facade over datasets, mining jobs and catalog queries.

State layout under the data directory:
  datasets/<id>.csv        uploaded source files
  datasets/<id>.meta.json  name + typing overrides
  catalogs/<id>.json       serialized catalogs

Mining runs asynchronously in a worker thread; at most one running job
per dataset.  Catalogs are immutable once written, so all GETs are
side-effect-free.
"""

from __future__ import annotations

import hashlib
import json
import threading
import uuid
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from fastapi import FastAPI, File, Form, Query, Request, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import catalog as cat
from . import tabular
from .errors import (
    EmptyInput,
    InsightMapError,
    RaggedRow,
    UnknownField,
    UnknownInsight,
    UnknownOverrideField,
    UnknownType,
)

API_PREFIX = "/api/v1"


class ApiError(Exception):
    def __init__(self, status, code, message, detail=None):
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail
        super().__init__(message)


@dataclass
class MiningJob:
    id: str
    dataset_id: str
    state: str = "queued"  # queued -> running -> done | failed
    progress: float = 0.0
    error: str | None = None
    result_catalog_id: str | None = None

    def to_json(self):
        return {
            "id": self.id,
            "datasetId": self.dataset_id,
            "state": self.state,
            "progress": self.progress,
            "error": self.error,
            "resultCatalogId": self.result_catalog_id,
        }


class Store:
    """Disk-backed dataset/catalog registry plus in-memory jobs."""

    def __init__(self, data_dir):
        self.root = Path(data_dir)
        (self.root / "datasets").mkdir(parents=True, exist_ok=True)
        (self.root / "catalogs").mkdir(parents=True, exist_ok=True)
        self._datasets = {}
        self._catalogs = {}
        self.jobs = {}
        self.lock = threading.Lock()

    def add_dataset(self, content, name, overrides):
        dataset = tabular.ingest_csv(content, typing_overrides=overrides,
                                     name=name)
        digest = hashlib.sha256(
            content + json.dumps(overrides, sort_keys=True).encode()
        ).hexdigest()[:12]
        (self.root / "datasets" / f"{digest}.csv").write_bytes(content)
        (self.root / "datasets" / f"{digest}.meta.json").write_text(
            json.dumps({"name": name, "overrides": overrides}))
        self._datasets[digest] = dataset
        return digest, dataset

    def dataset(self, dataset_id):
        if dataset_id not in self._datasets:
            path = self.root / "datasets" / f"{dataset_id}.csv"
            meta_path = self.root / "datasets" / f"{dataset_id}.meta.json"
            if not path.exists():
                raise ApiError(404, "dataset_not_found",
                               f"no dataset {dataset_id}")
            meta = json.loads(meta_path.read_text()) if meta_path.exists() \
                else {"name": dataset_id, "overrides": {}}
            self._datasets[dataset_id] = tabular.ingest_csv(
                path.read_bytes(), typing_overrides=meta["overrides"],
                name=meta["name"])
        return self._datasets[dataset_id]

    def save_catalog(self, catalog):
        data = cat.serialize(catalog)
        digest = hashlib.sha256(data).hexdigest()[:12]
        (self.root / "catalogs" / f"{digest}.json").write_bytes(data)
        self._catalogs[digest] = catalog
        return digest

    def catalog(self, catalog_id):
        if catalog_id not in self._catalogs:
            path = self.root / "catalogs" / f"{catalog_id}.json"
            if not path.exists():
                raise ApiError(404, "catalog_not_found",
                               f"no catalog {catalog_id}")
            self._catalogs[catalog_id] = cat.deserialize(path.read_bytes())
        return self._catalogs[catalog_id]

    def running_job_for(self, dataset_id):
        return any(j.dataset_id == dataset_id
                   and j.state in ("queued", "running")
                   for j in self.jobs.values())


def _config_from_body(body):
    body = dict(body or {})
    detector_body = body.pop("detector", {})
    mapping = {
        "maxDepth": "max_depth", "minRows": "min_rows",
        "aggregations": "aggregations", "includeCount": "include_count",
        "keepThreshold": "keep_threshold", "embedding": "embedding",
        "projection": "projection", "perplexity": "perplexity",
        "seed": "seed", "iters": "iters", "gridW": "grid_w",
        "gridH": "grid_h", "contourLevels": "contour_levels",
    }
    kwargs = {}
    for key, value in body.items():
        if key not in mapping:
            raise ApiError(422, "unknown_config_key",
                           f"unknown mining config key {key!r}")
        if key in ("aggregations", "contourLevels"):
            value = tuple(value)
        kwargs[mapping[key]] = value
    if detector_body:
        det_mapping = {
            "topOneZ": "top_one_z", "attributionShare": "attribution_share",
            "changePointP": "change_point_p", "outlierZ": "outlier_z",
            "trendR": "trend_r", "trendP": "trend_p",
            "correlationR": "correlation_r",
            "clusteringGapRatio": "clustering_gap_ratio",
        }
        det_kwargs = {}
        for key, value in detector_body.items():
            if key not in det_mapping:
                raise ApiError(422, "unknown_config_key",
                               f"unknown detector config key {key!r}")
            det_kwargs[det_mapping[key]] = value
        from .detectors import DetectorConfig
        kwargs["detector"] = DetectorConfig(**det_kwargs)
    return cat.MiningConfig(**kwargs)


def parse_brush(brush_params):
    """Decode repeated `field:val1|val2|*` brush query parameters."""
    brush = {}
    for item in brush_params:
        if ":" not in item:
            raise ApiError(422, "bad_brush",
                           f"brush must be field:values, got {item!r}")
        field_name, values = item.split(":", 1)
        brush[field_name] = set(values.split("|"))
    return brush


def create_app(data_dir="./data", cors_origins=("*",)) -> FastAPI:
    store = Store(data_dir)
    app = FastAPI(title="insightmap")
    app.state.store = store
    app.add_middleware(
        CORSMiddleware, allow_origins=list(cors_origins),
        allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message,
                     "detail": exc.detail})

    @app.exception_handler(InsightMapError)
    async def _lib_error(request: Request, exc: InsightMapError):
        status = 422
        code = "invalid_input"
        if isinstance(exc, (UnknownField, UnknownType, UnknownInsight)):
            status, code = 404, "not_found"
        return JSONResponse(status_code=status,
                            content={"code": code, "message": str(exc),
                                     "detail": type(exc).__name__})

    @app.get(API_PREFIX + "/health")
    def health():
        return {"status": "ok"}

    @app.post(API_PREFIX + "/datasets")
    async def upload_dataset(file: UploadFile = File(...),
                             overrides: str = Form(default="{}")):
        content = await file.read()
        try:
            override_map = json.loads(overrides)
        except json.JSONDecodeError:
            raise ApiError(422, "bad_overrides",
                           "overrides must be a JSON object")
        try:
            dataset_id, dataset = store.add_dataset(
                content, file.filename or "dataset", override_map)
        except RaggedRow as exc:
            raise ApiError(422, "ragged_row", str(exc),
                           detail={"rowIndex": exc.row_index})
        except (EmptyInput, UnknownOverrideField) as exc:
            raise ApiError(422, "bad_csv", str(exc))
        return {"datasetId": dataset_id, "rowCount": dataset.row_count}

    @app.get(API_PREFIX + "/datasets/{dataset_id}/schema")
    def dataset_schema(dataset_id: str):
        dataset = store.dataset(dataset_id)
        return {
            "name": dataset.name,
            "rowCount": dataset.row_count,
            "fields": [
                {"name": f.name, "role": f.role,
                 "valueKind": f.value_kind, "domain": list(f.domain)}
                for f in dataset.fields
            ],
        }

    @app.get(API_PREFIX + "/datasets/{dataset_id}/fields/{name}/distribution")
    def field_dist(dataset_id: str, name: str, bins: int = 10):
        dataset = store.dataset(dataset_id)
        try:
            dist = tabular.field_distribution(dataset, name, bin_count=bins)
        except KeyError:
            raise ApiError(404, "field_not_found", f"no field {name}")
        return cat._distribution_jsonable(dist)

    @app.post(API_PREFIX + "/datasets/{dataset_id}/mine")
    async def mine(dataset_id: str, request: Request):
        dataset = store.dataset(dataset_id)
        try:
            body = await request.json()
        except Exception:
            body = {}
        config = _config_from_body(body)
        with store.lock:
            if store.running_job_for(dataset_id):
                raise ApiError(409, "mining_conflict",
                               f"dataset {dataset_id} is already being mined")
            job = MiningJob(id=uuid.uuid4().hex[:12], dataset_id=dataset_id)
            store.jobs[job.id] = job

        def work():
            job.state = "running"
            job.progress = 0.1
            try:
                catalog = cat.build_catalog(dataset, config)
                job.progress = 0.9
                job.result_catalog_id = store.save_catalog(catalog)
                job.progress = 1.0
                job.state = "done"
            except Exception as exc:  # report, don't crash the worker
                job.error = str(exc)
                job.state = "failed"

        threading.Thread(target=work, daemon=True).start()
        return {"jobId": job.id}

    @app.get(API_PREFIX + "/jobs/{job_id}")
    def job_status(job_id: str):
        job = store.jobs.get(job_id)
        if job is None:
            raise ApiError(404, "job_not_found", f"no job {job_id}")
        return job.to_json()

    @app.get(API_PREFIX + "/catalogs/{catalog_id}")
    def get_catalog(catalog_id: str):
        return cat.to_jsonable(store.catalog(catalog_id))

    @app.get(API_PREFIX + "/catalogs/{catalog_id}/insights")
    def get_insights(catalog_id: str,
                     types: str | None = None,
                     minScore: float | None = None,
                     minSignificance: float | None = None,
                     minImpact: float | None = None,
                     breakdownValue: str | None = None,
                     brush: list[str] = Query(default=[]),
                     limit: int | None = None,
                     offset: int = 0):
        catalog = store.catalog(catalog_id)
        query = cat.InsightQuery(
            types=tuple(types.split(",")) if types else None,
            min_score=minScore,
            min_significance=minSignificance,
            min_impact=minImpact,
            subspace_brush=parse_brush(brush) if brush else None,
            breakdown_value=breakdownValue,
            limit=limit,
            offset=offset,
        )
        page, total = cat.query_insights(catalog, query)
        return {
            "total": total,
            "insights": [
                dict(cat._insight_jsonable(i),
                     description=cat.describe_insight(i))
                for i in page
            ],
        }

    @app.get(API_PREFIX + "/catalogs/{catalog_id}/insights/{insight_id:path}/related")
    def get_related(catalog_id: str, insight_id: str,
                    relation: str = "sameBreakdownValue", k: int = 5):
        catalog = store.catalog(catalog_id)
        if relation not in ("sameBreakdownValue", "nearestK"):
            raise ApiError(422, "bad_relation",
                           f"unknown relation {relation!r}")
        related = cat.related_insights(catalog, insight_id,
                                       relation=relation, k=k)
        return {"related": [
            dict(cat._insight_jsonable(catalog.insight_by_id(rid)),
                 description=cat.describe_insight(
                     catalog.insight_by_id(rid)))
            for rid in related
        ]}

    @app.get(API_PREFIX + "/catalogs/{catalog_id}/insights/{insight_id:path}")
    def get_insight(catalog_id: str, insight_id: str):
        catalog = store.catalog(catalog_id)
        insight = catalog.insight_by_id(insight_id)
        return dict(cat._insight_jsonable(insight),
                    description=cat.describe_insight(insight))

    @app.get(API_PREFIX + "/catalogs/{catalog_id}/projection")
    def get_projection(catalog_id: str):
        return cat.to_jsonable(store.catalog(catalog_id))["projection"]

    @app.get(API_PREFIX + "/catalogs/{catalog_id}/density")
    def get_density(catalog_id: str):
        return cat.to_jsonable(store.catalog(catalog_id))["density"]

    @app.get(API_PREFIX + "/catalogs/{catalog_id}/subspaces")
    def get_subspaces(catalog_id: str, sort: str = "insightCount"):
        catalog = store.catalog(catalog_id)
        items = [
            {"filters": cat._subspace_jsonable(s),
             "rowCount": s.row_count, "insightCount": n}
            for s, n in catalog.subspaces
        ]
        if sort != "insightCount":
            items.sort(key=lambda item: json.dumps(item["filters"]))
        return {"subspaces": items}

    return app


def run_server(host="127.0.0.1", port=8321, data_dir="./data"):
    """Blocking server entry point; binds first so a busy port fails fast
    and an ephemeral port (0) can be reported."""
    import socket

    import uvicorn

    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    sock.bind((host, port))
    actual_port = sock.getsockname()[1]
    print(f"insightmap serving on http://{host}:{actual_port}", flush=True)
    app = create_app(data_dir=data_dir)
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning"))
    server.run(sockets=[sock])
