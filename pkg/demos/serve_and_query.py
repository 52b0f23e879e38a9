"""Exercise the HTTP API end to end with an in-process test client.

Run with:  python3 demos/serve_and_query.py
"""

import json
import tempfile
import time

import numpy as np
from fastapi.testclient import TestClient

from insightmap.service import create_app

# One region dwarfs the rest, so attribution/top-one patterns exist.
rng = np.random.default_rng(3)
CSV = (b"region,quarter,revenue\n" + b"".join(
    f"{region},{quarter},{rng.normal(mean, 5):.2f}\n".encode()
    for region, mean in (("north", 100), ("south", 110),
                         ("east", 90), ("west", 600))
    for quarter in ("Q1", "Q2", "Q3", "Q4")
    for _ in range(3)))

with tempfile.TemporaryDirectory() as data_dir:
    app = create_app(data_dir=data_dir)
    with TestClient(app) as client:
        # upload
        response = client.post(
            "/api/v1/datasets",
            files={"file": ("revenue.csv", CSV, "text/csv")},
            data={"overrides": json.dumps({"revenue": "measure"})})
        dataset_id = response.json()["datasetId"]
        print(f"dataset {dataset_id}")

        schema = client.get(f"/api/v1/datasets/{dataset_id}/schema").json()
        print(f"fields: {[f['name'] for f in schema['fields']]}")

        # mine asynchronously
        job_id = client.post(f"/api/v1/datasets/{dataset_id}/mine",
                             json={"maxDepth": 1, "minRows": 5}
                             ).json()["jobId"]
        while True:
            job = client.get(f"/api/v1/jobs/{job_id}").json()
            if job["state"] in ("done", "failed"):
                break
            time.sleep(0.05)
        catalog_id = job["resultCatalogId"]
        print(f"job {job['state']}, catalog {catalog_id}")

        # query with a subspace brush
        listing = client.get(
            f"/api/v1/catalogs/{catalog_id}/insights",
            params={"brush": ["region:north|*"], "limit": 5}).json()
        print(f"{listing['total']} insights in or above region=north:")
        for insight in listing["insights"]:
            print(f"  [{insight['score']:.3f}] {insight['description']}")
