import numpy as np
import pytest

from insightmap import ingest_csv

T4_CSV = b"color,size,val\nred,S,1\nred,L,2\nblue,S,3\nblue,L,4\n"


@pytest.fixture
def t4():
    """Toy 4-row dataset used throughout the examples."""
    return ingest_csv(T4_CSV, {"val": "measure"}, name="t4")


def random_dataset(rng, n_rows=None, n_dims=None, n_measures=1):
    """Small random dataset with no missing values."""
    n_rows = n_rows or int(rng.integers(4, 30))
    n_dims = n_dims or int(rng.integers(1, 4))
    header = []
    columns = []
    for d in range(n_dims):
        header.append(f"d{d}")
        card = int(rng.integers(2, 5))
        values = [f"v{k}" for k in range(card)]
        columns.append([values[int(rng.integers(0, card))]
                        for _ in range(n_rows)])
    for m in range(n_measures):
        header.append(f"m{m}")
        columns.append([f"{rng.normal():.6f}" for _ in range(n_rows)])
    lines = [",".join(header)]
    for i in range(n_rows):
        lines.append(",".join(col[i] for col in columns))
    csv = ("\n".join(lines) + "\n").encode()
    overrides = {f"m{m}": "measure" for m in range(n_measures)}
    return ingest_csv(csv, overrides, name="random")
