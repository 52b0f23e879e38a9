"""Embed subspaces, project them to 2D, and estimate a density field.

Run with:  python3 demos/geometry_tour.py
"""

import numpy as np

from insightmap import (
    attribute_embedding,
    enumerate_subspaces,
    extract_contours,
    ingest_csv,
    instance_embedding,
    kde_density,
    pairwise_distance,
    project_mds,
    project_tsne,
)

rng = np.random.default_rng(7)
lines = ["region,tier,amount"]
for _ in range(200):
    region = rng.choice(["north", "south", "east", "west"])
    tier = rng.choice(["gold", "silver", "bronze"])
    lines.append(f"{region},{tier},{rng.normal(100, 15):.2f}")
dataset = ingest_csv(("\n".join(lines) + "\n").encode(),
                     {"amount": "measure"}, name="orders")

subspaces = enumerate_subspaces(dataset, max_depth=2, min_rows=5)
print(f"{len(subspaces)} subspaces at depth <= 2")

# -- two coverage embeddings ----------------------------------------------

sub = subspaces[1]
vec_i = instance_embedding(dataset, sub)
vec_a = attribute_embedding(dataset, sub)
print(f"subspace {sub.key()}: covers {int(vec_i.values.sum())} rows;"
      f" attribute vector has {len(vec_a.values)} components")

embeddings = [attribute_embedding(dataset, s) for s in subspaces]
distances = pairwise_distance(embeddings)
print(f"distance matrix {distances.shape},"
      f" max pair distance {distances.max():.4f}")

# -- 2D layouts ------------------------------------------------------------

mds = project_mds(distances)
tsne = project_tsne(embeddings, perplexity=5.0, seed=42, iters=500)
print(f"MDS spread: x in [{mds.coords[:, 0].min():.3f},"
      f" {mds.coords[:, 0].max():.3f}]")
print(f"t-SNE spread: x in [{tsne.coords[:, 0].min():.3f},"
      f" {tsne.coords[:, 0].max():.3f}]")

# -- density field over the layout -----------------------------------------

field = kde_density(tsne.coords, grid_w=64, grid_h=64)
contours = extract_contours(field, levels=(0.25, 0.5, 0.75))
print(f"KDE bandwidth {field.bandwidth:.4f};"
      f" {sum(1 for _ in contours)} contour polylines")
