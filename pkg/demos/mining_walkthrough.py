"""Mine a small yearly-league table and walk through the catalog.

Run with:  python3 demos/mining_walkthrough.py
"""

import numpy as np

from insightmap import (
    MiningConfig,
    build_catalog,
    describe_insight,
    ingest_csv,
    query_insights,
    InsightQuery,
)

# -- build a toy table with two planted patterns ------------------------
# Scores shift upward in 1968, and one league has three times the teams
# (and roughly double the score) of the other.

rng = np.random.default_rng(42)
lines = ["year,league,score"]
for year in range(1960, 1980):
    for league, base, teams in (("NBA", 110.0, 3), ("ABA", 55.0, 1)):
        for _ in range(teams):
            bump = 60.0 if year >= 1968 else 0.0
            lines.append(f"{year},{league},"
                         f"{base + bump + rng.normal() * 2:.3f}")
csv = ("\n".join(lines) + "\n").encode()

dataset = ingest_csv(csv, {"year": "dimension"}, name="league")
print(f"ingested {dataset.row_count} rows,"
      f" {len(dataset.dimensions)} dimensions,"
      f" {len(dataset.measures)} measures")

# -- mine ----------------------------------------------------------------

catalog = build_catalog(dataset, MiningConfig(max_depth=1, min_rows=5))
print(f"mined {len(catalog.insights)} insights over"
      f" {len(catalog.subspaces)} subspaces\n")

print("top 5 by score:")
for insight in catalog.insights[:5]:
    print(f"  [{insight.score:.3f}] {describe_insight(insight)}")

# -- filter --------------------------------------------------------------

page, total = query_insights(catalog, InsightQuery(
    types=("ChangePoint",), min_score=0.1))
print(f"\n{total} ChangePoint insights with score > 0.1:")
for insight in page:
    print(f"  {describe_insight(insight)}")
