"""Automated insight mining over multidimensional tables, with insight
embeddings, similarity maps and an exploration API."""

from .catalog import (
    Catalog,
    InsightQuery,
    MiningConfig,
    build_catalog,
    describe_insight,
    deserialize,
    mine_insights,
    query_insights,
    related_insights,
    serialize,
)
from .detectors import DetectorConfig, Insight
from .geometry import (
    attribute_embedding,
    extract_contours,
    instance_embedding,
    kde_density,
    pairwise_distance,
    project_mds,
    project_tsne,
)
from .subspaces import (
    SiblingGroup,
    Subspace,
    enumerate_subspaces,
    make_subspace,
    series_values,
    sibling_groups,
)
from .tabular import (
    Dataset,
    FieldDistribution,
    FieldSchema,
    aggregate,
    field_distribution,
    infer_role,
    ingest_csv,
)

__version__ = "1.0.0"
