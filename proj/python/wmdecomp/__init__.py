"""Word Mover's Distance decomposition between two document sets."""

import json

from ._core import (
    SCHEMA_VERSION,
    ComparisonReport,
    DocumentSet,
    DocumentVector,
    EmbeddingStore,
    Error,
    ParseError,
    SolverError,
    TransportPlan,
    compare,
    cost_change,
    gale_shapley,
    kmeans,
    load_embeddings,
    random_pairs,
    read_report,
    report_from_json,
    rwmd_matrix,
    silhouette,
    vectorize,
    welch_t_test,
    wmd,
)

__version__ = "0.1.0"


def report_dict(report):
    """Parsed JSON form of a comparison report."""
    return json.loads(report.to_json())


__all__ = [name for name in dir() if not name.startswith("_") and name != "json"]
