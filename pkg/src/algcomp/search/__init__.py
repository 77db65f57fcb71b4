"""Structure-learning algorithms and external-result loaders."""

from .algorithms import (
    ALGORITHM_NAMES,
    AlgorithmError,
    AlgorithmId,
    AlgorithmVariant,
    comparison_graph_for,
    java_double,
)
from .external import (
    ELAPSED_UNAVAILABLE,
    ExternalResultError,
    elapsed_from_file,
    load_matrix,
    load_native,
    parse_adjacency_matrix,
    render_adjacency_matrix,
    write_external_result,
)
from .ges import GesStep, ges_search, score_pattern
from .pc import PcVariant, SepsetMap, TripleMark, fas, orient_unshielded, pc_search, unshielded_triples

__all__ = [
    "ALGORITHM_NAMES",
    "AlgorithmError",
    "AlgorithmId",
    "AlgorithmVariant",
    "comparison_graph_for",
    "java_double",
    "ELAPSED_UNAVAILABLE",
    "ExternalResultError",
    "elapsed_from_file",
    "load_matrix",
    "load_native",
    "parse_adjacency_matrix",
    "render_adjacency_matrix",
    "write_external_result",
    "GesStep",
    "ges_search",
    "score_pattern",
    "PcVariant",
    "SepsetMap",
    "TripleMark",
    "fas",
    "orient_unshielded",
    "pc_search",
    "unshielded_triples",
]
