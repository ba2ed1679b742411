"""Node classification and explanation over text-embedding similarity graphs."""

from .data import (
    EmbeddingCorpus,
    NodeRecord,
    SplitSpec,
    assign_splits,
    load_corpus,
    save_corpus,
)
from .errors import DivergenceError, ShapeError, ValidationError
from .explain import (
    Explanation,
    ExplainerConfig,
    computational_subgraph,
    explain_node,
    extract_subgraph,
    render_explanation,
)
from .graph import (
    DEFAULT_THRESHOLD,
    SimilarityGraph,
    build_graph,
    cosine_similarity,
    graph_stats,
    load_graph,
    save_graph,
)
from .model import (
    ForwardResult,
    ModelConfig,
    ModelParams,
    forward,
    init_params,
    load_checkpoint,
    save_checkpoint,
)
from .tensor import Tape, Tensor, backward
from .train import TrainConfig, TrainReport, adam_step, cross_entropy, evaluate, train

__all__ = [
    "DEFAULT_THRESHOLD",
    "DivergenceError",
    "EmbeddingCorpus",
    "Explanation",
    "ExplainerConfig",
    "ForwardResult",
    "ModelConfig",
    "ModelParams",
    "NodeRecord",
    "ShapeError",
    "SimilarityGraph",
    "SplitSpec",
    "Tape",
    "Tensor",
    "TrainConfig",
    "TrainReport",
    "ValidationError",
    "adam_step",
    "assign_splits",
    "backward",
    "build_graph",
    "computational_subgraph",
    "cosine_similarity",
    "cross_entropy",
    "evaluate",
    "explain_node",
    "extract_subgraph",
    "forward",
    "graph_stats",
    "init_params",
    "load_checkpoint",
    "load_corpus",
    "load_graph",
    "render_explanation",
    "save_checkpoint",
    "save_corpus",
    "save_graph",
    "train",
]
