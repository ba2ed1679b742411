"""The hybrid graph encoder: linear input layer, mean- and sum-aggregation
layers in parallel, a single-head attention layer over their concatenation,
and a softmax head over the concatenated skip connection.

One layer of each aggregator type, so a node's receptive field is its
2-hop neighborhood. The forward pass optionally scales per-edge messages
and per-feature inputs by mask values in [0, 1]; the explainer drives
those masks, training leaves them unset.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import tensor as T
from .errors import ShapeError, ValidationError
from .graph import SimilarityGraph
from .tensor import Tensor


@dataclass(frozen=True)
class ModelConfig:
    feature_dim: int
    num_classes: int
    hidden_dim: int = 64
    leaky_slope: float = 0.2
    init_seed: int = 0

    def validate(self) -> None:
        if min(self.feature_dim, self.hidden_dim, self.num_classes) < 1:
            raise ValidationError("feature_dim, hidden_dim, num_classes must be >= 1")
        if not 0.0 < self.leaky_slope < 1.0:
            raise ValidationError(f"leaky_slope must lie in (0,1), got {self.leaky_slope}")


@dataclass
class ModelParams:
    """All trainable weights, stored as (out_dim, in_dim) matrices.

    w_in/b_in: input linear layer; w1/w2_mean and w1/w2_sum: the two
    aggregation layers (disjoint parameter sets); w_att: the shared
    transform inside attention; a_att: the attention score vector;
    w_out/b_out: the classification head.
    """

    w_in: Tensor
    b_in: Tensor
    w1_mean: Tensor
    w2_mean: Tensor
    w1_sum: Tensor
    w2_sum: Tensor
    w_att: Tensor
    a_att: Tensor
    w_out: Tensor
    b_out: Tensor

    def named(self) -> list[tuple[str, Tensor]]:
        return [(f.name, getattr(self, f.name)) for f in fields(self)]

    def tensors(self) -> list[Tensor]:
        return [t for _, t in self.named()]

    def detached(self) -> "ModelParams":
        return ModelParams(*(t.detach() for t in self.tensors()))


def _glorot(rng: np.random.Generator, shape: tuple[int, int]) -> np.ndarray:
    s = np.sqrt(6.0 / (shape[0] + shape[1]))
    return rng.uniform(-s, s, size=shape)


def init_params(cfg: ModelConfig) -> ModelParams:
    """Uniform Glorot weights, zero biases, deterministic in init_seed."""
    cfg.validate()
    f, h, k = cfg.feature_dim, cfg.hidden_dim, cfg.num_classes
    rng = np.random.default_rng(cfg.init_seed)

    def weight(shape):
        return Tensor(_glorot(rng, shape), requires_grad=True)

    return ModelParams(
        w_in=weight((h, f)),
        b_in=Tensor(np.zeros(h), requires_grad=True),
        w1_mean=weight((h, h)),
        w2_mean=weight((h, h)),
        w1_sum=weight((h, h)),
        w2_sum=weight((h, h)),
        w_att=weight((h, 2 * h)),
        a_att=weight((2 * h, 1)),
        w_out=weight((k, 2 * h)),
        b_out=Tensor(np.zeros(k), requires_grad=True),
    )


@dataclass
class ForwardResult:
    """Per-layer activations of one forward pass.

    ``alpha`` holds the attention coefficients over each node's closed
    neighborhood, aligned with ``alpha_dst`` (the destination node of each
    coefficient).
    """

    x1: Tensor
    x2: Tensor
    x3: Tensor
    x23: Tensor
    x4: Tensor
    logits: Tensor
    probs: Tensor
    alpha: Tensor
    alpha_dst: np.ndarray


def linear_in(x: Tensor, params: ModelParams) -> Tensor:
    if x.shape[1] != params.w_in.shape[1]:
        raise ShapeError(
            f"input has {x.shape[1]} features, layer expects {params.w_in.shape[1]}"
        )
    return T.matmul(x, params.w_in.T) + params.b_in


def _masked_messages(
    x1: Tensor, g: SimilarityGraph, edge_mask: Tensor | None
) -> Tensor:
    """Neighbor features per directed entry, scaled by the edge mask."""
    msg = T.gather_rows(x1, g.msg_src)
    if edge_mask is not None:
        scale = T.reshape(T.gather_rows(edge_mask, g.msg_edge), (len(g.msg_edge), 1))
        msg = T.mul(msg, scale)
    return msg


def mean_agg_layer(
    x1: Tensor,
    g: SimilarityGraph,
    params: ModelParams,
    edge_mask: Tensor | None = None,
) -> Tensor:
    """W1.x1 + W2.(mean over neighbors); the empty mean is zero."""
    msg = _masked_messages(x1, g, edge_mask)
    total = T.segment_sum(msg, g.msg_dst, g.num_nodes)
    inv_deg = np.zeros((g.num_nodes, 1))
    nz = g.degrees > 0
    inv_deg[nz, 0] = 1.0 / g.degrees[nz]
    mean = T.mul(total, Tensor(inv_deg))
    return T.matmul(x1, params.w1_mean.T) + T.matmul(mean, params.w2_mean.T)


def sum_agg_layer(
    x1: Tensor,
    g: SimilarityGraph,
    params: ModelParams,
    edge_mask: Tensor | None = None,
) -> Tensor:
    """W1.x1 + W2.(sum over neighbors); the node itself is excluded."""
    msg = _masked_messages(x1, g, edge_mask)
    total = T.segment_sum(msg, g.msg_dst, g.num_nodes)
    return T.matmul(x1, params.w1_sum.T) + T.matmul(total, params.w2_sum.T)


def concat_23(x2: Tensor, x3: Tensor) -> Tensor:
    if x2.shape[0] != x3.shape[0]:
        raise ShapeError(f"row counts differ: {x2.shape} vs {x3.shape}")
    return T.concat(x2, x3, axis=1)


def attention_layer(
    x23: Tensor,
    g: SimilarityGraph,
    params: ModelParams,
    leaky_slope: float = 0.2,
    edge_mask: Tensor | None = None,
) -> tuple[Tensor, Tensor, np.ndarray]:
    """Single-head attention over each node's closed neighborhood.

    Scores are LeakyReLU(a.[t_i || t_j]) with t = x23.W_att^T, normalized
    per destination; the output mixes the transformed neighbor rows plus
    the node's own row. Edge masks scale neighbor messages only (the self
    message is never masked). Returns (x4, alpha, alpha_dst).
    """
    n = g.num_nodes
    t = T.matmul(x23, params.w_att.T)

    self_idx = np.arange(n, dtype=np.intp)
    dst = np.concatenate([g.msg_dst, self_idx])
    src = np.concatenate([g.msg_src, self_idx])

    t_dst = T.gather_rows(t, dst)
    t_src = T.gather_rows(t, src)
    scores = T.reshape(
        T.matmul(T.concat(t_dst, t_src, axis=1), params.a_att), (len(dst),)
    )
    alpha = T.segment_softmax(T.leaky_relu(scores, leaky_slope), dst, n)

    msg = T.mul(t_src, T.reshape(alpha, (len(dst), 1)))
    if edge_mask is not None:
        scale = T.gather_rows(edge_mask, g.msg_edge)
        ones = Tensor(np.ones(n))
        scale = T.reshape(T.concat(scale, ones, axis=0), (len(dst), 1))
        msg = T.mul(msg, scale)
    x4 = T.segment_sum(msg, dst, n)
    return x4, alpha, dst


def head(x1: Tensor, x4: Tensor, params: ModelParams) -> tuple[Tensor, Tensor]:
    if x1.shape[0] != x4.shape[0]:
        raise ShapeError(f"row counts differ: {x1.shape} vs {x4.shape}")
    xc = T.concat(x1, x4, axis=1)
    logits = T.matmul(xc, params.w_out.T) + params.b_out
    return logits, T.softmax(logits)


def forward(
    x: Tensor | np.ndarray,
    g: SimilarityGraph,
    params: ModelParams,
    cfg: ModelConfig,
    edge_mask: Tensor | None = None,
    feature_mask: Tensor | None = None,
) -> ForwardResult:
    """Full encoder pass; probs rows are the class distributions."""
    x = x if isinstance(x, Tensor) else Tensor(x)
    if x.shape[0] != g.num_nodes:
        raise ShapeError(f"{x.shape[0]} feature rows for {g.num_nodes} graph nodes")
    if feature_mask is not None:
        x = T.mul(x, feature_mask)
    x1 = linear_in(x, params)
    x2 = mean_agg_layer(x1, g, params, edge_mask)
    x3 = sum_agg_layer(x1, g, params, edge_mask)
    x23 = concat_23(x2, x3)
    x4, alpha, alpha_dst = attention_layer(
        x23, g, params, cfg.leaky_slope, edge_mask
    )
    logits, probs = head(x1, x4, params)
    return ForwardResult(
        x1=x1, x2=x2, x3=x3, x23=x23, x4=x4,
        logits=logits, probs=probs, alpha=alpha, alpha_dst=alpha_dst,
    )


def save_checkpoint(params: ModelParams, cfg: ModelConfig, path: str | Path) -> None:
    """JSON checkpoint: config header plus named flat arrays with shapes.

    Floats are serialized with shortest round-trip repr, so values restore
    bit-exactly.
    """
    doc = {
        "config": {
            "feature_dim": cfg.feature_dim,
            "num_classes": cfg.num_classes,
            "hidden_dim": cfg.hidden_dim,
            "leaky_slope": cfg.leaky_slope,
            "init_seed": cfg.init_seed,
        },
        "params": {
            name: {
                "shape": list(t.data.shape),
                "data": [float(v) for v in t.data.ravel()],
            }
            for name, t in params.named()
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


def load_checkpoint(path: str | Path) -> tuple[ModelParams, ModelConfig]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        cfg = ModelConfig(**doc["config"])
        raw = doc["params"]
        tensors = {}
        for f in fields(ModelParams):
            entry = raw[f.name]
            tensors[f.name] = Tensor(
                np.array(entry["data"], dtype=np.float64).reshape(entry["shape"]),
                requires_grad=True,
            )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed checkpoint {path}: {exc}") from exc
    cfg.validate()
    return ModelParams(**tensors), cfg
