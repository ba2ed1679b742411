"""Post-hoc explanation of single-node predictions.

Learns a sigmoid-parameterized mask per undirected edge and per feature
dimension, chosen to keep the model's own prediction likely while sparse
size and entropy penalties push mask values toward informative extremes.
Optimization runs on the target's 2-hop computational subgraph; nothing
outside it can influence the prediction, so restricting is exact.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import tensor as T
from .data import EmbeddingCorpus
from .errors import DivergenceError, ValidationError
from .graph import SimilarityGraph
from .model import ModelConfig, ModelParams, forward
from .tensor import Tape, Tensor, backward
from .train import PROB_FLOOR, AdamState, adam_step


@dataclass(frozen=True)
class ExplainerConfig:
    epochs: int = 100
    learning_rate: float = 0.01
    edge_size_coeff: float = 0.005
    edge_entropy_coeff: float = 1.0
    feature_size_coeff: float = 0.1
    feature_entropy_coeff: float = 0.1
    top_k_edges: int = 10
    seed: int = 0

    def validate(self) -> None:
        if self.epochs < 1:
            raise ValidationError(f"epochs must be >= 1, got {self.epochs}")
        coeffs = (
            self.edge_size_coeff,
            self.edge_entropy_coeff,
            self.feature_size_coeff,
            self.feature_entropy_coeff,
        )
        if any(c < 0 for c in coeffs):
            raise ValidationError("regularizer coefficients must be >= 0")


@dataclass(frozen=True)
class SubgraphEdge:
    i: str
    j: str
    mask: float


@dataclass
class Explanation:
    node_id: str
    predicted_class: int
    edge_mask: np.ndarray  # per edge of the computational subgraph, in (0,1)
    feature_mask: np.ndarray  # per feature dimension, in (0,1)
    edge_endpoints: list[tuple[str, str]]  # id pairs aligned with edge_mask
    subgraph: list[SubgraphEdge] = field(default_factory=list)
    node_texts: dict[str, str] = field(default_factory=dict)
    objective_trace: list[float] = field(default_factory=list)


def computational_subgraph(
    g: SimilarityGraph, node_idx: int, hops: int = 2
) -> tuple[np.ndarray, np.ndarray]:
    """Node indices within `hops` of the target plus the induced edge rows.

    Two hops cover this model's receptive field: masking anything further
    out cannot change the target's prediction.
    """
    if not 0 <= node_idx < g.num_nodes:
        raise ValidationError(f"node index {node_idx} outside graph")
    depth = {node_idx: 0}
    queue = deque([node_idx])
    while queue:
        u = queue.popleft()
        if depth[u] == hops:
            continue
        for v in g.neighbors(u):
            v = int(v)
            if v not in depth:
                depth[v] = depth[u] + 1
                queue.append(v)
    nodes = np.array(sorted(depth), dtype=np.intp)
    inside = np.zeros(g.num_nodes, dtype=bool)
    inside[nodes] = True
    edge_rows = (
        np.flatnonzero(inside[g.edges[:, 0]] & inside[g.edges[:, 1]])
        if g.num_edges
        else np.zeros(0, dtype=np.intp)
    )
    return nodes, edge_rows


def _binary_entropy(mask: Tensor) -> Tensor:
    one_minus = Tensor(1.0) - mask
    return T.neg(
        T.mul(mask, T.log(T.clamp_min(mask, PROB_FLOOR)))
        + T.mul(one_minus, T.log(T.clamp_min(one_minus, PROB_FLOOR)))
    )


def explain_node(
    corpus: EmbeddingCorpus,
    g: SimilarityGraph,
    params: ModelParams,
    model_cfg: ModelConfig,
    node_id: str,
    cfg: ExplainerConfig = ExplainerConfig(),
) -> Explanation:
    """Learn edge and feature masks for one node's prediction.

    The objective is the negative log-probability of the model's original
    predicted class under the masked forward pass, plus size and binary
    entropy penalties on both masks. Model parameters stay frozen.
    """
    cfg.validate()
    target = corpus.index_of(node_id)
    nodes, edge_rows = computational_subgraph(g, target)
    local = {int(old): new for new, old in enumerate(nodes)}
    sub_edges = np.array(
        [(local[int(a)], local[int(b)]) for a, b in g.edges[edge_rows]], dtype=np.intp
    ).reshape(-1, 2)
    sub = SimilarityGraph(
        node_ids=[g.node_ids[i] for i in nodes],
        edges=sub_edges,
        threshold=g.threshold,
        sims=g.sims[edge_rows] if g.num_edges else None,
    )
    x_sub = Tensor(corpus.feature_matrix()[nodes])
    frozen = params.detached()
    local_target = local[target]

    base = forward(x_sub, sub, frozen, model_cfg)
    predicted = int(np.argmax(base.probs.data[local_target]))

    rng = np.random.default_rng([cfg.seed, target])
    edge_logits = Tensor(rng.normal(0.0, 0.1, size=sub.num_edges), requires_grad=True)
    feat_logits = Tensor(
        rng.normal(0.0, 0.1, size=corpus.feature_dim), requires_grad=True
    )
    masks = [edge_logits, feat_logits]
    state = AdamState.init(masks)
    trace: list[float] = []
    target_row = np.array([local_target])
    target_class = np.array([predicted])

    def objective_of(edge_l: Tensor, feat_l: Tensor) -> Tensor:
        edge_mask = T.sigmoid(edge_l)
        feat_mask = T.sigmoid(feat_l)
        res = forward(
            x_sub, sub, frozen, model_cfg,
            edge_mask=edge_mask if sub.num_edges else None,
            feature_mask=feat_mask,
        )
        picked = T.take_per_row(T.gather_rows(res.probs, target_row), target_class)
        obj = T.neg(T.tsum(T.log(T.clamp_min(picked, PROB_FLOOR))))
        if sub.num_edges:
            obj = (
                obj
                + Tensor(cfg.edge_size_coeff) * T.tsum(edge_mask)
                + Tensor(cfg.edge_entropy_coeff) * T.tsum(_binary_entropy(edge_mask))
            )
        return (
            obj
            + Tensor(cfg.feature_size_coeff) * T.tsum(feat_mask)
            + Tensor(cfg.feature_entropy_coeff) * T.tsum(_binary_entropy(feat_mask))
        )

    for epoch in range(cfg.epochs):
        with Tape() as tape:
            objective = objective_of(*masks)
        if not np.isfinite(objective.item()):
            raise DivergenceError(f"non-finite explainer objective at epoch {epoch}")
        trace.append(objective.item())
        backward(objective, tape)
        grads = [m.grad if m.grad is not None else np.zeros_like(m.data) for m in masks]
        masks = adam_step(masks, grads, state, cfg.learning_rate)
    edge_logits, feat_logits = masks
    trace.append(objective_of(*masks).item())

    def _sigmoid(v: np.ndarray) -> np.ndarray:
        return 1.0 / (1.0 + np.exp(-v))

    endpoints = [(g.node_ids[int(a)], g.node_ids[int(b)]) for a, b in g.edges[edge_rows]]
    texts = {
        rec.id: rec.text
        for rec in (corpus.nodes[i] for i in nodes)
        if rec.text is not None
    }
    expl = Explanation(
        node_id=node_id,
        predicted_class=predicted,
        edge_mask=_sigmoid(edge_logits.data),
        feature_mask=_sigmoid(feat_logits.data),
        edge_endpoints=endpoints,
        node_texts=texts,
        objective_trace=trace,
    )
    expl.subgraph = extract_subgraph(expl, cfg.top_k_edges)
    return expl


def extract_subgraph(expl: Explanation, k: int) -> list[SubgraphEdge]:
    """The k highest-mask edges; ties break toward lower edge index."""
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    order = np.argsort(-expl.edge_mask, kind="stable")[:k]
    return [
        SubgraphEdge(
            i=expl.edge_endpoints[e][0],
            j=expl.edge_endpoints[e][1],
            mask=float(expl.edge_mask[e]),
        )
        for e in order
    ]


def _snippet(text: str, limit: int = 40) -> str:
    return text if len(text) <= limit else text[: limit - 3] + "..."


def render_explanation(expl: Explanation, format: str = "json") -> str:
    """Serialize an explanation deterministically as DOT or JSON."""
    if format == "json":
        return json.dumps(
            {
                "node": expl.node_id,
                "predicted_class": expl.predicted_class,
                "edges": [
                    {"i": e.i, "j": e.j, "mask": e.mask} for e in expl.subgraph
                ],
                "features": [float(v) for v in expl.feature_mask],
            },
            sort_keys=True,
        )
    if format == "dot":
        nodes: list[str] = [expl.node_id]
        for e in expl.subgraph:
            for nid in (e.i, e.j):
                if nid not in nodes:
                    nodes.append(nid)
        lines = ["graph explanation {"]
        for nid in nodes:
            label = nid
            if nid in expl.node_texts:
                label = f"{nid}: {_snippet(expl.node_texts[nid])}"
            lines.append(f'  "{_escape(nid)}" [label="{_escape(label)}"];')
        for e in expl.subgraph:
            lines.append(
                f'  "{_escape(e.i)}" -- "{_escape(e.j)}" [label="{e.mask:.3f}"];'
            )
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise ValidationError(f"unknown explanation format {format!r}")


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')
