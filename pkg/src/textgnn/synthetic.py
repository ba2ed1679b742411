"""Synthetic corpora with known structure, for benchmarks and acceptance runs.

Two generators: Gaussian feature clusters whose labels follow cluster
identity (with optional label noise), and a planted-motif graph where a
target node's positive label is caused by a 4-edge motif feeding a feature
signal into its 2-hop neighborhood.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import EmbeddingCorpus, NodeRecord, SplitSpec, assign_splits
from .graph import SimilarityGraph


def two_cluster_corpus(
    n: int = 200,
    feature_dim: int = 16,
    label_noise: float = 0.1,
    separation: float = 1.0,
    seed: int = 0,
) -> EmbeddingCorpus:
    """Two Gaussian clusters; labels = cluster identity with noise flips.

    ``separation`` is the distance from each cluster mean to the origin,
    against unit-norm feature noise. Around 1 the clusters overlap enough
    that single-node features misclassify a noticeable fraction, while
    neighborhood aggregation recovers the cluster cleanly.
    """
    rng = np.random.default_rng(seed)
    half = n // 2
    sizes = [half, n - half]
    mean0 = np.full(feature_dim, separation / np.sqrt(feature_dim))
    means = [mean0, -mean0]

    records: list[NodeRecord] = []
    for cluster, size in enumerate(sizes):
        for _ in range(size):
            emb = means[cluster] + rng.normal(
                0.0, 1.0 / np.sqrt(feature_dim), feature_dim
            )
            records.append(
                NodeRecord(
                    id=f"n{len(records):04d}",
                    label=cluster,
                    split=None,
                    embedding=emb,
                )
            )
    num_flips = int(round(label_noise * n))
    for pos in rng.choice(n, size=num_flips, replace=False):
        rec = records[pos]
        records[pos] = NodeRecord(
            id=rec.id, label=1 - rec.label, split=rec.split, embedding=rec.embedding
        )
    corpus = EmbeddingCorpus(nodes=records, feature_dim=feature_dim, num_classes=2)
    return assign_splits(corpus, SplitSpec(seed=seed))


@dataclass
class MotifBenchmark:
    corpus: EmbeddingCorpus
    graph: SimilarityGraph
    targets: list[str]  # positive nodes to explain
    motif_edges: dict[str, set[tuple[int, int]]]  # target id -> planted index pairs


def planted_motif_benchmark(
    num_targets: int = 20,
    base_nodes: int = 40,
    feature_dim: int = 8,
    signal: float = 2.5,
    seed: int = 0,
) -> MotifBenchmark:
    """Graph where positive labels are caused by a planted 4-edge motif.

    Each anchor gets two 2-edge lanes, anchor-a, a-b and anchor-c, c-d.
    For positive anchors the lane tips (b, d) carry a feature signal that
    only reaches the anchor across both lane edges; relays (a, c) and the
    anchor itself stay at noise level. Negative anchors get the identical
    structure with noise tips, so edges alone carry no label information.
    """
    rng = np.random.default_rng(seed)
    records: list[NodeRecord] = []
    edges: list[tuple[int, int]] = []

    def add_node(with_signal: bool) -> int:
        emb = rng.normal(0.0, 0.4, feature_dim)
        if with_signal:
            emb[:2] += signal
        records.append(
            NodeRecord(
                id=f"n{len(records):04d}",
                label=0,
                split="train",
                embedding=emb,
            )
        )
        return len(records) - 1

    for _ in range(base_nodes):
        add_node(with_signal=False)
    for i in range(base_nodes):  # ring keeps every anchor embedded in context
        edges.append((i, (i + 1) % base_nodes))
    for i in range(base_nodes):
        for j in range(i + 2, base_nodes):
            if rng.random() < 1.0 / base_nodes:
                edges.append((i, j))

    targets: list[str] = []
    motif_edges: dict[str, set[tuple[int, int]]] = {}
    anchors = rng.choice(base_nodes, size=2 * num_targets, replace=False)
    for t, anchor in enumerate(anchors):
        positive = t < num_targets
        v = int(anchor)
        a = add_node(with_signal=False)
        b = add_node(with_signal=positive)
        c = add_node(with_signal=False)
        d = add_node(with_signal=positive)
        motif = {(v, a), (a, b), (v, c), (c, d)}
        edges.extend(sorted(motif))
        if positive:
            rec = records[v]
            records[v] = NodeRecord(
                id=rec.id, label=1, split=rec.split, embedding=rec.embedding
            )
            targets.append(rec.id)
            motif_edges[rec.id] = {(min(p), max(p)) for p in motif}

    # hold out every fifth node for validation
    for k, pos in enumerate(rng.permutation(len(records))):
        if k % 5 == 0:
            rec = records[pos]
            records[pos] = NodeRecord(
                id=rec.id, label=rec.label, split="val", embedding=rec.embedding
            )

    corpus = EmbeddingCorpus(nodes=records, feature_dim=feature_dim, num_classes=2)
    graph = SimilarityGraph(
        node_ids=corpus.ids,
        edges=np.array(sorted(set(edges)), dtype=np.intp).reshape(-1, 2),
        threshold=0.0,
    )
    return MotifBenchmark(
        corpus=corpus, graph=graph, targets=targets, motif_edges=motif_edges
    )
