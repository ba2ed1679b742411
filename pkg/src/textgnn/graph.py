"""Similarity-graph construction from corpus embeddings.

An undirected edge joins two nodes whenever the cosine similarity of their
embeddings is at or above the threshold (0.725 by default). The scan is an
exact O(N^2) pass over pairs; corpora here are desk scale, so exactness is
affordable and keeps the reference oracle trivial.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import EmbeddingCorpus
from .errors import ValidationError

DEFAULT_THRESHOLD = 0.725


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    """u.v / (|u||v|), clamped to [-1, 1] against rounding."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ValidationError("cosine similarity undefined for zero-norm vector")
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


class SimilarityGraph:
    """Undirected graph in compressed adjacency form.

    ``edges`` is an (M, 2) array of node-index pairs with i < j, sorted
    lexicographically; ``sims`` carries the similarity recorded per edge
    (stored for export, unused by message passing). Neighbor lists are
    sorted ascending with no self-loops or duplicates.
    """

    def __init__(
        self,
        node_ids: list[str],
        edges: np.ndarray,
        threshold: float,
        sims: np.ndarray | None = None,
    ):
        self.node_ids = list(node_ids)
        self.num_nodes = len(self.node_ids)
        edges = np.asarray(edges, dtype=np.intp).reshape(-1, 2)
        if edges.size:
            if np.any(edges[:, 0] == edges[:, 1]):
                raise ValidationError("self-loops are not allowed")
            if np.any(edges < 0) or np.any(edges >= self.num_nodes):
                raise ValidationError("edge endpoint out of range")
            lo = np.minimum(edges[:, 0], edges[:, 1])
            hi = np.maximum(edges[:, 0], edges[:, 1])
            order = np.lexsort((hi, lo))
            edges = np.stack([lo[order], hi[order]], axis=1)
            if sims is not None:
                sims = np.asarray(sims, dtype=np.float64)[order]
            keys = edges[:, 0] * self.num_nodes + edges[:, 1]
            if np.unique(keys).size != keys.size:
                raise ValidationError("duplicate edges are not allowed")
        self.edges = edges
        self.sims = sims if sims is not None else np.ones(len(edges))
        self.threshold = float(threshold)
        self._build_adjacency()

    def _build_adjacency(self) -> None:
        n, edges = self.num_nodes, self.edges
        degrees = np.zeros(n, dtype=np.intp)
        if edges.size:
            np.add.at(degrees, edges[:, 0], 1)
            np.add.at(degrees, edges[:, 1], 1)
        self.degrees = degrees
        self.indptr = np.zeros(n + 1, dtype=np.intp)
        np.cumsum(degrees, out=self.indptr[1:])
        self.indices = np.zeros(self.indptr[-1], dtype=np.intp)
        fill = self.indptr[:-1].copy()
        for i, j in edges:
            self.indices[fill[i]] = j
            fill[i] += 1
            self.indices[fill[j]] = i
            fill[j] += 1
        for i in range(n):  # neighbor lists sorted ascending
            self.indices[self.indptr[i] : self.indptr[i + 1]].sort()
        # directed message entries: src -> dst, one per edge direction,
        # grouped by dst with sources ascending; edge_of maps each entry
        # back to its undirected edge row
        self.msg_dst = np.repeat(np.arange(n, dtype=np.intp), degrees)
        self.msg_src = self.indices.copy()
        if edges.size:
            keys = {
                (int(a) * n + int(b)): e for e, (a, b) in enumerate(edges)
            }
            lo = np.minimum(self.msg_src, self.msg_dst)
            hi = np.maximum(self.msg_src, self.msg_dst)
            self.msg_edge = np.array(
                [keys[int(a) * n + int(b)] for a, b in zip(lo, hi)], dtype=np.intp
            )
        else:
            self.msg_edge = np.zeros(0, dtype=np.intp)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]


def build_graph(
    corpus: EmbeddingCorpus, threshold: float = DEFAULT_THRESHOLD
) -> SimilarityGraph:
    """Exact pairwise scan; edge (i, j) kept iff similarity >= threshold."""
    x = corpus.feature_matrix()
    norms = np.linalg.norm(x, axis=1)
    for i, nrm in enumerate(norms):
        if nrm == 0.0:
            raise ValidationError(
                f"record {corpus.nodes[i].id!r}: zero-norm embedding"
            )
    n = len(corpus)
    pairs: list[tuple[int, int]] = []
    sims: list[float] = []
    for i in range(n - 1):
        s = np.clip(x[i + 1 :] @ x[i] / (norms[i + 1 :] * norms[i]), -1.0, 1.0)
        for k in np.flatnonzero(s >= threshold):
            pairs.append((i, i + 1 + int(k)))
            sims.append(float(s[k]))
    return SimilarityGraph(
        node_ids=corpus.ids,
        edges=np.array(pairs, dtype=np.intp).reshape(-1, 2),
        threshold=threshold,
        sims=np.array(sims, dtype=np.float64),
    )


@dataclass(frozen=True)
class GraphStats:
    num_nodes: int
    num_edges: int
    degree_min: int
    degree_mean: float
    degree_max: int
    isolated_nodes: int
    connected_components: int

    def format(self) -> str:
        return (
            f"nodes={self.num_nodes} edges={self.num_edges} "
            f"degree min/mean/max={self.degree_min}/{self.degree_mean:.3f}/{self.degree_max} "
            f"isolated={self.isolated_nodes} components={self.connected_components}"
        )


def graph_stats(g: SimilarityGraph) -> GraphStats:
    deg = g.degrees
    seen = np.zeros(g.num_nodes, dtype=bool)
    components = 0
    for start in range(g.num_nodes):
        if seen[start]:
            continue
        components += 1
        queue = deque([start])
        seen[start] = True
        while queue:
            u = queue.popleft()
            for v in g.neighbors(u):
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
    return GraphStats(
        num_nodes=g.num_nodes,
        num_edges=g.num_edges,
        degree_min=int(deg.min()) if g.num_nodes else 0,
        degree_mean=float(deg.mean()) if g.num_nodes else 0.0,
        degree_max=int(deg.max()) if g.num_nodes else 0,
        isolated_nodes=int(np.sum(deg == 0)),
        connected_components=components,
    )


def save_graph(g: SimilarityGraph, path: str | Path) -> None:
    """Header line plus one line per undirected edge, keyed by node ids."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            json.dumps({"num_nodes": g.num_nodes, "threshold": g.threshold}, sort_keys=True)
            + "\n"
        )
        for (i, j), sim in zip(g.edges, g.sims):
            fh.write(
                json.dumps(
                    {"i": g.node_ids[i], "j": g.node_ids[j], "sim": float(sim)},
                    sort_keys=True,
                )
                + "\n"
            )


def load_graph(path: str | Path, node_ids: list[str]) -> SimilarityGraph:
    """Load a graph export, resolving node ids against the given corpus order."""
    index = {nid: i for i, nid in enumerate(node_ids)}
    with open(path, encoding="utf-8") as fh:
        lines = [line for line in fh.read().split("\n") if line.strip()]
    if not lines:
        raise ValidationError(f"empty graph file: {path}")
    header = json.loads(lines[0])
    if int(header.get("num_nodes", -1)) != len(node_ids):
        raise ValidationError(
            f"graph has {header.get('num_nodes')} nodes, corpus has {len(node_ids)}"
        )
    pairs, sims = [], []
    for line in lines[1:]:
        rec = json.loads(line)
        for key in ("i", "j"):
            if rec[key] not in index:
                raise ValidationError(f"graph edge references unknown node id {rec[key]!r}")
        pairs.append((index[rec["i"]], index[rec["j"]]))
        sims.append(float(rec.get("sim", 1.0)))
    return SimilarityGraph(
        node_ids=list(node_ids),
        edges=np.array(pairs, dtype=np.intp).reshape(-1, 2),
        threshold=float(header.get("threshold", DEFAULT_THRESHOLD)),
        sims=np.array(sims, dtype=np.float64),
    )
