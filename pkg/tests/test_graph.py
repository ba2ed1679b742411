import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from textgnn.data import EmbeddingCorpus, NodeRecord
from textgnn.errors import ValidationError
from textgnn.graph import (
    DEFAULT_THRESHOLD,
    SimilarityGraph,
    build_graph,
    cosine_similarity,
    graph_stats,
    load_graph,
    save_graph,
)


def corpus_from_matrix(x):
    return EmbeddingCorpus(
        nodes=[
            NodeRecord(id=f"n{i}", label=0, split="train", embedding=np.asarray(row, dtype=float))
            for i, row in enumerate(x)
        ],
        feature_dim=len(x[0]),
        num_classes=1,
    )


def brute_force_edges(x, threshold):
    """The O(N^2) reference scan, one pair at a time."""
    edges = set()
    for i in range(len(x)):
        for j in range(i + 1, len(x)):
            if cosine_similarity(x[i], x[j]) >= threshold:
                edges.add((i, j))
    return edges


class TestCosine:
    def test_identical(self):
        assert cosine_similarity([1.0, 0.0], [1.0, 0.0]) == 1.0

    def test_orthogonal(self):
        assert cosine_similarity([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_forty_five_degrees(self):
        assert cosine_similarity([1.0, 1.0], [1.0, 0.0]) == pytest.approx(
            0.70710678, abs=1e-8
        )

    def test_zero_norm_rejected(self):
        with pytest.raises(ValidationError, match="zero-norm"):
            cosine_similarity([0.0, 0.0], [1.0, 0.0])

    def test_clamped_to_unit_interval(self):
        v = [0.1234567, 0.7654321, 0.333]
        assert cosine_similarity(v, v) <= 1.0


class TestBuildGraph:
    def test_identical_embeddings_complete_graph(self):
        g = build_graph(corpus_from_matrix([[1.0, 2.0]] * 4))
        assert g.num_edges == 6
        assert g.num_nodes == 4

    def test_three_nodes_two_edges_above_threshold(self):
        # Gram matrix with pairwise similarities {0.9, 0.4, 0.73}: exactly
        # two pairs clear the 0.725 cutoff
        gram = np.array([[1, 0.9, 0.4], [0.9, 1, 0.73], [0.4, 0.73, 1]])
        x = np.linalg.cholesky(gram)
        g = build_graph(corpus_from_matrix(x), threshold=0.725)
        assert g.num_edges == 2
        assert {(0, 1), (1, 2)} == {tuple(e) for e in g.edges}

    def test_default_threshold(self):
        import inspect

        assert (
            inspect.signature(build_graph).parameters["threshold"].default == 0.725
        )
        assert DEFAULT_THRESHOLD == 0.725

    def test_zero_norm_propagates_node_id(self):
        corpus = corpus_from_matrix([[1.0, 0.0], [0.0, 0.0]])
        with pytest.raises(ValidationError, match="n1"):
            build_graph(corpus)

    def test_adjacency_invariants(self, rng):
        x = rng.normal(size=(12, 4))
        g = build_graph(corpus_from_matrix(x), threshold=0.3)
        for i in range(g.num_nodes):
            nbrs = g.neighbors(i)
            assert np.all(np.diff(nbrs) > 0)  # sorted, no duplicates
            assert i not in nbrs
            for j in nbrs:
                assert i in g.neighbors(int(j))  # symmetric

    def test_matches_brute_force(self, rng):
        for _ in range(10):
            x = rng.normal(size=(rng.integers(2, 15), 5))
            g = build_graph(corpus_from_matrix(x), threshold=0.3)
            assert {tuple(e) for e in g.edges} == brute_force_edges(x, 0.3)

    @given(st.integers(0, 500))
    @settings(deadline=None, max_examples=25)
    def test_threshold_monotone(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(10, 4))
        corpus = corpus_from_matrix(x)
        prev = None
        for threshold in (0.9, 0.725, 0.5):
            edges = {tuple(e) for e in build_graph(corpus, threshold).edges}
            if prev is not None:
                assert prev <= edges
            prev = edges

    def test_order_independence_up_to_relabeling(self, rng):
        x = rng.normal(size=(9, 4))
        g = build_graph(corpus_from_matrix(x), threshold=0.4)
        perm = rng.permutation(9)
        g2 = build_graph(corpus_from_matrix(x[perm]), threshold=0.4)
        inv = np.argsort(perm)  # node i of g sits at row inv[i] of g2
        expected = {tuple(sorted((int(inv[i]), int(inv[j])))) for i, j in g.edges}
        assert {tuple(e) for e in g2.edges} == expected


class TestGraphStats:
    def test_edgeless(self):
        g = SimilarityGraph([f"n{i}" for i in range(5)], np.zeros((0, 2), dtype=int), 0.5)
        s = graph_stats(g)
        assert s.isolated_nodes == 5
        assert s.connected_components == 5
        assert s.num_edges == 0

    def test_complete_four(self):
        edges = [(i, j) for i in range(4) for j in range(i + 1, 4)]
        g = SimilarityGraph([f"n{i}" for i in range(4)], np.array(edges), 0.5)
        s = graph_stats(g)
        assert s.num_edges == 6
        assert s.degree_min == s.degree_max == 3
        assert s.connected_components == 1

    def test_two_triangles(self):
        edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]
        g = SimilarityGraph([f"n{i}" for i in range(6)], np.array(edges), 0.5)
        assert graph_stats(g).connected_components == 2


class TestGraphValidation:
    def test_self_loop_rejected(self):
        with pytest.raises(ValidationError, match="self-loop"):
            SimilarityGraph(["a", "b"], np.array([[0, 0]]), 0.5)

    def test_duplicate_edge_rejected(self):
        with pytest.raises(ValidationError, match="duplicate"):
            SimilarityGraph(["a", "b"], np.array([[0, 1], [1, 0]]), 0.5)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValidationError, match="out of range"):
            SimilarityGraph(["a", "b"], np.array([[0, 2]]), 0.5)


class TestGraphIO:
    def test_round_trip(self, tmp_path, rng):
        x = rng.normal(size=(8, 3))
        corpus = corpus_from_matrix(x)
        g = build_graph(corpus, threshold=0.2)
        path = tmp_path / "g.jsonl"
        save_graph(g, path)
        loaded = load_graph(path, corpus.ids)
        np.testing.assert_array_equal(g.edges, loaded.edges)
        np.testing.assert_array_equal(g.sims, loaded.sims)
        assert loaded.threshold == g.threshold

    def test_unknown_id_rejected(self, tmp_path):
        g = SimilarityGraph(["a", "b"], np.array([[0, 1]]), 0.5)
        path = tmp_path / "g.jsonl"
        save_graph(g, path)
        with pytest.raises(ValidationError, match="'a'"):
            load_graph(path, ["c", "b"])

    def test_node_count_mismatch_rejected(self, tmp_path):
        g = SimilarityGraph(["a", "b"], np.array([[0, 1]]), 0.5)
        path = tmp_path / "g.jsonl"
        save_graph(g, path)
        with pytest.raises(ValidationError, match="nodes"):
            load_graph(path, ["a", "b", "c"])
