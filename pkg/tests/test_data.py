import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from textgnn.data import (
    EmbeddingCorpus,
    NodeRecord,
    SplitSpec,
    assign_splits,
    load_corpus,
    save_corpus,
)
from textgnn.errors import ValidationError


def write_corpus(path, records, feature_dim=4, num_classes=2):
    lines = [json.dumps({"feature_dim": feature_dim, "num_classes": num_classes})]
    lines += [json.dumps(r) for r in records]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def make_record(i, dim=4, label=0, split="train", **extra):
    rec = {"id": f"n{i}", "label": label, "split": split, "embedding": [float(i + 1)] * dim}
    rec.update(extra)
    return rec


class TestLoadCorpus:
    def test_happy_path(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_corpus(path, [make_record(i) for i in range(3)])
        corpus = load_corpus(path)
        assert len(corpus) == 3
        assert corpus.feature_dim == 4
        assert corpus.num_classes == 2
        assert corpus.ids == ["n0", "n1", "n2"]

    def test_dimension_mismatch_names_record(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_corpus(path, [make_record(0), make_record(1, dim=3)])
        with pytest.raises(ValidationError, match="n1"):
            load_corpus(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text("", encoding="utf-8")
        with pytest.raises(ValidationError, match="empty corpus"):
            load_corpus(path)

    def test_header_only(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_corpus(path, [])
        with pytest.raises(ValidationError, match="empty corpus"):
            load_corpus(path)

    def test_unknown_split_tag(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_corpus(path, [make_record(0, split="holdout")])
        with pytest.raises(ValidationError, match="split"):
            load_corpus(path)

    def test_duplicate_id(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_corpus(path, [make_record(0), make_record(0)])
        with pytest.raises(ValidationError, match="duplicate"):
            load_corpus(path)

    def test_label_out_of_range(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_corpus(path, [make_record(0, label=2)])
        with pytest.raises(ValidationError, match="label"):
            load_corpus(path)

    def test_nonfinite_embedding(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_corpus(path, [make_record(0, embedding=[1.0, float("nan"), 0.0, 0.0])])
        with pytest.raises(ValidationError, match="finite"):
            load_corpus(path)

    def test_missing_file_is_io_error(self, tmp_path):
        with pytest.raises(OSError):
            load_corpus(tmp_path / "missing.jsonl")

    def test_null_split_allowed(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_corpus(path, [make_record(0, split=None)])
        corpus = load_corpus(path)
        assert corpus.nodes[0].split is None


class TestRoundTrip:
    def test_save_load_identity(self, tmp_path, rng):
        nodes = [
            NodeRecord(
                id=f"n{i}",
                label=int(rng.integers(0, 3)),
                split=("train", "val", "test", None)[i % 4],
                embedding=rng.normal(size=5),
                text="some text" if i % 2 else None,
            )
            for i in range(8)
        ]
        corpus = EmbeddingCorpus(nodes=nodes, feature_dim=5, num_classes=3)
        path = tmp_path / "c.jsonl"
        save_corpus(corpus, path)
        loaded = load_corpus(path)
        assert loaded.feature_dim == 5 and loaded.num_classes == 3
        for a, b in zip(corpus.nodes, loaded.nodes):
            assert a.id == b.id and a.label == b.label
            assert a.split == b.split and a.text == b.text
            np.testing.assert_array_equal(a.embedding, b.embedding)

    def test_save_is_deterministic(self, tmp_path, rng):
        nodes = [
            NodeRecord(id=f"n{i}", label=0, split="train", embedding=rng.normal(size=3))
            for i in range(4)
        ]
        corpus = EmbeddingCorpus(nodes=nodes, feature_dim=3, num_classes=1)
        save_corpus(corpus, tmp_path / "a.jsonl")
        save_corpus(corpus, tmp_path / "b.jsonl")
        assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()


def untagged_corpus(n, dim=3):
    return EmbeddingCorpus(
        nodes=[
            NodeRecord(id=f"n{i}", label=i % 2, split=None, embedding=np.ones(dim) * (i + 1))
            for i in range(n)
        ],
        feature_dim=dim,
        num_classes=2,
    )


class TestAssignSplits:
    def test_ten_nodes_six_two_two(self):
        out = assign_splits(untagged_corpus(10), SplitSpec())
        sizes = {s: sum(r.split == s for r in out.nodes) for s in ("train", "val", "test")}
        assert sizes == {"train": 6, "val": 2, "test": 2}

    def test_deterministic(self):
        a = assign_splits(untagged_corpus(20), SplitSpec(seed=7))
        b = assign_splits(untagged_corpus(20), SplitSpec(seed=7))
        assert [r.split for r in a.nodes] == [r.split for r in b.nodes]

    def test_five_nodes_floor_then_distribute(self):
        # floors are {3, 1, 1} which already sum to 5
        out = assign_splits(untagged_corpus(5), SplitSpec())
        sizes = {s: sum(r.split == s for r in out.nodes) for s in ("train", "val", "test")}
        assert sizes == {"train": 3, "val": 1, "test": 1}

    def test_leftover_goes_to_train_then_val(self):
        # N=4 at 6:2:2 floors to {2, 0, 0}; leftovers land on train, val
        out = assign_splits(untagged_corpus(4), SplitSpec())
        sizes = {s: sum(r.split == s for r in out.nodes) for s in ("train", "val", "test")}
        assert sizes == {"train": 3, "val": 1, "test": 0}

    def test_bad_ratios(self):
        with pytest.raises(ValidationError, match="sum"):
            assign_splits(untagged_corpus(5), SplitSpec(ratios=(0.5, 0.2, 0.2)))
        with pytest.raises(ValidationError, match="positive"):
            assign_splits(untagged_corpus(5), SplitSpec(ratios=(1.0, -0.1, 0.1)))

    def test_tagged_passthrough(self):
        corpus = untagged_corpus(6)
        tagged = assign_splits(corpus, SplitSpec(seed=1))
        again = assign_splits(tagged, SplitSpec(seed=99))
        assert [r.split for r in again.nodes] == [r.split for r in tagged.nodes]

    def test_mixed_tagging_rejected(self):
        corpus = untagged_corpus(4)
        nodes = list(corpus.nodes)
        nodes[0] = NodeRecord(id="n0", label=0, split="train", embedding=np.ones(3))
        mixed = EmbeddingCorpus(nodes=nodes, feature_dim=3, num_classes=2)
        with pytest.raises(ValidationError, match="mixes"):
            assign_splits(mixed, SplitSpec())

    @given(st.integers(3, 60), st.integers(0, 1000))
    @settings(deadline=None, max_examples=40)
    def test_partition_property(self, n, seed):
        out = assign_splits(untagged_corpus(n), SplitSpec(seed=seed))
        assert all(r.split in ("train", "val", "test") for r in out.nodes)
        sizes = [sum(r.split == s for r in out.nodes) for s in ("train", "val", "test")]
        assert sum(sizes) == n
        for size, ratio in zip(sizes, (0.6, 0.2, 0.2)):
            assert abs(size - n * ratio) < 1.0
