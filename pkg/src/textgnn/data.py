"""Loading, validation, and splitting of labeled embedding corpora.

Corpus files are line-delimited JSON: a header object
``{"feature_dim": F, "num_classes": K}`` followed by one record per line
``{"id", "label", "split", "embedding", "text"?}``. The ``split`` tag is
``"train"``/``"val"``/``"test"`` or null for corpora that have not been
split yet.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ValidationError

SPLITS = ("train", "val", "test")


@dataclass(frozen=True)
class NodeRecord:
    id: str
    label: int
    split: str | None
    embedding: np.ndarray
    text: str | None = None


@dataclass(frozen=True)
class SplitSpec:
    """Train/val/test ratios (must sum to 1) and the shuffle seed."""

    ratios: tuple[float, float, float] = (0.6, 0.2, 0.2)
    seed: int = 0

    def validate(self) -> None:
        if any(r <= 0 for r in self.ratios):
            raise ValidationError(f"split ratios must be positive, got {self.ratios}")
        if abs(sum(self.ratios) - 1.0) > 1e-9:
            raise ValidationError(f"split ratios must sum to 1, got {self.ratios}")


@dataclass(frozen=True)
class EmbeddingCorpus:
    nodes: list[NodeRecord]
    feature_dim: int
    num_classes: int
    _index_of: dict[str, int] = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if not self._index_of:
            object.__setattr__(
                self, "_index_of", {rec.id: i for i, rec in enumerate(self.nodes)}
            )

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def ids(self) -> list[str]:
        return [rec.id for rec in self.nodes]

    def index_of(self, node_id: str) -> int:
        try:
            return self._index_of[node_id]
        except KeyError:
            raise ValidationError(f"unknown node id {node_id!r}") from None

    def feature_matrix(self) -> np.ndarray:
        return np.stack([rec.embedding for rec in self.nodes])

    def labels(self) -> np.ndarray:
        return np.array([rec.label for rec in self.nodes], dtype=np.intp)

    def split_indices(self, split: str) -> np.ndarray:
        if split not in SPLITS:
            raise ValidationError(f"unknown split {split!r}")
        return np.array(
            [i for i, rec in enumerate(self.nodes) if rec.split == split],
            dtype=np.intp,
        )

    def subset(self, indices: np.ndarray) -> "EmbeddingCorpus":
        """Corpus restricted to the given node positions, order preserved."""
        return EmbeddingCorpus(
            nodes=[self.nodes[i] for i in indices],
            feature_dim=self.feature_dim,
            num_classes=self.num_classes,
        )


def _validate_record(rec: NodeRecord, feature_dim: int, num_classes: int) -> None:
    if rec.embedding.shape != (feature_dim,):
        raise ValidationError(
            f"record {rec.id!r}: embedding has {rec.embedding.shape[0]} dims, corpus has {feature_dim}"
        )
    if not np.all(np.isfinite(rec.embedding)):
        raise ValidationError(f"record {rec.id!r}: embedding has non-finite entries")
    if not 0 <= rec.label < num_classes:
        raise ValidationError(
            f"record {rec.id!r}: label {rec.label} outside [0, {num_classes})"
        )
    if rec.split is not None and rec.split not in SPLITS:
        raise ValidationError(f"record {rec.id!r}: unknown split tag {rec.split!r}")


def load_corpus(path: str | Path) -> EmbeddingCorpus:
    """Load and validate a corpus file.

    The header's feature_dim is enforced on every record; violations name
    the offending record id.
    """
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        lines = [line for line in fh.read().split("\n") if line.strip()]
    if not lines:
        raise ValidationError(f"empty corpus: {path}")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: bad header line: {exc}") from exc
    if "feature_dim" not in header or "num_classes" not in header:
        raise ValidationError(f"{path}: header must carry feature_dim and num_classes")
    feature_dim = int(header["feature_dim"])
    num_classes = int(header["num_classes"])
    if feature_dim < 1 or num_classes < 1:
        raise ValidationError(
            f"{path}: feature_dim and num_classes must be >= 1, got {feature_dim}, {num_classes}"
        )

    nodes: list[NodeRecord] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}:{lineno}: bad record: {exc}") from exc
        rec = NodeRecord(
            id=str(raw["id"]),
            label=int(raw["label"]),
            split=raw.get("split"),
            embedding=np.asarray(raw["embedding"], dtype=np.float64),
            text=raw.get("text"),
        )
        if rec.id in seen:
            raise ValidationError(f"duplicate node id {rec.id!r}")
        seen.add(rec.id)
        _validate_record(rec, feature_dim, num_classes)
        nodes.append(rec)
    if not nodes:
        raise ValidationError(f"empty corpus: {path}")
    return EmbeddingCorpus(nodes=nodes, feature_dim=feature_dim, num_classes=num_classes)


def save_corpus(corpus: EmbeddingCorpus, path: str | Path) -> None:
    """Write the line-delimited corpus format; floats round-trip exactly."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            json.dumps(
                {"feature_dim": corpus.feature_dim, "num_classes": corpus.num_classes},
                sort_keys=True,
            )
            + "\n"
        )
        for rec in corpus.nodes:
            doc = {
                "id": rec.id,
                "label": rec.label,
                "split": rec.split,
                "embedding": [float(v) for v in rec.embedding],
            }
            if rec.text is not None:
                doc["text"] = rec.text
            fh.write(json.dumps(doc, sort_keys=True) + "\n")


def assign_splits(corpus: EmbeddingCorpus, spec: SplitSpec) -> EmbeddingCorpus:
    """Deterministically partition an untagged corpus into train/val/test.

    Already-tagged corpora pass through unchanged. Split sizes are the
    floored ratio counts, with leftover records going to train, then val.
    """
    spec.validate()
    tagged = [rec.split is not None for rec in corpus.nodes]
    if all(tagged):
        return corpus
    if any(tagged):
        raise ValidationError("corpus mixes tagged and untagged records")

    n = len(corpus.nodes)
    counts = [int(n * r) for r in spec.ratios]
    leftover = n - sum(counts)
    for i in range(leftover):  # at most 2 remain after flooring
        counts[i % 2] += 1
    order = np.random.default_rng(spec.seed).permutation(n)

    assignment: dict[int, str] = {}
    start = 0
    for split, count in zip(SPLITS, counts):
        for pos in order[start : start + count]:
            assignment[int(pos)] = split
        start += count

    nodes = [replace(rec, split=assignment[i]) for i, rec in enumerate(corpus.nodes)]
    return EmbeddingCorpus(
        nodes=nodes, feature_dim=corpus.feature_dim, num_classes=corpus.num_classes
    )
