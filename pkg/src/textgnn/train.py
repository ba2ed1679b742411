"""Full-graph supervised training and evaluation.

One Adam step per epoch on the train split's cross-entropy, validation
metrics every epoch, and the checkpoint taken from the epoch with the best
validation macro F1 (earlier epoch wins ties). Test metrics are computed
once, on the returned parameters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import tensor as T
from .data import EmbeddingCorpus
from .errors import DivergenceError, ValidationError
from .graph import SimilarityGraph
from .model import ModelConfig, ModelParams, forward, init_params
from .tensor import Tape, Tensor, backward

PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class TrainConfig:
    """Optimization settings; the checkpoint policy is fixed to the epoch
    with the best validation macro F1 (earlier epoch on ties)."""

    epochs: int = 200
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0

    def validate(self) -> None:
        if self.epochs < 1:
            raise ValidationError(f"epochs must be >= 1, got {self.epochs}")
        if self.learning_rate <= 0:
            raise ValidationError(f"learning_rate must be > 0, got {self.learning_rate}")


@dataclass
class TrainReport:
    train_loss: list[float] = field(default_factory=list)
    val_accuracy: list[float] = field(default_factory=list)
    val_macro_f1: list[float] = field(default_factory=list)
    best_epoch: int = 0
    test_accuracy: float = 0.0
    test_macro_f1: float = 0.0

    def to_json(self) -> str:
        return json.dumps(
            {
                "train_loss": self.train_loss,
                "val_accuracy": self.val_accuracy,
                "val_macro_f1": self.val_macro_f1,
                "best_epoch": self.best_epoch,
                "test_accuracy": self.test_accuracy,
                "test_macro_f1": self.test_macro_f1,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "TrainReport":
        return cls(**json.loads(text))


def cross_entropy(probs: Tensor, labels: np.ndarray, mask: np.ndarray) -> Tensor:
    """Mean -log p[i, labelptr] over the masked rows, floored at 1e-12."""
    idx = np.asarray(mask, dtype=np.intp)
    if idx.size == 0:
        raise ValidationError("no nodes in split")
    rows = T.gather_rows(probs, idx)
    picked = T.take_per_row(rows, np.asarray(labels, dtype=np.intp)[idx])
    return T.neg(T.tmean(T.log(T.clamp_min(picked, PROB_FLOOR))))


@dataclass
class AdamState:
    step: int
    m: list[np.ndarray]
    v: list[np.ndarray]

    @classmethod
    def init(cls, params: list[Tensor]) -> "AdamState":
        return cls(
            step=0,
            m=[np.zeros_like(p.data) for p in params],
            v=[np.zeros_like(p.data) for p in params],
        )


def adam_step(
    params: list[Tensor],
    grads: list[np.ndarray],
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> list[Tensor]:
    """Bias-corrected Adam update; returns fresh parameter tensors."""
    state.step += 1
    t = state.step
    updated = []
    for i, (p, g) in enumerate(zip(params, grads)):
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * g
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * g * g
        m_hat = state.m[i] / (1.0 - beta1**t)
        v_hat = state.v[i] / (1.0 - beta2**t)
        updated.append(
            Tensor(p.data - lr * m_hat / (np.sqrt(v_hat) + eps), requires_grad=True)
        )
    return updated


def evaluate(
    probs: Tensor | np.ndarray, labels: np.ndarray, mask: np.ndarray
) -> tuple[float, float]:
    """(accuracy, macro F1) over the masked rows.

    Predictions are row argmax with ties going to the lowest class index.
    Macro F1 averages per-class F1 over every class; a class with no
    predicted and no actual positives contributes 0.
    """
    p = probs.data if isinstance(probs, Tensor) else np.asarray(probs)
    idx = np.asarray(mask, dtype=np.intp)
    if idx.size == 0:
        raise ValidationError("no nodes in split")
    pred = np.argmax(p[idx], axis=1)
    true = np.asarray(labels, dtype=np.intp)[idx]
    accuracy = float(np.mean(pred == true))

    num_classes = p.shape[1]
    f1s = []
    for c in range(num_classes):
        tp = int(np.sum((pred == c) & (true == c)))
        fp = int(np.sum((pred == c) & (true != c)))
        fn = int(np.sum((pred != c) & (true == c)))
        denom = 2 * tp + fp + fn
        f1s.append(2.0 * tp / denom if denom > 0 else 0.0)
    return accuracy, float(np.mean(f1s))


def _masked_grads(params: ModelParams) -> list[np.ndarray]:
    return [
        p.grad if p.grad is not None else np.zeros_like(p.data)
        for p in params.tensors()
    ]


def train(
    corpus: EmbeddingCorpus,
    g: SimilarityGraph,
    model_cfg: ModelConfig,
    train_cfg: TrainConfig = TrainConfig(),
) -> tuple[ModelParams, TrainReport]:
    """Full-batch training loop; returns best-validation params and report."""
    train_cfg.validate()
    model_cfg.validate()
    labels = corpus.labels()
    train_idx = corpus.split_indices("train")
    val_idx = corpus.split_indices("val")
    test_idx = corpus.split_indices("test")
    if train_idx.size == 0 or val_idx.size == 0:
        raise ValidationError("corpus needs non-empty train and val splits")

    x = Tensor(corpus.feature_matrix())
    params = init_params(model_cfg)
    state = AdamState.init(params.tensors())
    report = TrainReport()

    best_f1 = -1.0
    best_params = params
    for epoch in range(train_cfg.epochs):
        with Tape() as tape:
            res = forward(x, g, params, model_cfg)
            loss = cross_entropy(res.probs, labels, train_idx)
        loss_val = loss.item()
        if not np.isfinite(loss_val):
            raise DivergenceError(f"non-finite training loss at epoch {epoch}")
        backward(loss, tape)
        params = ModelParams(
            *adam_step(
                params.tensors(),
                _masked_grads(params),
                state,
                train_cfg.learning_rate,
                train_cfg.beta1,
                train_cfg.beta2,
                train_cfg.eps,
            )
        )

        val_res = forward(x, g, params, model_cfg)
        val_acc, val_f1 = evaluate(val_res.probs, labels, val_idx)
        report.train_loss.append(loss_val)
        report.val_accuracy.append(val_acc)
        report.val_macro_f1.append(val_f1)
        if val_f1 > best_f1:
            best_f1 = val_f1
            best_params = params
            report.best_epoch = epoch

    if test_idx.size:
        test_res = forward(x, g, best_params, model_cfg)
        report.test_accuracy, report.test_macro_f1 = evaluate(
            test_res.probs, labels, test_idx
        )
    return best_params, report
