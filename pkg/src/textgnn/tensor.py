"""Minimal dense-tensor arithmetic with reverse-mode differentiation.

Tensors wrap numpy arrays. Operations executed while a Tape is active are
recorded on it; ``backward`` replays the tape in reverse to populate
gradients. The op set is deliberately small: exactly what linear layers,
neighborhood aggregation, single-head attention, softmax heads, and the
mask-optimization explainer need.

Reductions are sequential with a fixed order, so repeated runs on identical
inputs are bitwise identical. Gradients are dense float arrays in the same
dtype as the forward values (float64 by default; see set_default_dtype).
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import ShapeError, ValidationError

_DEFAULT_DTYPE = np.float64


def set_default_dtype(dtype: str | type) -> None:
    """Select float32 or float64 for newly created tensors.

    Gradient-check tolerances assume float64; float32 is offered for
    cheaper training runs.
    """
    global _DEFAULT_DTYPE
    resolved = np.dtype(dtype).type
    if resolved not in (np.float32, np.float64):
        raise ValidationError(f"unsupported dtype {dtype!r}; use float32 or float64")
    _DEFAULT_DTYPE = resolved


def default_dtype() -> type:
    return _DEFAULT_DTYPE


class Tensor:
    """Immutable dense array plus gradient metadata.

    ``data`` must not be mutated after construction; every op allocates a
    fresh output. ``grad`` is populated by ``backward`` for tensors with
    ``requires_grad=True``.
    """

    __slots__ = ("data", "requires_grad", "grad", "_tracked")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=_DEFAULT_DTYPE)
        self.requires_grad = bool(requires_grad)
        self.grad: np.ndarray | None = None
        self._tracked = False  # set when an active tape recorded this tensor

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def T(self) -> "Tensor":
        return transpose(self)

    def detach(self) -> "Tensor":
        """Same values, cut off from gradient tracking."""
        return Tensor(self.data, requires_grad=False)

    def item(self) -> float:
        return float(self.data)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    # Operator sugar; everything routes through the module-level ops.
    def __add__(self, other):
        return add(self, _as_tensor(other))

    def __radd__(self, other):
        return add(_as_tensor(other), self)

    def __sub__(self, other):
        return add(self, neg(_as_tensor(other)))

    def __rsub__(self, other):
        return add(_as_tensor(other), neg(self))

    def __mul__(self, other):
        return mul(self, _as_tensor(other))

    def __rmul__(self, other):
        return mul(_as_tensor(other), self)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, _as_tensor(other))


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


class _TapeEntry:
    __slots__ = ("out", "inputs", "backward_fn")

    def __init__(self, out: Tensor, inputs: tuple[Tensor, ...], backward_fn):
        self.out = out
        self.inputs = inputs
        self.backward_fn = backward_fn


class Tape:
    """Ordered record of executed ops for one reverse pass.

    Ops append in execution order, which is automatically topological;
    ``backward`` visits each entry exactly once, in reverse. A tape is
    single-threaded and never shared.
    """

    def __init__(self):
        self._entries: list[_TapeEntry] = []
        self._output_ids: set[int] = set()

    def __enter__(self) -> "Tape":
        _ACTIVE_TAPES.append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        popped = _ACTIVE_TAPES.pop()
        assert popped is self

    def __len__(self) -> int:
        return len(self._entries)

    def _record(self, out: Tensor, inputs: tuple[Tensor, ...], backward_fn) -> None:
        out._tracked = True
        self._entries.append(_TapeEntry(out, inputs, backward_fn))
        self._output_ids.add(id(out))


_ACTIVE_TAPES: list[Tape] = []


def _record(out: Tensor, inputs: tuple[Tensor, ...], backward_fn: Callable) -> Tensor:
    if _ACTIVE_TAPES and any(t.requires_grad or t._tracked for t in inputs):
        _ACTIVE_TAPES[-1]._record(out, inputs, backward_fn)
    return out


def backward(loss: Tensor, tape: Tape) -> dict[int, np.ndarray]:
    """Populate ``grad`` for every requires_grad tensor reachable from loss.

    Returns the full gradient map keyed by ``id(tensor)``, including
    intermediates. The loss must be a scalar produced on this tape.
    """
    if loss.data.shape != ():
        raise ValidationError(f"loss must be scalar, got shape {loss.data.shape}")
    if id(loss) not in tape._output_ids:
        raise ValidationError("loss was not produced on this tape")

    grads: dict[int, np.ndarray] = {id(loss): np.ones((), dtype=loss.data.dtype)}
    leaves: dict[int, Tensor] = {}
    for entry in reversed(tape._entries):
        g_out = grads.get(id(entry.out))
        if g_out is None:
            continue
        for t, g in zip(entry.inputs, entry.backward_fn(g_out)):
            if g is None or not (t.requires_grad or t._tracked):
                continue
            acc = grads.get(id(t))
            grads[id(t)] = g if acc is None else acc + g
            if t.requires_grad:
                leaves[id(t)] = t
    for tid, t in leaves.items():
        t.grad = grads[tid]
    return grads


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to the original operand shape."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, n in enumerate(shape):
        if n == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


# ---------------------------------------------------------------------------
# elementwise / linear ops


def add(a: Tensor, b: Tensor) -> Tensor:
    out = Tensor(a.data + b.data)

    def back(g):
        return _unbroadcast(g, a.data.shape), _unbroadcast(g, b.data.shape)

    return _record(out, (a, b), back)


def neg(a: Tensor) -> Tensor:
    out = Tensor(-a.data)
    return _record(out, (a,), lambda g: (-g,))


def mul(a: Tensor, b: Tensor) -> Tensor:
    out = Tensor(a.data * b.data)

    def back(g):
        return (
            _unbroadcast(g * b.data, a.data.shape),
            _unbroadcast(g * a.data, b.data.shape),
        )

    return _record(out, (a, b), back)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.ndim != 2 or b.data.ndim != 2 or a.data.shape[1] != b.data.shape[0]:
        raise ShapeError(
            f"matmul shapes incompatible: {a.data.shape} x {b.data.shape}"
        )
    out = Tensor(a.data @ b.data)

    def back(g):
        return g @ b.data.T, a.data.T @ g

    return _record(out, (a, b), back)


def transpose(a: Tensor) -> Tensor:
    if a.data.ndim != 2:
        raise ShapeError(f"transpose expects a matrix, got shape {a.data.shape}")
    out = Tensor(a.data.T)
    return _record(out, (a,), lambda g: (g.T,))


def reshape(a: Tensor, shape: Sequence[int]) -> Tensor:
    out = Tensor(a.data.reshape(shape))
    return _record(out, (a,), lambda g: (g.reshape(a.data.shape),))


def concat(a: Tensor, b: Tensor, axis: int = 1) -> Tensor:
    if a.data.ndim != b.data.ndim:
        raise ShapeError(f"concat rank mismatch: {a.data.shape} vs {b.data.shape}")
    out = Tensor(np.concatenate([a.data, b.data], axis=axis))
    split = a.data.shape[axis]

    def back(g):
        ga, gb = np.split(g, [split], axis=axis)
        return ga, gb

    return _record(out, (a, b), back)


def leaky_relu(x: Tensor, slope: float = 0.2) -> Tensor:
    if not 0.0 < slope < 1.0:
        raise ValidationError(f"leaky_relu slope must lie in (0,1), got {slope}")
    out = Tensor(np.where(x.data > 0, x.data, slope * x.data))

    def back(g):
        # subgradient at exactly 0 is the negative-side slope
        return (g * np.where(x.data > 0, 1.0, slope),)

    return _record(out, (x,), back)


def sigmoid(x: Tensor) -> Tensor:
    d = x.data
    e = np.exp(-np.abs(d))
    s = np.where(d >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    out = Tensor(s)

    def back(g):
        return (g * s * (1.0 - s),)

    return _record(out, (x,), back)


def log(x: Tensor) -> Tensor:
    out = Tensor(np.log(x.data))
    return _record(out, (x,), lambda g: (g / x.data,))


def clamp_min(x: Tensor, floor: float) -> Tensor:
    out = Tensor(np.maximum(x.data, floor))

    def back(g):
        return (g * (x.data >= floor),)

    return _record(out, (x,), back)


def tsum(x: Tensor) -> Tensor:
    out = Tensor(np.sum(x.data))
    return _record(out, (x,), lambda g: (np.full(x.data.shape, g, dtype=x.data.dtype),))


def tmean(x: Tensor) -> Tensor:
    n = x.data.size
    out = Tensor(np.sum(x.data) / n)
    return _record(
        out, (x,), lambda g: (np.full(x.data.shape, g / n, dtype=x.data.dtype),)
    )


# ---------------------------------------------------------------------------
# indexing / segment ops


def gather_rows(x: Tensor, index: np.ndarray) -> Tensor:
    """Pick rows (or elements of a vector) by integer index; repeats allowed."""
    index = np.asarray(index, dtype=np.intp)
    out = Tensor(x.data[index])

    def back(g):
        gx = np.zeros_like(x.data)
        np.add.at(gx, index, g)
        return (gx,)

    return _record(out, (x,), back)


def take_per_row(x: Tensor, cols: np.ndarray) -> Tensor:
    """out[i] = x[i, cols[i]]."""
    cols = np.asarray(cols, dtype=np.intp)
    if x.data.ndim != 2 or cols.shape != (x.data.shape[0],):
        raise ShapeError(
            f"take_per_row expects matrix and one column per row, got {x.data.shape} and {cols.shape}"
        )
    rows = np.arange(x.data.shape[0])
    out = Tensor(x.data[rows, cols])

    def back(g):
        gx = np.zeros_like(x.data)
        np.add.at(gx, (rows, cols), g)
        return (gx,)

    return _record(out, (x,), back)


def segment_sum(x: Tensor, segments: np.ndarray, num_segments: int) -> Tensor:
    """Sum rows of x into their segment, in entry order (deterministic)."""
    segments = np.asarray(segments, dtype=np.intp)
    if segments.shape != (x.data.shape[0],):
        raise ShapeError(
            f"segment ids must match leading dim: {x.data.shape} vs {segments.shape}"
        )
    shape = (num_segments,) + x.data.shape[1:]
    acc = np.zeros(shape, dtype=x.data.dtype)
    np.add.at(acc, segments, x.data)
    out = Tensor(acc)

    def back(g):
        return (g[segments],)

    return _record(out, (x,), back)


def softmax(logits: Tensor) -> Tensor:
    """Softmax over the last axis, stabilized by max subtraction."""
    if logits.data.size == 0:
        raise ValidationError("softmax requires at least one entry")
    shifted = logits.data - logits.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    s = e / e.sum(axis=-1, keepdims=True)
    out = Tensor(s)

    def back(g):
        inner = (g * s).sum(axis=-1, keepdims=True)
        return (s * (g - inner),)

    return _record(out, (logits,), back)


def segment_softmax(scores: Tensor, segments: np.ndarray, num_segments: int) -> Tensor:
    """Softmax normalized within each segment (per destination node).

    Each segment's outputs are positive and sum to 1; empty input yields
    empty output. Stabilized by per-segment max subtraction.
    """
    segments = np.asarray(segments, dtype=np.intp)
    if scores.data.ndim != 1 or segments.shape != scores.data.shape:
        raise ShapeError(
            f"segment_softmax expects aligned vectors, got {scores.data.shape} and {segments.shape}"
        )
    if scores.data.size == 0:
        return _record(Tensor(np.zeros(0, dtype=scores.data.dtype)), (scores,), lambda g: (np.zeros(0, dtype=scores.data.dtype),))

    seg_max = np.full(num_segments, -np.inf, dtype=scores.data.dtype)
    np.maximum.at(seg_max, segments, scores.data)
    e = np.exp(scores.data - seg_max[segments])
    denom = np.zeros(num_segments, dtype=scores.data.dtype)
    np.add.at(denom, segments, e)
    s = e / denom[segments]
    out = Tensor(s)

    def back(g):
        weighted = np.zeros(num_segments, dtype=scores.data.dtype)
        np.add.at(weighted, segments, g * s)
        return (s * (g - weighted[segments]),)

    return _record(out, (scores,), back)
