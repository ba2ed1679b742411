import numpy as np
import pytest

from textgnn.graph import SimilarityGraph


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def random_graph(rng, n, p=0.4):
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return SimilarityGraph(
        [f"n{i}" for i in range(n)], np.array(edges, dtype=np.intp).reshape(-1, 2), 0.0
    )


def finite_difference(f, arr, step=1e-4):
    """Central finite differences of scalar f with respect to arr, in place."""
    grad = np.zeros_like(arr)
    it = np.nditer(arr, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        orig = arr[idx]
        arr[idx] = orig + step
        hi = f()
        arr[idx] = orig - step
        lo = f()
        arr[idx] = orig
        grad[idx] = (hi - lo) / (2.0 * step)
    return grad


def max_rel_err(analytic, numeric, floor=1e-6):
    # central differences at step 1e-4 on an O(1) loss carry ~1e-12 of
    # roundoff noise, so entries below `floor` are compared absolutely
    # (floor * rtol); relative error is meaningless under the noise floor
    denom = np.maximum(np.abs(numeric), floor)
    return float(np.max(np.abs(analytic - numeric) / denom))
