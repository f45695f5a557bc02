"""Hot-loop kernels for the linear classifier.

The compiled extension (`evimap._speedups`, built from Cython) is preferred;
the numpy fallback below is selected automatically when the extension is not
available.  Both implement the same contract: `scores_one` computes raw class
scores for one sparse row, `sgd_epoch` runs one in-place pass of stochastic
softmax-regression updates over rows in the given order.
"""

from __future__ import annotations

import numpy as np

try:
    from . import _speedups  # type: ignore[attr-defined]

    BACKEND = "cython"
except ImportError:  # pragma: no cover - depends on build environment
    _speedups = None
    BACKEND = "python"


def softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max()
    e = np.exp(shifted)
    return e / e.sum()


def _scores_one_py(weights, bias, idx, val):
    return weights[:, idx] @ val + bias


def _sgd_epoch_py(weights, bias, indptr, indices, values, labels, order, lr, l2):
    for i in order:
        lo, hi = indptr[i], indptr[i + 1]
        idx = indices[lo:hi]
        val = values[lo:hi]
        probs = softmax(weights[:, idx] @ val + bias)
        err = probs.copy()
        err[labels[i]] -= 1.0
        # gradient on touched columns plus per-column l2 shrinkage
        weights[:, idx] -= lr * (np.outer(err, val) + l2 * weights[:, idx])
        bias -= lr * err


if _speedups is not None:
    def scores_one(weights, bias, idx, val):
        return _speedups.scores_one(weights, bias, idx, val)

    def sgd_epoch(weights, bias, indptr, indices, values, labels, order, lr, l2):
        _speedups.sgd_epoch(
            weights, bias, indptr, indices, values, labels, order, lr, l2
        )
else:
    scores_one = _scores_one_py
    sgd_epoch = _sgd_epoch_py

# always importable by name, for the backend-equivalence test and benchmark
scores_one_py = _scores_one_py
sgd_epoch_py = _sgd_epoch_py
