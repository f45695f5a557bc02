"""Benchmark the compiled classifier kernels against the numpy fallback.

Times `scores_one` and `sgd_epoch` on a synthetic hashed-feature batch and
prints a small table.  Run:

    python3 benchmarks/bench_kernels.py [--rows 2000] [--repeats 5]
"""

import argparse
import time

import numpy as np

from evimap import kernels


def make_batch(rows, n_classes, hash_space, nnz, seed=0):
    rng = np.random.default_rng(seed)
    indptr = np.zeros(rows + 1, dtype=np.int64)
    indices = []
    values = []
    for i in range(rows):
        k = rng.integers(nnz // 2, nnz)
        indices.append(np.sort(rng.choice(hash_space, size=k, replace=False)).astype(np.int64))
        values.append(rng.normal(size=k))
        indptr[i + 1] = indptr[i] + k
    labels = rng.integers(0, n_classes, size=rows).astype(np.int64)
    return (
        indptr,
        np.concatenate(indices),
        np.concatenate(values),
        labels,
        rng.normal(0, 0.1, (n_classes, hash_space)),
        rng.normal(0, 0.1, n_classes),
    )


def time_scores(fn, weights, bias, indptr, indices, values, repeats):
    rows = len(indptr) - 1
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        for i in range(rows):
            lo, hi = indptr[i], indptr[i + 1]
            fn(weights, bias, indices[lo:hi], values[lo:hi])
        best = min(best, time.perf_counter() - start)
    return best


def time_sgd(fn, weights, bias, indptr, indices, values, labels, repeats):
    order = np.arange(len(labels), dtype=np.int64)
    best = float("inf")
    for _ in range(repeats):
        w = weights.copy()
        b = bias.copy()
        start = time.perf_counter()
        fn(w, b, indptr, indices, values, labels, order, 0.1, 0.01)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=2000)
    parser.add_argument("--classes", type=int, default=3)
    parser.add_argument("--hash-space", type=int, default=1 << 16)
    parser.add_argument("--nnz", type=int, default=120)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    indptr, indices, values, labels, weights, bias = make_batch(
        args.rows, args.classes, args.hash_space, args.nnz
    )

    print(f"active backend: {kernels.BACKEND}")
    print(f"rows={args.rows} classes={args.classes} "
          f"hash_space={args.hash_space} ~nnz={args.nnz}\n")

    rows = []
    py_scores = time_scores(kernels.scores_one_py, weights, bias, indptr, indices, values, args.repeats)
    py_sgd = time_sgd(kernels.sgd_epoch_py, weights, bias, indptr, indices, values, labels, args.repeats)
    rows.append(("python", py_scores, py_sgd))
    if kernels.BACKEND == "cython":
        cy_scores = time_scores(kernels.scores_one, weights, bias, indptr, indices, values, args.repeats)
        cy_sgd = time_sgd(kernels.sgd_epoch, weights, bias, indptr, indices, values, labels, args.repeats)
        rows.append(("cython", cy_scores, cy_sgd))

    print(f"{'backend':<10}{'scores_one (s)':>16}{'sgd_epoch (s)':>16}")
    for name, s, e in rows:
        print(f"{name:<10}{s:>16.4f}{e:>16.4f}")
    if len(rows) == 2:
        print(f"\nspeedup: scores_one {rows[0][1] / rows[1][1]:.1f}x, "
              f"sgd_epoch {rows[0][2] / rows[1][2]:.1f}x")


if __name__ == "__main__":
    main()
