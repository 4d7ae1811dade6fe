#!/usr/bin/env python3
"""Benchmark the compiled tree kernel against the pure-Python fallback.

Times forest training and batch prediction on Gaussian-blob datasets and
verifies both kernels produce identical predictions. Run from the repo root:

    python benchmarks/bench_forest.py [--trees 100] [--rows 400 2000]
"""

import argparse
import time

import numpy as np

from seizurefit import forest
from seizurefit.forest import Dataset, _pure, train_forest

try:
    from seizurefit.forest import _speedups
except ImportError:
    _speedups = None


def blobs(n_rows, seed=0):
    rng = np.random.default_rng(seed)
    half = n_rows // 2
    a = np.clip(rng.normal(0.35, 0.12, size=(half, 4)), 0.0, 1.0)
    b = np.clip(rng.normal(0.65, 0.12, size=(n_rows - half, 4)), 0.0, 1.0)
    return Dataset(np.vstack([a, b]),
                   np.array([0] * half + [1] * (n_rows - half)))


def run_backend(kernel, ds, probe, trees):
    forest._kernel = kernel
    t0 = time.perf_counter()
    model = train_forest(ds, n_trees=trees, m_try=2, seed=11)
    t_train = time.perf_counter() - t0
    t0 = time.perf_counter()
    pred = model.predict_rows(probe)
    t_predict = time.perf_counter() - t0
    return model, pred, t_train, t_predict


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trees", type=int, default=100)
    parser.add_argument("--rows", type=int, nargs="+", default=[400, 2000])
    args = parser.parse_args()

    if _speedups is None:
        print("compiled kernel not built; showing pure-Python numbers only")
    original = forest._kernel

    print(f"{'rows':>6} {'backend':>9} {'train (s)':>10} {'predict (s)':>12} "
          f"{'speedup':>8}")
    try:
        for rows in args.rows:
            ds = blobs(rows)
            probe = np.random.default_rng(1).uniform(size=(5000, 4))
            _, pure_pred, pure_train, pure_predict = run_backend(
                _pure, ds, probe, args.trees)
            print(f"{rows:>6} {'pure':>9} {pure_train:>10.3f} "
                  f"{pure_predict:>12.3f} {'1.0x':>8}")
            if _speedups is not None:
                _, fast_pred, fast_train, fast_predict = run_backend(
                    _speedups, ds, probe, args.trees)
                if not np.array_equal(pure_pred, fast_pred):
                    raise SystemExit("backends disagree on predictions!")
                print(f"{rows:>6} {'compiled':>9} {fast_train:>10.3f} "
                      f"{fast_predict:>12.3f} "
                      f"{pure_train / fast_train:>7.1f}x")
    finally:
        forest._kernel = original
    if _speedups is not None:
        print("prediction parity: identical across backends")


if __name__ == "__main__":
    main()
