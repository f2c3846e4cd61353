"""Time the compiled kernels against their numpy fallbacks.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``.  Each kernel is
called on identical inputs under both backends; the table shows the best of
N wall-clock timings and the speedup.  The outputs are also compared so a
fast but wrong build is caught here too.
"""
from __future__ import annotations

import argparse
import sys
import timeit

import numpy as np

from stockcast import kernels
from stockcast.models.svm import rbf_kernel
from stockcast.models.tree import build_tree


def make_cases(seed: int = 0):
    g = np.random.default_rng(seed)
    n, d = 2000, 9
    X = np.ascontiguousarray(np.round(g.normal(size=(n, d)), 2))
    y_cls = (X[:, 0] + 0.5 * X[:, 1] > 0).astype(np.float64)
    y_reg = X[:, 0] ** 2 + g.normal(scale=0.1, size=n)
    w = np.ones(n)
    idx = np.arange(n, dtype=np.int64)
    feats = np.arange(d, dtype=np.int64)
    tree = build_tree(X, y_cls, "classify", max_depth=10, min_leaf=2)

    m = 600
    K = np.ascontiguousarray(rbf_kernel(X[:m], X[:m], 0.1) + 1.0)
    ys = 2.0 * y_cls[:m] - 1.0

    return {
        "best_split (classify, n=2000, d=9)": lambda b: b.best_split(X, y_cls, w, idx, feats, kernels.CLASSIFY, 5),
        "best_split (regress, n=2000, d=9)": lambda b: b.best_split(X, y_reg, w, idx, feats, kernels.REGRESS, 5),
        "tree_apply (n=2000, depth 10)": lambda b: b.tree_apply(X, tree.feature, tree.threshold, tree.left, tree.right),
        "svc_dual_cd (n=600, 50 epochs)": lambda b: b.svc_dual_cd(K, ys, 1.0, 0.0, 50),
        "svr_dual_cd (n=600, 50 epochs)": lambda b: b.svr_dual_cd(K, y_reg[:m], 1.0, 0.1, 0.0, 50),
    }


def same_result(a, b) -> bool:
    if isinstance(a, tuple):
        return len(a) == len(b) and all(same_result(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.allclose(a, b, rtol=0, atol=1e-10)
    return a == b


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled backend not built; only the numpy fallback is available", file=sys.stderr)
        return 1
    py, cy = kernels.load_backend("python"), kernels.load_backend("cython")

    print(f"{'kernel':38s}{'python s':>12s}{'cython s':>12s}{'speedup':>10s}  match")
    for name, call in make_cases().items():
        t_py = min(timeit.repeat(lambda: call(py), number=1, repeat=args.repeat))
        t_cy = min(timeit.repeat(lambda: call(cy), number=1, repeat=args.repeat))
        match = same_result(call(py), call(cy))
        print(f"{name:38s}{t_py:12.5f}{t_cy:12.5f}{t_py / t_cy:9.1f}x  {'yes' if match else 'NO'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
