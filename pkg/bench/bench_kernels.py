#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python reference.

Builds Rips filtrations of growing size and times clique expansion and
boundary reduction under both backends, verifying identical pairings.

Usage: python bench/bench_kernels.py [--n 400] [--eps 0.35]
"""
import argparse
import time

import numpy as np

from topoarch._kernels import pyref
from topoarch.data import PointCloud
from topoarch.rips import build_rips, pairwise_distances

try:
    from topoarch._kernels import _compiled
except ImportError:
    _compiled = None


def adjacency(dmat, eps):
    n = dmat.shape[0]
    iu, iv = np.nonzero(np.triu(dmat <= eps, 1))
    order = np.argsort(iv, kind="stable")
    indices = iu[order].astype(np.int32)
    counts = np.bincount(iv, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, indices


def bench(n, eps, seed=0):
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    dmat = pairwise_distances(pts)
    indptr, indices = adjacency(dmat, eps)

    results = {}
    backends = [("python", pyref)]
    if _compiled is not None:
        backends.append(("compiled", _compiled))

    cx = build_rips(PointCloud(pts), eps_max=eps, max_dim=2)
    facet_indptr, facets = cx.validate()
    print(f"n={n} eps={eps}: {len(cx)} simplices "
          f"({int((cx.dims == 1).sum())} edges, {int((cx.dims == 2).sum())} triangles)")

    partners = {}
    for name, impl in backends:
        t0 = time.perf_counter()
        out = impl.expand_cliques(indptr, indices, dmat, 2, 10**9)
        t_exp = time.perf_counter() - t0
        t0 = time.perf_counter()
        partners[name] = np.asarray(impl.reduce_boundary(facet_indptr, facets, cx.dims))
        t_red = time.perf_counter() - t0
        results[name] = (t_exp, t_red)
        print(f"  {name:9s} expand {t_exp * 1e3:9.1f} ms   reduce {t_red * 1e3:9.1f} ms"
              f"   (emitted {out[4]})")

    if len(partners) == 2:
        same = np.array_equal(partners["python"], partners["compiled"])
        print(f"  pairings identical: {same}")
        if not same:
            raise SystemExit("backend mismatch!")
        se, sr = results["python"][0] / results["compiled"][0], \
            results["python"][1] / results["compiled"][1]
        print(f"  speedup: expand {se:.1f}x, reduce {sr:.1f}x")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=400)
    ap.add_argument("--eps", type=float, default=0.35)
    args = ap.parse_args()
    if _compiled is None:
        print("compiled backend not available; timing pure Python only")
    for n in (args.n // 2, args.n):
        bench(n, args.eps)


if __name__ == "__main__":
    main()
