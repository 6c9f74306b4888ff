"""Benchmark the CSR kernels: numba fast path vs pure-numpy fallback.

Run `python3 benchmarks/bench_kernels.py` to time the current backend, or
`python3 benchmarks/bench_kernels.py --compare` to spawn both backends as
subprocesses and print a side-by-side table.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np


def build_graph(n, avg_degree, seed):
    from graphtab.graph import from_edges

    rng = np.random.default_rng(seed)
    m = n * avg_degree // 2
    edges = rng.integers(0, n, size=(m, 2))
    return from_edges(edges[edges[:, 0] != edges[:, 1]], n)


def run(n=200_000, avg_degree=20, d=16, reps=5, seed=0):
    import graphtab
    from graphtab import _kernels
    from graphtab.spectral import laplacian_matmat, laplacian_operator

    g = build_graph(n, avg_degree, seed)
    rng = np.random.default_rng(seed + 1)
    x = rng.standard_normal(g.n)
    X = rng.standard_normal((g.n, d))
    op = laplacian_operator(g)

    # warm up (numba compilation)
    _kernels.csr_matvec(g.row_offsets, g.col_indices, x)
    _kernels.csr_matmat(g.row_offsets, g.col_indices, X)

    results = {}
    for name, fn in (
        ("csr_matvec", lambda: _kernels.csr_matvec(g.row_offsets, g.col_indices, x)),
        ("csr_matmat", lambda: _kernels.csr_matmat(g.row_offsets, g.col_indices, X)),
        ("laplacian_matmat", lambda: laplacian_matmat(op, X)),
    ):
        best = min(_timeit(fn) for _ in range(reps))
        results[name] = best
    print(f"backend={graphtab.backend_name()} n={n} nnz={g.num_stored_entries} d={d}")
    for name, secs in results.items():
        print(f"  {name:<18} {secs * 1e3:8.2f} ms")
    return results


def _timeit(fn):
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def compare():
    for flag in ("0", "1"):
        env = dict(os.environ, GRAPHTAB_DISABLE_NUMBA=flag)
        subprocess.run([sys.executable, __file__], env=env, check=True)


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--compare", action="store_true")
    parser.add_argument("--n", type=int, default=200_000)
    parser.add_argument("--avg-degree", type=int, default=20)
    parser.add_argument("--dim", type=int, default=16)
    args = parser.parse_args()
    if args.compare:
        compare()
    else:
        run(n=args.n, avg_degree=args.avg_degree, d=args.dim)
