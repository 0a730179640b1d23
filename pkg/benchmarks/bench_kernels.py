"""Compare the compiled kernels with their numpy fallbacks on mSBM graphs.

    python benchmarks/bench_kernels.py --n 2000 10000 --repeat 3
"""
import argparse
import time

import numpy as np

from fairad import _fallback, kernels
from fairad.algebraic import RelaxationConfig, build_algebraic_affinity, compute_test_vectors
from fairad.coarsening import coarsen_level, interpolation_matrix, volume_ordering
from fairad.fairness import build_fairness_matrix
from fairad.msbm import MsbmConfig, msbm_generate

try:
    from fairad import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n, seed):
    inst = msbm_generate(MsbmConfig(n=n, h=2, k=4, seed=seed))
    g = inst.graph
    X = compute_test_vectors(g, build_fairness_matrix(inst.groups), RelaxationConfig(seed=seed))
    Wa = build_algebraic_affinity(g, X, n / np.log(n))
    W = Wa.W
    rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(W.indptr))
    cols = W.indices.astype(np.int64)
    order = volume_ordering(np.ones(n))
    coarse = coarsen_level(Wa, order, 1e-4)
    P = interpolation_matrix(Wa, coarse)
    P.sort_indices()
    V = np.random.default_rng(seed).normal(size=(n, 4))
    return g.num_edges, {
        "greedy_select": lambda impl: kernels.greedy_select(
            W.indptr, W.indices, W.data, order, Wa.degrees, 1e-4, impl=impl),
        "edge_max_absdiff": lambda impl: kernels.edge_max_absdiff(rows, cols, X, impl=impl),
        "csr_matmat(R=10)": lambda impl: kernels.csr_matmat(W, X, impl=impl),
        "csr_matmat(k=4)": lambda impl: kernels.csr_matmat(W, V, impl=impl),
        "galerkin_dense": lambda impl: kernels.galerkin_dense(W, P, impl=impl),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[2000, 10000])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled kernels not built; only the fallback is timed")
    print(f"{'n':>7} {'edges':>10} {'kernel':<18} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    for n in args.n:
        edges, fns = cases(n, args.seed)
        for name, fn in fns.items():
            tp = best_of(lambda: fn(_fallback), args.repeat)
            if _kernels is None:
                print(f"{n:>7} {edges:>10} {name:<18} {tp * 1e3:>10.1f} {'-':>10} {'-':>8}")
                continue
            tc = best_of(lambda: fn(_kernels), args.repeat)
            print(f"{n:>7} {edges:>10} {name:<18} {tp * 1e3:>10.1f} {tc * 1e3:>10.1f} "
                  f"{tp / tc:>7.1f}x")


if __name__ == "__main__":
    main()
