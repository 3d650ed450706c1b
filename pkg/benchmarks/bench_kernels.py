"""Benchmark: compiled extension vs pure-Python kernels on the hot paths.

Run from the repository root:

    python benchmarks/bench_kernels.py [--quick]

Both backends are imported directly (no env tricks needed) and fed the
same seeds, so the outputs are identical and only the clock differs.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from rsl import _kernels_py as pure
from rsl.generators import erdos_renyi
from rsl.spreading import at_count, exponential, infected_subgraph, rumor_graph, simulate_si

try:
    from rsl import _ckern as compiled
except ImportError:
    compiled = None


def timeit(fn, reps):
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - t0) / reps


def bench(name, make_call, reps_compiled, reps_pure):
    tc = timeit(make_call(compiled), reps_compiled) if compiled else float("nan")
    tp = timeit(make_call(pure), reps_pure)
    speedup = tp / tc if compiled else float("nan")
    print(f"{name:<42} {tc * 1e3:>10.3f} {tp * 1e3:>10.3f} {speedup:>9.1f}x")
    return speedup


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true", help="fewer repetitions")
    args = ap.parse_args()
    rc = 50 if args.quick else 300
    rp = 3 if args.quick else 10

    if compiled is None:
        print("compiled backend not built; timing the pure backend only\n")

    # shared inputs
    from rsl.generators import regular_tree

    h = simulate_si(regular_tree(3), 0, exponential(1.0), at_count(400), 5)
    tree = infected_subgraph(h)
    host = erdos_renyi(2000, 10.0, seed=3)
    hg = simulate_si(host, 11, exponential(1.0), at_count(100), 7)
    rumor = rumor_graph(host, hg)
    times = np.array([1.0, 2.0, 4.0, 6.0])

    print(f"{'kernel':<42} {'compiled ms':>10} {'pure ms':>10} {'speedup':>10}")
    bench("si_regular d=3 n=400 (one trial)",
          lambda mod: (lambda: mod.si_regular(3, 0, 1.0, 0.0, 0, 400, 42, 10**7)),
          rc, rp * 3)
    bench("tree_logcent n=400",
          lambda mod: (lambda: mod.tree_logcent(tree.indptr, tree.adj)),
          rc * 4, rp * 10)
    bench("bfs_logcent_all (ER rumor graph n=100)",
          lambda mod: (lambda: mod.bfs_logcent_all(rumor.indptr, rumor.adj)),
          rc, rp * 3)
    bench("si_graph on ER m=2000 to n=100",
          lambda mod: (lambda: mod.si_graph(host.indptr, host.adj, 11, 0, 1.0,
                                            0.0, 0, 100, 9, 10**7)),
          rc, rp * 3)
    bench("polya urn 10^4 steps x 10 runs",
          lambda mod: (lambda: mod.polya_fractions(1, 3, 2, 10_000, 10, 77)),
          rc // 5 + 1, rp)
    bench("branching to t=6 (exp lifetimes, eta=2)",
          lambda mod: (lambda: mod.branching_counts(0, np.array([2.0]), 0, 1.0,
                                                    0.0, times, 3, 10**7)),
          rc, rp * 3)


if __name__ == "__main__":
    main()
