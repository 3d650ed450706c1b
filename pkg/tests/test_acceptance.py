"""End-to-end acceptance criteria.

Each test prints one PASS/FAIL line (visible with -s or on failure) and
asserts the stated tolerance.  Heavy Monte Carlo runs are shared through
session fixtures; the whole module is built to finish in a few minutes on
a laptop with the compiled kernels.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_tree
from rsl import centrality as ct
from rsl import experiments as ex
from rsl import spreading as sp
from rsl import stats, theory
from rsl.generators import GeometricTreeSpec, offspring_poisson
from rsl.graphs import root_at
from rsl.oracles import UrnState, polya_limit_samples

pytestmark = pytest.mark.acceptance


def _report(num, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {detail}")
    return ok


@pytest.fixture(scope="session")
def regular_runs():
    """10^4-trial spreading runs at n = 400 for d in {3, 4, 6}."""
    runs = {}
    for d in (3, 4, 6):
        t0 = time.monotonic()
        cfg = ex.ExperimentConfig(family="regular", family_params={"d": d},
                                  dist=sp.exponential(1.0), stop=sp.at_count(400),
                                  trials=10_000, master_seed=20_240 + d, k_max=10)
        runs[d] = (ex.run_experiment(cfg, workers=1), time.monotonic() - t0)
    return runs


def test_criterion_1_detection_probability_3_regular(regular_runs):
    result, elapsed = regular_runs[3]
    det = result.detection
    ok = 0.22 <= det <= 0.28 and elapsed < 60.0
    assert _report(1, ok, f"3-regular detection {det:.4f} in [0.22, 0.28], "
                          f"{elapsed:.1f}s < 60s"), (det, elapsed)


def test_criterion_2_theory_curve_fidelity(regular_runs):
    worst = []
    ok = True
    for d in (3, 4, 6):
        result, _ = regular_runs[d]
        comparison = ex.compare_to_theory(result, d, allowance=0.02)
        worst.append((d, comparison.max_deviation))
        ok = ok and comparison.ok
    detail = ", ".join(f"d={d}: max|emp-limit|={dev:.4f}" for d, dev in worst)
    assert _report(2, ok, detail + " (each < CI + 0.02, k <= 10)")


def test_criterion_3_large_degree_limit():
    t0 = time.monotonic()
    value = theory.alpha_d(10**6)
    elapsed = time.monotonic() - t0
    err = abs(value - (1.0 - math.log(2.0)))
    ok = err < 1e-3 and elapsed < 1.0
    assert _report(3, ok, f"alpha_d(1e6) = {value:.7f}, |err| = {err:.2e} < 1e-3, "
                          f"{elapsed * 1e3:.0f}ms < 1s")


def test_criterion_4_error_bound_dominates():
    t0 = time.monotonic()
    ok = True
    worst = 0.0
    for d in range(3, 13):
        for k in range(2, 31):
            gap = theory.ck_limit(d, k) - theory.ck_upper_bound(k)
            worst = max(worst, gap)
            ok = ok and gap <= 1e-12
    elapsed = time.monotonic() - t0
    ok = ok and elapsed < 1.0
    assert _report(4, ok, f"limit <= k(k+1)/2^(k-1) for d in 3..12, k in 2..30 "
                          f"(max gap {worst:.1e}), {elapsed * 1e3:.0f}ms < 1s")


def test_criterion_5_polya_urn_limit_law():
    t0 = time.monotonic()
    samples = polya_limit_samples(UrnState(1, 3, 2), steps=10_000, runs=10_000,
                                  master_seed=71)
    ks = stats.ks_distance(samples, lambda x: theory.inc_beta(x, 0.5, 1.5))
    elapsed = time.monotonic() - t0
    ok = ks < 0.02 and elapsed < 300.0
    assert _report(5, ok, f"urn (1,3)+2: KS vs Beta(1/2, 3/2) = {ks:.4f} < 0.02, "
                          f"{elapsed:.1f}s < 5min")


def test_criterion_6_brute_force_centrality_oracle():
    t0 = time.monotonic()
    checked = 0
    ok = True
    for seed in range(200):
        n = 2 + seed % 7  # sizes 2..8
        g = random_tree(n, seed + 1)
        brute = ct.brute_force_order_counts(g)
        for v in range(n):
            sizes = root_at(g, v).subtree_size
            prod = 1
            for s in sizes:
                prod *= int(s)
            formula = Fraction(math.factorial(n), prod)
            if formula != brute[v]:
                ok = False
        scores = brute
        best = max(scores)
        argmax = [v for v in range(n) if scores[v] == best]
        centers, _ = ct.rumor_center(g)
        if centers != argmax:
            ok = False
        checked += 1
    elapsed = time.monotonic() - t0
    ok = ok and elapsed < 10.0
    assert _report(6, ok, f"{checked} random trees (n <= 8): product formula == "
                          f"order counts, balance rule == argmax; "
                          f"{elapsed:.1f}s < 10s")


def test_criterion_7_geometric_tree_detection():
    t0 = time.monotonic()
    spec = GeometricTreeSpec(alpha=1.0, b=0.2, c=5.0, root_degree=27, depth=20)
    assert spec.detection_degree_ok()  # 27 > c/b + 1 = 26
    rows = ex.geometric_detection(spec, sp.uniform(0.5, 1.5),
                                  t_list=[4.0, 6.0, 8.0, 10.0, 12.0, 14.0],
                                  trials=300, seed=17)
    props = [p for _, p, _ in rows]
    elapsed = time.monotonic() - t0
    nondecreasing = all(b >= a for a, b in zip(props, props[1:]))
    ok = props[-1] >= 0.9 and nondecreasing and elapsed < 300.0
    assert _report(7, ok, f"verified geometric tree (d*=27 > c/b+1=26): detection "
                          f"sweep {props}, final >= 0.9, nondecreasing; "
                          f"{elapsed:.1f}s < 5min")


def test_criterion_8_random_tree_positive_detection():
    t0 = time.monotonic()
    rt = ex.random_tree_detection(offspring_poisson(3.0), offspring_poisson(3.0),
                                  sp.uniform(0.5, 1.5), sp.at_count(200),
                                  trials=5000, seed=99)
    elapsed = time.monotonic() - t0
    ok = rt.detection >= 0.05 and elapsed < 300.0
    assert _report(8, ok, f"Poisson(3) random tree, n=200, {rt.trials} surviving "
                          f"runs ({rt.attempts} attempts): detection "
                          f"{rt.detection:.4f} >= 0.05; {elapsed:.1f}s < 5min")


def test_criterion_9_conditional_error_bound():
    rt = ex.random_tree_detection(offspring_poisson(3.0), offspring_poisson(3.0),
                                  sp.exponential(1.0), sp.at_count(200),
                                  trials=12_000, seed=31)
    rows = rt.conditional_bound_rows(1.5, range(2, 9))
    ok = True
    details = []
    for k, m, p, hi, bound in rows:
        half = hi - p
        ok = ok and m >= 200 and p <= bound + half
        details.append(f"k={k}: {p:.3f}<=1/{k}+CI ({m} samples)")
    assert _report(9, ok, "; ".join(details))


def test_criterion_10_er_error_decay():
    t0 = time.monotonic()
    result = ex.er_experiment(m=2000, c=10.0, n=100, trials=2000, seed=5,
                              k_max=10, workers=1)
    elapsed = time.monotonic() - t0
    p = {k: result.proportion(k) for k in (1, 3, 5, 10)}
    decreasing = p[1] > p[3] > p[5] > p[10]
    ok = decreasing and p[10] < 0.05 and elapsed < 600.0
    assert _report(10, ok, f"ER m=2000 c=10 n=100: P(1)={p[1]:.4f} > "
                           f"P(3)={p[3]:.4f} > P(5)={p[5]:.4f} > "
                           f"P(10)={p[10]:.4f} < 0.05; {elapsed:.1f}s < 10min")


def test_criterion_11_worker_count_determinism():
    cfg = ex.ExperimentConfig(family="regular", family_params={"d": 3},
                              dist=sp.exponential(1.0), stop=sp.at_count(100),
                              trials=400, master_seed=2718, k_max=8)
    csv_1 = ex.result_to_csv(ex.run_experiment(cfg, workers=1))
    csv_8 = ex.result_to_csv(ex.run_experiment(cfg, workers=8))
    ok = csv_1 == csv_8
    assert _report(11, ok, f"byte-identical CSV with 1 and 8 workers "
                           f"({len(csv_1)} bytes)")
