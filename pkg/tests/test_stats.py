import math

import numpy as np
import pytest

from rsl.stats import (chi_square_gof, chi_square_pvalue, chi_square_two_sample,
                       ks_distance, ks_two_sample, wilson_interval)


def test_wilson_interval_known_value():
    lo, hi = wilson_interval(25, 100)
    # classic worked example for p_hat = 0.25, n = 100
    assert lo == pytest.approx(0.1754, abs=5e-4)
    assert hi == pytest.approx(0.3430, abs=5e-4)


def test_wilson_interval_edges():
    assert wilson_interval(0, 50)[0] == 0.0
    assert wilson_interval(50, 50)[1] == 1.0
    assert wilson_interval(0, 0) == (0.0, 1.0)


def test_wilson_interval_covers_truth():
    # calibration smoke: the 95% interval misses the true p rarely
    from rsl.rng import Stream

    stream = Stream(12)
    misses = 0
    runs = 2000
    for _ in range(runs):
        k = sum(1 for _ in range(100) if stream.random() < 0.3)
        lo, hi = wilson_interval(k, 100)
        if not lo <= 0.3 <= hi:
            misses += 1
    assert misses / runs < 0.08


def test_chi_square_pvalue_closed_forms():
    # df = 2: survival is exp(-x/2); df = 4: exp(-x/2) (1 + x/2)
    for x in (0.5, 1.0, 3.7, 9.0):
        assert chi_square_pvalue(x, 2) == pytest.approx(math.exp(-x / 2), rel=1e-10)
        assert chi_square_pvalue(x, 4) == pytest.approx(
            math.exp(-x / 2) * (1 + x / 2), rel=1e-10)
    assert chi_square_pvalue(0.0, 3) == 1.0


def test_chi_square_gof_detects_bias_and_accepts_fit():
    stat, p = chi_square_gof([100, 100, 100], [100, 100, 100])
    assert stat == 0.0 and p == 1.0
    stat, p = chi_square_gof([150, 100, 50], [100, 100, 100])
    assert p < 0.001


def test_chi_square_two_sample_symmetric():
    a = [50, 60, 40]
    b = [55, 52, 43]
    sa, pa = chi_square_two_sample(a, b)
    sb, pb = chi_square_two_sample(b, a)
    assert sa == pytest.approx(sb) and pa == pytest.approx(pb)
    _, p_same = chi_square_two_sample([30, 30, 30], [30, 30, 30])
    assert p_same == pytest.approx(1.0)


def test_ks_distance_exact_uniform():
    # grid at midpoints: max gap is exactly 1/(2n)
    n = 10
    xs = [(i + 0.5) / n for i in range(n)]
    assert ks_distance(xs, lambda x: x) == pytest.approx(1.0 / (2 * n))


def test_ks_distance_detects_wrong_cdf():
    xs = np.linspace(0.005, 0.995, 200)  # roughly uniform samples
    d_uniform = ks_distance(xs, lambda x: x)
    d_wrong = ks_distance(xs, lambda x: x**3)
    assert d_uniform < 0.01 < d_wrong


def test_ks_two_sample_zero_for_identical():
    xs = np.linspace(0, 1, 50)
    assert ks_two_sample(xs, xs) == 0.0
    assert ks_two_sample(xs, xs + 10.0) == 1.0
