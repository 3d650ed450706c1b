import math

import numpy as np
import pytest

from rsl import spreading as sp
from rsl import theory
from rsl.errors import ParameterError
from rsl.generators import (offspring_categorical, offspring_deterministic,
                            offspring_poisson)


def simpson_inc_beta(x, a, b):
    """Independent quadrature oracle for I_x(a, b).

    Composite Simpson on a fine grid; a power substitution u = t^p removes
    the origin singularity whenever the left exponent is below one.
    """
    def left(x, p, q):
        # integral of t^(p-1) (1-t)^(q-1) over [0, x]: binomial series over
        # [0, eps] handles the origin, Simpson does the smooth remainder
        eps = min(0.1, 0.5 * x)
        head = 0.0
        coeff = 1.0
        s = q - 1.0
        for j in range(120):
            head += coeff * eps ** (p + j) / (p + j)
            coeff *= -(s - j) / (j + 1.0)
        n = 16384
        u = np.linspace(eps, x, n + 1)
        f = u ** (p - 1.0) * (1.0 - u) ** (q - 1.0)
        w = np.ones(n + 1)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        return head + float((w * f).sum()) * (u[1] - u[0]) / 3.0

    norm = math.exp(math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b))
    if x <= 0.5:
        return norm * left(x, a, b)
    return 1.0 - norm * left(1.0 - x, b, a)


def test_inc_beta_uniform_cdf():
    assert theory.inc_beta(0.5, 1, 1) == pytest.approx(0.5, abs=1e-14)


def test_inc_beta_hand_value():
    # 2 * integral_0^1/2 (1-t) dt = 3/4
    assert theory.inc_beta(0.5, 1, 2) == pytest.approx(0.75, abs=1e-13)


def test_inc_beta_symmetry_identity():
    for (x, a, b) in [(0.3, 0.7, 2.0), (0.5, 0.5, 1.5), (0.9, 3.0, 0.4),
                      (0.12, 2.5, 2.5), (0.77, 1.0, 9.0)]:
        s = theory.inc_beta(x, a, b) + theory.inc_beta(1.0 - x, b, a)
        assert s == pytest.approx(1.0, abs=1e-12)


def test_inc_beta_against_quadrature_oracle():
    grid_a = [0.25, 0.5, 1.0, 1.7, 3.0]
    grid_b = [0.3, 1.0, 1.5, 2.5]
    grid_x = np.linspace(0.02, 0.98, 50)
    checked = 0
    for a in grid_a:
        for b in grid_b:
            for x in grid_x:
                ref = simpson_inc_beta(float(x), a, b)
                assert abs(theory.inc_beta(float(x), a, b) - ref) < 1e-10
                checked += 1
    assert checked == 1000


def test_inc_beta_domain_errors():
    with pytest.raises(ParameterError):
        theory.inc_beta(1.2, 1, 1)
    with pytest.raises(ParameterError):
        theory.inc_beta(0.5, -1, 1)


def test_alpha_3_is_exactly_one_quarter():
    assert theory.alpha_d(3) == pytest.approx(0.25, abs=1e-12)


def test_alpha_4_closed_form():
    assert theory.alpha_d(4) == pytest.approx(4.0 / math.pi - 1.0, abs=1e-12)


def test_alpha_large_d_approaches_1_minus_log2():
    assert abs(theory.alpha_d(10**6) - (1.0 - math.log(2.0))) < 1e-3


def test_alpha_d_rejects_small_degree():
    with pytest.raises(ParameterError):
        theory.alpha_d(2)


def test_ck_limit_reduces_to_alpha_d_at_k1():
    for d in range(3, 11):
        assert theory.ck_limit(d, 1) == pytest.approx(theory.alpha_d(d), abs=1e-12)


def test_ck_limit_hand_value_d3_k2():
    # I_1/2(2,2) + 2 (I_1/2(1,3) - 1) = 0.5 + 2 (0.875 - 1) = 0.25
    assert theory.ck_limit(3, 2) == pytest.approx(0.25, abs=1e-12)


def test_ck_values_in_unit_interval_and_sum_below_one():
    for d in range(3, 13):
        total = 0.0
        for k in range(1, 101):
            v = theory.ck_limit(d, k)
            assert 0.0 <= v <= 1.0
            total += v
        assert total <= 1.0 + 1e-9


def test_ck_upper_bound_values():
    assert theory.ck_upper_bound(1) == 2
    assert theory.ck_upper_bound(10) == pytest.approx(0.21484375, abs=1e-15)


def test_ck_upper_bound_dominates_limit():
    for d in range(3, 13):
        for k in range(2, 31):
            assert theory.ck_limit(d, k) <= theory.ck_upper_bound(k) + 1e-12


def test_beta_limit_params():
    assert theory.beta_limit_params(4, 1) == pytest.approx((0.5, 1.5))
    assert theory.beta_limit_params(3, 1) == pytest.approx((1.0, 2.0))
    assert theory.beta_limit_params(3, 4) == pytest.approx((4.0, 2.0))


def test_malthusian_exponential_closed_form():
    for lam in (0.5, 1.0, 2.5):
        for m in (1.5, 2.0, 4.0):
            assert theory.malthusian(m, sp.exponential(lam)) == pytest.approx(
                lam * (m - 1.0), abs=1e-9)


def test_malthusian_deterministic_hand_value():
    assert theory.malthusian(2.0, sp.deterministic(1.0)) == pytest.approx(
        math.log(2.0), abs=1e-10)


def test_malthusian_near_critical():
    a = theory.malthusian(1.0001, sp.exponential(1.0))
    assert a == pytest.approx(1e-4, rel=1e-3)


def test_malthusian_defining_equation_residual():
    for dist in (sp.exponential(1.3), sp.deterministic(0.8),
                 sp.uniform(0.5, 1.5), sp.gamma_delay(2.0, 3.0),
                 sp.gamma_delay(0.6, 1.0), sp.uniform(0.0, 2.0)):
        for gamma in (1.5, 3.0):
            alpha = theory.malthusian(gamma, dist)
            residual = gamma * theory._laplace_moment(dist, alpha, 0) - 1.0
            assert abs(residual) < 1e-9


def test_laplace_moment_quadrature_matches_closed_forms():
    # uniform: (e^{-a lo} - e^{-a hi}) / (a (hi-lo)); gamma: (r/(r+a))^k
    a = 0.9
    lo, hi = 0.5, 1.5
    ref = (math.exp(-a * lo) - math.exp(-a * hi)) / (a * (hi - lo))
    assert theory._laplace_moment(sp.uniform(lo, hi), a, 0) == pytest.approx(ref, abs=1e-12)
    shape, rate = 2.3, 1.1
    ref = (rate / (rate + a)) ** shape
    assert theory._laplace_moment(sp.gamma_delay(shape, rate), a, 0) == pytest.approx(
        ref, rel=1e-10)
    ref1 = shape * rate**shape / (rate + a) ** (shape + 1.0)
    assert theory._laplace_moment(sp.gamma_delay(shape, rate), a, 1) == pytest.approx(
        ref1, rel=1e-10)


def test_malthusian_rejects_subcritical():
    with pytest.raises(ParameterError):
        theory.malthusian(1.0, sp.exponential(1.0))


def test_branching_constant_exponential_is_one():
    for lam in (0.5, 1.0, 3.0):
        for m in (2.0, 3.0):
            assert theory.branching_constant(m, sp.exponential(lam)) == pytest.approx(
                1.0, abs=1e-8)


def test_branching_constant_deterministic_hand_value():
    # alpha = ln 2, integral y e^{-alpha y} dF = e^{-ln2}/1 = 1/2
    # c' = 1 / (ln2 * 4 * 1/2) = 1/(2 ln 2)
    assert theory.branching_constant(2.0, sp.deterministic(1.0)) == pytest.approx(
        1.0 / (2.0 * math.log(2.0)), abs=1e-10)


def test_branching_constant_positive():
    for dist in (sp.uniform(0.2, 0.9), sp.gamma_delay(1.7, 2.0)):
        assert theory.branching_constant(2.5, dist) > 0.0


def test_extinction_deterministic_two():
    assert theory.extinction_prob(offspring_deterministic(2)) == pytest.approx(0.0, abs=1e-12)


def test_extinction_categorical_hand_value():
    spec = offspring_categorical({0: 0.25, 2: 0.75})
    assert theory.extinction_prob(spec) == pytest.approx(1.0 / 3.0, abs=1e-10)


def test_extinction_subcritical_is_one():
    assert theory.extinction_prob(offspring_poisson(0.8)) == 1.0
    assert theory.extinction_prob(offspring_categorical({0: 0.5, 2: 0.5})) == 1.0


def test_extinction_fixed_point_residual_and_supercriticality():
    for spec in (offspring_poisson(3.0), offspring_poisson(1.5),
                 offspring_categorical({0: 0.2, 1: 0.2, 3: 0.6})):
        q = theory.extinction_prob(spec)
        assert abs(spec.pgf(q) - q) < 1e-10
        assert (q < 1.0) == (spec.mean() > 1.0)
