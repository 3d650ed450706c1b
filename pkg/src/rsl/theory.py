"""Closed-form detection/error probabilities and branching-process constants.

Everything here is deterministic numerics: the regularized incomplete beta
function, the limiting probability that the estimator picks the k-th
infected node on a d-regular tree, its exponential upper bound, the
Malthusian growth rate for a general delay distribution, and extinction
probabilities of offspring distributions.  The Monte Carlo side of the
package treats these values as the reference curves.
"""

from __future__ import annotations

import math

from .errors import ParameterError
from .generators import OffspringSpec
from .spreading import DETERMINISTIC, EXPONENTIAL, UNIFORM, SpreadingTimeSpec

# below this, a limit value is reported as exactly zero (dominated by
# evaluation noise; keeps tail plots clean)
CLAMP_EPS = 1e-15


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    max_it = 500
    eps = 3e-16
    fpmin = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < fpmin:
        d = fpmin
    d = 1.0 / d
    h = d
    for m in range(1, max_it + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise ArithmeticError(f"betacf failed to converge for a={a}, b={b}, x={x}")


def inc_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta I_x(a, b): P(Beta(a, b) <= x).

    Continued-fraction evaluation with the x <-> 1-x symmetry switch at
    x = (a+1)/(a+b+2).
    """
    if not (a > 0 and b > 0):
        raise ParameterError(f"inc_beta needs a, b > 0, got a={a}, b={b}")
    if x < 0.0 or x > 1.0:
        raise ParameterError(f"inc_beta needs x in [0,1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    front = math.exp(math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                     + a * math.log(x) + b * math.log1p(-x))
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def beta_limit_params(d: int, k: int) -> tuple[float, float]:
    """Beta parameters of the limiting parent-side subtree fraction for the
    k-th infected node on a d-regular tree: (k-1+1/(d-2), 1+1/(d-2))."""
    if d < 3:
        raise ParameterError("need d >= 3")
    if k < 1:
        raise ParameterError("need k >= 1")
    inv = 1.0 / (d - 2)
    return (k - 1 + inv, 1.0 + inv)


def alpha_d(d: int) -> float:
    """Limiting correct-detection probability on the d-regular tree:
    d * I_{1/2}(1/(d-2), (d-1)/(d-2)) - (d-1)."""
    if d < 3:
        raise ParameterError("alpha_d is defined for d >= 3")
    inv = 1.0 / (d - 2)
    return d * inc_beta(0.5, inv, (d - 1.0) / (d - 2.0)) - (d - 1.0)


def ck_limit(d: int, k: int) -> float:
    """Limit of P(estimator picks the k-th infected node) on a d-regular tree.

    I_{1/2}(k-1+e, 1+e) + (d-1)(I_{1/2}(e, k+e) - 1) with e = 1/(d-2); the
    second term is computed as -(d-1) I_{1/2}(k+e, e) via the symmetry
    identity so large k does not lose precision to cancellation.
    """
    if d < 3:
        raise ParameterError("need d >= 3")
    if k < 1:
        raise ParameterError("need k >= 1")
    inv = 1.0 / (d - 2)
    first = inc_beta(0.5, k - 1 + inv, 1.0 + inv)
    second = inc_beta(0.5, k + inv, inv)
    value = first - (d - 1.0) * second
    if value < CLAMP_EPS:
        return 0.0
    return value


def ck_upper_bound(k: int) -> float:
    """Exponentially decaying error bound k(k+1)(1/2)^(k-1)."""
    if k < 1:
        raise ParameterError("need k >= 1")
    return k * (k + 1) * 0.5 ** (k - 1)


# ---------------------------------------------------------------------------
# numeric integration (used for the delay families without closed forms)


def _adaptive_simpson(f, a: float, b: float, tol: float, depth: int = 60) -> float:
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, fa, b, fb, m, fm, whole, tol, depth):
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return (recurse(a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
                + recurse(m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1))

    return recurse(a, fa, b, fb, 0.5 * (a + b), fm, whole, tol, depth)


def _laplace_moment(dist: SpreadingTimeSpec, alpha: float, power: int) -> float:
    """integral of y^power * exp(-alpha*y) dF(y) for power in {0, 1}.

    Closed forms for exponential and deterministic delays; adaptive
    quadrature for uniform and gamma (the gamma integrand is flattened by
    the substitution w = y^(shape+power) so the origin is regular).
    """
    if power not in (0, 1):
        raise ParameterError("power must be 0 or 1")
    if dist.kind == EXPONENTIAL:
        lam = dist.p0
        if power == 0:
            return lam / (lam + alpha)
        return lam / (lam + alpha) ** 2
    if dist.kind == DETERMINISTIC:
        s = dist.p0
        return s ** power * math.exp(-alpha * s)
    if dist.kind == UNIFORM:
        lo, hi = dist.p0, dist.p1
        scale = 1.0 / (hi - lo)
        return _adaptive_simpson(lambda y: scale * y ** power * math.exp(-alpha * y),
                                 lo, hi, 1e-14)
    shape, rate = dist.p0, dist.p1
    q = shape + power
    # substitute w = y^q; the Jacobian absorbs the y^(q-1) factor and the
    # integrand becomes pref * exp(-(rate+alpha) w^(1/q)), regular at 0
    pref = math.exp(shape * math.log(rate) - math.lgamma(shape)) / q
    y_max = (60.0 + 8.0 * q) / (rate + alpha)
    w_max = y_max ** q
    inv_q = 1.0 / q

    def g(w: float) -> float:
        y = w ** inv_q if w > 0.0 else 0.0
        return pref * math.exp(-(rate + alpha) * y)

    return _adaptive_simpson(g, 0.0, w_max, 1e-14 * max(1.0, pref * w_max))


def malthusian(gamma: float, dist: SpreadingTimeSpec) -> float:
    """Growth exponent: the root alpha > 0 of gamma * E[exp(-alpha Y)] = 1."""
    if not gamma > 1.0:
        raise ParameterError("the Malthusian parameter needs gamma > 1")

    def g(alpha: float) -> float:
        return gamma * _laplace_moment(dist, alpha, 0) - 1.0

    lo = 0.0
    hi = 1.0
    while g(hi) > 0.0:
        hi *= 2.0
        if hi > 1e12:
            raise ArithmeticError("failed to bracket the Malthusian root")
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def branching_constant(gamma: float, dist: SpreadingTimeSpec) -> float:
    """Prefactor c' of the mean-population growth c' * exp(alpha * t):
    c' = (m-1) / (alpha * m^2 * integral y e^(-alpha y) dF(y)), m = gamma."""
    alpha = malthusian(gamma, dist)
    denom = alpha * gamma * gamma * _laplace_moment(dist, alpha, 1)
    return (gamma - 1.0) / denom


def extinction_prob(offspring: OffspringSpec) -> float:
    """Smallest fixed point of the offspring pgf on [0, 1].

    Monotone iteration from 0 converges to the smallest root; (sub)critical
    distributions (mean <= 1, excluding the degenerate eta == 1) return 1
    directly since the iteration limit is 1 but approaches it too slowly at
    criticality.
    """
    mean = offspring.mean()
    if mean <= 1.0:
        if offspring.prob_of(1) >= 1.0 - 1e-15:
            return 0.0  # eta == 1 a.s.: the line never dies
        return 1.0
    s = 0.0
    for _ in range(100_000):
        nxt = offspring.pgf(s)
        if abs(nxt - s) < 1e-14:
            return nxt
        s = nxt
    return s
