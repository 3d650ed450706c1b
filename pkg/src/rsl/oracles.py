"""Independent stochastic-process simulators used as correctness oracles.

These deliberately avoid the spreading engine: the urn, the continuous-time
branching process and the renewal process each give a second, independent
route to a limit law that the closed-form module and the SI simulator are
tested against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels, rng
from .errors import ParameterError
from .generators import OffspringSpec
from .spreading import SpreadingTimeSpec


@dataclass(frozen=True)
class UrnState:
    """Two-color reinforcement urn: each draw adds ``add_per_draw`` balls of
    the drawn color (total grows by exactly that amount per step)."""

    type1: int
    type2: int
    add_per_draw: int

    def __post_init__(self):
        if self.type1 < 1 or self.type2 < 1:
            raise ParameterError("urn needs at least one ball of each type")
        if self.add_per_draw < 1:
            raise ParameterError("add_per_draw must be >= 1")

    def limit_beta_params(self) -> tuple[float, float]:
        """The limiting type-1 fraction is Beta(t1/a, t2/a)."""
        a = float(self.add_per_draw)
        return self.type1 / a, self.type2 / a


def polya_limit_sample(initial: UrnState, steps: int, seed: int) -> float:
    """Type-1 fraction after ``steps`` reinforced draws."""
    if steps < 1:
        raise ParameterError("steps must be >= 1")
    out = kernels.polya_fractions(initial.type1, initial.type2,
                                  initial.add_per_draw, steps, 1,
                                  rng.mix(seed, rng.DOMAIN_URN))
    return float(out[0])


def polya_limit_samples(initial: UrnState, steps: int, runs: int,
                        master_seed: int) -> np.ndarray:
    """Independent copies of :func:`polya_limit_sample` (run i uses the
    derived seed mix(master, i), so the batch is order-independent)."""
    if steps < 1 or runs < 1:
        raise ParameterError("steps and runs must be >= 1")
    return kernels.polya_fractions(initial.type1, initial.type2,
                                   initial.add_per_draw, steps, runs,
                                   rng.mix(master_seed, rng.DOMAIN_URN))


def polya_step_distribution(state: UrnState) -> list[tuple[float, float]]:
    """Exact one-step law of the type-1 fraction: [(probability, fraction)].

    Closed-form companion used to verify the martingale property without
    simulation.
    """
    t1, t2, a = state.type1, state.type2, state.add_per_draw
    total = t1 + t2
    return [
        (t1 / total, (t1 + a) / (total + a)),
        (t2 / total, t1 / (total + a)),
    ]


@dataclass(frozen=True)
class BranchingTrace:
    """Population snapshots Z(t_i) of one branching-process run."""

    sample_times: np.ndarray
    counts: np.ndarray
    truncated: bool
    offspring: Optional[OffspringSpec] = None
    dist: Optional[SpreadingTimeSpec] = None


def simulate_branching(offspring: OffspringSpec, dist: SpreadingTimeSpec,
                       sample_times, seed: int,
                       event_cap: int = 10_000_000) -> BranchingTrace:
    """Continuous-time branching process: one individual at time 0, each
    individual dies after an i.i.d. delay and leaves an offspring-draw of
    children.  Exceeding the event budget is reported, never silent."""
    ts = np.asarray(sorted(float(t) for t in sample_times), dtype=np.float64)
    if len(ts) == 0 or ts[0] < 0:
        raise ParameterError("need at least one non-negative sample time")
    kind, params = offspring.kernel_args()
    counts, truncated = kernels.branching_counts(
        kind, params, dist.kind, dist.p0, dist.p1, ts,
        rng.mix(seed, rng.DOMAIN_BRANCH), event_cap)
    return BranchingTrace(sample_times=ts, counts=counts, truncated=bool(truncated),
                          offspring=offspring, dist=dist)


def simulate_renewal(dist: SpreadingTimeSpec, t: float, seed: int) -> int:
    """Number of renewals by time ``t`` with i.i.d. holding times."""
    if t < 0:
        raise ParameterError("t must be >= 0")
    if t == 0:
        return 0
    return int(kernels.renewal_count(dist.kind, dist.p0, dist.p1, t,
                                     rng.mix(seed, rng.DOMAIN_RENEWAL)))
