"""Susceptible-Infected spreading with i.i.d. edge transmission delays.

The engine is event-driven: every newly infected node draws one delay per
susceptible neighbor and pushes tentative arrival events on a min-heap;
the first pop for a node wins and later pops are discarded.  This is exact
for an arbitrary delay distribution with F(0) = 0 and F(0+) = 0.

Hosts can be explicit :class:`~rsl.graphs.Graph` objects or the lazy tree
generators from :mod:`rsl.generators` (infinite trees are never
materialized beyond the reached boundary).  Given the same host, source,
delay spec, stop rule and seed, the history is byte-for-byte reproducible
on both the compiled and pure backends.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels, rng
from .errors import ExhaustedGraphError, ParameterError
from .graphs import Graph, build_graph

# delay-distribution kind codes, shared with the kernels
EXPONENTIAL = 0
DETERMINISTIC = 1
UNIFORM = 2
GAMMA = 3

_KIND_NAMES = {EXPONENTIAL: "exp", DETERMINISTIC: "det", UNIFORM: "unif", GAMMA: "gamma"}

DEFAULT_EVENT_CAP = 10_000_000


@dataclass(frozen=True)
class SpreadingTimeSpec:
    """Edge delay distribution: strictly positive with probability one."""

    kind: int
    p0: float
    p1: float = 0.0

    def __post_init__(self):
        if self.kind == EXPONENTIAL:
            if not self.p0 > 0:
                raise ParameterError("exponential rate must be > 0")
        elif self.kind == DETERMINISTIC:
            if not self.p0 > 0:
                raise ParameterError("deterministic delay must be > 0")
        elif self.kind == UNIFORM:
            lo, hi = self.p0, self.p1
            if lo < 0 or not hi > lo:
                raise ParameterError("uniform delay needs 0 <= lo < hi")
        elif self.kind == GAMMA:
            if not (self.p0 > 0 and self.p1 > 0):
                raise ParameterError("gamma delay needs shape > 0 and rate > 0")
        else:
            raise ParameterError(f"unknown delay kind {self.kind}")

    def sample(self, stream: rng.Stream) -> float:
        """One delay; resamples on the (measure-zero) exact-0 draw."""
        while True:
            if self.kind == EXPONENTIAL:
                v = stream.exponential(self.p0)
            elif self.kind == DETERMINISTIC:
                return self.p0
            elif self.kind == UNIFORM:
                v = self.p0 + (self.p1 - self.p0) * stream.random()
            else:
                v = stream.gamma(self.p0, self.p1)
            if v > 0.0:
                return v

    def mean(self) -> float:
        if self.kind == EXPONENTIAL:
            return 1.0 / self.p0
        if self.kind == DETERMINISTIC:
            return self.p0
        if self.kind == UNIFORM:
            return 0.5 * (self.p0 + self.p1)
        return self.p0 / self.p1

    def __str__(self) -> str:
        name = _KIND_NAMES[self.kind]
        if self.kind in (EXPONENTIAL, DETERMINISTIC):
            return f"{name}:{self.p0:g}"
        return f"{name}:{self.p0:g},{self.p1:g}"


def exponential(rate: float) -> SpreadingTimeSpec:
    return SpreadingTimeSpec(EXPONENTIAL, float(rate))


def deterministic(value: float) -> SpreadingTimeSpec:
    return SpreadingTimeSpec(DETERMINISTIC, float(value))


def uniform(lo: float, hi: float) -> SpreadingTimeSpec:
    return SpreadingTimeSpec(UNIFORM, float(lo), float(hi))


def gamma_delay(shape: float, rate: float) -> SpreadingTimeSpec:
    return SpreadingTimeSpec(GAMMA, float(shape), float(rate))


def parse_dist(text: str) -> SpreadingTimeSpec:
    """Parse the CLI grammar: exp:RATE, det:VALUE, unif:LO,HI, gamma:SHAPE,RATE."""
    try:
        name, _, argtext = text.partition(":")
        args = [float(a) for a in argtext.split(",")] if argtext else []
    except ValueError:
        raise ParameterError(f"bad distribution {text!r}")
    if name == "exp" and len(args) == 1:
        return exponential(args[0])
    if name == "det" and len(args) == 1:
        return deterministic(args[0])
    if name == "unif" and len(args) == 2:
        return uniform(args[0], args[1])
    if name == "gamma" and len(args) == 2:
        return gamma_delay(args[0], args[1])
    raise ParameterError(f"bad distribution {text!r} "
                         "(want exp:RATE, det:VALUE, unif:LO,HI or gamma:SHAPE,RATE)")


STOP_COUNT = 0
STOP_TIME = 1


@dataclass(frozen=True)
class StopRule:
    kind: int
    value: float

    def __post_init__(self):
        if self.kind == STOP_COUNT:
            if self.value < 1 or self.value != int(self.value):
                raise ParameterError("at_count needs an integer >= 1")
        elif self.kind == STOP_TIME:
            if not self.value > 0:
                raise ParameterError("at_time needs t > 0")
        else:
            raise ParameterError(f"unknown stop kind {self.kind}")

    def __str__(self) -> str:
        if self.kind == STOP_COUNT:
            return f"count:{int(self.value)}"
        return f"time:{self.value:g}"


def at_count(n: int) -> StopRule:
    return StopRule(STOP_COUNT, int(n))


def at_time(t: float) -> StopRule:
    return StopRule(STOP_TIME, float(t))


def parse_stop(text: str) -> StopRule:
    name, _, arg = text.partition(":")
    try:
        if name == "count":
            return at_count(int(arg))
        if name == "time":
            return at_time(float(arg))
    except ValueError:
        pass
    raise ParameterError(f"bad stop rule {text!r} (want count:N or time:T)")


@dataclass(frozen=True)
class InfectionHistory:
    """Chronological infection record.

    ``nodes[i]`` is the i-th infected node (host ids), ``times`` its
    infection time and ``parents[i]`` the infecting neighbor (-1 for the
    source).  ``offspring`` carries per-node child counts when the host is
    a random-tree generator, aligned with ``nodes``.
    """

    source: int
    nodes: np.ndarray
    times: np.ndarray
    parents: np.ndarray
    offspring: Optional[np.ndarray] = None

    @property
    def n_infected(self) -> int:
        return len(self.nodes)

    def infected_at(self, t: float) -> np.ndarray:
        return self.nodes[self.times <= t]

    def order_of(self) -> dict[int, int]:
        """Host id -> 0-based infection index."""
        return {int(v): i for i, v in enumerate(self.nodes)}

    def events(self) -> list[tuple[int, float, Optional[int]]]:
        out = []
        for i in range(self.n_infected):
            p = int(self.parents[i])
            out.append((int(self.nodes[i]), float(self.times[i]), None if p < 0 else p))
        return out


def history_to_json(h: InfectionHistory) -> str:
    events = []
    for node, t, parent in h.events():
        events.append({"node": node, "time": float(f"{t:.12g}"), "parent": parent})
    return json.dumps({"source": h.source, "events": events})


def history_from_json(text: str) -> InfectionHistory:
    doc = json.loads(text)
    events = doc["events"]
    nodes = np.array([e["node"] for e in events], dtype=np.int64)
    times = np.array([e["time"] for e in events], dtype=np.float64)
    parents = np.array([-1 if e["parent"] is None else e["parent"] for e in events],
                       dtype=np.int64)
    return InfectionHistory(source=int(doc["source"]), nodes=nodes, times=times,
                            parents=parents)


def simulate_si(host, source: int, dist: SpreadingTimeSpec, stop: StopRule,
                rng_seed: int, event_cap: int = DEFAULT_EVENT_CAP) -> InfectionHistory:
    """Run one SI spreading realization and record the full history.

    ``host`` is a Graph or one of the lazy tree generators (which must be
    started at their root, node 0).  Reproducible per seed.
    """
    from .generators import GaltonWatsonGen, RegularTreeGen  # cycle-free at call time

    sim_seed = rng.mix(rng_seed, rng.DOMAIN_SIM)
    if isinstance(host, Graph):
        if not 0 <= source < host.n:
            raise ParameterError(f"source {source} outside [0,{host.n})")
        nodes, times, parents = kernels.si_graph(
            host.indptr, host.adj, source, dist.kind, dist.p0, dist.p1,
            stop.kind, stop.value, sim_seed, event_cap)
        if stop.kind == STOP_COUNT and len(nodes) < int(stop.value):
            raise ExhaustedGraphError(
                f"component exhausted at {len(nodes)} < {int(stop.value)} nodes")
        return InfectionHistory(source=source, nodes=nodes, times=times, parents=parents)
    if isinstance(host, RegularTreeGen):
        if source != 0:
            raise ParameterError("lazy trees spread from their root (node 0)")
        nodes, times, parents = kernels.si_regular(
            host.d, dist.kind, dist.p0, dist.p1, stop.kind, stop.value,
            sim_seed, event_cap)
        return InfectionHistory(source=0, nodes=nodes, times=times, parents=parents)
    if isinstance(host, GaltonWatsonGen):
        if source != 0:
            raise ParameterError("lazy trees spread from their root (node 0)")
        root_kind, root_p = host.root_spec.kernel_args()
        gen_kind, gen_p = host.child_spec.kernel_args()
        nodes, times, parents, offspring = kernels.si_gw(
            root_kind, root_p, gen_kind, gen_p, host.offspring_key,
            dist.kind, dist.p0, dist.p1, stop.kind, stop.value,
            sim_seed, event_cap)
        if stop.kind == STOP_COUNT and len(nodes) < int(stop.value):
            raise ExhaustedGraphError(
                f"tree went extinct at {len(nodes)} < {int(stop.value)} nodes")
        return InfectionHistory(source=0, nodes=nodes, times=times, parents=parents,
                                offspring=offspring)
    raise ParameterError(f"unsupported host {type(host).__name__}")


def infected_subgraph(h: InfectionHistory) -> Graph:
    """Tree over the infected nodes via the infecting edges.

    Nodes are relabeled by infection order (id k-1 = k-th infected), which
    is the canonical dense labeling the estimators consume; on an explicit
    tree host this is the host-induced subgraph up to that relabeling.
    """
    idx = h.order_of()
    edges = [(idx[int(h.parents[i])], i) for i in range(1, h.n_infected)]
    return build_graph(edges, n=h.n_infected)


def rumor_graph(host: Graph, h: InfectionHistory) -> Graph:
    """Observed rumor graph: every host edge between infected nodes.

    Same infection-order relabeling as :func:`infected_subgraph`; on cyclic
    hosts this generally contains cycles.
    """
    from .graphs import induced_subgraph

    return induced_subgraph(host, [int(v) for v in h.nodes])


def boundary_size(h: InfectionHistory, host, t: float) -> int:
    """Number of uninfected nodes adjacent to the infected set at time ``t``."""
    from .generators import GaltonWatsonGen, RegularTreeGen

    if t < 0:
        raise ParameterError("t must be >= 0")
    infected = h.infected_at(t)
    k = len(infected)
    if k == 0:
        return 0
    if isinstance(host, Graph):
        mask = np.zeros(host.n, dtype=bool)
        mask[infected] = True
        boundary = set()
        for v in infected:
            for u in host.neighbors(int(v)):
                if not mask[u]:
                    boundary.add(int(u))
        return len(boundary)
    if isinstance(host, (RegularTreeGen, GaltonWatsonGen)):
        total_children = sum(host.num_children(int(v)) for v in infected)
        return total_children - (k - 1)
    raise ParameterError(f"unsupported host {type(host).__name__}")


def uniform_boundary_history(d: int, n_stop: int, rng_seed: int) -> InfectionHistory:
    """Discrete cross-check spreading on the d-regular tree.

    Repeatedly infects a uniformly chosen boundary node; with exponential
    delays this matches the event-driven engine in distribution.  Times are
    step indices, not clock times.  Never silently substituted for
    :func:`simulate_si`.
    """
    if d < 2:
        raise ParameterError("d must be >= 2")
    stream = rng.Stream(rng.mix(rng_seed, rng.DOMAIN_SIM))
    nodes = [0]
    parents = [-1]
    boundary = []  # (node id, parent) pairs
    next_id = 1
    for _ in range(d):
        boundary.append((next_id, 0))
        next_id += 1
    while len(nodes) < n_stop:
        i = stream.below(len(boundary))
        node, parent = boundary[i]
        boundary[i] = boundary[-1]
        boundary.pop()
        nodes.append(node)
        parents.append(parent)
        for _ in range(d - 1):
            boundary.append((next_id, node))
            next_id += 1
    times = np.arange(len(nodes), dtype=np.float64)
    return InfectionHistory(source=0, nodes=np.array(nodes, dtype=np.int64),
                            times=times, parents=np.array(parents, dtype=np.int64))
