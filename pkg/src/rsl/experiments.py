"""Monte Carlo harness: generate -> spread -> estimate -> aggregate.

Every trial derives its own seed from the master seed and the trial index,
so a result is a pure function of its configuration: the same config gives
byte-identical CSV output for any worker count.

The headline statistic is the histogram over k of the event "the estimator
chose the k-th infected node" (k = 1 is correct detection); the rank of
the true source in the estimator's full ranking is recorded alongside.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import centrality, rng
from .errors import ExhaustedGraphError, ParameterError
from .generators import GaltonWatsonGen, GeometricTreeSpec, OffspringSpec
from .graphs import Graph, connected_component
from .spreading import (SpreadingTimeSpec, StopRule, at_count, at_time,
                        exponential, infected_subgraph, parse_dist, parse_stop,
                        rumor_graph, simulate_si)
from .stats import wilson_interval

_MAX_RESAMPLE = 64


@dataclass(frozen=True)
class ExperimentConfig:
    family: str
    family_params: dict
    dist: SpreadingTimeSpec
    stop: StopRule
    trials: int
    master_seed: int
    k_max: int = 20

    def __post_init__(self):
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if self.k_max < 1:
            raise ParameterError("k_max must be >= 1")
        if self.family not in ("regular", "gw", "geometric", "er", "rrg"):
            raise ParameterError(f"unknown family {self.family!r}")

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "family_params": dict(self.family_params),
            "dist": str(self.dist),
            "stop": str(self.stop),
            "trials": self.trials,
            "master_seed": self.master_seed,
            "k_max": self.k_max,
        }

    @staticmethod
    def from_dict(doc: dict) -> "ExperimentConfig":
        return ExperimentConfig(
            family=doc["family"],
            family_params=dict(doc.get("family_params", {})),
            dist=parse_dist(doc["dist"]) if isinstance(doc["dist"], str)
            else doc["dist"],
            stop=parse_stop(doc["stop"]) if isinstance(doc["stop"], str)
            else doc["stop"],
            trials=int(doc["trials"]),
            master_seed=int(doc["master_seed"]),
            k_max=int(doc.get("k_max", 20)),
        )

    @staticmethod
    def from_json(text: str) -> "ExperimentConfig":
        return ExperimentConfig.from_dict(json.loads(text))


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    counts: np.ndarray            # index k = 1..k_max; [0] unused
    overflow: int                 # chosen-node index beyond k_max
    rank_counts: np.ndarray       # rank of the true source, same layout
    rank_overflow: int
    effective_trials: int         # trials that produced a histogram entry
    skipped: int                  # e.g. extinct random-tree runs
    resamples: int                # graph redraws (tiny components etc.)
    theory: Optional[np.ndarray]  # matching limit curve, index by k
    metadata: dict = field(default_factory=dict)

    @property
    def detection(self) -> float:
        return self.counts[1] / self.effective_trials if self.effective_trials else 0.0

    def proportion(self, k: int) -> float:
        return self.counts[k] / self.effective_trials if self.effective_trials else 0.0

    def ci(self, k: int) -> tuple[float, float]:
        return wilson_interval(int(self.counts[k]), self.effective_trials)


def _offspring_from_params(params: dict, key: str) -> OffspringSpec:
    from .generators import parse_offspring

    val = params[key]
    if isinstance(val, str):
        return parse_offspring(val)
    return val


def _trial_outcome(cfg: ExperimentConfig, host_cache: dict, i: int):
    """One trial: returns (chosen_k or None if skipped, source_rank, resamples)."""
    trial_seed = rng.mix(cfg.master_seed, i)
    family = cfg.family
    params = cfg.family_params
    if family == "regular":
        from .generators import regular_tree

        host = host_cache.setdefault("regular", regular_tree(int(params["d"])))
        h = simulate_si(host, 0, cfg.dist, cfg.stop, trial_seed)
        g = infected_subgraph(h)
    elif family == "gw":
        d0 = _offspring_from_params(params, "d0")
        d = _offspring_from_params(params, "d")
        host = GaltonWatsonGen(d0, d, seed=trial_seed)
        try:
            h = simulate_si(host, 0, cfg.dist, cfg.stop, trial_seed)
        except ExhaustedGraphError:
            return None, None, 0
        g = infected_subgraph(h)
    elif family == "geometric":
        tree = host_cache.get("geometric")
        if tree is None:
            from .generators import geometric_tree

            spec = GeometricTreeSpec(alpha=float(params["alpha"]), b=float(params["b"]),
                                     c=float(params["c"]),
                                     root_degree=int(params["root_degree"]),
                                     depth=int(params["depth"]))
            tree = geometric_tree(spec, seed=cfg.master_seed)
            host_cache["geometric"] = tree
        h = simulate_si(tree.graph, 0, cfg.dist, cfg.stop, trial_seed)
        g = infected_subgraph(h)
    elif family in ("er", "rrg"):
        return _random_graph_trial(cfg, i, trial_seed)
    else:  # pragma: no cover
        raise ParameterError(family)
    chosen, report = centrality.estimate_source(g, trial_seed)
    return chosen + 1, report.rank_of(0), 0


def _random_graph_trial(cfg: ExperimentConfig, i: int, trial_seed: int):
    from .generators import erdos_renyi, random_regular

    params = cfg.family_params
    n_target = int(cfg.stop.value) if cfg.stop.kind == 0 else None
    resamples = 0
    for attempt in range(_MAX_RESAMPLE):
        graph_seed = rng.mix(trial_seed, rng.DOMAIN_GRAPH + attempt)
        if cfg.family == "er":
            host = erdos_renyi(int(params["m"]), float(params["c"]), graph_seed)
        else:
            host = random_regular(int(params["m"]), int(params["d"]), graph_seed)
        src_stream = rng.Stream(rng.mix(trial_seed, rng.DOMAIN_SOURCE + attempt))
        source = src_stream.below(host.n)
        comp = connected_component(host, source)
        if n_target is not None and len(comp) < n_target:
            # landed in a small component: move into the giant one if it is
            # big enough, otherwise redraw the whole graph
            comp_giant = _giant_component(host)
            if len(comp_giant) >= n_target:
                source = int(comp_giant[src_stream.below(len(comp_giant))])
            else:
                resamples += 1
                continue
        h = simulate_si(host, source, cfg.dist, cfg.stop, trial_seed)
        g = rumor_graph(host, h)
        chosen, report = centrality.estimate_source(g, trial_seed)
        return chosen + 1, report.rank_of(0), resamples
    raise ExhaustedGraphError(
        f"trial {i}: no usable component after {_MAX_RESAMPLE} graph redraws")


def _giant_component(g: Graph) -> np.ndarray:
    from .graphs import components

    comps = components(g)
    return max(comps, key=len)


def _run_range(cfg_doc: dict, start: int, end: int):
    """Worker entry: aggregate trials [start, end) into partial histograms."""
    cfg = ExperimentConfig.from_dict(cfg_doc)
    counts = np.zeros(cfg.k_max + 1, dtype=np.int64)
    overflow = 0
    rank_counts = np.zeros(cfg.k_max + 1, dtype=np.int64)
    rank_overflow = 0
    skipped = 0
    resamples = 0
    host_cache: dict = {}
    for i in range(start, end):
        k, rank, res = _trial_outcome(cfg, host_cache, i)
        resamples += res
        if k is None:
            skipped += 1
            continue
        if k <= cfg.k_max:
            counts[k] += 1
        else:
            overflow += 1
        if rank <= cfg.k_max:
            rank_counts[rank] += 1
        else:
            rank_overflow += 1
    return counts, overflow, rank_counts, rank_overflow, skipped, resamples


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Run all trials and aggregate; deterministic for any worker count."""
    t0 = time.monotonic()
    doc = cfg.to_dict()
    if workers <= 1:
        partials = [_run_range(doc, 0, cfg.trials)]
    else:
        chunk = max(1, (cfg.trials + workers * 4 - 1) // (workers * 4))
        ranges = [(s, min(s + chunk, cfg.trials))
                  for s in range(0, cfg.trials, chunk)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_run_range, *zip(*[(doc, s, e) for s, e in ranges])))
    counts = np.zeros(cfg.k_max + 1, dtype=np.int64)
    overflow = rank_overflow = skipped = resamples = 0
    rank_counts = np.zeros(cfg.k_max + 1, dtype=np.int64)
    for c, o, rc, ro, sk, rs in partials:
        counts += c
        overflow += o
        rank_counts += rc
        rank_overflow += ro
        skipped += sk
        resamples += rs
    effective = cfg.trials - skipped
    theory = None
    if cfg.family == "regular":
        from .theory import ck_limit

        d = int(cfg.family_params["d"])
        theory = np.zeros(cfg.k_max + 1, dtype=np.float64)
        for k in range(1, cfg.k_max + 1):
            theory[k] = ck_limit(d, k)
    return ExperimentResult(
        config=cfg, counts=counts, overflow=overflow, rank_counts=rank_counts,
        rank_overflow=rank_overflow, effective_trials=effective, skipped=skipped,
        resamples=resamples, theory=theory,
        metadata={"config": doc, "wall_time_s": time.monotonic() - t0,
                  "workers": workers})


def result_to_csv(result: ExperimentResult) -> str:
    """k,count,proportion,ci_lo,ci_hi,theory rows plus an overflow row.

    Deterministic for a given config (no timing data here), which is what
    makes reruns byte-comparable.
    """
    lines = ["k,count,proportion,ci_lo,ci_hi,theory"]
    for k in range(1, result.config.k_max + 1):
        lo, hi = result.ci(k)
        theo = ""
        if result.theory is not None:
            theo = f"{result.theory[k]:.10g}"
        lines.append(f"{k},{int(result.counts[k])},{result.proportion(k):.6f},"
                     f"{lo:.6f},{hi:.6f},{theo}")
    over_p = (result.overflow / result.effective_trials
              if result.effective_trials else 0.0)
    lines.append(f"overflow,{result.overflow},{over_p:.6f},,,")
    return "\n".join(lines) + "\n"


def result_to_gnuplot(result: ExperimentResult) -> str:
    """Space-separated k/proportion/ci/theory table (plot-ready)."""
    lines = ["# k proportion ci_lo ci_hi theory"]
    for k in range(1, result.config.k_max + 1):
        lo, hi = result.ci(k)
        theo = (f"{result.theory[k]:.10g}" if result.theory is not None else "nan")
        lines.append(f"{k} {result.proportion(k):.6f} {lo:.6f} {hi:.6f} {theo}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class TheoryComparison:
    rows: tuple            # (k, empirical, theory, ci_half, deviation, ok)
    max_deviation: float
    allowance: float
    ok: bool


def compare_to_theory(result: ExperimentResult, d: int,
                      allowance: float = 0.02) -> TheoryComparison:
    """Per-k deviation of the empirical histogram from the d-regular limit.

    A row fails when |empirical - limit| exceeds the Wilson half-width plus
    the fixed finite-size allowance (the limits are t -> infinity laws, the
    harness runs at finite n).
    """
    from .theory import ck_limit

    if result.config.family != "regular":
        raise ParameterError(
            f"theory comparison needs a regular-tree result, got {result.config.family!r}")
    if int(result.config.family_params["d"]) != d:
        raise ParameterError("degree mismatch between result and comparison")
    if result.effective_trials == 0:
        raise ParameterError("empty result")
    rows = []
    max_dev = 0.0
    all_ok = True
    for k in range(1, result.config.k_max + 1):
        emp = result.proportion(k)
        theo = ck_limit(d, k)
        lo, hi = result.ci(k)
        ci_half = (hi - lo) / 2.0
        dev = abs(emp - theo)
        ok = dev <= ci_half + allowance
        rows.append((k, emp, theo, ci_half, dev, ok))
        max_dev = max(max_dev, dev)
        all_ok = all_ok and ok
    return TheoryComparison(rows=tuple(rows), max_deviation=max_dev,
                            allowance=allowance, ok=all_ok)


def geometric_detection(spec: GeometricTreeSpec, dist: SpreadingTimeSpec,
                        t_list: Sequence[float], trials: int, seed: int,
                        enforce_degree: bool = True):
    """Detection proportion of the root source at each observation time.

    Requires the root-degree condition d* > max(2, c/b + 1); the sweep is
    capped by the verified radius of the constructed tree.  Pass
    ``enforce_degree=False`` to study sub-threshold trees (e.g. line arms,
    where detection decays instead of converging to one).
    """
    from .generators import geometric_tree

    if enforce_degree and not spec.detection_degree_ok():
        raise ParameterError(
            f"root degree {spec.root_degree} violates d* > max(2, c/b + 1) "
            f"= {max(2.0, spec.c / spec.b + 1.0):g}")
    if trials < 1 or not t_list:
        raise ParameterError("need trials >= 1 and a non-empty t list")
    tree = geometric_tree(spec, seed)
    t_cap = tree.usable_radius * dist.mean()
    rows = []
    for ti, t in enumerate(t_list):
        if t > t_cap:
            raise ParameterError(
                f"t={t} exceeds the verified horizon {t_cap:g} "
                f"(usable radius {tree.usable_radius})")
        hits = 0
        for j in range(trials):
            trial_seed = rng.mix(seed, ti * trials + j)
            h = simulate_si(tree.graph, 0, dist, at_time(t), trial_seed)
            g = infected_subgraph(h)
            chosen, _ = centrality.estimate_source(g, trial_seed)
            hits += 1 if chosen == 0 else 0
        rows.append((float(t), hits / trials, wilson_interval(hits, trials)))
    return rows


@dataclass
class RandomTreeDetection:
    detection: float
    trials: int                 # non-extinct runs collected
    attempts: int
    chosen_k: np.ndarray        # per run, 1-based infected index of the estimate
    eta: np.ndarray             # per run, offspring counts of first K infected
    detection_ci: tuple[float, float] = (0.0, 1.0)

    def conditional_bound_rows(self, c: float, k_range: Sequence[int]):
        """Empirical P(estimate = k-th infected | conditioning event) rows:
        (k, samples, proportion, ci_hi, bound 1/k).

        The event conditions on the offspring counts of the first k infected
        nodes: eta_k >= 2 and sum_{i<k} eta_i >= c * k * eta_k.
        """
        rows = []
        for k in k_range:
            etak = self.eta[:, k - 1]
            prefix = self.eta[:, : k - 1].sum(axis=1)
            mask = (etak >= 2) & (prefix >= c * k * etak)
            m = int(mask.sum())
            hits = int(((self.chosen_k == k) & mask).sum())
            lo, hi = wilson_interval(hits, m) if m else (0.0, 1.0)
            p = hits / m if m else 0.0
            rows.append((k, m, p, hi, 1.0 / k))
        return rows


def random_tree_detection(d0: OffspringSpec, d: OffspringSpec,
                          dist: SpreadingTimeSpec, stop: StopRule, trials: int,
                          seed: int, eta_prefix: int = 12,
                          max_attempt_factor: int = 20) -> RandomTreeDetection:
    """Detection statistics on random trees, conditioning data included.

    Extinct runs (tree dies before the stop count) are skipped; if the
    requested number of surviving runs cannot be collected within
    ``max_attempt_factor * trials`` attempts, the error reports how many
    were achieved.
    """
    if stop.kind != 0:
        raise ParameterError("random_tree_detection needs an at_count stop rule")
    if sum(d0.prob_of(k) for k in range(3)) >= 1.0 - 1e-12:
        raise ParameterError("root offspring must allow 3 or more children")
    if d.mean() <= 1.0:
        raise ParameterError("offspring mean must exceed 1 (supercritical growth)")
    n_stop = int(stop.value)
    if n_stop < eta_prefix:
        eta_prefix = n_stop
    chosen_l = []
    eta_l = []
    hits = 0
    attempts = 0
    max_attempts = max_attempt_factor * trials
    while len(chosen_l) < trials:
        if attempts >= max_attempts:
            raise ExhaustedGraphError(
                f"extinction too frequent: {len(chosen_l)} of {trials} runs "
                f"collected after {attempts} attempts")
        trial_seed = rng.mix(seed, attempts)
        attempts += 1
        host = GaltonWatsonGen(d0, d, seed=trial_seed)
        try:
            h = simulate_si(host, 0, dist, stop, trial_seed)
        except ExhaustedGraphError:
            continue
        g = infected_subgraph(h)
        chosen, _ = centrality.estimate_source(g, trial_seed)
        chosen_l.append(chosen + 1)
        eta_l.append(h.offspring[:eta_prefix])
        hits += 1 if chosen == 0 else 0
    return RandomTreeDetection(
        detection=hits / trials, trials=trials, attempts=attempts,
        chosen_k=np.array(chosen_l, dtype=np.int64),
        eta=np.array(eta_l, dtype=np.int64),
        detection_ci=wilson_interval(hits, trials))


def er_experiment(m: int, c: float, n: int, trials: int, seed: int,
                  dist: Optional[SpreadingTimeSpec] = None, k_max: int = 20,
                  workers: int = 1) -> ExperimentResult:
    """Spreading on fresh sparse random graphs, source uniform in the giant
    component, BFS-tree estimator (the observed rumor graph has cycles)."""
    if c <= 1.0:
        raise ParameterError("need c > 1 so a giant component exists")
    cfg = ExperimentConfig(family="er", family_params={"m": m, "c": c},
                           dist=dist or exponential(1.0), stop=at_count(n),
                           trials=trials, master_seed=seed, k_max=k_max)
    return run_experiment(cfg, workers=workers)
