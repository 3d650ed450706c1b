import numpy as np
import pytest

from rsl import spreading as sp
from rsl.errors import ExhaustedGraphError, ParameterError
from rsl.generators import galton_watson, offspring_poisson, regular_tree
from rsl.graphs import build_graph, is_tree
from rsl.stats import chi_square_gof, chi_square_two_sample


def test_deterministic_chain():
    g = build_graph([(0, 1), (1, 2)])
    h = sp.simulate_si(g, 0, sp.deterministic(1.0), sp.at_time(2.5), rng_seed=3)
    assert list(h.nodes) == [0, 1, 2]
    assert list(h.times) == [0.0, 1.0, 2.0]
    assert list(h.parents) == [-1, 0, 1]


def test_at_count_one_is_just_the_source():
    h = sp.simulate_si(regular_tree(3), 0, sp.exponential(1.0), sp.at_count(1), 9)
    assert h.n_infected == 1 and h.nodes[0] == 0 and h.times[0] == 0.0


def test_first_infected_child_uniform_over_d():
    # on the d-regular tree with exponential delays the first infection is a
    # uniform pick among the root's d children
    d = 3
    counts = np.zeros(d, dtype=int)
    for seed in range(10_000):
        h = sp.simulate_si(regular_tree(d), 0, sp.exponential(1.0), sp.at_count(2), seed)
        counts[int(h.nodes[1]) - 1] += 1  # children of the root are ids 1..d
    stat, p = chi_square_gof(counts, np.full(d, counts.sum() / d))
    assert p > 0.01, (counts, p)


def test_times_strictly_increase_for_continuous_delays():
    for seed in range(50):
        h = sp.simulate_si(regular_tree(3), 0, sp.exponential(1.0), sp.at_count(60), seed)
        assert (np.diff(h.times) > 0).all()


def test_history_deterministic_per_seed():
    args = (regular_tree(4), 0, sp.gamma_delay(2.0, 3.0), sp.at_count(100))
    a = sp.simulate_si(*args, rng_seed=123)
    b = sp.simulate_si(*args, rng_seed=123)
    assert sp.history_to_json(a) == sp.history_to_json(b)
    c = sp.simulate_si(*args, rng_seed=124)
    assert sp.history_to_json(a) != sp.history_to_json(c)


def test_infected_subgraph_single_node():
    h = sp.simulate_si(regular_tree(3), 0, sp.exponential(1.0), sp.at_count(1), 5)
    g = sp.infected_subgraph(h)
    assert g.n == 1 and g.num_edges == 0


def test_infected_subgraph_chain():
    g = build_graph([(0, 1), (1, 2)])
    h = sp.simulate_si(g, 0, sp.deterministic(1.0), sp.at_time(2.5), rng_seed=3)
    sub = sp.infected_subgraph(h)
    assert sorted(sub.edges()) == [(0, 1), (1, 2)]


def test_infected_subgraph_is_tree_for_any_run():
    for seed in range(25):
        n = 40 + 7 * seed
        h = sp.simulate_si(regular_tree(3), 0, sp.exponential(1.0), sp.at_count(n), seed)
        sub = sp.infected_subgraph(h)
        assert sub.n == n and sub.num_edges == n - 1 and is_tree(sub)


def test_boundary_size_initial_is_d():
    h = sp.simulate_si(regular_tree(3), 0, sp.exponential(1.0), sp.at_count(1), 5)
    assert sp.boundary_size(h, regular_tree(3), 0.0) == 3


def test_boundary_size_formula_on_regular_tree():
    # after T non-source infections the boundary is (d-2) T + d
    d = 4
    host = regular_tree(d)
    h = sp.simulate_si(host, 0, sp.exponential(1.0), sp.at_count(6), 11)
    t5 = float(h.times[5])
    assert sp.boundary_size(h, host, t5) == (d - 2) * 5 + d == 14
    mid = 0.5 * (h.times[3] + h.times[4])
    assert sp.boundary_size(h, host, float(mid)) == (d - 2) * 3 + d


def test_boundary_size_single_node_graph():
    g = build_graph([], n=1)
    h = sp.simulate_si(g, 0, sp.exponential(1.0), sp.at_time(1.0), 3)
    assert sp.boundary_size(h, g, 0.5) == 0


def test_boundary_size_on_gw_matches_neighbor_scan():
    gen = galton_watson(offspring_poisson(3.0), offspring_poisson(3.0), seed=4)
    h = sp.simulate_si(gen, 0, sp.exponential(1.0), sp.at_count(25), 8)
    t = float(h.times[-1])
    total_children = int(h.offspring.sum())
    assert sp.boundary_size(h, gen, t) == total_children - (h.n_infected - 1)


def test_memoryless_equivalence_with_uniform_boundary_sampler():
    # pattern of which early node ids get infected, event-driven vs direct
    # uniform-boundary sampling; identical in law for exponential delays
    d, k, trials = 3, 6, 10_000
    pat_a: dict[tuple, int] = {}
    pat_b: dict[tuple, int] = {}
    for seed in range(trials):
        h = sp.simulate_si(regular_tree(d), 0, sp.exponential(1.0), sp.at_count(k), seed)
        key = tuple(int(v) for v in h.nodes[1:])
        pat_a[key] = pat_a.get(key, 0) + 1
        u = sp.uniform_boundary_history(d, k, seed)
        key = tuple(int(v) for v in u.nodes[1:])
        pat_b[key] = pat_b.get(key, 0) + 1
    keys = sorted(set(pat_a) | set(pat_b))
    a = [pat_a.get(key, 0) for key in keys]
    b = [pat_b.get(key, 0) for key in keys]
    stat, p = chi_square_two_sample(a, b)
    assert p > 0.01, (stat, p)


def test_exhausted_graph_error():
    g = build_graph([(0, 1), (1, 2)])
    with pytest.raises(ExhaustedGraphError):
        sp.simulate_si(g, 0, sp.exponential(1.0), sp.at_count(10), 4)


def test_gw_extinction_raises_exhausted():
    gen = galton_watson(offspring_poisson(0.2), offspring_poisson(0.2), seed=3)
    with pytest.raises(ExhaustedGraphError):
        sp.simulate_si(gen, 0, sp.exponential(1.0), sp.at_count(50), 3)


def test_json_roundtrip():
    h = sp.simulate_si(regular_tree(3), 0, sp.uniform(0.5, 1.5), sp.at_count(20), 77)
    back = sp.history_from_json(sp.history_to_json(h))
    assert back.source == h.source
    assert list(back.nodes) == list(h.nodes)
    assert list(back.parents) == list(h.parents)
    assert np.allclose(back.times, h.times, rtol=1e-11)


def test_lazy_tree_requires_root_source():
    with pytest.raises(ParameterError):
        sp.simulate_si(regular_tree(3), 2, sp.exponential(1.0), sp.at_count(5), 1)


def test_dist_validation():
    with pytest.raises(ParameterError):
        sp.deterministic(0.0)
    with pytest.raises(ParameterError):
        sp.exponential(-1.0)
    with pytest.raises(ParameterError):
        sp.uniform(2.0, 1.0)
    sp.uniform(0.0, 1.0)  # zero lower endpoint is fine: F(0) = F(0+) = 0


def test_parse_dist_grammar():
    assert sp.parse_dist("exp:2") == sp.exponential(2.0)
    assert sp.parse_dist("det:1.5") == sp.deterministic(1.5)
    assert sp.parse_dist("unif:0.5,1.5") == sp.uniform(0.5, 1.5)
    assert sp.parse_dist("gamma:2,3") == sp.gamma_delay(2.0, 3.0)
    with pytest.raises(ParameterError):
        sp.parse_dist("weibull:1")
    with pytest.raises(ParameterError):
        sp.parse_dist("exp:a")


def test_stop_rule_validation():
    with pytest.raises(ParameterError):
        sp.at_count(0)
    with pytest.raises(ParameterError):
        sp.at_time(0.0)
    assert sp.parse_stop("count:50") == sp.at_count(50)
    assert sp.parse_stop("time:2.5") == sp.at_time(2.5)
