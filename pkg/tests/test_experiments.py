import json

import numpy as np
import pytest

from rsl import experiments as ex
from rsl import spreading as sp
from rsl.errors import ParameterError
from rsl.generators import GeometricTreeSpec, offspring_poisson


def small_regular_cfg(trials=300, k_max=8, seed=11):
    return ex.ExperimentConfig(family="regular", family_params={"d": 3},
                               dist=sp.exponential(1.0), stop=sp.at_count(100),
                               trials=trials, master_seed=seed, k_max=k_max)


def test_histogram_counts_sum_to_trials():
    res = ex.run_experiment(small_regular_cfg())
    assert int(res.counts.sum()) + res.overflow == res.effective_trials == 300
    assert int(res.rank_counts.sum()) + res.rank_overflow == 300
    assert 0.0 <= res.detection <= 1.0


def test_csv_is_identical_across_worker_counts():
    cfg = small_regular_cfg(trials=240)
    a = ex.result_to_csv(ex.run_experiment(cfg, workers=1))
    b = ex.result_to_csv(ex.run_experiment(cfg, workers=4))
    assert a == b
    assert a.startswith("k,count,proportion,ci_lo,ci_hi,theory")
    assert a.strip().splitlines()[-1].startswith("overflow,")


def test_result_depends_on_master_seed():
    a = ex.result_to_csv(ex.run_experiment(small_regular_cfg(seed=11)))
    b = ex.result_to_csv(ex.run_experiment(small_regular_cfg(seed=12)))
    assert a != b


def test_theory_column_attached_for_regular_family():
    res = ex.run_experiment(small_regular_cfg(trials=50))
    assert res.theory is not None
    assert res.theory[1] == pytest.approx(0.25, abs=1e-12)


def test_compare_to_theory_errors():
    res = ex.run_experiment(small_regular_cfg(trials=50))
    with pytest.raises(ParameterError):
        ex.compare_to_theory(res, 4)  # degree mismatch
    er = ex.er_experiment(m=200, c=6.0, n=30, trials=10, seed=1, k_max=5)
    with pytest.raises(ParameterError):
        ex.compare_to_theory(er, 3)  # family mismatch


def test_config_json_roundtrip():
    cfg = small_regular_cfg()
    doc = json.loads(json.dumps(cfg.to_dict()))
    back = ex.ExperimentConfig.from_dict(doc)
    assert back == cfg


def test_trivial_single_node_experiment_detects():
    cfg = ex.ExperimentConfig(family="regular", family_params={"d": 3},
                              dist=sp.exponential(1.0), stop=sp.at_count(1),
                              trials=1, master_seed=0, k_max=3)
    res = ex.run_experiment(cfg)
    assert res.detection == 1.0


def test_gw_family_counts_extinct_as_skipped():
    cfg = ex.ExperimentConfig(family="gw",
                              family_params={"d0": "cat:0=0.5,3=0.5",
                                             "d": "cat:0=0.5,3=0.5"},
                              dist=sp.exponential(1.0), stop=sp.at_count(30),
                              trials=200, master_seed=3, k_max=5)
    res = ex.run_experiment(cfg)
    assert res.skipped > 0
    assert res.effective_trials == 200 - res.skipped
    assert int(res.counts.sum()) + res.overflow == res.effective_trials


def test_er_experiment_runs_and_decays():
    res = ex.er_experiment(m=400, c=8.0, n=40, trials=150, seed=2, k_max=10)
    assert res.effective_trials == 150
    assert res.proportion(1) > res.proportion(10)


def test_er_requires_supercritical_mean_degree():
    with pytest.raises(ParameterError):
        ex.er_experiment(m=100, c=0.5, n=10, trials=5, seed=1)


def test_rrg_family():
    cfg = ex.ExperimentConfig(family="rrg", family_params={"m": 200, "d": 3},
                              dist=sp.exponential(1.0), stop=sp.at_count(40),
                              trials=60, master_seed=9, k_max=6)
    res = ex.run_experiment(cfg)
    assert res.effective_trials == 60
    assert int(res.counts.sum()) + res.overflow == 60


def test_geometric_detection_rejects_bad_degree():
    # c/b = 4 requires d* > 5
    spec = GeometricTreeSpec(alpha=1.0, b=1.0, c=4.0, root_degree=3, depth=10)
    with pytest.raises(ParameterError, match="violates"):
        ex.geometric_detection(spec, sp.uniform(0.5, 1.5), [2.0], 10, 1)


def test_geometric_detection_small_run():
    spec = GeometricTreeSpec(alpha=0.0, b=1.0, c=2.0, root_degree=4, depth=30)
    rows = ex.geometric_detection(spec, sp.uniform(0.5, 1.5), [3.0, 6.0], 40, 5)
    assert len(rows) == 2
    for t, p, (lo, hi) in rows:
        assert 0.0 <= lo <= p <= hi <= 1.0


def test_geometric_detection_line_arms_poor_at_large_t():
    # alpha = 0 paths: detection decays (threshold case), unlike alpha > 0
    spec = GeometricTreeSpec(alpha=0.0, b=1.0, c=2.0, root_degree=2, depth=120)
    rows = ex.geometric_detection(spec, sp.exponential(1.0), [8.0, 80.0], 300, 7,
                                  enforce_degree=False)
    assert rows[1][1] < 0.2
    assert rows[1][1] <= rows[0][1]


def test_random_tree_detection_outputs():
    rt = ex.random_tree_detection(offspring_poisson(3.0), offspring_poisson(3.0),
                                  sp.exponential(1.0), sp.at_count(60),
                                  trials=300, seed=5)
    assert rt.trials == 300 and rt.attempts >= 300
    assert rt.eta.shape == (300, 12)
    assert 0.0 <= rt.detection <= 1.0
    rows = rt.conditional_bound_rows(1.5, range(2, 5))
    for k, m, p, hi, bound in rows:
        assert bound == pytest.approx(1.0 / k)
        assert 0.0 <= p <= 1.0


def test_random_tree_detection_validates_offspring_preconditions():
    from rsl.generators import offspring_deterministic

    with pytest.raises(ParameterError, match="3 or more"):
        ex.random_tree_detection(offspring_deterministic(2), offspring_poisson(3.0),
                                 sp.exponential(1.0), sp.at_count(50), 10, 1)
    with pytest.raises(ParameterError, match="mean"):
        ex.random_tree_detection(offspring_poisson(3.0), offspring_poisson(0.9),
                                 sp.exponential(1.0), sp.at_count(50), 10, 1)


def test_random_tree_detection_reports_extinction_shortfall():
    from rsl.errors import ExhaustedGraphError

    with pytest.raises(ExhaustedGraphError, match="of"):
        ex.random_tree_detection(offspring_poisson(1.05), offspring_poisson(1.05),
                                 sp.exponential(1.0), sp.at_count(500),
                                 trials=50, seed=1, max_attempt_factor=2)


def test_gnuplot_output_shape():
    res = ex.run_experiment(small_regular_cfg(trials=40))
    text = ex.result_to_gnuplot(res)
    lines = text.strip().splitlines()
    assert lines[0].startswith("# k proportion")
    assert len(lines) == 1 + res.config.k_max


def test_deterministic_offspring_reproduces_3_regular_detection():
    # root with 3 children, everyone else 2: exactly the 3-regular tree, so
    # detection should land on the known 1/4
    from rsl.generators import offspring_deterministic

    rt = ex.random_tree_detection(offspring_deterministic(3),
                                  offspring_deterministic(2),
                                  sp.exponential(1.0), sp.at_count(400),
                                  trials=2000, seed=12)
    assert abs(rt.detection - 0.25) < 0.03, rt.detection


def test_er_histograms_with_different_mean_degree_agree():
    a = ex.er_experiment(m=1000, c=10.0, n=80, trials=600, seed=3, k_max=10)
    b = ex.er_experiment(m=1000, c=20.0, n=80, trials=600, seed=4, k_max=10)
    assert a.proportion(1) > a.proportion(10)
    assert b.proportion(1) > b.proportion(10)
    for k in range(1, 11):
        assert abs(a.proportion(k) - b.proportion(k)) < 0.05, k


def test_er_single_node_rumor_graph_detects():
    res = ex.er_experiment(m=200, c=5.0, n=1, trials=20, seed=8, k_max=3)
    assert res.detection == 1.0


def test_regular_tree_curves_collapse_for_d_at_least_4():
    # the per-k histograms for different degrees >= 4 lie on one curve
    runs = {}
    for d in (4, 6):
        cfg = ex.ExperimentConfig(family="regular", family_params={"d": d},
                                  dist=sp.exponential(1.0), stop=sp.at_count(300),
                                  trials=3000, master_seed=40 + d, k_max=10)
        runs[d] = ex.run_experiment(cfg)
    for k in range(1, 11):
        assert abs(runs[4].proportion(k) - runs[6].proportion(k)) < 0.04, k
    # and the exponential bound dominates every occupied bin
    from rsl.theory import ck_upper_bound

    for k in range(1, 11):
        if runs[4].counts[k] > 0:
            assert runs[4].proportion(k) <= ck_upper_bound(k)
