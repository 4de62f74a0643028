import numpy as np
import pytest

from monollr.estimators import DistributionEstimate, EstimatorConfig, monotone_cdf
from monollr.simulation import (
    DgpSpec,
    EvalPoint,
    ExperimentConfig,
    empirical_quantile,
    generate,
    ks_statistic,
    run_experiment,
)


def test_design_is_fixed_grid():
    s = generate(DgpSpec(n=5, tau=0.1), 0)
    assert np.array_equal(s.xs, np.array([0.2, 0.4, 0.6, 0.8, 1.0]))


def test_tau_zero_gives_exact_sine():
    s = generate(DgpSpec(n=100, tau=0.0), 3)
    assert np.array_equal(s.ys, np.sin(s.xs))


def test_realization_streams():
    dgp = DgpSpec(n=50, tau=0.2, seed=9)
    a = generate(dgp, 4)
    b = generate(dgp, 4)
    c = generate(dgp, 5)
    assert np.array_equal(a.ys, b.ys)
    assert not np.array_equal(a.ys, c.ys)


def test_centered_chisquare_error_moments():
    """eps = chi2(2)/2 - 1 has mean 0, variance 1, skewness 2."""
    dgp = DgpSpec(n=200_000, tau=0.1, error_kind="centered_chisq2", seed=1)
    s = generate(dgp, 0)
    eps = (s.ys - np.sin(s.xs)) / 0.1
    assert float(np.mean(eps)) == pytest.approx(0.0, abs=0.01)
    assert float(np.var(eps)) == pytest.approx(1.0, abs=0.02)
    skew = float(np.mean(eps**3)) / float(np.var(eps)) ** 1.5
    assert skew == pytest.approx(2.0, abs=0.1)


def test_heteroskedastic_scale_grows_with_x():
    dgp = DgpSpec(n=100_000, tau=0.3, variance_kind="linear_in_x", seed=2)
    s = generate(dgp, 0)
    resid = s.ys - np.sin(s.xs)
    lo = resid[s.xs < 0.2]
    hi = resid[s.xs > 0.8]
    # sd should scale roughly like tau * x
    assert float(np.std(hi)) / float(np.std(lo)) == pytest.approx(9.0, rel=0.15)


def test_dgp_validation():
    with pytest.raises(ValueError):
        DgpSpec(n=1)
    with pytest.raises(ValueError):
        DgpSpec(tau=-0.1)
    with pytest.raises(ValueError):
        DgpSpec(error_kind="cauchy")
    with pytest.raises(ValueError):
        DgpSpec(variance_kind="quadratic")


# ---------------------------------------------------------------------------
# KS statistic and empirical quantile
# ---------------------------------------------------------------------------


def test_ks_point_mass_against_distant_observation():
    # all estimated mass at 0, the only observation at 1: distance is 1
    grid = np.array([-1.0, 0.0, 1.0, 2.0])
    est = DistributionEstimate(grid, np.array([0.0, 1.0, 1.0, 1.0]), 0.0, True)
    assert ks_statistic(est, [1.0]) == pytest.approx(1.0)


def test_ks_perfect_fit_small():
    # estimate crossing each empirical step at its midpoint: sup is 1/(2m)
    obs = np.array([1.0, 2.0])
    grid = np.array([0.0, 1.0, 2.0, 3.0])
    est = DistributionEstimate(grid, np.array([0.0, 0.25, 0.75, 1.0]), 0.0, True)
    assert ks_statistic(est, obs) == pytest.approx(0.25)


def test_ks_brute_force_oracle():
    """Dense-scan oracle for the sup distance.

    Evaluates |F_est - F_emp| on a fine grid plus points just around each
    observation, where the empirical CDF jumps.
    """
    rng = np.random.default_rng(50)
    xs = np.sort(rng.uniform(0.0, 1.0, 40))
    ys = np.sin(3.0 * xs) + 0.2 * rng.standard_normal(40)
    from monollr.estimators import RegressionSample

    est = monotone_cdf(
        RegressionSample(xs, ys), 0.5, EstimatorConfig(b=8.0, h0=0.05)
    )
    obs = np.sort(rng.normal(0.8, 0.4, 20))

    eps = 1e-9
    scan = np.sort(
        np.concatenate(
            [np.linspace(obs[0] - 1.0, obs[-1] + 1.0, 20_001), obs - eps, obs, obs + eps]
        )
    )
    emp = np.searchsorted(obs, scan, side="right") / obs.size
    sup = float(np.max(np.abs(est.cdf_at(scan) - emp)))
    assert ks_statistic(est, obs) == pytest.approx(sup, abs=1e-6)


def test_ks_rejects_empty():
    grid = np.array([0.0, 1.0])
    est = DistributionEstimate(grid, np.array([0.0, 1.0]), 0.0, True)
    with pytest.raises(ValueError, match="empty"):
        ks_statistic(est, [])


def test_empirical_quantile_hand_values():
    vals = np.array([3.0, 1.0, 2.0])
    assert empirical_quantile(vals, 0.5) == 2.0  # ceil(1.5) = 2nd order stat
    assert empirical_quantile(vals, 1.0 / 3.0) == 1.0
    assert empirical_quantile(vals, 0.34) == 2.0
    assert empirical_quantile(vals, 0.999) == 3.0
    assert empirical_quantile(vals, 1e-9) == 1.0


# ---------------------------------------------------------------------------
# experiment harness
# ---------------------------------------------------------------------------


def _small_config(**overrides):
    base = dict(
        dgp=DgpSpec(n=101, tau=0.15, seed=4),
        realizations=3,
        eval_points=(
            EvalPoint(index=101, window="one_sided_left"),
            EvalPoint(index=51),
        ),
        bandwidths=(10.0, 20.0),
        quantile_levels=(0.5,),
        grid_count=401,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def test_experiment_tables_complete():
    cfg = _small_config()
    rep = run_experiment(cfg)
    assert rep.config is cfg
    assert rep.infeasible == frozenset()
    for ep in cfg.eval_points:
        for b in cfg.bandwidths:
            for m in ("LC", "LLH", "LLM"):
                ks = rep.ks_table[(ep.index, b, m)]
                assert 0.0 <= ks <= 1.0
            for m in ("LC", "LL", "LLH", "LLM"):
                bias, mse = rep.pred_table[(ep.index, b, m)]
                # mse = bias^2 + variance >= bias^2
                assert mse >= bias * bias - 1e-12
        for m in ("LC", "LLH", "LLM"):
            cell = rep.quantile_table[(ep.index, 0.5, m)]
            assert cell.bandwidth in cfg.bandwidths
            assert cell.estimates.shape == (cfg.realizations,)


def test_experiment_deterministic():
    a = run_experiment(_small_config())
    b = run_experiment(_small_config())
    assert a.ks_table == b.ks_table
    assert a.pred_table == b.pred_table


def test_quantile_table_bandwidth_is_ks_argmin():
    rep = run_experiment(_small_config())
    for ep_index in (101, 51):
        for m in ("LC", "LLH", "LLM"):
            scored = [
                (rep.ks_table[(ep_index, b, m)], b)
                for b in rep.config.bandwidths
            ]
            _, best_b = min(scored)
            assert rep.quantile_table[(ep_index, 0.5, m)].bandwidth == best_b


def test_infeasible_cells_are_marked_not_fatal():
    # a rectangular kernel with sub-spacing bandwidth has no mass anywhere
    cfg = _small_config(
        bandwidths=(0.05, 20.0), kernel="rectangular", quantile_levels=()
    )
    rep = run_experiment(cfg)
    assert any(key[1] == 0.05 for key in rep.infeasible)
    for ep in cfg.eval_points:
        for m in ("LC", "LLH", "LLM"):
            assert (ep.index, 0.05, m) not in rep.ks_table
            assert (ep.index, 20.0, m) in rep.ks_table


def test_methods_subset_respected():
    cfg = _small_config(methods=("LC", "LL"), quantile_levels=())
    rep = run_experiment(cfg)
    assert all(key[2] in ("LC", "LL") for key in rep.pred_table)
    assert all(key[2] == "LC" for key in rep.ks_table)


def test_experiment_config_validation():
    dgp = DgpSpec(n=101)
    ok = dict(
        dgp=dgp,
        realizations=2,
        eval_points=(EvalPoint(index=1),),
        bandwidths=(5.0,),
    )
    with pytest.raises(ValueError, match="realization"):
        ExperimentConfig(**{**ok, "realizations": 0})
    with pytest.raises(ValueError, match="evaluation point"):
        ExperimentConfig(**{**ok, "eval_points": ()})
    with pytest.raises(ValueError, match="outside"):
        ExperimentConfig(**{**ok, "eval_points": (EvalPoint(index=102),)})
    with pytest.raises(ValueError, match="bandwidths"):
        ExperimentConfig(**{**ok, "bandwidths": ()})
    with pytest.raises(ValueError, match="method"):
        ExperimentConfig(**{**ok, "methods": ("XX",)})
    with pytest.raises(ValueError, match="quantile"):
        ExperimentConfig(**{**ok, "quantile_levels": (1.5,)})
    with pytest.raises(ValueError, match="kernel"):
        ExperimentConfig(**{**ok, "kernel": "nope"})
    with pytest.raises(ValueError, match="window"):
        EvalPoint(index=1, window="nope")
