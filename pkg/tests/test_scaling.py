import math
import warnings

import numpy as np
import pytest
from scipy.special import gammaincc

from kposim import (
    PrecisionPlan,
    choose_gap_index,
    coherent_overlap,
    coherent_state,
    default_ne_grid,
    delta_app,
    fit_exponential,
    fit_report,
    gap_scaling_sweep,
)
from kposim.scaling import GapPoint, plan_for_point


def test_coherent_state_norm_matches_incomplete_gamma():
    # truncated norm² = Q(dim, |z|²), the regularized upper incomplete gamma
    for zeta, dim in ((1.5, 12), (2.0 + 1.0j, 20), (3.0, 9)):
        cs = coherent_state(zeta, dim)
        analytic = math.sqrt(gammaincc(dim, abs(zeta) ** 2))
        assert cs.norm() == pytest.approx(analytic, abs=1e-12)


def test_coherent_state_norm_approaches_one():
    norms = [coherent_state(2.0, d).norm() for d in (8, 16, 32, 64)]
    assert norms[-1] == pytest.approx(1.0, abs=1e-14)
    assert all(b >= a for a, b in zip(norms, norms[1:]))


def test_overlap_identical_states_is_unity():
    cs = coherent_state(1.3, 64)
    assert np.vdot(cs.amplitudes, cs.amplitudes).real == pytest.approx(1.0, abs=1e-12)


def test_overlap_against_closed_form():
    num, ana = coherent_overlap(-1.0, 1.0, 64)
    assert ana == pytest.approx(math.exp(-2.0), rel=1e-15)
    assert abs(num - ana) < 1e-12
    num, ana = coherent_overlap(5.0, 1.0, 160)
    assert abs(num - ana) < 1e-12


def test_overlap_discrepancy_shrinks_with_dim():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # small dims truncate hard on purpose
        errs = [abs(np.subtract(*coherent_overlap(-4.0, 1.0, d))) for d in (8, 12, 16, 24, 48)]
    assert all(b <= a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-13


def test_overlap_warns_on_tight_truncation():
    with pytest.warns(UserWarning):
        coherent_overlap(-8.0, 1.0, 10)


def test_overlap_requires_two_wells():
    with pytest.raises(ValueError):
        coherent_overlap(0.0, 1.0, 32)


def test_delta_app_values():
    assert delta_app(-30.0) == 60.0
    assert delta_app(-50.0) == 100.0
    assert delta_app(0.0) == 0.0


def test_gap_convention():
    assert choose_gap_index(0.0) == 2
    assert choose_gap_index(-30.0 / math.sqrt(2.0)) == 0


def test_fit_exact_exponential():
    fit = fit_exponential([(1.0, math.exp(-6)), (2.0, math.exp(-12)), (3.0, math.exp(-18))])
    assert fit.delta == pytest.approx(6.0, abs=1e-12)
    assert fit.delta_stderr == pytest.approx(0.0, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-14)
    assert fit.prefactor_log == pytest.approx(0.0, abs=1e-10)


def test_fit_two_points_recovers_prefactor():
    fit = fit_exponential([(1.0, 2 * math.exp(-6)), (2.0, 2 * math.exp(-12))])
    assert fit.delta == pytest.approx(6.0, abs=1e-12)
    assert fit.prefactor_log == pytest.approx(math.log(2.0), abs=1e-12)
    assert fit.delta_stderr == 0.0


def test_fit_recovers_planted_decay_under_noise():
    rng = np.random.default_rng(12)
    delta, logpref = 7.5, 1.2
    x = np.linspace(0.5, 4.0, 10)
    for _ in range(5):
        gaps = np.exp(logpref - delta * x) * (1.0 + 0.01 * rng.normal(size=len(x)))
        fit = fit_exponential(list(zip(x, gaps)))
        assert abs(fit.delta - delta) <= 2.0 * max(fit.delta_stderr, 1e-6)


def test_fit_rejects_nonpositive_gaps():
    with pytest.raises(ValueError):
        fit_exponential([(1.0, 1e-3), (2.0, 0.0), (3.0, 1e-9)])


def test_fit_rejects_underdetermined():
    with pytest.raises(ValueError):
        fit_exponential([(1.0, 1e-3)])


def test_fit_skips_unconverged_points():
    pts = [
        GapPoint(1.0, math.exp(-3.0), True, 53, 64, 2),
        GapPoint(2.0, 1e-300, False, 4096, 96, 2),  # junk that must be ignored
        GapPoint(3.0, math.exp(-9.0), True, 53, 64, 2),
    ]
    fit = fit_exponential(pts)
    assert fit.delta == pytest.approx(3.0, abs=1e-9)
    assert fit.n_used() == 2


def test_plan_seeding_respects_expected_scale():
    plan = PrecisionPlan()
    assert plan_for_point(plan, -3.0, 0.5).initial_bits == plan.initial_bits
    deep = plan_for_point(plan, -30.0, 4.0)
    assert deep.initial_bits >= 2 * abs(-30.0) * 4.0 * math.log2(math.e)
    assert deep.initial_bits <= plan.max_bits


def test_desk_scale_sweep_log_linear():
    # xi2 = -4 over a short N_e ladder: log-gaps close to linear, fitted on the
    # sweep's own converged output
    points = gap_scaling_sweep(0.0, -4.0, [1.0, 1.75, 2.5, 3.25, 4.0])
    assert all(p.converged for p in points)
    assert all(p.gap_index == 2 for p in points)
    # deep points must have engaged arbitrary precision automatically
    assert points[-1].precision_bits > 53
    fit = fit_exponential(points)
    assert fit.r_squared > 0.99
    assert 0.6 * delta_app(-4.0) < fit.delta < delta_app(-4.0)


def test_sweep_grid_validation():
    with pytest.raises(ValueError):
        gap_scaling_sweep(0.0, -3.0, [])
    with pytest.raises(ValueError):
        gap_scaling_sweep(0.0, -3.0, [2.0, 1.0])


def test_fit_report_shape():
    pts = [GapPoint(1.0, 1e-3, True, 53, 64, 2), GapPoint(2.0, 1e-6, True, 53, 64, 2)]
    rep = fit_report(fit_exponential(pts), -4.0)
    assert set(rep) == {"delta", "delta_stderr", "delta_app", "prefactor_log", "r_squared", "points"}
    assert rep["delta_app"] == 8.0
    assert rep["points"][0]["gap"] == format(1e-3, ".17g")
    assert rep["points"][0]["precision_bits"] == 53


def test_default_ne_grid_is_geometric():
    grid = default_ne_grid()
    assert len(grid) == 8
    assert grid[0] == pytest.approx(0.5)
    assert grid[-1] == pytest.approx(4.0)
    ratios = grid[1:] / grid[:-1]
    assert np.allclose(ratios, ratios[0])
