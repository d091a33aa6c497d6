import math
import warnings

import numpy as np
import pytest

from stabletanaka import harness, specfun
from stabletanaka.errors import BiasRegimeWarning, RegimeError, SupportError
from stabletanaka.harness import CheckConfig, StepFunction
from stabletanaka.localtime import box_mean_abs_power, central_bin_local_time
from stabletanaka.report import dumps17
from stabletanaka.sampler import SeedStream, simulate_block

CFG = CheckConfig(seed=3)


@pytest.mark.parametrize("fn, args", [
    (harness.tanaka_check, (1.5, 0.0, 0.0, 100)),
    (harness.bracket_check, (1.5, 0.0, 0.0, 100)),
    (harness.submartingale_decomposition_check, (1.5, 1.2, 0.0, 0.0, 100)),
    (harness.dirichlet_decomposition_check, (1.6, 0.45, 0.0, 0.0, 100)),
    (harness.symmetric_power_check, (1.5, 0.5, 0.0, 100)),
    (harness.ito_tanaka_check, (1.5, None, 0.0, 100)),
    (harness.local_time_mean_check, (1.5, 0.0, 100)),
])
def test_zero_horizon_is_trivial(fn, args):
    rep = fn(*args)
    assert rep.passed and rep.mc_estimate == 0.0 and rep.analytic_target == 0.0


def test_bracket_skips_at_two():
    rep = harness.bracket_check(2.0, n_paths=100)
    assert rep.passed and rep.diagnostics["status"] == "boundary-skip"


def test_suite_skips_at_two():
    reps = harness.run_suite(2.0, checks=["submartingale", "dirichlet", "symmetric_power"], n_paths=100)
    assert reps[0].identity == "characteristic_function" and reps[0].passed
    assert all(r.diagnostics.get("status") == "boundary-skip" for r in reps[1:])


def test_probe_constant_residual():
    res = np.full(50, 3.0)
    probe = harness.martingale_probe(res, res, 0.5, 1.0, {"g": np.linspace(-1, 1, 50)})
    assert probe.covariances == [0.0] and probe.passed
    with pytest.raises(RegimeError):
        harness.martingale_probe(res, res, 1.0, 1.0, {"g": res})


def test_reflect_after():
    v = np.array([[0.0, 1.0, 3.0, 2.0]])
    assert np.array_equal(harness.reflect_after(v, 1), [[0.0, 1.0, -1.0, 0.0]])


def test_zero_step_function():
    f = StepFunction(np.array([-0.5, 0.5]), np.zeros(2), 0.5)
    rep = harness.ito_tanaka_check(1.5, f, n_paths=50, config=CFG)
    assert rep.mc_estimate == 0.0 and rep.std_error == 0.0 and rep.passed


def test_single_bin_reduces_to_tanaka():
    eps, alpha = 2.0 ** -5, 1.5
    f = StepFunction(np.array([0.0]), np.array([1.0]), eps)
    v = simulate_block(alpha, 1.0, 4096, SeedStream(5), range(20))
    dt = 1.0 / 4096
    c1 = specfun.constant_closed_form("c1", alpha)
    occ = dt * f(v[:, :-1]).sum(axis=1)
    ito = f.potential(v[:, -1], alpha) - f.potential(np.array([0.0]), alpha)[0] - c1 * occ
    tan = (box_mean_abs_power(v[:, -1], alpha - 1, eps) - box_mean_abs_power(0.0, alpha - 1, eps)
           - c1 * central_bin_local_time(v, 0.0, eps, dt))
    assert np.allclose(ito, 2 * eps * tan, rtol=1e-12, atol=1e-15)


def test_step_function_support_error():
    f = StepFunction(np.array([10.0]), np.array([1.0]), 0.5)
    with pytest.raises(SupportError):
        harness.ito_tanaka_check(1.5, f, n_paths=10)


def test_step_function_tiling():
    with pytest.raises(RegimeError):
        StepFunction(np.array([0.0, 0.3]), np.array([1.0, 1.0]), 0.1)


def test_step_potential_matches_quadrature():
    import mpmath as mp
    f = StepFunction.hat(0.25, 1.0)
    y = 0.3
    ref = sum(w * mp.quad(lambda s: abs(y - s) ** 0.5, sorted({c - 0.25, c + 0.25} | ({y} if abs(y - c) < 0.25 else set())))
              for c, w in zip(f.centers, f.weights))
    assert f.potential(np.array([y]), 1.5)[0] == pytest.approx(float(ref), rel=1e-12)


def test_submartingale_small_time():
    alpha, gamma, t = 1.5, 1.2, 1e-3
    rep = harness.submartingale_decomposition_check(alpha, gamma, 0.0, t, 500, CheckConfig(seed=4, eps=t ** (1 / alpha) / 8))
    bound = 10 * t ** (gamma / alpha)
    assert 0 < rep.mc_estimate < bound and 0 < rep.analytic_target < bound


def test_submartingale_near_upper_gamma():
    rep = harness.submartingale_decomposition_check(1.5, 1.49, n_paths=2000, config=CFG)
    assert rep.passed, rep.to_dict()


def test_submartingale_regime():
    with pytest.raises(RegimeError):
        harness.submartingale_decomposition_check(1.5, 0.4, n_paths=10)


def test_dirichlet_regime():
    with pytest.raises(RegimeError):
        harness.dirichlet_decomposition_check(1.6, 0.7, n_paths=10)


def test_moment_scaling_examples():
    assert harness.moment_scaling_check(1.5, 0.0).passed
    assert harness.moment_scaling_check(1.5, 0.7, t=2.0, config=CFG).passed
    rep = harness.moment_scaling_check(2.0, 1.0, config=CFG)
    assert rep.passed and rep.analytic_target == pytest.approx(2 / math.sqrt(math.pi), rel=1e-14)


def test_bracket_far_level():
    rep = harness.bracket_check(1.5, x=25.0, n_paths=2000, config=CFG)
    at_zero = harness.bracket_check(1.5, n_paths=2, config=CFG).diagnostics["point_level_limit"]
    # far from the start the occupation of x is tiny: both sides are a small fraction of the x = 0 value
    assert rep.analytic_target < 0.2 * at_zero and rep.mc_estimate < 0.2 * at_zero
    assert rep.passed


def test_explicit_coarse_steps_warn():
    with pytest.warns(BiasRegimeWarning):
        rep = harness.tanaka_check(1.5, n_paths=20, config=CheckConfig(n_steps=64))
    assert rep.diagnostics["bias_gate"] is False


def test_threads_do_not_change_results():
    a = harness.tanaka_check(1.5, n_paths=300, config=CheckConfig(seed=8, threads=1, block=16))
    b = harness.tanaka_check(1.5, n_paths=300, config=CheckConfig(seed=8, threads=3, block=16))
    assert dumps17(a.to_dict()) == dumps17(b.to_dict())


def test_small_ensemble_checks_pass():
    assert harness.tanaka_check(1.5, n_paths=1000, config=CFG).passed
    assert harness.ito_tanaka_check(1.5, n_paths=1000, config=CFG).passed
    assert harness.symmetric_power_check(1.5, 0.5, n_paths=1000, config=CFG).passed


def test_n_paths_validated():
    with pytest.raises(RegimeError):
        harness.tanaka_check(1.5, n_paths=0)


def test_unknown_check_name():
    with pytest.raises(RegimeError):
        harness.run_suite(1.5, checks=["bogus"])


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("LEVY_THREADS", "3")
    assert harness.worker_count() == 3
    monkeypatch.setenv("LEVY_THREADS", "x")
    with pytest.raises(RegimeError):
        harness.worker_count()
