"""Acceptance criteria 1-12, each logged as one PASS/FAIL line."""

import json
import math
import os
import subprocess
import sys

import pytest

from stabletanaka import harness, specfun
from stabletanaka.analysis import LevyModel, constant_integral, resolvent_u, v_potential
from stabletanaka.harness import CheckConfig
from stabletanaka.sampler import SeedStream, identity_checks, sampler_self_test

from conftest import ALPHA_GRID

SEED = 42
N_PATHS = 10_000
CFG = CheckConfig(seed=SEED)


def rel(a, b):
    return abs(a - b) / abs(b)


def c8_gamma(alpha):
    # middle of the classical range [alpha-1, alpha/2)
    return 0.5 * ((alpha - 1.0) + alpha / 2.0)


@pytest.fixture(scope="module")
def tanaka_pair():
    return (harness.tanaka_check(1.5, 0.0, 1.0, N_PATHS, CFG),
            harness.tanaka_check(1.5, 0.0, 1.0, N_PATHS, CFG, fault=1.2))


def test_criterion_01_closed_form_identities(record):
    gaps = []
    for a in ALPHA_GRID:
        g = c8_gamma(a)
        c1, c2, c6 = (specfun.constant_closed_form(n, a) for n in ("c1", "c2", "c6"))
        gaps += [
            rel(c6 * c1, 1.0),
            rel(specfun.constant_closed_form("c7", a), c2 * c6 ** 2),
            rel(specfun.constant_closed_form("c8", a, g),
                specfun.constant_closed_form("c3", a, 2 * g) - 2 * specfun.constant_closed_form("c3", a, g)),
            rel(specfun.moment_m(a, a - 1), a * c1 * specfun.constant_closed_form("c0", a) / (a - 1)),
        ]
    ok = max(gaps) <= 1e-12
    record(1, "closed-form identities within 1e-12", ok, f"max gap {max(gaps):.2e}")
    assert ok


def test_criterion_02_quadrature_vs_closed_form(record):
    worst = {"c5": 0.0, "c3": 0.0, "c8": 0.0}
    for a in ALPHA_GRID:
        worst["c5"] = max(worst["c5"], rel(1 / (2 * constant_integral("c5_int", a)), specfun.constant_closed_form("c5", a)))
        g3 = (2 * a - 1) / 2
        worst["c3"] = max(worst["c3"], rel(constant_integral("c3_rep", a, g3), specfun.constant_closed_form("c3", a, g3)))
        g8 = a / 2 * 0.9
        worst["c8"] = max(worst["c8"], rel(constant_integral("c8_rep", a, g8), specfun.constant_closed_form("c8", a, g8)))
    ok = worst["c5"] <= 1e-6 and worst["c3"] <= 1e-4 and worst["c8"] <= 1e-4
    record(2, "c5 integral 1e-6, c3/c8 representations 1e-4", ok,
           ", ".join(f"{k} {v:.2e}" for k, v in worst.items()))
    assert ok


def test_criterion_03_brownian_resolvent(record):
    bm = LevyModel.brownian(1.0)
    err = max(abs(resolvent_u(bm, p, x) - math.exp(-math.sqrt(2 * p) * abs(x)) / math.sqrt(2 * p))
              for p in (0.1, 1.0, 10.0) for x in (0.0, 1.0, 3.0))
    ok = err <= 1e-8
    record(3, "Brownian resolvent within 1e-8 absolute", ok, f"max error {err:.2e}")
    assert ok


def test_criterion_04_potential_scaling(record):
    worst_flat, worst_c6 = 0.0, 0.0
    for a in ALPHA_GRID:
        m = LevyModel.stable(a)
        ratios = [v_potential(m, x) / abs(x) ** (a - 1) for x in (0.25, 0.5, 1.0, 2.0, 4.0)]
        worst_flat = max(worst_flat, max(ratios) / min(ratios) - 1)
        worst_c6 = max(worst_c6, max(rel(r, specfun.constant_closed_form("c6", a)) for r in ratios))
    ok = worst_flat <= 1e-4 and worst_c6 <= 1e-4
    record(4, "v(x)/|x|^(alpha-1) constant and equal to c6 within 1e-4", ok,
           f"spread {worst_flat:.2e}, c6 gap {worst_c6:.2e}")
    assert ok


def test_criterion_05_sampler_law(record):
    stream = SeedStream(SEED, (5,))
    cf = sampler_self_test(1.5, stream.child(0), n=100_000)
    ids = identity_checks(1.5, 100_000, stream.child(1))
    ok = cf.passed and all(r.passed for r in ids)
    record(5, "cos characteristic function and subordination moment banks within 4 SE", ok,
           "; ".join(f"{r.identity} {'ok' if r.passed else 'fail'}" for r in (cf,) + tuple(ids)))
    assert ok


def test_criterion_06_tanaka(record, tanaka_pair):
    good, bad = tanaka_pair
    ok = good.passed and not bad.passed
    record(6, "Tanaka residual mean zero; fault-injected variant fails", ok,
           f"mean {good.mc_estimate:.4g} +- {good.std_error:.3g}; fault mean {bad.mc_estimate:.4g}")
    assert ok


def test_criterion_07_local_time_mean(record):
    rep = harness.local_time_mean_check(1.5, 1.0, N_PATHS, CheckConfig(seed=SEED, n_steps=2 ** 14, eps=2.0 ** -5))
    d = rep.diagnostics
    rel_err = abs(rep.mc_estimate - rep.analytic_target) / rep.analytic_target
    shrinks = abs(d["raw_relative_error_fine"]) < abs(d["raw_relative_error_coarse"])
    ok = rel_err <= 0.1 and shrinks and rep.passed
    record(7, "E L^0_1 within 10% and error shrinks under refinement", ok,
           f"estimate {rep.mc_estimate:.4g} vs {rep.analytic_target:.4g} ({rel_err:.1%}); raw errors "
           f"{d['raw_relative_error_coarse']:.1%} -> {d['raw_relative_error_fine']:.1%}")
    assert ok


def test_criterion_08_bracket(record):
    rep = harness.bracket_check(1.5, 0.0, 1.0, N_PATHS, CFG)
    ratio = rep.diagnostics["ratio"]
    ok = 0.9 <= ratio <= 1.1
    record(8, "bracket ratio in [0.9, 1.1]", ok, f"ratio {ratio:.4f}")
    assert ok


def test_criterion_09_submartingale(record):
    a, g = 1.5, 1.2
    exact_gap = rel(specfun.constant_closed_form("c3", a, g) * (a / g) * specfun.moment_m(a, g - a), specfun.moment_m(a, g))
    rep = harness.submartingale_decomposition_check(a, g, 0.0, 1.0, N_PATHS, CFG)
    mc_ok = abs(rep.mc_estimate - rep.analytic_target) <= 4 * rep.std_error
    ok = exact_gap <= 1e-12 and mc_ok and rep.passed
    record(9, "submartingale identity exact to 1e-12 and Monte Carlo within 4 SE", ok,
           f"gap {exact_gap:.1e}; {rep.mc_estimate:.5g} vs {rep.analytic_target:.5g} +- {rep.std_error:.2g}")
    assert ok


def test_criterion_10_dirichlet(record):
    rep = harness.dirichlet_decomposition_check(1.6, 0.45, 0.0, 1.0, N_PATHS, CFG)
    d = rep.diagnostics
    mean_ok = abs(rep.mc_estimate) <= 5 * rep.std_error
    ok = mean_ok and d["subgates"]["zero_qv_monotone"] and d["subgates"]["capped_sum_diverges"]
    record(10, "Dirichlet residual within 5 SE, zero-QV and divergence probes monotone", ok,
           f"mean {rep.mc_estimate:.3g} +- {rep.std_error:.2g}; qv {['%.3g' % v for v in d['qv_medians']]}; "
           f"capped {['%.3g' % v for v in d['capped_sum_means']]}")
    assert ok


def test_criterion_11_symmetric_power(record):
    rep = harness.symmetric_power_check(1.5, 0.5, 1.0, N_PATHS, CFG)
    probe = rep.diagnostics["martingale_probe"]
    ok = rep.passed and probe["pass"]
    record(11, "symmetric-power residual passes with its martingale probe", ok,
           f"mean {rep.mc_estimate:.3g} +- {rep.std_error:.2g}; probe {probe['covariances']}")
    assert ok


def _cli(args, threads, tmp):
    env = dict(os.environ, LEVY_THREADS=str(threads))
    return subprocess.run([sys.executable, "-m", "stabletanaka.cli"] + args, env=env, capture_output=True, cwd=tmp)


def test_criterion_12_determinism(record, tmp_path):
    verify = ["verify", "--alpha", "1.5", "--seed", "42", "--paths", "2000",
              "--check", "tanaka,bracket,dirichlet,symmetric_power,local_time_mean"]
    runs = [_cli(verify, n, tmp_path) for n in (1, 4)]
    same_verify = runs[0].stdout == runs[1].stdout and runs[0].returncode == runs[1].returncode
    sims = [_cli(["simulate", "--paths", "5", "--steps", "256", "--seed", "9", "--out", str(tmp_path / f"s{n}")], n,
                 tmp_path) for n in (1, 4)]
    files = sorted(os.listdir(tmp_path / "s1"))
    same_sim = files == sorted(os.listdir(tmp_path / "s4")) and all(
        (tmp_path / "s1" / f).read_bytes() == (tmp_path / "s4" / f).read_bytes() for f in files)
    ok = same_verify and same_sim and len(json.loads(runs[0].stdout)) == 6 and sims[0].stdout == sims[1].stdout
    record(12, "identical output across LEVY_THREADS=1 and 4", ok,
           f"verify {'identical' if same_verify else 'differs'}, simulate {'identical' if same_sim else 'differs'}")
    assert ok
