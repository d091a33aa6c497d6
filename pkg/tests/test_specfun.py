import math

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from stabletanaka import specfun
from stabletanaka.errors import DegenerateAlphaError, PoleError, RegimeError, UnknownConstantError
from stabletanaka.specfun import constant_closed_form as cf, gamma_fn, moment_m

from conftest import ALPHA_GRID, mp_moment


def rel(a, b):
    return abs(a - b) / abs(b)


@pytest.mark.parametrize("x, expected", [(1.0, 1.0), (0.5, 1.7724538509055160), (-0.5, -3.5449077018110320)])
def test_gamma_examples(x, expected):
    assert rel(gamma_fn(x), expected) < 1e-14


@pytest.mark.parametrize("x", [-29.7, -10.5, -3.3, -0.999, 1e-8, 0.25, 2.5, 7.3, 17.0, 29.9])
def test_gamma_against_mpmath(x):
    assert rel(gamma_fn(x), float(mp.gamma(x))) < 1e-13


@pytest.mark.parametrize("x", [0.0, -1.0, -7.0])
def test_gamma_poles(x):
    with pytest.raises(PoleError):
        gamma_fn(x)


@settings(max_examples=200, deadline=None)
@given(st.floats(-30, 30, allow_nan=False).filter(lambda v: abs(v - round(v)) > 1e-6 or v > 0.5))
def test_gamma_property_mpmath(x):
    assert rel(gamma_fn(x), float(mp.gamma(x))) < 1e-13


def test_moment_examples():
    assert moment_m(1.5, 0.0) == 1.0
    assert rel(moment_m(2.0, 1.0), 2.0 / math.sqrt(math.pi)) < 1e-14
    assert rel(moment_m(2.0, 1.0), math.sqrt(2.0) * math.sqrt(2.0 / math.pi)) < 1e-14
    assert rel(moment_m(1.5, 1.0), 2.0 * gamma_fn(1.0 / 3.0) / math.pi) < 1e-13


@settings(max_examples=100, deadline=None)
@given(st.floats(1.01, 2.0), st.floats(0.0, 1.0))
def test_moment_against_mpmath(alpha, frac):
    gamma = -0.99 + frac * (alpha + 0.98)
    assert rel(moment_m(alpha, gamma), mp_moment(alpha, gamma)) < 1e-12


def test_moment_blows_up_at_ends():
    assert moment_m(1.5, -0.999) > 100 * moment_m(1.5, -0.5)
    assert moment_m(1.5, 1.499) > 100 * moment_m(1.5, 0.75)
    for g in (-1.0, 1.5, 2.0):
        with pytest.raises(RegimeError):
            moment_m(1.5, g)


def test_c0_example():
    a = 1.5
    assert rel(cf("c0", a), gamma_fn(5.0 / 3.0) / math.pi) < 1e-15
    # cross-check through m_{alpha-1} = alpha c1 c0 / (alpha-1)
    assert rel(moment_m(a, a - 1.0), a * cf("c1", a) * cf("c0", a) / (a - 1.0)) < 1e-12


def test_c6_limit():
    assert abs(cf("c6", 1.999) - 0.5) < 1e-2


def test_c8_example():
    assert rel(cf("c8", 1.5, 0.6), cf("c3", 1.5, 1.2) - 2.0 * cf("c3", 1.5, 0.6)) < 1e-15


@pytest.mark.parametrize("alpha", [1.05 + 0.1 * k for k in range(10)])
def test_identities_on_grid(alpha):
    assert rel(cf("c6", alpha) * cf("c1", alpha), 1.0) < 1e-12
    assert rel(cf("c6", alpha), specfun.c6_direct(alpha)) < 1e-10
    assert rel(cf("c7", alpha), cf("c2", alpha) * cf("c6", alpha) ** 2) < 1e-12
    assert rel(moment_m(alpha, alpha - 1.0), alpha * cf("c1", alpha) * cf("c0", alpha) / (alpha - 1.0)) < 1e-12
    assert cf("c5", alpha) > 0


@settings(max_examples=100, deadline=None)
@given(st.floats(1.01, 1.99), st.floats(0.01, 0.99))
def test_c8_identity_property(alpha, frac):
    lo, hi = alpha - 1.0, alpha / 2.0
    gamma = lo + frac * (hi - lo)
    lhs = 2.0 * cf("c3", alpha, gamma) + cf("c8", alpha, gamma)
    assert rel(lhs, cf("c3", alpha, 2.0 * gamma)) < 1e-12
    assert rel(cf("c8", alpha, gamma), specfun.c8_from_moments(alpha, gamma)) < 1e-10
    assert cf("c8", alpha, gamma) > 0


@settings(max_examples=100, deadline=None)
@given(st.floats(1.01, 1.999))
def test_positive_constants(alpha):
    for name in ("c0", "c1", "c2", "c5", "c6", "c7"):
        v = cf(name, alpha)
        assert math.isfinite(v) and v > 0


def _mp_r(alpha, gamma):
    # both half-lines folded together; the -2 z^-theta tail beyond 1e19 is added exactly
    theta, a1 = mp.mpf(alpha) - mp.mpf(gamma), mp.mpf(alpha) - 1
    h = lambda z: z ** (-theta) * (abs(1 - z) ** a1 + (1 + z) ** a1 - 2 * z ** a1 - 2)
    pts = [0, 0.5, 1, 1.5, 2, 4] + [mp.mpf(10) ** k for k in range(1, 20)]
    s = sum(mp.quad(h, [a, b], maxdegree=10) for a, b in zip(pts[:-1], pts[1:]))
    return s - 2 * pts[-1] ** (1 - theta) / (theta - 1)


def test_r_and_q_against_mpmath_integrals():
    alpha, gamma = 1.6, 0.45
    theta = alpha - gamma
    a1 = alpha - 1.0
    with mp.workdps(30):
        r_mp = float(_mp_r(alpha, gamma))
        g = lambda x: x ** (-theta) * (abs(1 - x) ** a1 - (1 + x) ** a1)
        q_mp = float(mp.quad(g, [0, 0.5, 1, 2] + [mp.mpf(10) ** k for k in range(1, 12)] + [mp.inf]))
    assert rel(cf("r", alpha, gamma), r_mp) < 1e-12
    assert rel(cf("q", alpha, gamma), q_mp) < 1e-12
    assert rel(cf("c4", alpha, gamma), cf("c1", alpha) / r_mp) < 1e-12
    assert cf("c4", alpha, gamma, r=2.0) == cf("c1", alpha) / 2.0


@settings(max_examples=100, deadline=None)
@given(st.floats(1.01, 1.99), st.floats(0.01, 0.99))
def test_c8_below_alpha_minus_one(alpha, frac):
    # below alpha-1 the c3 formula is continued through 1/Gamma; c8 stays positive and finite
    gamma = frac * (alpha - 1.0)
    v = cf("c8", alpha, gamma)
    assert math.isfinite(v) and v > 0
    assert rel(v, specfun.c8_from_moments(alpha, gamma)) < 1e-10


def test_c8_continuation_against_integral():
    from stabletanaka.analysis import constant_integral
    for alpha, gamma in [(1.9, 0.855), (1.5, 0.2), (1.2, 0.05)]:
        assert rel(cf("c8", alpha, gamma), constant_integral("c8_rep", alpha, gamma)) < 1e-8


def test_q_at_theta_one():
    assert rel(cf("q", 1.5, 0.5), -math.pi) < 1e-14


def test_unknown_constant():
    with pytest.raises(UnknownConstantError):
        cf("c9", 1.5)


@pytest.mark.parametrize("name", ["c2", "c5", "c6", "c7"])
def test_alpha_two_rejected(name):
    with pytest.raises(DegenerateAlphaError):
        cf(name, 2.0)


def test_alpha_two_allowed_where_defined():
    assert rel(cf("c0", 2.0), gamma_fn(1.5) / math.pi) < 1e-15
    assert math.isfinite(cf("c1", 2.0))


def test_gamma_regime_errors():
    with pytest.raises(RegimeError, match="alpha-1 < gamma < alpha"):
        cf("c3", 1.5, 0.4)
    with pytest.raises(RegimeError):
        cf("c4", 1.5, 0.6)
    with pytest.raises(RegimeError):
        cf("c3", 1.5)
    with pytest.raises(RegimeError):
        cf("c1", 0.9)


def test_constants_record_statuses():
    rec = specfun.constants_record(2.0, 1.2)
    assert rec["c2"].status == "boundary-skip"
    assert rec["c0"].status == "ok"
    rec = specfun.constants_record(1.5, 1.2)
    assert rec["c3"].status == "ok" and rec["r"].status == "regime-skip"
    assert len(rec.entries) == 11
