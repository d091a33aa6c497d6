"""Analytic objects defined by integrals.

The Levy exponent, resolvent density ``u^(p)``, potential difference ``v``, and
the integral representations of the stable constants.  Integrals over the
frequency axis with a ``cos(xi x)`` factor are summed panel by panel between
zeros of the cosine and extrapolated; singular and kinked integrands are split
at the bad points and mapped to remove the algebraic factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import specfun
from .errors import IntegrabilityError, RegimeError
from .quadrature import QuadratureResult, adaptive_quad, fourier_cos
from .specfun import ConstantName, ConstantsRecord, check_alpha, constant_closed_form, gamma_fn, gamma_regime

__all__ = [
    "LevyModel",
    "integrability_ratio",
    "resolvent_u",
    "v_potential",
    "resolvent_limit_check",
    "constant_integral",
    "shifted_abs_moment",
    "fill_integrals",
    "SMOOTH_TOL",
    "SINGULAR_TOL",
]

SMOOTH_TOL = 1e-10
SINGULAR_TOL = 1e-8

# increment ratio above which a tail integral is treated as divergent
_DIVERGENCE_RATIO = 0.999
_PROBE_XI = np.array([0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0, 1e3])


def _increments(f, points, tol=1e-9):
    """Integrals of ``f`` over consecutive intervals of ``points``."""
    out = []
    for a, b in zip(points[:-1], points[1:]):
        out.append(adaptive_quad(f, a, b, tol, max_intervals=20000).value)
    return out


def integrability_ratio(psi: Callable) -> float:
    """Tail-increment ratio of ``int_1^Xi dxi / (1 + psi(xi))``.

    With ``I(Xi)`` the integral up to ``Xi``, returns
    ``(I(1e5) - I(1e4)) / (I(1e4) - I(1e3))``.  A convergent tail gives a
    ratio below one (``10**(1 - a)`` for ``psi ~ xi**a``); a logarithmic or
    slower divergence gives a ratio of at least one.
    """
    def f(x):
        return 1.0 / (1.0 + psi(x))

    d1, d2 = _increments(f, [1e3, 1e4, 1e5])
    if d1 <= 0.0:
        return 0.0
    return d2 / d1


def _check_integrability(psi: Callable) -> float:
    ratio = integrability_ratio(psi)
    if not ratio < _DIVERGENCE_RATIO:
        raise IntegrabilityError(
            f"int dxi/(1+Psi(xi)) does not converge: tail increments over [1e3,1e4] and [1e4,1e5] "
            f"have ratio {ratio:.4g}; local times do not exist for this model"
        )
    return ratio


def _check_levy_density(density: Callable) -> None:
    # int (1 ^ z^2) nu(dz) < inf, probed by increment ratios at 0 and at infinity
    near = _increments(lambda z: z * z * density(z), [1e-6, 1e-4, 1e-2, 1.0])
    far = _increments(lambda z: density(z), [1.0, 1e2, 1e4, 1e6])
    for name, inc in (("near 0", near[::-1]), ("at infinity", far)):
        if not all(np.isfinite(inc)):
            raise IntegrabilityError(f"Levy density is not integrable {name}")
        if inc[1] > 0 and inc[2] / inc[1] >= _DIVERGENCE_RATIO:
            raise IntegrabilityError(f"int (1 ^ z^2) nu(dz) diverges {name}")


@dataclass(frozen=True)
class LevyModel:
    """A symmetric Levy process through its exponent ``Psi``.

    ``growth`` is the power with which ``Psi`` grows at infinity; it sets the
    tail substitution for frequency integrals.  Use the constructors
    :meth:`stable`, :meth:`brownian` and :meth:`custom`.
    """

    kind: str
    psi: Callable = field(repr=False)
    sigma2: float = 0.0
    levy_density: Optional[Callable] = field(default=None, repr=False)
    alpha: Optional[float] = None
    growth: float = 2.0
    integrability: float = field(default=0.0, repr=False)

    @classmethod
    def stable(cls, alpha: float) -> "LevyModel":
        alpha = check_alpha(alpha)
        if alpha == 2.0:
            # Psi = xi^2 is Brownian motion with sigma^2 = 2
            return cls("stable", lambda xi: np.asarray(xi, dtype=float) ** 2, sigma2=2.0, alpha=2.0, growth=2.0,
                       integrability=0.1)
        c5 = constant_closed_form("c5", alpha)

        def psi(xi, a=alpha):
            return np.abs(np.asarray(xi, dtype=float)) ** a

        def density(z, a=alpha, c=c5):
            return c * np.abs(np.asarray(z, dtype=float)) ** (-a - 1.0)

        return cls("stable", psi, 0.0, density, alpha, alpha, 10.0 ** (1.0 - alpha))

    @classmethod
    def brownian(cls, sigma2: float = 1.0) -> "LevyModel":
        sigma2 = float(sigma2)
        if not sigma2 > 0:
            raise RegimeError("Brownian model needs sigma2 > 0")
        return cls("brownian", lambda xi, s=sigma2: 0.5 * s * np.asarray(xi, dtype=float) ** 2,
                   sigma2, None, None, 2.0, 0.1)

    @classmethod
    def custom(cls, psi: Callable, *, sigma2: float = 0.0, levy_density: Optional[Callable] = None,
               growth: Optional[float] = None) -> "LevyModel":
        """Validate and wrap a user-supplied exponent.

        Checks symmetry, non-negativity and ``Psi(0) = 0`` on a probe grid,
        the Levy-measure integrability condition when a density is given, and
        the local-time integrability gate.
        """
        vals = np.asarray(psi(_PROBE_XI), dtype=float)
        neg = np.asarray(psi(-_PROBE_XI), dtype=float)
        if vals[0] != 0.0:
            raise RegimeError(f"Psi(0) must be 0, got {vals[0]!r}")
        if np.any(vals < 0) or not np.all(np.isfinite(vals)):
            raise RegimeError("Psi must be finite and non-negative")
        if not np.allclose(vals, neg, rtol=1e-12, atol=0.0):
            raise RegimeError("Psi must be symmetric")
        if sigma2 < 0:
            raise RegimeError("sigma2 must be non-negative")
        if levy_density is not None:
            z = _PROBE_XI[1:]
            dp, dm = np.asarray(levy_density(z), float), np.asarray(levy_density(-z), float)
            if np.any(dp < 0) or not np.allclose(dp, dm, rtol=1e-12, atol=0.0):
                raise RegimeError("Levy density must be symmetric and non-negative")
            _check_levy_density(levy_density)
        ratio = _check_integrability(psi)
        if growth is None:
            g1, g2 = (float(v) for v in psi(np.array([1e4, 1e5])))
            growth = math.log10(g2 / g1)
        return cls("custom", psi, float(sigma2), levy_density, None, float(growth), ratio)


def _frequency_tail(model: LevyModel, a: float, tol: float) -> QuadratureResult:
    """``int_a^inf dxi / Psi(xi)`` for ``a > 0``."""
    if model.kind == "stable" and model.alpha is not None:
        # exact for a pure power
        al = model.alpha
        return QuadratureResult(a ** (1.0 - al) / (al - 1.0), 0.0, 0)
    tail = model.growth if model.growth > 1.0 else None
    return adaptive_quad(lambda xi: 1.0 / model.psi(xi), a, math.inf, tol, tail_exponent=tail)


def resolvent_u(model: LevyModel, p: float, x: float, tol: float = SINGULAR_TOL) -> float:
    """Resolvent density ``u^(p)(x) = (1/pi) int_0^inf cos(xi x) / (p + Psi(xi)) dxi``."""
    p = float(p)
    if not p > 0:
        raise RegimeError("p must be positive")
    ax = abs(float(x))

    def g(xi):
        return 1.0 / (p + model.psi(xi))

    if ax == 0.0:
        tail = model.growth if model.growth > 1.0 else None
        res = adaptive_quad(g, 0.0, math.inf, tol, tail_exponent=tail)
    else:
        res = fourier_cos(g, ax, 0.0, tol)
    return res.value / math.pi


def _one_minus_cos_integral(model: LevyModel, x: float, p: float, tol: float) -> float:
    """``(1/pi) int_0^inf (1 - cos(xi x)) / (p + Psi(xi)) dxi`` with ``p >= 0``."""
    ax = abs(float(x))
    if ax == 0.0:
        return 0.0
    z = 0.5 * math.pi / ax

    def head_f(xi):
        s = np.sin(0.5 * ax * xi)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = 2.0 * s * s / (p + model.psi(xi))
        # (1 - cos)/Psi has a finite limit at 0 whenever Psi grows no faster than xi^2 there
        return np.where(np.isfinite(out), out, 0.0)

    def g(xi):
        return 1.0 / (p + model.psi(xi))

    head = adaptive_quad(head_f, 0.0, z, tol / 4)
    if p == 0.0:
        flat = _frequency_tail(model, z, tol / 4)
    else:
        tail = model.growth if model.growth > 1.0 else None
        flat = adaptive_quad(g, z, math.inf, tol / 4, tail_exponent=tail)
    osc = fourier_cos(g, ax, z, tol / 2)
    return (head.value + flat.value - osc.value) / math.pi


def v_potential(model: LevyModel, x: float, tol: float = SINGULAR_TOL) -> float:
    """Potential difference ``v(x) = (1/pi) int_0^inf (1 - cos(xi x)) / Psi(xi) dxi``."""
    return _one_minus_cos_integral(model, x, 0.0, tol)


def resolvent_limit_check(model: LevyModel, p_sequence, x: float, tol: float = SINGULAR_TOL) -> np.ndarray:
    """``u^(p)(0) - u^(p)(x)`` along a decreasing sequence of ``p``.

    The difference is integrated directly from ``(1 - cos(xi x)) / (p + Psi)``
    rather than by subtracting two resolvent values, which would cancel
    catastrophically once ``u^(p)(0)`` blows up as ``p -> 0``.
    """
    ps = np.asarray(p_sequence, dtype=float)
    if ps.ndim != 1 or ps.size == 0:
        raise RegimeError("p_sequence must be a non-empty 1-d sequence")
    if np.any(ps <= 0) or np.any(np.diff(ps) >= 0):
        raise RegimeError("p_sequence must be positive and strictly decreasing")
    if ps[-1] > 1e-4:
        raise RegimeError("p_sequence must reach values <= 1e-4")
    return np.array([_one_minus_cos_integral(model, x, p, tol) for p in ps])


# --- integral representations of the constants -----------------------------------

_SERIES_CUT = 0.25
_SERIES_TERMS = 30


def _even_binomial_sum(gamma: float, y, over_y2: bool = False):
    """``(1+y)^g + (1-y)^g - 2`` for ``0 <= y <= 1/2`` via its even power series.

    With ``over_y2`` the sum is divided by ``y^2`` term by term.
    """
    y = np.asarray(y, dtype=float)
    y2 = y * y
    out = np.zeros_like(y)
    coef = 1.0
    power = np.ones_like(y) if over_y2 else y2
    for k in range(0, 2 * _SERIES_TERMS, 2):
        coef = coef * (gamma - k) / (k + 1) * (gamma - k - 1) / (k + 2)
        out = out + 2.0 * coef * power
        power = power * y2
    return out


def _odd_binomial_sum(a: float, u):
    """``(1+u)^a - (1-u)^a - 2 a u`` for ``0 <= u <= 1/2`` via its odd power series."""
    u = np.asarray(u, dtype=float)
    u2 = u * u
    out = np.zeros_like(u)
    coef = a  # binom(a, 1)
    power = u
    for k in range(1, 80, 2):
        coef = coef * (a - k) / (k + 1) * (a - k - 1) / (k + 2)
        power = power * u2
        out = out + 2.0 * coef * power
    return out


def _c3_bracket_over_y2(gamma: float):
    # ((1+y)^g + |1-y|^g - 2) / y^2, finite at y = 0
    def h(y):
        y = np.asarray(y, dtype=float)
        small = y < _SERIES_CUT
        ys = np.where(small, y, 0.0)
        yl = np.where(small, 1.0, y)
        series = _even_binomial_sum(gamma, ys, over_y2=True)
        direct = ((1.0 + yl) ** gamma + np.abs(1.0 - yl) ** gamma - 2.0) / (yl * yl)
        return np.where(small, series, direct)

    return h


def _split_integral(f, pieces, tol):
    total = QuadratureResult(0.0, 0.0, 0)
    for a, b, kw in pieces:
        total = total + adaptive_quad(f, a, b, tol / len(pieces), **kw)
    return total


def _c5_int(alpha: float, tol: float) -> float:
    z = 0.5 * math.pi

    def head(y):
        # 2 sin^2(y/2) y^(-alpha-1), arranged so that tiny y cannot overflow
        y = np.asarray(y, dtype=float)
        return 0.5 * np.sinc(y / (2.0 * math.pi)) ** 2 * y ** (1.0 - alpha)

    h = adaptive_quad(head, 0.0, z, tol, left_power=1.0 - alpha)
    flat = z ** (-alpha) / alpha
    osc = fourier_cos(lambda y: y ** (-alpha - 1.0), 1.0, z, tol)
    return h.value + flat - osc.value


def _c3_rep(alpha: float, gamma: float, tol: float) -> float:
    h = _c3_bracket_over_y2(gamma)

    def f(y):
        # written as (h / y^2) y^(1-alpha) so tiny y cannot overflow
        y = np.asarray(y, dtype=float)
        return h(y) * y ** (1.0 - alpha)

    def far(y):
        y = np.asarray(y, dtype=float)
        return y ** (gamma - alpha - 1.0) * _even_binomial_sum(gamma, 1.0 / y)

    head = _split_integral(f, [
        (0.0, 1.0, {"left_power": 1.0 - alpha, "right_power": gamma}),
        (1.0, 2.0, {"left_power": gamma}),
    ], tol).value
    # beyond y = 2 the terms 2 y^(gamma-alpha-1) - 2 y^(-alpha-1) are integrated exactly
    tail = adaptive_quad(far, 2.0, math.inf, tol, tail_exponent=alpha + 3.0 - gamma).value
    exact = 2.0 * 2.0 ** (gamma - alpha) / (alpha - gamma) - 2.0 * 2.0 ** (-alpha) / alpha
    return constant_closed_form("c5", alpha) * (head + tail + exact)


def _c8_rep(alpha: float, gamma: float, tol: float) -> float:
    def f(y):
        y = np.asarray(y, dtype=float)
        safe = np.where(y > 0.0, y, 1.0)
        up = np.where(y > 0.0, np.expm1(gamma * np.log1p(safe)) / safe, gamma)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_gap = np.where(y < 1.0, np.log1p(-np.minimum(y, 1.0)), np.log(np.abs(y - 1.0)))
            down = np.where(y > 0.0, np.expm1(gamma * log_gap) / safe, -gamma)
        return (up * up + down * down) * y ** (1.0 - alpha)

    def far(y):
        y = np.asarray(y, dtype=float)
        u = 1.0 / y
        return (y ** (2.0 * gamma - alpha - 1.0) * _even_binomial_sum(2.0 * gamma, u)
                - 2.0 * y ** (gamma - alpha - 1.0) * _even_binomial_sum(gamma, u))

    head = _split_integral(f, [
        (0.0, 1.0, {"left_power": 1.0 - alpha, "right_power": gamma}),
        (1.0, 2.0, {"left_power": gamma}),
    ], tol).value
    # beyond y = 2 the terms 2 y^(2gamma) - 4 y^gamma + 2, times y^(-alpha-1), are integrated exactly
    tail = adaptive_quad(far, 2.0, math.inf, tol, tail_exponent=alpha + 3.0 - 2.0 * gamma).value
    exact = (2.0 * 2.0 ** (2.0 * gamma - alpha) / (alpha - 2.0 * gamma) - 4.0 * 2.0 ** (gamma - alpha) / (alpha - gamma)
             + 2.0 * 2.0 ** (-alpha) / alpha)
    return constant_closed_form("c5", alpha) * (head + tail + exact)


def _r_rep(alpha: float, gamma: float, tol: float) -> float:
    theta = alpha - gamma
    a1 = alpha - 1.0

    def f(w):
        # w^(-theta) times the bracket, divided through by w^(alpha-1) first
        w = np.asarray(w, dtype=float)
        safe = np.where(w > 0.0, w, 1.0)
        smooth = (np.abs(1.0 - safe) ** a1 + (1.0 + safe) ** a1 - 2.0) / safe ** a1
        return np.where(w > 0.0, smooth - 2.0, -2.0) * w ** (a1 - theta)

    def far(w):
        # the -2 term is integrated exactly; the rest cancels to O(w^(alpha-3))
        w = np.asarray(w, dtype=float)
        inv = 1.0 / w
        return w ** (a1 - theta) * (np.expm1(a1 * np.log1p(-inv)) + np.expm1(a1 * np.log1p(inv)))

    head = _split_integral(f, [
        (0.0, 1.0, {"left_power": gamma - 1.0, "right_power": a1}),
        (1.0, 2.0, {"left_power": a1}),
    ], tol).value
    tail = adaptive_quad(far, 2.0, math.inf, tol, tail_exponent=theta + 3.0 - alpha).value
    return head + tail - 2.0 * 2.0 ** (1.0 - theta) / (theta - 1.0)


def _q_rep(alpha: float, gamma: float, tol: float) -> float:
    theta = alpha - gamma
    a1 = alpha - 1.0

    def f(x):
        # the difference of powers vanishes linearly at 0; divide it out first
        x = np.asarray(x, dtype=float)
        safe = np.where(x > 0.0, x, 1.0)
        slope = np.where(x > 0.0, (np.abs(1.0 - safe) ** a1 - (1.0 + safe) ** a1) / safe, -2.0 * a1)
        return slope * x ** (1.0 - theta)

    def far(x):
        # beyond the exactly integrated leading term -2 (alpha-1) x^(gamma-2)
        x = np.asarray(x, dtype=float)
        return -x ** (gamma - 1.0) * _odd_binomial_sum(a1, 1.0 / x)

    head = _split_integral(f, [
        (0.0, 1.0, {"left_power": 1.0 - theta, "right_power": a1}),
        (1.0, 2.0, {"left_power": a1}),
    ], tol).value
    tail = adaptive_quad(far, 2.0, math.inf, tol, tail_exponent=4.0 - gamma).value
    return head + tail - 2.0 * a1 * 2.0 ** (gamma - 1.0) / (1.0 - gamma)


_INTEGRAL_NAMES = ("c5_int", "c3_rep", "c8_rep", "r", "q")


def constant_integral(name: str, alpha: float, gamma: Optional[float] = None, tol: float = 1e-11) -> float:
    """Integral representation of a stable constant.

    ``c5_int``
        ``int_0^inf (1 - cos y) / y^(alpha+1) dy``; ``c5 = 1/(2 c5_int)``.
    ``c3_rep``
        ``int nu(dy) (|1+y|^gamma - 1 - gamma y)`` with the stable Levy density.
    ``c8_rep``
        ``int nu(dy) (|1+y|^gamma - 1)^2``.
    ``r``
        ``int dz |z|^(-theta) (|1-z|^(alpha-1) - |z|^(alpha-1) - 1)`` with
        ``theta = alpha - gamma``.  The ``-|z|^(alpha-1)`` term keeps the
        integral absolutely convergent at infinity and leaves the
        principal-value functional it normalises unchanged.
    ``q``
        ``int_0^inf x^(-theta) (|1-x|^(alpha-1) - (1+x)^(alpha-1)) dx``.
    """
    if name not in _INTEGRAL_NAMES:
        raise RegimeError(f"unknown integral {name!r}; expected one of {_INTEGRAL_NAMES}")
    alpha = check_alpha(alpha, allow_two=False)
    if name == "c5_int":
        return _c5_int(alpha, tol)
    if gamma is None:
        raise RegimeError(f"{name} requires gamma")
    gamma = float(gamma)
    regime = {"c3_rep": "c3", "c8_rep": "c8", "r": "r", "q": "q"}[name]
    lo, hi, text = gamma_regime(regime, alpha)
    if not (lo < gamma < hi):
        raise RegimeError(f"{name}(alpha={alpha:g}, gamma={gamma:g}) requires {text}")
    if name == "c3_rep":
        return _c3_rep(alpha, gamma, tol)
    if name == "c8_rep":
        return _c8_rep(alpha, gamma, tol)
    if name == "r":
        return _r_rep(alpha, gamma, tol)
    return _q_rep(alpha, gamma, tol)


def shifted_abs_moment(alpha: float, p: float, x: float = 0.0, t: float = 1.0, tol: float = 1e-10) -> float:
    """``E|X_t - x|^p`` for the standard symmetric stable process, ``0 <= p < alpha``.

    Uses ``|a|^p = K_p^{-1} int_0^inf (1 - cos(a y)) y^(-p-1) dy`` with
    ``K_p = pi / (2 Gamma(p+1) sin(p pi / 2))``, so that the expectation only
    involves the characteristic function ``exp(-t y^alpha)``.
    """
    alpha = check_alpha(alpha)
    p, x, t = float(p), float(x), float(t)
    if t < 0:
        raise RegimeError("t must be non-negative")
    if p == 0.0:
        return 1.0
    if t == 0.0:
        return abs(x) ** p
    if x == 0.0:
        return t ** (p / alpha) * specfun.moment_m(alpha, p)
    if not (0.0 < p < alpha):
        raise RegimeError(f"shifted moment needs 0 < p < alpha, got p={p}")
    ax = abs(x)
    z = 0.5 * math.pi / ax

    def head(y):
        # (2 sin^2(ax y/2) - cos(ax y) expm1(-t y^alpha)) y^(-p-1), without 0 * inf at tiny y
        y = np.asarray(y, dtype=float)
        ya = y ** alpha
        safe = np.where(ya > 0.0, ya, 1.0)
        damp = np.where(ya > 0.0, np.expm1(-t * safe) / safe, -t)
        return (0.5 * ax * ax * np.sinc(ax * y / (2.0 * math.pi)) ** 2 * y ** (1.0 - p)
                - np.cos(ax * y) * damp * y ** (alpha - p - 1.0))

    h = adaptive_quad(head, 0.0, z, tol, left_power=min(alpha, 2.0) - 1.0 - p)
    flat = z ** (-p) / p
    osc = fourier_cos(lambda y: np.exp(-t * y ** alpha) * y ** (-p - 1.0), ax, z, tol)
    k_p = math.pi / (2.0 * gamma_fn(p + 1.0) * math.sin(0.5 * p * math.pi))
    return (h.value + flat - osc.value) / k_p


def fill_integrals(record: ConstantsRecord, tol: float = 1e-11) -> ConstantsRecord:
    """Fill the ``integral_rep`` column of a constants record in place.

    ``c4`` gets ``integral_rep = (1 / v(1)) / r`` with ``r`` from its integral.
    """
    alpha, gamma = record.alpha, record.gamma
    model = LevyModel.stable(alpha)
    v1 = v_potential(model, 1.0, tol=1e-10)
    u0 = resolvent_u(model, 1.0, 0.0, tol=1e-10)
    ent = record.entries

    def put(name, fn):
        e = ent[name]
        if e.status != "ok":
            return
        e.integral_rep = fn()

    put("c0", lambda: u0 / gamma_fn(1.0 - 1.0 / alpha))
    put("c1", lambda: 1.0 / v1)
    put("c6", lambda: v1)
    if alpha < 2.0:
        c5_int = constant_integral("c5_int", alpha, tol=tol)
        c2_int = constant_integral("c8_rep", alpha, alpha - 1.0, tol=tol)
        put("c5", lambda: 1.0 / (2.0 * c5_int))
        put("c2", lambda: c2_int)
        put("c7", lambda: c2_int * v1 * v1)
        put("c3", lambda: constant_integral("c3_rep", alpha, gamma, tol=tol))
        put("c8", lambda: constant_integral("c8_rep", alpha, gamma, tol=tol))
        put("q", lambda: constant_integral("q", alpha, gamma, tol=tol))
        if ent["r"].status == "ok":
            r = constant_integral("r", alpha, gamma, tol=tol)
            ent["r"].integral_rep = r
            ent["c4"].integral_rep = (1.0 / v1) / r
    return record
