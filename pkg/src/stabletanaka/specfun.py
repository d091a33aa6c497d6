"""Closed-form special functions and the constants of the stable Tanaka formulas.

Everything here is a pure function of its arguments.  The Gamma function is a
self-contained Lanczos approximation so that every constant has one error
budget; all constants are routed through it.

Conventions: ``X`` is the standard symmetric alpha-stable variable with
characteristic function ``exp(-|xi|**alpha)``; at alpha = 2 this is sqrt(2)
times a standard normal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import DegenerateAlphaError, PoleError, RegimeError, UnknownConstantError

__all__ = [
    "ConstantName",
    "ConstantEntry",
    "ConstantsRecord",
    "check_alpha",
    "gamma_fn",
    "moment_m",
    "constant_closed_form",
    "c6_direct",
    "c8_from_moments",
    "constants_record",
    "gamma_regime",
]

# Lanczos coefficients, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _sinpi(x: float) -> float:
    # sin(pi*x) with exact argument reduction; keeps relative accuracy near integers
    n = round(x)
    s = math.sin(math.pi * (x - n))
    return -s if n % 2 else s


def _lanczos(x: float) -> float:
    x -= 1.0
    a = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        a += _LANCZOS[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    half = 0.5 * (x + 0.5)
    # split the power so t**(x+0.5) cannot overflow before exp(-t) is applied
    p = t ** half
    return _SQRT_2PI * (p * math.exp(-t)) * p * a


def gamma_fn(x: float) -> float:
    """Gamma function for real ``x``, with reflection for ``x < 1/2``.

    Relative error is below 1e-13 on ``|x| <= 30``.  Raises ``PoleError`` at
    0, -1, -2, ...
    """
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        raise PoleError(f"Gamma has a pole at {x!r}")
    if x < 0.5:
        return math.pi / (_sinpi(x) * _lanczos(1.0 - x))
    if x == math.floor(x) and x <= 23.0:
        return float(math.factorial(int(x) - 1))
    return _lanczos(x)


def check_alpha(alpha: float, allow_two: bool = True) -> float:
    """Validate a stability index; returns it as a float."""
    alpha = float(alpha)
    if not (1.0 < alpha <= 2.0) or math.isnan(alpha):
        raise RegimeError(f"alpha must lie in (1, 2], got {alpha!r}")
    if alpha == 2.0 and not allow_two:
        raise DegenerateAlphaError("alpha = 2 is a Gamma pole for this formula; only the limit alpha -> 2 exists")
    return alpha


def _m(alpha: float, gamma: float) -> float:
    return (
        2.0 ** gamma
        * gamma_fn((1.0 + gamma) / 2.0)
        * gamma_fn((alpha - gamma) / alpha)
        / (math.sqrt(math.pi) * gamma_fn((2.0 - gamma) / 2.0))
    )


def moment_m(alpha: float, gamma: float) -> float:
    """Absolute moment ``E|X|**gamma`` of the standard symmetric stable law.

    Defined for ``-1 < gamma < alpha``; outside that range the moment is infinite.
    """
    alpha = check_alpha(alpha)
    gamma = float(gamma)
    if not (-1.0 < gamma < alpha):
        raise RegimeError(f"moment order gamma must lie in (-1, alpha) = (-1, {alpha}), got {gamma}")
    if gamma == 0.0:
        return 1.0
    return _m(alpha, gamma)


class ConstantName(str, Enum):
    c0 = "c0"
    c1 = "c1"
    c2 = "c2"
    c3 = "c3"
    c4 = "c4"
    c5 = "c5"
    c6 = "c6"
    c7 = "c7"
    c8 = "c8"
    r = "r"
    q = "q"

    @classmethod
    def parse(cls, name) -> "ConstantName":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name))
        except ValueError:
            raise UnknownConstantError(f"unknown constant {name!r}; expected one of {[c.value for c in cls]}") from None


GAMMA_FREE = frozenset({ConstantName.c0, ConstantName.c1, ConstantName.c2, ConstantName.c5,
                        ConstantName.c6, ConstantName.c7})


def gamma_regime(name, alpha: float) -> tuple[float, float, str]:
    """Admissible gamma interval for a gamma-dependent constant.

    Returns ``(low, high, description)``; the interval is open except where
    the description says otherwise.
    """
    name = ConstantName.parse(name)
    a = alpha
    if name is ConstantName.c3:
        return a - 1.0, a, f"alpha-1 < gamma < alpha, i.e. ({a - 1:g}, {a:g})"
    if name is ConstantName.c8:
        # the jump integral converges on the whole of (0, alpha/2); the c3 formula continues there
        return 0.0, a / 2.0, f"0 < gamma < alpha/2, i.e. (0, {a / 2:g})"
    if name in (ConstantName.c4, ConstantName.r):
        return (a - 1.0) / 2.0, a - 1.0, f"(alpha-1)/2 < gamma < alpha-1, i.e. ({(a - 1) / 2:g}, {a - 1:g})"
    if name is ConstantName.q:
        hi = min(a, 1.0)
        return (a - 1.0) / 2.0, hi, f"(alpha-1)/2 < gamma < min(alpha, 1), i.e. ({(a - 1) / 2:g}, {hi:g})"
    raise RegimeError(f"{name.value} does not depend on gamma")


def _check_gamma(name: ConstantName, alpha: float, gamma: Optional[float]) -> float:
    if gamma is None:
        raise RegimeError(f"{name.value} requires gamma")
    gamma = float(gamma)
    lo, hi, text = gamma_regime(name, alpha)
    ok = lo < gamma < hi
    if not ok:
        raise RegimeError(f"{name.value}(alpha={alpha:g}, gamma={gamma:g}) requires {text}")
    return gamma


def _rgamma(x: float) -> float:
    # 1/Gamma, zero at the poles
    if x <= 0.0 and x == math.floor(x):
        return 0.0
    return 1.0 / gamma_fn(x)


def _inv_m(alpha: float, g: float) -> float:
    # 1/m_g continued to g <= -1; it vanishes at g = -1, where m_g = +inf
    return (math.sqrt(math.pi) * gamma_fn((2.0 - g) / 2.0) * _rgamma((1.0 + g) / 2.0)
            / (2.0 ** g * gamma_fn((alpha - g) / alpha)))


def _c3(alpha: float, gamma: float) -> float:
    return gamma * _m(alpha, gamma) * _inv_m(alpha, gamma - alpha) / alpha


def _c1(alpha: float) -> float:
    return (alpha - 1.0) * math.pi * _m(alpha, alpha - 1.0) / gamma_fn(1.0 / alpha)


def _c2(alpha: float) -> float:
    return 2.0 * (alpha - 1.0) * _m(alpha, 2.0 * (alpha - 1.0)) / (alpha * _m(alpha, alpha - 2.0))


def _c5(alpha: float) -> float:
    return alpha / (2.0 * gamma_fn(1.0 - alpha) * math.cos(alpha * math.pi / 2.0))


def _beta(a: float, b: float) -> float:
    return gamma_fn(a) * gamma_fn(b) / gamma_fn(a + b)


def _q(alpha: float, gamma: float) -> float:
    # Mellin transforms of the three pieces, continued analytically; the
    # removable singularity at theta = 1 is pi cot(pi alpha / 2)
    theta = alpha - gamma
    if theta == 1.0:
        return math.pi / math.tan(0.5 * math.pi * alpha)
    return _beta(1.0 - theta, alpha) + _beta(-gamma, alpha) - _beta(1.0 - theta, -gamma)


def _r(alpha: float, gamma: float) -> float:
    # expectation of the Dirichlet decomposition,
    # E|X_t|^gamma = c4 pv int |z|^-theta (E L^z_t - E L^0_t) dz, via Mellin transforms
    theta = alpha - gamma
    return (-_c1(alpha) * gamma_fn(theta / alpha)
            / (gamma * _m(alpha, gamma) * gamma_fn(theta) * math.sin(0.5 * (theta - 1.0) * math.pi)))


def constant_closed_form(name, alpha: float, gamma: Optional[float] = None, *, r: Optional[float] = None) -> float:
    """Closed-form value of one of the constants.

    ``c4`` is ``c1/r``; a caller may pass its own ``r`` (for instance the
    integral from :func:`stabletanaka.analysis.constant_integral`), otherwise
    the closed form of ``r`` is used.  ``q`` at ``theta = alpha - gamma``
    near 1 loses roughly ``1e-16/|theta - 1|`` to cancellation; ``theta = 1``
    itself is exact.
    """
    name = ConstantName.parse(name)
    needs_lt_two = name in (ConstantName.c2, ConstantName.c4, ConstantName.c5, ConstantName.c6,
                            ConstantName.c7, ConstantName.c8, ConstantName.r, ConstantName.q)
    alpha = check_alpha(alpha, allow_two=not needs_lt_two)

    if name is ConstantName.c0:
        return gamma_fn((alpha + 1.0) / alpha) / math.pi
    if name is ConstantName.c1:
        return _c1(alpha)
    if name is ConstantName.c2:
        return _c2(alpha)
    if name is ConstantName.c5:
        return _c5(alpha)
    if name is ConstantName.c6:
        return 1.0 / _c1(alpha)
    if name is ConstantName.c7:
        return _c2(alpha) / _c1(alpha) ** 2
    gamma = _check_gamma(name, alpha, gamma)
    if name is ConstantName.c3:
        return _c3(alpha, gamma)
    if name is ConstantName.c8:
        return _c3(alpha, 2.0 * gamma) - 2.0 * _c3(alpha, gamma)
    if name is ConstantName.q:
        return _q(alpha, gamma)
    if name is ConstantName.r:
        return _r(alpha, gamma)
    # c4
    if r is None:
        r = _r(alpha, gamma)
    if r == 0.0 or not math.isfinite(r):
        raise RegimeError(f"r must be finite and non-zero, got {r!r}")
    return _c1(alpha) / r


def c6_direct(alpha: float) -> float:
    """c6 from the Gamma-function expression, independent of c1."""
    alpha = check_alpha(alpha, allow_two=False)
    return gamma_fn(2.0 - alpha) / (alpha - 1.0) * math.cos((alpha - 1.0) * math.pi / 2.0) / math.pi


def c8_from_moments(alpha: float, gamma: float) -> float:
    """c8 written directly in terms of the moments m, without going through c3."""
    alpha = check_alpha(alpha, allow_two=False)
    gamma = _check_gamma(ConstantName.c8, alpha, gamma)
    return 2.0 * gamma / alpha * (_m(alpha, 2.0 * gamma) * _inv_m(alpha, 2.0 * gamma - alpha)
                                  - _m(alpha, gamma) * _inv_m(alpha, gamma - alpha))


@dataclass
class ConstantEntry:
    closed_form: Optional[float] = None
    integral_rep: Optional[float] = None
    status: str = "ok"  # "ok", "boundary-skip" or "regime-skip"
    note: str = ""

    @property
    def relative_gap(self) -> Optional[float]:
        if self.closed_form is None or self.integral_rep is None:
            return None
        return abs(self.integral_rep - self.closed_form) / abs(self.closed_form)


@dataclass
class ConstantsRecord:
    alpha: float
    gamma: Optional[float] = None
    entries: dict = field(default_factory=dict)

    def __getitem__(self, name) -> ConstantEntry:
        return self.entries[ConstantName.parse(name).value]


def constants_record(alpha: float, gamma: Optional[float] = None) -> ConstantsRecord:
    """Closed forms for every constant at ``(alpha, gamma)``.

    Constants that are undefined at this point are kept as entries with a
    ``boundary-skip`` (alpha = 2) or ``regime-skip`` (gamma outside the
    constant's range) status instead of raising.  The integral column is
    filled by :func:`stabletanaka.analysis.fill_integrals`.
    """
    alpha = check_alpha(alpha)
    rec = ConstantsRecord(alpha=alpha, gamma=gamma)
    for name in ConstantName:
        entry = ConstantEntry()
        if name not in GAMMA_FREE and gamma is None:
            entry.status, entry.note = "regime-skip", "gamma not supplied"
        else:
            try:
                entry.closed_form = constant_closed_form(name, alpha, gamma)
            except DegenerateAlphaError as exc:
                entry.status, entry.note = "boundary-skip", str(exc)
            except RegimeError as exc:
                entry.status, entry.note = "regime-skip", str(exc)
        rec.entries[name.value] = entry
    return rec
