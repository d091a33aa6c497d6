"""Adaptive Gauss-Kronrod quadrature with the transformations the analysis layer needs.

Integrands are vectorised callables: they receive a 1-d ``ndarray`` of nodes and
return an array of the same shape.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import QuadratureError

__all__ = ["QuadratureResult", "adaptive_quad", "fourier_cos", "wynn_epsilon", "gk15"]

# 15-point Kronrod nodes (non-negative half) and weights, with the embedded 7-point Gauss weights.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[:-1][::-1]])
_WK = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[:-1][::-1]])
_WG_FULL = np.zeros(15)
_WG_FULL[[1, 3, 5]] = _WG[:3]
_WG_FULL[7] = _WG[3]
_WG_FULL[[13, 11, 9]] = _WG[:3]


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(self.value + other.value, self.error_estimate + other.error_estimate,
                                self.evaluations + other.evaluations)

    def scaled(self, c: float) -> "QuadratureResult":
        return QuadratureResult(c * self.value, abs(c) * self.error_estimate, self.evaluations)


def gk15(f: Callable, a: float, b: float) -> tuple[float, float]:
    """One Gauss-Kronrod 7/15 panel: returns (Kronrod value, |Kronrod - Gauss|)."""
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fx = np.asarray(f(c + h * _NODES), dtype=float)
    k = h * float(fx @ _WK)
    g = h * float(fx @ _WG_FULL)
    return k, abs(k - g)


def _adaptive_finite(f, a, b, tol, max_intervals):
    value, err = gk15(f, a, b)
    heap = [(-err, a, b, value, err)]
    total, total_err = value, err
    n_eval = 15
    while total_err > tol * (1.0 + abs(total)):
        if len(heap) >= max_intervals:
            raise QuadratureError(
                f"no convergence on [{a}, {b}] after {len(heap)} intervals "
                f"(error estimate {total_err:.3g})",
                QuadratureResult(total, total_err, n_eval),
            )
        neg, lo, hi, v, e = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            # interval at floating-point resolution; accept what we have
            heapq.heappush(heap, (0.0, lo, hi, v, e))
            break
        v1, e1 = gk15(f, lo, mid)
        v2, e2 = gk15(f, mid, hi)
        n_eval += 30
        total += v1 + v2 - v
        total_err += e1 + e2 - e
        heapq.heappush(heap, (-e1, lo, mid, v1, e1))
        heapq.heappush(heap, (-e2, mid, hi, v2, e2))
    # re-sum to shed accumulated rounding from the running updates
    total = math.fsum(item[3] for item in heap)
    total_err = math.fsum(item[4] for item in heap)
    return QuadratureResult(total, total_err, n_eval)


def _map_power(beta):
    # beta < 0: k = 1/(1+beta) cancels a (x-a)**beta factor exactly.
    # beta > 0: the integrand is A + B (x-a)**beta; stretching by w**k with
    # k*beta >= 2 makes it twice differentiable at the endpoint.
    if beta < 0:
        return 1.0 / (1.0 + beta)
    if beta == 0:
        return 1.0
    return min(8.0, max(2.0, 2.0 / beta))


# smallest mapped offset: w**k may underflow onto the singular endpoint, where
# the mapped integrand is flat anyway
_TINY_OFFSET = 1e-290


def _clamped(w, k):
    wk = np.maximum(w ** k, _TINY_OFFSET)
    return wk, wk ** (1.0 / k)


def _left_power_map(f, a, b, beta):
    k = _map_power(beta)
    width = b - a

    def g(w):
        wk, wc = _clamped(w, k)
        return f(a + width * wk) * (width * k) * wk / wc

    return g


def _right_power_map(f, a, b, beta):
    k = _map_power(beta)
    width = b - a

    def g(w):
        wk, wc = _clamped(w, k)
        return f(b - width * wk) * (width * k) * wk / wc

    return g


def _tail_power_map(f, b0, p):
    # x = b0 * u**(-1/(p-1)) maps [b0, inf) onto (0, 1] and flattens x**(-p) decay
    k = 1.0 / (p - 1.0)

    def g(u):
        with np.errstate(over="ignore", invalid="ignore"):
            x = b0 * u ** (-k)
            out = f(x) * x * (k / u)
        return np.where(np.isfinite(out), out, 0.0)

    return g


def _tail_rational_map(f, a):
    def g(s):
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            x = a + s / (1.0 - s)
            out = f(x) / (1.0 - s) ** 2
        return np.where(np.isfinite(out), out, 0.0)

    return g


def adaptive_quad(
    f: Callable,
    a: float,
    b: float,
    tol: float = 1e-10,
    *,
    left_power: Optional[float] = None,
    right_power: Optional[float] = None,
    tail_exponent: Optional[float] = None,
    max_intervals: int = 4000,
) -> QuadratureResult:
    """Integrate ``f`` over ``[a, b]`` to ``|error| <= tol * (1 + |value|)``.

    ``b`` may be ``inf``.  Optional hints select a change of variables:

    left_power / right_power
        ``f(x) ~ |x - endpoint|**beta`` with ``beta > -1``.  For
        ``beta < 0`` the map ``x = a + (b-a) w**(1/(1+beta))`` removes the
        algebraic factor; for ``beta > 0`` (a kink ``A + B|x-a|**beta``) a
        stretching map ``w**k`` with ``k beta >= 2`` smooths it.
    tail_exponent
        ``f(x) ~ x**(-p)`` as ``x -> inf`` with ``p > 1``; ``[b0, inf)`` is
        mapped onto ``(0, 1]`` by ``x = b0 u**(-1/(p-1))``.  Without it the
        rational map ``x = a + s/(1-s)`` is used.

    Raises ``QuadratureError`` (carrying the best estimate) when the interval
    budget is exhausted.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if a == b:
        return QuadratureResult(0.0, 0.0, 0)
    if b < a:
        return adaptive_quad(f, b, a, tol, left_power=right_power, right_power=left_power,
                             tail_exponent=tail_exponent, max_intervals=max_intervals).scaled(-1.0)
    if math.isinf(b):
        if right_power is not None:
            raise ValueError("right_power makes no sense on an infinite interval")
        if tail_exponent is not None:
            if tail_exponent <= 1.0:
                raise ValueError("tail_exponent must exceed 1 for a convergent tail")
            b0 = a + 1.0 if a > 0 else 1.0
            head = adaptive_quad(f, a, b0, tol / 2, left_power=left_power, max_intervals=max_intervals)
            tail = _adaptive_finite(_tail_power_map(f, b0, tail_exponent), 0.0, 1.0, tol / 2, max_intervals)
            return head + tail
        if left_power is not None:
            head = adaptive_quad(f, a, a + 1.0, tol / 2, left_power=left_power, max_intervals=max_intervals)
            tail = _adaptive_finite(_tail_rational_map(f, a + 1.0), 0.0, 1.0, tol / 2, max_intervals)
            return head + tail
        return _adaptive_finite(_tail_rational_map(f, a), 0.0, 1.0, tol, max_intervals)

    if left_power is not None and right_power is not None:
        mid = 0.5 * (a + b)
        return (adaptive_quad(f, a, mid, tol / 2, left_power=left_power, max_intervals=max_intervals)
                + adaptive_quad(f, mid, b, tol / 2, right_power=right_power, max_intervals=max_intervals))
    if left_power is not None:
        if not left_power > -1:
            raise ValueError("endpoint singularity must be integrable (beta > -1)")
        return _adaptive_finite(_left_power_map(f, a, b, left_power), 0.0, 1.0, tol, max_intervals)
    if right_power is not None:
        if not right_power > -1:
            raise ValueError("endpoint singularity must be integrable (beta > -1)")
        return _adaptive_finite(_right_power_map(f, a, b, right_power), 0.0, 1.0, tol, max_intervals)
    return _adaptive_finite(f, a, b, tol, max_intervals)


def wynn_epsilon(partial_sums) -> tuple[float, float]:
    """Epsilon-algorithm limit of a sequence of partial sums.

    Returns ``(estimate, change)`` where ``change`` is the distance between the
    two most recent even-column estimates, used as the extrapolation error.
    """
    s = [float(v) for v in partial_sums]
    n = len(s)
    if n < 3:
        return s[-1], abs(s[-1] - s[-2]) if n == 2 else float("inf")
    prev = [0.0] * (n + 1)
    cur = s[:]
    best, best_prev = s[-1], s[-2]
    col = 0
    while len(cur) > 1:
        nxt = []
        for k in range(len(cur) - 1):
            d = cur[k + 1] - cur[k]
            if d == 0.0:
                # column has converged exactly
                return cur[-1], abs(best - cur[-1]) if col % 2 == 0 else 0.0
            nxt.append(prev[k + 1] + 1.0 / d)
        prev, cur = cur, nxt
        col += 1
        if col % 2 == 0:
            if len(cur) >= 2:
                best, best_prev = cur[-1], cur[-2]
            else:
                best_prev, best = best, cur[-1]
    return best, abs(best - best_prev)


def fourier_cos(
    g: Callable,
    omega: float,
    a: float = 0.0,
    tol: float = 1e-8,
    *,
    min_panels: int = 12,
    max_panels: int = 400,
) -> QuadratureResult:
    """``int_a^inf g(xi) cos(omega xi) dxi`` for ``g`` decaying to zero.

    The range past the first zero of the cosine is cut into half-period panels
    between consecutive zeros; the panel contributions alternate in sign and
    their partial sums are accelerated with the epsilon algorithm.
    """
    omega = abs(float(omega))
    if omega == 0.0:
        raise ValueError("omega must be non-zero; use adaptive_quad for the non-oscillatory case")

    def integrand(x):
        return g(x) * np.cos(omega * x)

    half = math.pi / omega
    k0 = max(0, math.ceil(a / half - 0.5))
    z = (k0 + 0.5) * half
    head = adaptive_quad(integrand, a, z, tol / 4) if z > a else QuadratureResult(0.0, 0.0, 0)
    panel_tol = tol * 1e-2
    sums = []
    running = 0.0
    panel_err = 0.0
    n_eval = head.evaluations
    estimate, change = float("nan"), float("inf")
    for j in range(max_panels):
        lo = (k0 + 0.5 + j) * half
        piece = adaptive_quad(integrand, lo, lo + half, panel_tol)
        running += piece.value
        panel_err += piece.error_estimate
        n_eval += piece.evaluations
        sums.append(running)
        if j + 1 >= min_panels and (j + 1) % 4 == 0:
            estimate, change = wynn_epsilon(sums[-48:])
            if change <= tol * 0.25 * (1.0 + abs(estimate + head.value)):
                return QuadratureResult(head.value + estimate, head.error_estimate + panel_err + change, n_eval)
    raise QuadratureError(
        f"oscillatory tail did not converge in {max_panels} panels",
        QuadratureResult(head.value + estimate, head.error_estimate + panel_err + change, n_eval),
    )
