"""Occupation-density local times and the principal-value functionals built on them.

The estimator is the central-bin occupation density

    L^x_t ~ (1/2eps) * dt * #{k : t_k < t, |X_{t_k} - x| <= eps},

a left-endpoint Riemann sum of the time spent in ``[x - eps, x + eps]``.
Seen as a function of a continuous level ``x`` it is the occupation density
smoothed by a box of half-width ``eps``; the ``*_kernel`` functions below give
functionals of that smoothed field in closed form, straight from the path.
"""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import BiasRegimeWarning, GridCoverageError, RegimeError, SupportError
from .sampler import SamplePath

__all__ = [
    "LocalTimeField",
    "PrincipalValueEstimate",
    "default_x_grid",
    "estimate_field",
    "field_csv",
    "occupation_residual",
    "pv_centered",
    "pv_symmetric",
    "holder_probe",
    "central_bin_local_time",
    "box_mean_abs_power",
    "box_mean_signed_power",
    "centered_pv_kernel",
    "symmetric_pv_kernel",
    "capped_abs_power",
]


@dataclass(frozen=True)
class LocalTimeField:
    """``values[i, j]`` estimates ``L^{x_i}_{t_j}``."""

    x_centers: np.ndarray
    epsilon: float
    t_grid: np.ndarray
    values: np.ndarray
    source: tuple = ()
    alpha: Optional[float] = None

    @property
    def spacing(self) -> float:
        return float(self.x_centers[1] - self.x_centers[0]) if self.x_centers.size > 1 else 2.0 * self.epsilon

    def column(self, j: int = -1) -> np.ndarray:
        return self.values[:, j]

    def at(self, level, j: int = -1):
        """Linear interpolation in the level, zero outside the grid."""
        return np.interp(level, self.x_centers, self.values[:, j], left=0.0, right=0.0)


@dataclass(frozen=True)
class PrincipalValueEstimate:
    value: float
    inner_cutoff: float
    truncation_radius: float
    exponent: float
    sensitivity: tuple = (math.nan, math.nan)  # values at half and at double the inner cutoff

    @property
    def cutoff_spread(self) -> float:
        return max(abs(self.sensitivity[0] - self.value), abs(self.sensitivity[1] - self.value))


def default_x_grid(alpha: float, t: float, n_points: int = 401) -> tuple[np.ndarray, float]:
    """Levels spanning ``+-4 t^(1/alpha)``; ``eps`` is half the spacing so bins tile."""
    half = 4.0 * t ** (1.0 / alpha)
    x = np.linspace(-half, half, n_points)
    return x, 0.5 * (x[1] - x[0])


def _time_indices(path: SamplePath, t_grid) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    k = np.rint(t / path.dt).astype(int)
    if np.any(np.abs(k * path.dt - t) > 1e-9 * max(1.0, path.t_end)) or np.any(k < 0) or np.any(k > path.n_steps):
        raise RegimeError("t_grid must consist of path grid times in [0, t_end]")
    if np.any(np.diff(k) < 0):
        raise RegimeError("t_grid must be non-decreasing")
    return k


def estimate_field(path: SamplePath, x_centers=None, epsilon: Optional[float] = None, t_grid=None) -> LocalTimeField:
    """Central-bin local-time field of one path.

    Warns with ``BiasRegimeWarning`` when the time step exceeds ``eps^alpha``:
    the path can then jump across a bin between grid points often enough to
    bias the estimate.
    """
    if x_centers is None:
        x_centers, default_eps = default_x_grid(path.alpha, path.t_end)
        epsilon = default_eps if epsilon is None else epsilon
    x_centers = np.asarray(x_centers, dtype=float)
    if x_centers.ndim != 1 or x_centers.size == 0 or np.any(np.diff(x_centers) <= 0):
        raise RegimeError("x_centers must be a strictly increasing 1-d grid")
    if epsilon is None or not epsilon > 0:
        raise RegimeError("epsilon must be positive")
    if t_grid is None:
        t_grid = [path.t_end]
    k = _time_indices(path, t_grid)
    if path.dt > epsilon ** path.alpha:
        warnings.warn(f"time step {path.dt:.3g} exceeds eps^alpha = {epsilon ** path.alpha:.3g}; "
                      "local-time estimates are biased low", BiasRegimeWarning, stacklevel=2)

    values = np.zeros((x_centers.size, k.size))
    counts = np.zeros(x_centers.size)
    start = 0
    lo_edges = x_centers - epsilon
    hi_edges = x_centers + epsilon
    for j, stop in enumerate(k):
        if stop > start:
            seg = np.sort(path.values[start:stop])
            counts = counts + (np.searchsorted(seg, hi_edges, side="right")
                               - np.searchsorted(seg, lo_edges, side="left"))
            start = stop
        values[:, j] = counts * (path.dt / (2.0 * epsilon))
    return LocalTimeField(x_centers, float(epsilon), k * path.dt, values, (path.seed, path.path), path.alpha)


def field_csv(field: LocalTimeField) -> str:
    """CSV matrix: header ``t`` then the level grid, one row per time."""
    buf = io.StringIO()
    buf.write("t," + ",".join(format(v, ".17g") for v in field.x_centers) + "\n")
    np.savetxt(buf, np.column_stack([field.t_grid, field.values.T]), fmt="%.17g", delimiter=",")
    return buf.getvalue()


def _check_tiling(field: LocalTimeField) -> None:
    d = np.diff(field.x_centers)
    if d.size and (np.max(np.abs(d - 2.0 * field.epsilon)) > 1e-9 * field.epsilon):
        raise RegimeError("occupation_residual needs bins that tile the line (spacing = 2 eps)")


def occupation_residual(path: SamplePath, field: LocalTimeField, f: Callable, j: int = -1) -> float:
    """``|int_0^t f(X_s) ds - int f(x) L^x_t dx|`` on the estimator's grids.

    The time integral is the left Riemann sum on the path grid and the space
    integral is the midpoint rule on the bins, so for ``f`` constant on bins
    the two agree exactly.
    """
    _check_tiling(field)
    x, eps = field.x_centers, field.epsilon
    edge = np.concatenate([np.linspace(x[0] - eps, x[0] + eps, 33), np.linspace(x[-1] - eps, x[-1] + eps, 33),
                           x[0] - eps - np.geomspace(eps, 1e6, 16), x[-1] + eps + np.geomspace(eps, 1e6, 16)])
    if np.any(np.asarray(f(edge), dtype=float) != 0.0):
        raise SupportError("test function must vanish on the outermost bins and beyond the level grid")
    k = int(round(field.t_grid[j] / path.dt))
    time_side = path.dt * float(np.sum(np.asarray(f(path.values[:k]), dtype=float)))
    space_side = 2.0 * eps * float(np.sum(np.asarray(f(x), dtype=float) * field.values[:, j]))
    return abs(time_side - space_side)


def _power_integrals(a, b, theta):
    """``(int_a^b z^-theta dz, int_a^b z^(1-theta) dz)`` for ``0 < a <= b``."""
    if abs(theta - 1.0) < 1e-12:
        i0 = np.log(b / a)
    else:
        i0 = (b ** (1.0 - theta) - a ** (1.0 - theta)) / (1.0 - theta)
    if abs(theta - 2.0) < 1e-12:
        i1 = np.log(b / a)
    else:
        i1 = (b ** (2.0 - theta) - a ** (2.0 - theta)) / (2.0 - theta)
    return i0, i1


def _product_integral(z_nodes, d_nodes, theta):
    """``int D(z) z^-theta dz`` for piecewise-linear ``D`` on positive nodes."""
    za, zb = z_nodes[:-1], z_nodes[1:]
    da, db = d_nodes[:-1], d_nodes[1:]
    keep = zb > za
    za, zb, da, db = za[keep], zb[keep], da[keep], db[keep]
    slope = (db - da) / (zb - za)
    with np.errstate(divide="ignore", invalid="ignore"):
        i0, i1 = _power_integrals(za, zb, theta)
    if np.any(za == 0.0):
        # only reachable with an inner cutoff of 0; z^(1-theta) is integrable there
        zero = za == 0.0
        i1 = np.where(zero, zb ** (2.0 - theta) / (2.0 - theta), i1)
        i0 = np.where(zero, 0.0, i0)
        # D(0) must vanish for the first term to converge
        if np.any(np.abs(da[zero]) > 0.0):
            raise RegimeError("principal-value integrand does not vanish at the origin")
    return float(np.sum((da - slope * za) * i0 + slope * i1))


def _one_side_nodes(levels_offset, cutoff, radius):
    inner = levels_offset[(levels_offset > cutoff) & (levels_offset < radius)]
    return np.concatenate([[cutoff], inner, [radius]])


def _pv_centered_value(field, x, theta, cutoff, radius, j, tail):
    lx = float(field.at(x, j))
    offsets = field.x_centers - x
    total = 0.0
    for sign in (1.0, -1.0):
        z = _one_side_nodes(np.sort(sign * offsets), cutoff, radius)
        d = field.at(x + sign * z, j) - lx
        total += _product_integral(z, d, theta)
    if tail:
        total -= lx * 2.0 * radius ** (1.0 - theta) / (theta - 1.0)
    return total


def _theta_regime(field, theta, lo_open, what):
    if field.alpha is None:
        return
    hi = (field.alpha + 1.0) / 2.0
    if not (theta < hi and (theta > lo_open if lo_open is not None else True)):
        lo_txt = "" if lo_open is None else f"{lo_open:g} < "
        raise RegimeError(f"{what} needs {lo_txt}theta < (alpha+1)/2 = {hi:g}, got theta={theta:g}")


def pv_centered(field: LocalTimeField, x: float, exponent: float, truncation: float, *,
                inner_cutoff: Optional[float] = None, j: int = -1, tail: bool = False) -> PrincipalValueEstimate:
    """``int_{cutoff < |z| <= R} |z|^-theta (L^{x+z}_t - L^x_t) dz`` from a field.

    The field is interpolated linearly in the level and integrated exactly
    against ``|z|^-theta``.  The default inner cutoff excludes the central
    bin (``eps``).  With ``tail=True`` the exact contribution of ``|z| > R``
    is added assuming the field vanishes beyond ``R``.
    """
    theta = float(exponent)
    _theta_regime(field, theta, 1.0, "centred principal value")
    if field.alpha is None and not theta > 1.0:
        raise RegimeError("centred principal value needs theta > 1")
    cutoff = field.epsilon if inner_cutoff is None else float(inner_cutoff)
    if not (0.0 < cutoff < truncation):
        raise RegimeError("need 0 < inner_cutoff < truncation")
    lo, hi = field.x_centers[0], field.x_centers[-1]
    if x - truncation < lo - 1e-12 or x + truncation > hi + 1e-12:
        raise GridCoverageError(f"[x - R, x + R] = [{x - truncation:g}, {x + truncation:g}] "
                                f"leaves the level grid [{lo:g}, {hi:g}]")
    value = _pv_centered_value(field, x, theta, cutoff, truncation, j, tail)
    sens = tuple(_pv_centered_value(field, x, theta, c, truncation, j, tail) for c in (cutoff / 2.0, 2.0 * cutoff))
    return PrincipalValueEstimate(value, cutoff, float(truncation), theta, sens)


def _pv_symmetric_value(field, theta, cutoff, radius, j):
    z = _one_side_nodes(np.sort(np.abs(field.x_centers)), cutoff, radius)
    d = field.at(z, j) - field.at(-z, j)
    return _product_integral(z, d, theta)


def pv_symmetric(field: LocalTimeField, theta: float, *, inner_cutoff: float = 0.0,
                 truncation: Optional[float] = None, j: int = -1) -> PrincipalValueEstimate:
    """``int_0^inf z^-theta (L^z_t - L^{-z}_t) dz`` from a field on a grid symmetric about 0.

    ``L^z - L^-z`` vanishes at 0 and is interpolated linearly, so an inner
    cutoff of 0 is allowed.  Cutoff sensitivity is reported at half and at
    double the cutoff, or at half and one grid spacing when the cutoff is 0.
    """
    theta = float(theta)
    _theta_regime(field, theta, None, "symmetric principal value")
    x = field.x_centers
    if np.max(np.abs(x + x[::-1])) > 1e-9 * max(1.0, float(np.max(np.abs(x)))):
        raise GridCoverageError("symmetric principal value needs a level grid symmetric about 0")
    radius = float(x[-1]) if truncation is None else float(truncation)
    if radius > x[-1] + 1e-12:
        raise GridCoverageError("truncation radius exceeds the level grid")
    cutoff = float(inner_cutoff)
    value = _pv_symmetric_value(field, theta, cutoff, radius, j)
    base = cutoff if cutoff > 0 else field.spacing
    sens = tuple(_pv_symmetric_value(field, theta, c, radius, j) for c in (base / 2.0, 2.0 * base if cutoff > 0 else base))
    return PrincipalValueEstimate(value, cutoff, radius, theta, sens)


def holder_probe(field: LocalTimeField, j: int = -1, lags: Sequence[int] = (1, 2, 4, 8, 16, 32)) -> Union[float, str]:
    """Log-log slope of ``max_x |L^{x+y} - L^x|`` against the lag ``y``.

    Returns ``"flat"`` when the field does not vary in the level.
    """
    col = field.values[:, j]
    h = field.spacing
    ys, ms = [], []
    for m in lags:
        if m >= col.size:
            break
        mx = float(np.max(np.abs(col[m:] - col[:-m])))
        if mx > 0.0:
            ys.append(m * h)
            ms.append(mx)
    if len(ys) < 2:
        return "flat"
    slope = np.polyfit(np.log(ys), np.log(ms), 1)[0]
    return float(slope)


# --- closed-form functionals of the box-smoothed field, evaluated on the path ---

def central_bin_local_time(values, x: float, eps: float, dt: float) -> np.ndarray:
    """Central-bin estimate of ``L^x`` at the final time for each row of ``values``.

    ``values`` holds paths as rows, including the final point, which a left
    Riemann sum does not use.
    """
    v = np.atleast_2d(values)[:, :-1]
    return np.count_nonzero(np.abs(v - x) <= eps, axis=1) * (dt / (2.0 * eps))


def _signed_power_antideriv(w, p):
    # antiderivative of |u|^p, odd in w
    return np.sign(w) * np.abs(w) ** (p + 1.0) / (p + 1.0)


def box_mean_abs_power(a, p: float, eps: float):
    """``(1/2eps) int_{a-eps}^{a+eps} |u|^p du`` for ``p > -1``."""
    if not p > -1.0:
        raise RegimeError("box mean of |u|^p needs p > -1")
    a = np.asarray(a, dtype=float)
    return (_signed_power_antideriv(a + eps, p) - _signed_power_antideriv(a - eps, p)) / (2.0 * eps)


def box_mean_signed_power(a, p: float, eps: float):
    """``(1/2eps) int_{a-eps}^{a+eps} sign(u)|u|^p du`` for ``p > -1``."""
    a = np.asarray(a, dtype=float)
    return (np.abs(a + eps) ** (p + 1.0) - np.abs(a - eps) ** (p + 1.0)) / ((p + 1.0) * 2.0 * eps)


def centered_pv_kernel(a, theta: float, eps: float):
    """Per-sample kernel of the centred principal value of the box-smoothed field.

    ``dt * sum_k K(X_k - x)`` equals ``int |z|^-theta (L^{x+z} - L^x) dz``
    for the box-smoothed occupation density, with no cutoff or truncation.
    Needs ``1 < theta < 2``.
    """
    if not (1.0 < theta < 2.0):
        raise RegimeError("centred kernel needs 1 < theta < 2")
    big = np.abs(np.asarray(a, dtype=float))
    q = 1.0 - theta
    scale = 1.0 / ((theta - 1.0) * 2.0 * eps)
    with np.errstate(divide="ignore", invalid="ignore"):
        outside = (np.abs(big - eps) ** q - (big + eps) ** q) * scale
        inside = -((eps + big) ** q + np.abs(eps - big) ** q) * scale
    return np.where(big > eps, outside, inside)


def symmetric_pv_kernel(a, theta: float, eps: float):
    """Per-sample kernel of ``int_0^inf z^-theta (L^z - L^-z) dz`` for the box-smoothed field.

    ``K(a) = sign(a)/(2eps) int_{||a|-eps|}^{|a|+eps} z^-theta dz``; needs ``theta < 2``.
    """
    if not theta < 2.0:
        raise RegimeError("symmetric kernel needs theta < 2")
    a = np.asarray(a, dtype=float)
    big = np.abs(a)
    lo = np.abs(big - eps)
    hi = big + eps
    with np.errstate(divide="ignore", invalid="ignore"):
        if abs(theta - 1.0) < 1e-12:
            integral = np.log(hi / lo)
        else:
            integral = (hi ** (1.0 - theta) - lo ** (1.0 - theta)) / (1.0 - theta)
    return np.sign(a) * integral / (2.0 * eps)


def capped_abs_power(a, beta: float, eps: float):
    """``|a|^beta`` with the value capped at ``eps^beta`` inside the central bin (``beta < 0``)."""
    a = np.abs(np.asarray(a, dtype=float))
    return np.maximum(a, eps) ** beta
