import math

import numpy as np
import pytest

from stabletanaka.errors import QuadratureError
from stabletanaka.quadrature import adaptive_quad, fourier_cos, wynn_epsilon


def test_exponential_half_line():
    res = adaptive_quad(lambda x: np.exp(-x), 0.0, math.inf, 1e-10)
    assert abs(res.value - 1.0) < 1e-10
    assert res.error_estimate >= 0 and res.evaluations > 0


def test_removable_singularity():
    f = lambda y: np.where(y > 0, (1 - np.cos(y)) / np.where(y > 0, y, 1.0) ** 3 * y, 0.5)
    res = adaptive_quad(f, 0.0, 1.0, 1e-8)
    # int_0^1 (1 - cos y)/y^2 dy = Si(1) + cos(1) - 1
    import mpmath as mp
    exact = float(mp.si(1) + mp.cos(1) - 1)
    assert abs(res.value - exact) < 1e-8


def test_oscillatory_against_panel_sum():
    res = fourier_cos(lambda x: 1.0 / (1.0 + x ** 1.5), 1.0, 0.0, 1e-8)
    # brute-force oracle: 10^6-point panel sums up to 2000 plus an asymptotic tail
    import mpmath as mp
    with mp.workdps(20):
        exact = float(mp.quadosc(lambda x: mp.cos(x) / (1 + x ** 1.5), [0, mp.inf], omega=1))
    x = np.linspace(0.0, 2000.0, 1_000_001)
    y = np.cos(x) / (1.0 + x ** 1.5)
    panel = float(np.sum((y[1:] + y[:-1]) * 0.5 * np.diff(x)))
    assert abs(res.value - exact) < 1e-7
    assert abs(panel - exact) < 1e-3


def test_algebraic_endpoint():
    res = adaptive_quad(lambda x: x ** -0.9, 0.0, 1.0, 1e-10, left_power=-0.9)
    assert abs(res.value - 10.0) < 1e-8
    res = adaptive_quad(lambda x: (1.0 - x) ** -0.5, 0.0, 1.0, 1e-10, right_power=-0.5)
    assert abs(res.value - 2.0) < 1e-9


def test_tail_exponent():
    res = adaptive_quad(lambda x: x ** -1.2, 1.0, math.inf, 1e-10, tail_exponent=1.2)
    assert abs(res.value - 5.0) < 1e-8


def test_reversed_interval():
    assert abs(adaptive_quad(np.sin, math.pi, 0.0, 1e-10).value + 2.0) < 1e-10


def test_non_convergence_carries_estimate():
    with pytest.raises(QuadratureError) as info:
        adaptive_quad(lambda x: np.sin(1.0 / x) / x, 1e-6, 1.0, 1e-14, max_intervals=20)
    assert info.value.result is not None


def test_wynn_geometric_series():
    parts = np.cumsum([(-0.5) ** k for k in range(12)])
    est, change = wynn_epsilon(parts)
    assert abs(est - 2.0 / 3.0) < 1e-12
