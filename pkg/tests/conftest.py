import mpmath as mp
import pytest

ALPHA_GRID = (1.1, 1.3, 1.5, 1.7, 1.9)


def mp_moment(alpha, gamma):
    """Independent high-precision absolute moment of the standard stable law."""
    with mp.workdps(30):
        a, g = mp.mpf(alpha), mp.mpf(gamma)
        return float(2 ** g * mp.gamma((1 + g) / 2) * mp.gamma((a - g) / a) / (mp.sqrt(mp.pi) * mp.gamma((2 - g) / 2)))


def mp_shifted_moment(alpha, p, x, t=1.0):
    """``E|X_t - x|^p`` from the characteristic function, split at ``y = 40``.

    On ``[0, 1]`` the substitution ``y = u^10`` flattens the algebraic endpoint.
    """
    with mp.workdps(40):
        a, p_, ax, t_ = mp.mpf(alpha), mp.mpf(p), abs(mp.mpf(x)), mp.mpf(t)
        big = mp.mpf(40)
        f = lambda y: (1 - mp.cos(ax * y) * mp.exp(-t_ * y ** a)) * y ** (-p_ - 1)
        head = mp.quad(lambda u: f(u ** 10) * 10 * u ** 9, [0, 0.5, 1]) + mp.quad(f, mp.linspace(1, big, 400))
        tail = big ** (-p_) / p_ - mp.quad(lambda y: mp.cos(ax * y) * mp.exp(-t_ * y ** a) * y ** (-p_ - 1), [big, mp.inf])
        k_p = mp.pi / (2 * mp.gamma(p_ + 1) * mp.sin(p_ * mp.pi / 2))
        return float((head + tail) / k_p)


@pytest.fixture(scope="session")
def alpha_grid():
    return ALPHA_GRID


ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def record():
    """Log one PASS/FAIL line for an acceptance criterion."""
    def _record(number, title, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {title}" + (f"  [{detail}]" if detail else "")
        ACCEPTANCE_LINES.append((number, line))
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
