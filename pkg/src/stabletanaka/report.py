"""Verification reports and their serialisation."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

__all__ = ["VerificationReport", "MartingaleProbe", "REPORT_FIELDS", "dumps17", "fmt17", "mean_and_se"]

REPORT_FIELDS = (
    "identity",
    "alpha",
    "gamma",
    "x",
    "n_paths",
    "mc_estimate",
    "analytic_target",
    "std_error",
    "tolerance_multiple",
    "pass",
    "diagnostics",
)


def fmt17(v: float) -> str:
    return format(float(v), ".17g")


def dumps17(obj, indent: Optional[int] = None, _level: int = 0) -> str:
    """JSON text with every float written at 17 significant digits.

    Non-finite floats become ``null``.
    """
    pad = "" if indent is None else "\n" + " " * (indent * (_level + 1))
    end = "" if indent is None else "\n" + " " * (indent * _level)
    sep = ", " if indent is None else ","
    if obj is None or isinstance(obj, bool):
        return {None: "null", True: "true", False: "false"}[obj]
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt17(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps17(str(k))}: {dumps17(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [f"{pad}{dumps17(v, indent, _level + 1)}" for v in obj]
        return "[" + sep.join(items) + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def mean_and_se(samples) -> tuple[float, float]:
    """Sample mean and its standard error; the sum runs in index order."""
    a = np.asarray(samples, dtype=float)
    n = a.size
    if n == 0:
        raise ValueError("no samples")
    m = float(a.sum() / n)
    if n == 1:
        return m, float("inf")
    se = math.sqrt(float(((a - m) ** 2).sum()) / (n - 1) / n)
    return m, se


@dataclass
class VerificationReport:
    """Outcome of one Monte Carlo comparison.

    The pass flag is a function of the stored fields only:

    * a skipped report (``diagnostics["status"]`` ends in ``-skip``) passes;
    * with ``diagnostics["relative_tolerance"]`` set, the gate is
      ``|estimate - target| <= rel * |target|``; otherwise it is
      ``|estimate - target| <= tolerance_multiple * std_error``;
    * every entry of ``diagnostics["subgates"]`` must also be true.
    """

    identity: str
    alpha: float
    gamma: Optional[float]
    x: Optional[float]
    n_paths: int
    mc_estimate: Optional[float]
    analytic_target: Optional[float]
    std_error: Optional[float]
    tolerance_multiple: float = 4.0
    passed: bool = False
    diagnostics: dict = field(default_factory=dict)

    @classmethod
    def build(cls, identity, alpha, *, gamma=None, x=None, n_paths=0, mc_estimate, analytic_target, std_error,
              tolerance_multiple=4.0, diagnostics=None) -> "VerificationReport":
        rep = cls(identity, float(alpha), None if gamma is None else float(gamma), None if x is None else float(x),
                  int(n_paths), _f(mc_estimate), _f(analytic_target), _f(std_error), float(tolerance_multiple),
                  False, dict(diagnostics or {}))
        rep.passed = rep.recompute_pass()
        return rep

    @classmethod
    def skipped(cls, identity, alpha, status, reason, *, gamma=None, x=None, n_paths=0) -> "VerificationReport":
        rep = cls(identity, float(alpha), gamma, x, int(n_paths), None, None, None, 4.0, False,
                  {"status": status, "reason": reason})
        rep.passed = rep.recompute_pass()
        return rep

    @property
    def skipped_status(self) -> bool:
        return str(self.diagnostics.get("status", "")).endswith("-skip")

    def recompute_pass(self) -> bool:
        if self.skipped_status:
            return True
        if self.mc_estimate is None or self.analytic_target is None:
            return False
        gap = abs(self.mc_estimate - self.analytic_target)
        rel = self.diagnostics.get("relative_tolerance")
        if rel is not None:
            ok = gap <= float(rel) * abs(self.analytic_target)
        else:
            if self.std_error is None or not math.isfinite(self.std_error):
                return False
            ok = gap <= self.tolerance_multiple * self.std_error
        return bool(ok and all(bool(v) for v in self.diagnostics.get("subgates", {}).values()))

    def to_dict(self) -> dict:
        return {
            "identity": self.identity,
            "alpha": self.alpha,
            "gamma": self.gamma,
            "x": self.x,
            "n_paths": self.n_paths,
            "mc_estimate": self.mc_estimate,
            "analytic_target": self.analytic_target,
            "std_error": self.std_error,
            "tolerance_multiple": self.tolerance_multiple,
            "pass": self.passed,
            "diagnostics": self.diagnostics,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        return cls(d["identity"], d["alpha"], d["gamma"], d["x"], d["n_paths"], d["mc_estimate"],
                   d["analytic_target"], d["std_error"], d["tolerance_multiple"], d["pass"], dict(d["diagnostics"]))

    def table_row(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        if self.skipped_status:
            flag = self.diagnostics["status"].upper()
        g = "-" if self.gamma is None else f"{self.gamma:.4g}"
        if self.mc_estimate is None:
            body = self.diagnostics.get("reason", "")
        else:
            body = (f"est={self.mc_estimate:.6g} target={self.analytic_target:.6g} "
                    f"se={self.std_error:.3g}")
        return f"{flag:<14} {self.identity:<34} alpha={self.alpha:<6g} gamma={g:<8} {body}"


def _f(v):
    return None if v is None else float(v)


@dataclass
class MartingaleProbe:
    """Covariances ``E[(N_t - N_s) g(X_s)]`` for bounded functionals ``g``."""

    s: float
    t: float
    functionals: Sequence[str]
    covariances: Sequence[float]
    std_errors: Sequence[float]
    tolerance_multiple: float = 4.0

    def __post_init__(self):
        if not len(self.functionals) == len(self.covariances) == len(self.std_errors):
            raise ValueError("functionals, covariances and std_errors must have equal length")
        if any(not math.isfinite(se) for se in self.std_errors):
            raise ValueError("every covariance needs a finite standard error")

    @property
    def gates(self) -> dict:
        return {name: abs(c) <= self.tolerance_multiple * se
                for name, c, se in zip(self.functionals, self.covariances, self.std_errors)}

    @property
    def passed(self) -> bool:
        return all(self.gates.values())

    def to_dict(self) -> dict:
        return {"s": self.s, "t": self.t, "functionals": list(self.functionals),
                "covariances": [float(c) for c in self.covariances],
                "std_errors": [float(e) for e in self.std_errors], "pass": self.passed}
