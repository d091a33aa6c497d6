"""Command-line front end.

    stabletanaka constants --alpha 1.5 --gamma 1.2
    stabletanaka resolvent --model brownian --p 0.1,1,10 --x 0,1,3
    stabletanaka simulate --alpha 1.5 --paths 1 --steps 4 --seed 7
    stabletanaka verify --alpha 1.5 --seed 42 [--check tanaka,bracket] [--inject-fault]

Exit codes: 0 success, 1 a tolerance or check failed, 2 bad input (regime,
configuration or I/O).  Every float is written with 17 significant digits.
Settings may also come from ``--config FILE``, a flat ``key = value`` file
using the long flag names; flags given on the command line win.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from typing import Optional

import numpy as np

from . import analysis, harness, specfun
from .errors import QuadratureError, RegimeError, UnknownConstantError
from .report import REPORT_FIELDS, dumps17, fmt17, mean_and_se
from .sampler import SamplePath, SeedStream, path_csv, simulate_block

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

FAULT_FACTOR = 1.2
_SIMULATE_STREAM = 0

# builtin defaults, overridden by the config file, then by flags
DEFAULTS = {
    "alpha": "1.5",
    "gamma": None,
    "t": "1.0",
    "paths": None,
    "steps": None,
    "eps": None,
    "seed": None,
    "out": None,
    "format": "json",
    "check": None,
    "inject_fault": "false",
    "p": "0.1,1,10",
    "x": None,
    "model": "stable",
    "tolerance": "1e-4",
    "potential": "false",
}


class ConfigError(ValueError):
    pass


def read_config(path: str) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise ConfigError(f"{path}:{n}: unknown key {key!r}")
        out[key] = value
    return out


def _floats(text, name) -> list:
    if text is None:
        return []
    try:
        vals = [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--{name} expects comma-separated numbers, got {text!r}") from None
    if not vals:
        raise ConfigError(f"--{name} is empty")
    return vals


def _one_float(text, name) -> Optional[float]:
    if text is None:
        return None
    vals = _floats(text, name)
    if len(vals) != 1:
        raise ConfigError(f"--{name} takes a single value here")
    return vals[0]


def _int(text, name) -> Optional[int]:
    if text is None:
        return None
    try:
        return int(str(text))
    except ValueError:
        raise ConfigError(f"--{name} expects an integer, got {text!r}") from None


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off", ""):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _settings(args) -> dict:
    merged = dict(DEFAULTS)
    if args.config:
        merged.update(read_config(args.config))
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    return merged


def _seed(s) -> int:
    seed = _int(s["seed"], "seed")
    if seed is None:
        raise ConfigError("--seed is required for stochastic commands")
    if not 0 <= seed < 2 ** 64:
        raise ConfigError("--seed must lie in [0, 2^64)")
    return seed


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else fmt17(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


# --- constants ---------------------------------------------------------------------

CONSTANT_FIELDS = ("alpha", "gamma", "name", "status", "closed_form", "integral_rep", "relative_gap", "note")


def cmd_constants(s: dict) -> int:
    alphas = _floats(s["alpha"], "alpha")
    gammas = _floats(s["gamma"], "gamma") or [None]
    tol = _one_float(s["tolerance"], "tolerance")
    rows = []
    for a in alphas:
        specfun.check_alpha(a)
        for g in gammas:
            rec = analysis.fill_integrals(specfun.constants_record(a, g))
            for name, e in rec.entries.items():
                rows.append({"alpha": a, "gamma": g, "name": name, "status": e.status, "closed_form": e.closed_form,
                             "integral_rep": e.integral_rep, "relative_gap": e.relative_gap, "note": e.note})
    if s["format"] == "csv":
        text = _csv_text(CONSTANT_FIELDS, [[r[k] for k in CONSTANT_FIELDS] for r in rows])
    else:
        text = dumps17(rows, indent=1) + "\n"
    _emit(text, s["out"])
    bad = [r for r in rows if r["relative_gap"] is not None and not r["relative_gap"] <= tol]
    for r in bad:
        print(f"gap {r['relative_gap']:.3g} > {tol:g}: {r['name']} at alpha={r['alpha']:g}", file=sys.stderr)
    return EXIT_FAIL if bad else EXIT_OK


# --- resolvent ---------------------------------------------------------------------

RESOLVENT_FIELDS = ("model", "alpha", "kind", "p", "x", "value", "reference", "abs_error")


def cmd_resolvent(s: dict) -> int:
    kind = s["model"]
    if kind == "brownian":
        model, alpha = analysis.LevyModel.brownian(), None
    elif kind == "stable":
        alpha = _one_float(s["alpha"], "alpha")
        model = analysis.LevyModel.stable(alpha)
    else:
        raise ConfigError(f"--model must be 'stable' or 'brownian', got {kind!r}")
    xs = _floats(s["x"], "x") or [0.0, 1.0, 3.0]
    rows = []
    if _bool(s["potential"]):
        c6 = specfun.constant_closed_form("c6", alpha) if kind == "stable" and alpha < 2.0 else None
        for x in xs:
            v = analysis.v_potential(model, x)
            ref = None if c6 is None else c6 * abs(x) ** (alpha - 1.0)
            rows.append([kind, alpha, "v", None, x, v, ref, None if ref is None else abs(v - ref)])
    else:
        for p in _floats(s["p"], "p"):
            if not p > 0:
                raise RegimeError("resolvent needs p > 0")
            for x in xs:
                u = analysis.resolvent_u(model, p, x)
                ref = None
                if kind == "brownian":
                    ref = math.exp(-math.sqrt(2.0 * p) * abs(x)) / math.sqrt(2.0 * p)
                rows.append([kind, alpha, "u", p, x, u, ref, None if ref is None else abs(u - ref)])
    if s["format"] == "csv":
        text = _csv_text(RESOLVENT_FIELDS, rows)
    else:
        text = dumps17([dict(zip(RESOLVENT_FIELDS, r)) for r in rows], indent=1) + "\n"
    _emit(text, s["out"])
    return EXIT_OK


# --- simulate ----------------------------------------------------------------------

def cmd_simulate(s: dict) -> int:
    seed = _seed(s)
    alpha = _one_float(s["alpha"], "alpha")
    t = _one_float(s["t"], "t")
    n = _int(s["paths"], "paths") or 1
    steps = _int(s["steps"], "steps") or 1024
    if n < 1 or steps < 1 or not t > 0:
        raise ConfigError("simulate needs --paths >= 1, --steps >= 1 and --t > 0")
    out = s["out"]
    if out is None and n > 1:
        raise ConfigError("--out DIR is required when simulating more than one path")
    stream = SeedStream(seed, (_SIMULATE_STREAM,))
    finals = np.empty(n)
    if out is not None:
        os.makedirs(out, exist_ok=True)

    def write_block(v, start):
        for row, values in enumerate(v):
            i = start + row
            finals[i] = values[-1]
            text = path_csv(SamplePath(alpha, t, steps, values, seed, stream.child(i).path))
            if out is None:
                sys.stdout.write(text)
            else:
                with open(os.path.join(out, f"path_{i:06d}.csv"), "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)

    block = 64
    for start in range(0, n, block):
        idx = range(start, min(start + block, n))
        write_block(simulate_block(alpha, t, steps, stream, idx), start)
    moment, se = mean_and_se(np.abs(finals) ** 0.5)
    summary = {"alpha": alpha, "t": t, "n_paths": n, "n_steps": steps, "seed": seed,
               "mean_abs_sqrt_x_t": moment, "std_error": se,
               "target": t ** (0.5 / alpha) * specfun.moment_m(alpha, 0.5)}
    print(dumps17(summary), file=sys.stderr if out is None else sys.stdout)
    return EXIT_OK


# --- verify ------------------------------------------------------------------------

def reports_csv(reports) -> str:
    rows = []
    for r in reports:
        d = r.to_dict()
        d["diagnostics"] = dumps17(d["diagnostics"])
        d["pass"] = "true" if d["pass"] else "false"
        rows.append([d[k] for k in REPORT_FIELDS])
    return _csv_text(REPORT_FIELDS, rows)


def cmd_verify(s: dict) -> int:
    seed = _seed(s)
    alphas = _floats(s["alpha"], "alpha")
    gamma = _one_float(s["gamma"], "gamma")
    x = _one_float(s["x"], "x") or 0.0
    t = _one_float(s["t"], "t")
    n_paths = _int(s["paths"], "paths")
    n_paths = 10_000 if n_paths is None else n_paths
    if n_paths < 2:
        raise ConfigError("--paths must be at least 2")
    if t < 0:
        raise ConfigError("--t must be non-negative")
    checks = None if s["check"] is None else [c.strip() for c in str(s["check"]).split(",") if c.strip()]
    if checks is not None:
        unknown = [c for c in checks if c not in harness.CHECKS]
        if unknown:
            raise ConfigError(f"unknown checks {unknown}; available: {', '.join(harness.CHECKS)}")
    config = harness.CheckConfig(seed=seed, n_steps=_int(s["steps"], "steps"), eps=_one_float(s["eps"], "eps"))
    fault = FAULT_FACTOR if _bool(s["inject_fault"]) else 1.0
    reports = []
    for a in alphas:
        reports.extend(harness.run_suite(a, checks=checks, gamma=gamma, x=x, t=t, n_paths=n_paths, config=config,
                                         fault=fault))
    if s["format"] == "csv":
        text = reports_csv(reports)
    else:
        text = dumps17([r.to_dict() for r in reports], indent=1) + "\n"
    _emit(text, s["out"])
    table = "\n".join(r.table_row() for r in reports) + "\n"
    (sys.stdout if s["out"] is not None else sys.stderr).write(table)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


# --- entry point -------------------------------------------------------------------

COMMANDS = {"constants": cmd_constants, "resolvent": cmd_resolvent, "simulate": cmd_simulate,
            "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file; flags override it")
    common.add_argument("--alpha", help="stability index, or a comma-separated list")
    common.add_argument("--gamma", help="power exponent, or a comma-separated list (constants)")
    common.add_argument("--t", help="time horizon (default 1)")
    common.add_argument("--paths", help="number of paths")
    common.add_argument("--steps", help="time steps per path")
    common.add_argument("--eps", help="central-bin half-width")
    common.add_argument("--seed", help="root seed, required for simulate and verify")
    common.add_argument("--out", help="output file (directory for simulate)")
    common.add_argument("--format", choices=("json", "csv"), help="output format (default json)")
    common.add_argument("--check", help="comma-separated checks for verify: " + ", ".join(harness.CHECKS))
    common.add_argument("--inject-fault", dest="inject_fault", action="store_const", const="true",
                        help=f"multiply each check's constant by {FAULT_FACTOR} (negative control)")
    common.add_argument("--p", help="resolvent parameters, comma-separated")
    common.add_argument("--x", help="levels, comma-separated (a single level for verify)")
    common.add_argument("--model", help="stable or brownian (resolvent)")
    common.add_argument("--tolerance", help="relative-gap tolerance for constants (default 1e-4)")
    common.add_argument("--potential", action="store_const", const="true",
                        help="resolvent: print the potential v(x) instead of u")

    parser = argparse.ArgumentParser(prog="stabletanaka", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("constants", parents=[common], help="closed forms against integral representations")
    sub.add_parser("resolvent", parents=[common], help="resolvent density u^p(x) or potential v(x)")
    sub.add_parser("simulate", parents=[common], help="write sample paths as CSV")
    sub.add_parser("verify", parents=[common], help="run Monte Carlo verification checks")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        settings = _settings(args)
        if settings["format"] not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv, got {settings['format']!r}")
        return COMMANDS[args.command](settings)
    except (ConfigError, RegimeError, UnknownConstantError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, UnknownConstantError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    except QuadratureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
