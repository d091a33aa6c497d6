"""Tanaka-formula toolkit for symmetric alpha-stable processes.

Modules: ``specfun`` (closed-form constants), ``analysis`` (resolvent and
integral representations), ``sampler`` (exact grid paths), ``localtime``
(occupation-density fields and principal values), ``harness`` (Monte Carlo
verification) and ``cli``.
"""

from .analysis import LevyModel, constant_integral, fill_integrals, resolvent_u, shifted_abs_moment, v_potential
from .errors import (BiasRegimeWarning, DegenerateAlphaError, GridCoverageError, IntegrabilityError, PoleError,
                     QuadratureError, RegimeError, SupportError, UnknownConstantError)
from .report import MartingaleProbe, VerificationReport
from .sampler import SamplePath, SeedStream, simulate_path, stable_variates
from .specfun import ConstantName, constant_closed_form, constants_record, gamma_fn, moment_m

__version__ = "0.1.0"

__all__ = [
    "LevyModel",
    "constant_integral",
    "fill_integrals",
    "resolvent_u",
    "shifted_abs_moment",
    "v_potential",
    "BiasRegimeWarning",
    "DegenerateAlphaError",
    "GridCoverageError",
    "IntegrabilityError",
    "PoleError",
    "QuadratureError",
    "RegimeError",
    "SupportError",
    "UnknownConstantError",
    "MartingaleProbe",
    "VerificationReport",
    "SamplePath",
    "SeedStream",
    "simulate_path",
    "stable_variates",
    "ConstantName",
    "constant_closed_form",
    "constants_record",
    "gamma_fn",
    "moment_m",
]
