"""Exception and warning types shared across the package."""


class RegimeError(ValueError):
    """A parameter lies outside the range where a formula or check is defined."""


class DegenerateAlphaError(RegimeError):
    """alpha = 2 was passed to a formula that has a Gamma pole there."""


class PoleError(ValueError):
    """Gamma function evaluated at a non-positive integer."""


class UnknownConstantError(KeyError):
    pass


class IntegrabilityError(ValueError):
    """A Levy model fails the local-time integrability gate."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature hit its refinement limit.

    The best available estimate is kept on ``result`` so callers can decide
    whether it is good enough.
    """

    def __init__(self, message, result):
        super().__init__(message)
        self.result = result


class SupportError(ValueError):
    """A test function is not supported inside the level grid."""


class GridCoverageError(ValueError):
    """A requested level or radius falls outside the local-time grid."""


class BiasRegimeWarning(UserWarning):
    """Time step too coarse for the bin width; occupation estimates are biased."""
