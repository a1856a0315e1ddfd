"""Exception taxonomy for the package.

All package-raised errors derive from :class:`SqueezeError` so callers can
catch one base type.  Divergence of the stroboscopic map is *not* an error
(it is a legitimate physical outcome) and is reported through the
``Divergent`` sentinel in :mod:`levisqueeze.protocol` instead.
"""

from __future__ import annotations


class SqueezeError(Exception):
    """Base class for all errors raised by levisqueeze."""


class SingularMatrix(SqueezeError):
    """A matrix that must be inverted is singular to working precision."""


class NotHurwitz(SqueezeError):
    """A drift matrix expected to be (anti-)Hurwitz has spectrum touching
    the imaginary axis, so the requested steady state does not exist."""


class NoStabilizingSolution(SqueezeError):
    """The continuous Riccati equation has no stabilizing solution for the
    supplied coefficient matrices."""


class SpectralRadiusGEOne(SqueezeError):
    """A discrete Lyapunov (Stein) equation was requested for a cycle matrix
    with spectral radius >= 1, where no bounded fixed point exists."""


class StepTooLarge(SqueezeError):
    """An integrator step would violate its stability or accuracy budget."""


class SingularDeltaInversion(SqueezeError):
    """The shifted-covariance inverse used by the Riccati flow does not
    exist (gap matrix singular) and regularisation also failed."""


class Overdamped(SqueezeError):
    """A pulse frequency request fell at or below the overdamping threshold,
    so the quarter-period timing is undefined."""


class NonConverged(SqueezeError):
    """An iterative routine exhausted its iteration budget."""


class InvalidEfficiency(SqueezeError):
    """The measurement efficiency is outside the half-open interval (0, 1]."""


class ConfigError(SqueezeError):
    """A parameter file or CLI configuration is malformed."""
