"""Exception types shared across the package.

The command-line layer maps these onto process exit codes: configuration
problems exit 2, solver failures (convergence / singular modes) exit 3,
and analysis failures (e.g. no cusp found where one is required) exit 4.
"""

from __future__ import annotations

__all__ = [
    "ConfigError",
    "SingularModeError",
    "ConvergenceError",
    "PhysicalityError",
    "AnalysisError",
    "ResourceError",
]


class ConfigError(ValueError):
    """Invalid configuration file, key, or value."""


class SingularModeError(RuntimeError):
    """A momentum mode has exactly zero quasiparticle energy.

    Carries the offending momentum in ``q``.  Gapless modes are never
    regularized silently; they abort the computation that met them.
    """

    def __init__(self, q: float, message: str | None = None):
        self.q = q
        super().__init__(message or f"gapless mode at q = {q!r} (eps_q = 0)")


class ConvergenceError(RuntimeError):
    """The self-consistent iteration failed to reach tolerance.

    Carries the last map residual in ``residual``.
    """

    def __init__(self, residual: float, iterations: int, message: str | None = None):
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            message
            or f"self-consistency not reached after {iterations} iterations "
            f"(last residual {residual:.3e})"
        )


class PhysicalityError(RuntimeError):
    """A reconstructed density matrix is negative beyond repairable noise."""


class AnalysisError(RuntimeError):
    """A required feature (cusp, fit, ridge) could not be extracted."""


class ResourceError(RuntimeError):
    """Requested problem size exceeds the supported dense-solver range."""
