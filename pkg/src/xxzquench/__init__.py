"""Quench dynamics and two-site quantum correlations of the mean-field XXZ chain.

The package follows the pipeline

    model → meanfield → quench → gaussian → measures → analysis

with ``oracle`` holding independent cross-checks (exact
diagonalization, single-particle covariance evolution, Wick
enumeration, projective-measurement reference) and ``cli`` the
command-line front end.
"""

from ._backend import BACKEND

__all__ = ["BACKEND", "__version__"]

__version__ = "0.1.0"
