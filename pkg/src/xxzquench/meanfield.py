"""Self-consistent solution of the three mean-field averages.

The decoupled chain is characterized by (Υ₁, Υ₂, Υ₃) — occupation,
hopping and pairing averages — which must reproduce themselves through
the ground-state expectation values of the Bogoliubov vacuum:

.. math::

    Υ₁ = 1/2 − (1/2N) Σ_q A_q/ε_q,
    Υ₂ = −(1/2N) Σ_q \\cos q · A_q/ε_q,
    Υ₃ = (1/2N) Σ_q \\sin q · B_q/ε_q.

``solve_self_consistent`` finds a fixed point of this map by damped
iteration.  Near the isotropic point the map admits a symmetric fixed
point with Υ₃ = 0 that can lose stability against a pair of gapped
fixed points ±Υ₃*; a deterministic post-convergence probe nudges Υ₃
downward and re-iterates, so the solver lands on the stable branch
that continues smoothly from Δ < 1 (disagreements beyond 1e−6 are
logged).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from ._backend import gap_map_sums
from .errors import ConvergenceError, SingularModeError
from .model import ModelParams, ModeData, mode_arrays, mode_data, momentum_grid

__all__ = [
    "MeanFieldParams",
    "MeanFieldSolution",
    "apply_gap_map",
    "solve_self_consistent",
]

logger = logging.getLogger(__name__)

#: Default damping fraction for the fixed-point iteration.
DEFAULT_MIXING = 0.5
#: Default convergence tolerance on the self-consistency residual.
DEFAULT_TOL = 1e-12
#: Default iteration budget per start.
DEFAULT_MAX_ITER = 10_000
#: Maximum number of pseudo-random restarts after a failed start.
MAX_RESTARTS = 8
#: Size of the deterministic Υ₃ kick used by the branch-stability probe.
_PROBE_KICK = 1e-6

_RESTART_SEED = 20240801


@dataclass(frozen=True)
class MeanFieldParams:
    """The three mean-field averages (Υ₁, Υ₂, Υ₃).

    ``u1`` is the mean fermion occupation, ``u2`` the nearest-neighbour
    hopping average and ``u3`` the nearest-neighbour pairing average.
    """

    u1: float
    u2: float
    u3: float

    def __post_init__(self) -> None:
        for name in ("u1", "u2", "u3"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if not 0.0 <= self.u1 <= 1.0:
            raise ValueError(f"u1 must lie in [0, 1], got {self.u1!r}")
        if abs(self.u2) > 0.5:
            raise ValueError(f"u2 must lie in [-1/2, 1/2], got {self.u2!r}")
        if abs(self.u3) > 0.5:
            raise ValueError(f"u3 must lie in [-1/2, 1/2], got {self.u3!r}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.u1, self.u2, self.u3)


@dataclass(frozen=True)
class MeanFieldSolution:
    """A converged mean-field point with its packaged mode data.

    ``modes`` lists one :class:`ModeData` per momentum of the full grid
    in ascending-q order (the positive half starts at index ``N // 2``).
    ``residual`` is the max-component distance between ``mf`` and one
    re-application of the self-consistency map; ``iterations`` counts
    map applications across all starts of the solve.
    """

    params: ModelParams
    mf: MeanFieldParams
    modes: tuple[ModeData, ...]
    residual: float
    iterations: int

    def positive_mode_arrays(self):
        """Arrays (q, A_q, B_q, ε_q, θ_q) over the positive modes."""
        positive = self.modes[self.params.n_sites // 2 :]
        q = np.array([mode.q for mode in positive])
        a = np.array([mode.a_q for mode in positive])
        b = np.array([mode.b_q for mode in positive])
        eps = np.array([mode.eps_q for mode in positive])
        theta = np.array([mode.theta_q for mode in positive])
        return q, a, b, eps, theta

    @property
    def has_gapless_mode(self) -> bool:
        return any(mode.gapless for mode in self.modes)


def _gap_map_from_arrays(params: ModelParams, mf: MeanFieldParams, q, cos_q, sin_q):
    """One application of the self-consistency map on precomputed grids."""
    a, b, eps = mode_arrays(params, mf, q)
    zero = np.flatnonzero(eps == 0.0)
    if zero.size:
        raise SingularModeError(float(q[zero[0]]))
    s1, s2, s3 = gap_map_sums(a, b, eps, cos_q, sin_q)
    n = params.n_sites
    return MeanFieldParams(0.5 - s1 / n, -s2 / n, s3 / n)


def apply_gap_map(params: ModelParams, mf: MeanFieldParams) -> MeanFieldParams:
    """Evaluate the right-hand side of the self-consistency map once.

    The momentum sums run over the positive modes in ascending order
    (the full-grid sum is twice the positive-mode sum because every
    summand is even under q → −q) with compensated summation, so the
    result is deterministic.  A mode with ε_q = 0 raises
    :class:`SingularModeError`.
    """
    grid = momentum_grid(params.n_sites)
    q = grid.positive_modes
    return _gap_map_from_arrays(params, mf, q, np.cos(q), np.sin(q))


def _clamp_to_box(u1: float, u2: float, u3: float) -> MeanFieldParams:
    return MeanFieldParams(
        min(max(u1, 0.0), 1.0),
        min(max(u2, -0.5), 0.5),
        min(max(u3, -0.5), 0.5),
    )


def _iterate(params, start, mixing, tol, max_iter, q, cos_q, sin_q):
    """Damped iteration from ``start``; returns (mf, residual, n_applied).

    Stops when the residual max|map(Υ) − Υ| drops below ``tol`` (which
    also bounds the per-step change by mixing·tol).  Returns the last
    iterate and residual on budget exhaustion; the caller decides
    whether that constitutes failure.
    """
    current = start
    residual = math.inf
    previous_residual = math.inf
    warned_monotone = False
    for iteration in range(1, max_iter + 1):
        mapped = _gap_map_from_arrays(params, current, q, cos_q, sin_q)
        residual = max(
            abs(mapped.u1 - current.u1),
            abs(mapped.u2 - current.u2),
            abs(mapped.u3 - current.u3),
        )
        if residual < tol:
            return current, residual, iteration
        if iteration > 10 and residual > previous_residual and not warned_monotone:
            logger.debug(
                "residual increased at iteration %d (%.3e -> %.3e) for %s",
                iteration,
                previous_residual,
                residual,
                params,
            )
            warned_monotone = True
        previous_residual = residual
        current = MeanFieldParams(
            (1.0 - mixing) * current.u1 + mixing * mapped.u1,
            (1.0 - mixing) * current.u2 + mixing * mapped.u2,
            (1.0 - mixing) * current.u3 + mixing * mapped.u3,
        )
    return current, residual, max_iter


def solve_self_consistent(
    params: ModelParams,
    init: MeanFieldParams | None = None,
    mixing: float = DEFAULT_MIXING,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> MeanFieldSolution:
    """Find a self-consistent (Υ₁, Υ₂, Υ₃) for the given parameters.

    Damped fixed-point iteration Υ ← (1−mixing)·Υ + mixing·map(Υ) from
    ``init`` (default: the half-filled symmetric point (1/2, 0, 0)).
    If a start exhausts ``max_iter``, up to 8 restarts are drawn from a
    seeded generator inside the invariant box.  After convergence a
    single deterministic stability probe kicks Υ₃ by −1e−6 and
    re-iterates; if the probe settles more than 1e−6 away, the original
    point was an unstable branch and the probed point is returned (a
    warning is logged).

    Raises
    ------
    ConvergenceError
        If no start converges within the budget.
    SingularModeError
        If the iteration hits a mode with ε_q = 0.
    """
    if not 0.0 < mixing <= 1.0:
        raise ValueError(f"mixing must lie in (0, 1], got {mixing!r}")
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be at least 1, got {max_iter!r}")
    if init is None:
        init = MeanFieldParams(0.5, 0.0, 0.0)

    grid = momentum_grid(params.n_sites)
    q = grid.positive_modes
    cos_q = np.cos(q)
    sin_q = np.sin(q)

    total_iterations = 0
    rng = np.random.default_rng(_RESTART_SEED)
    start = init
    converged = None
    last_residual = math.inf
    for attempt in range(1 + MAX_RESTARTS):
        mf, residual, used = _iterate(
            params, start, mixing, tol, max_iter, q, cos_q, sin_q
        )
        total_iterations += used
        last_residual = residual
        if residual < tol:
            converged = mf
            break
        start = MeanFieldParams(
            float(rng.uniform(0.0, 1.0)),
            float(rng.uniform(-0.5, 0.5)),
            float(rng.uniform(-0.5, 0.5)),
        )
    if converged is None:
        raise ConvergenceError(last_residual, total_iterations)

    probe_start = _clamp_to_box(converged.u1, converged.u2, converged.u3 - _PROBE_KICK)
    probed, probe_residual, probe_used = _iterate(
        params, probe_start, mixing, tol, max_iter, q, cos_q, sin_q
    )
    total_iterations += probe_used
    if probe_residual < tol:
        moved = max(
            abs(probed.u1 - converged.u1),
            abs(probed.u2 - converged.u2),
            abs(probed.u3 - converged.u3),
        )
        if moved > _PROBE_KICK:
            logger.warning(
                "unstable fixed point at %s: stability probe moved by %.3e "
                "to (%.12g, %.12g, %.12g)",
                params,
                moved,
                probed.u1,
                probed.u2,
                probed.u3,
            )
            converged = probed
            last_residual = probe_residual

    modes = tuple(mode_data(params, converged, float(qi)) for qi in grid.modes)
    return MeanFieldSolution(
        params=params,
        mf=converged,
        modes=modes,
        residual=last_residual,
        iterations=total_iterations,
    )
