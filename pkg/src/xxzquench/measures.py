"""Entanglement and correlation measures of two-site X states.

Concurrence comes from the closed two-branch formula for X states,
mutual information from the closed-form block eigenvalues, and the
classical correlation from maximizing over rank-1 projective
measurements on one site, parametrized by a Bloch direction (θ, φ).
Discord is the difference; all information quantities are in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ._backend import basis_grid_scan
from .gaussian import TwoSiteState

__all__ = [
    "XStateCoefficients",
    "MeasurementBasis",
    "CorrelationMeasures",
    "xstate_coefficients",
    "concurrence",
    "xstate_eigenvalues",
    "mutual_information",
    "conditional_entropy",
    "classical_correlation",
    "quantum_discord",
]

#: Default measurement-basis grid (θ points, φ points).
DEFAULT_GRID = (65, 129)
#: Default simplex-refinement tolerance for the basis optimization.
DEFAULT_REFINE_TOL = 1e-7

_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class XStateCoefficients:
    """Bloch correlators (c₁, c₂, c₃, c₄) of a phase-normalized X state:
    c₁ = ⟨σˣσˣ⟩, c₂ = ⟨σʸσʸ⟩, c₃ = ⟨σᶻσᶻ⟩ and c₄ the local ⟨σᶻ⟩."""

    c1: float
    c2: float
    c3: float
    c4: float


@dataclass(frozen=True)
class MeasurementBasis:
    """Bloch direction (θ ∈ [0, π], φ ∈ [0, 2π]) of a rank-1 projective
    measurement."""

    theta: float
    phi: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta!r}")
        if not 0.0 <= self.phi <= 2.0 * math.pi:
            raise ValueError(f"phi must lie in [0, 2*pi], got {self.phi!r}")


@dataclass(frozen=True)
class CorrelationMeasures:
    """Bundle of the two-site measures at one state."""

    concurrence: float
    mutual_information: float
    classical_correlation: float
    discord: float
    argmax_basis: MeasurementBasis


def _h2(p: float) -> float:
    """Binary entropy in bits with the 0·log 0 = 0 convention."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -(p * math.log(p) + (1.0 - p) * math.log(1.0 - p)) / _LOG2


def xstate_coefficients(state: TwoSiteState) -> XStateCoefficients:
    """Bloch correlators of the (phase-normalized) state.

    The entropic formulas downstream assume the translation-invariant
    X form the correlator pipeline produces, with equal single-site
    Bloch vectors; a state with Y⁺ ≠ Y⁻ has no single c₄ and is
    rejected rather than silently mis-measured.
    """
    if abs(state.y_plus - state.y_minus) > 1e-10:
        raise ValueError(
            "X state is not translation-symmetric: "
            f"Y+ = {state.y_plus!r} differs from Y- = {state.y_minus!r}"
        )
    z = abs(state.z)
    f = abs(state.f)
    return XStateCoefficients(
        c1=2.0 * (z + f),
        c2=2.0 * (z - f),
        c3=state.x_plus + state.x_minus - state.y_plus - state.y_minus,
        c4=state.x_plus - state.x_minus + state.y_minus - state.y_plus,
    )


def concurrence(state: TwoSiteState) -> float:
    """Two-branch X-state concurrence Max[0, Λ₁, Λ₂]."""
    lam1 = 2.0 * (abs(state.z) - math.sqrt(max(state.x_plus * state.x_minus, 0.0)))
    lam2 = 2.0 * (abs(state.f) - math.sqrt(max(state.y_plus * state.y_minus, 0.0)))
    return max(0.0, lam1, lam2)


def xstate_eigenvalues(state: TwoSiteState) -> np.ndarray:
    """The four eigenvalues, ordered (X̄+r_X, X̄−r_X, Ȳ+r_Y, Ȳ−r_Y)."""
    x_bar = 0.5 * (state.x_plus + state.x_minus)
    r_x = math.hypot(0.5 * (state.x_plus - state.x_minus), abs(state.f))
    y_bar = 0.5 * (state.y_plus + state.y_minus)
    r_y = math.hypot(0.5 * (state.y_plus - state.y_minus), abs(state.z))
    return np.array([x_bar + r_x, x_bar - r_x, y_bar + r_y, y_bar - r_y])


def _single_site_entropy(c4: float) -> float:
    return _h2(0.5 * (1.0 + c4))


def mutual_information(state: TwoSiteState) -> float:
    """S(ρ_i) + S(ρ_{i+m}) − S(ρ) in bits.

    Both single-site states have Bloch z-component c₄ (translation
    invariance), so the single-site term enters twice.
    """
    coeffs = xstate_coefficients(state)
    joint = 0.0
    for lam in xstate_eigenvalues(state):
        if lam > 0.0:
            joint -= lam * math.log(lam) / _LOG2
    return 2.0 * _single_site_entropy(coeffs.c4) - joint


def _conditional_entropy_scalar(coeffs: XStateCoefficients, theta: float, phi: float) -> float:
    """p₀ S(ρ|0) + p₁ S(ρ|1) for a measurement along n̂(θ, φ)."""
    sin_t = math.sin(theta)
    nx = sin_t * math.cos(phi)
    ny = sin_t * math.sin(phi)
    nz = math.cos(theta)
    total = 0.0
    for sgn in (1.0, -1.0):
        denom = 1.0 + sgn * coeffs.c4 * nz
        prob = 0.5 * denom
        if prob <= 0.0:
            continue
        chi1 = coeffs.c1 * nx / denom
        chi2 = coeffs.c2 * ny / denom
        chi3 = (sgn * coeffs.c3 * nz + coeffs.c4) / denom
        radius = math.sqrt(chi1 * chi1 + chi2 * chi2 + chi3 * chi3)
        total += prob * _h2(0.5 * (1.0 + min(radius, 1.0)))
    return total


def conditional_entropy(state: TwoSiteState, basis: MeasurementBasis) -> float:
    """Average post-measurement entropy of the unmeasured site (bits)."""
    coeffs = xstate_coefficients(state)
    return _conditional_entropy_scalar(coeffs, basis.theta, basis.phi)


def _canonical_basis(theta: float, phi: float) -> MeasurementBasis:
    """Fold arbitrary (θ, φ) into [0, π] × [0, 2π)."""
    theta = math.fmod(theta, 2.0 * math.pi)
    if theta < 0.0:
        theta += 2.0 * math.pi
    if theta > math.pi:
        theta = 2.0 * math.pi - theta
        phi += math.pi
    phi = math.fmod(phi, 2.0 * math.pi)
    if phi < 0.0:
        phi += 2.0 * math.pi
    return MeasurementBasis(theta=theta, phi=phi)


def classical_correlation(
    state: TwoSiteState,
    grid: tuple[int, int] = DEFAULT_GRID,
    refine_tol: float = DEFAULT_REFINE_TOL,
) -> tuple[float, MeasurementBasis]:
    """Maximal measurement-extractable correlation (bits) and its basis.

    A (θ, φ) grid scan (ties toward smaller θ, then smaller φ) is
    followed by simplex refinement of the conditional entropy; the
    refined point is kept only if it improves on the grid.
    """
    n_theta, n_phi = grid
    if n_theta < 33 or n_phi < 65:
        raise ValueError(f"grid must be at least 33x65, got {grid!r}")
    if refine_tol <= 0.0:
        raise ValueError(f"refine_tol must be positive, got {refine_tol!r}")
    coeffs = xstate_coefficients(state)
    thetas = np.linspace(0.0, math.pi, n_theta)
    phis = np.linspace(0.0, 2.0 * math.pi, n_phi)
    best, i_theta, i_phi = basis_grid_scan(
        coeffs.c1, coeffs.c2, coeffs.c3, coeffs.c4, thetas, phis
    )
    theta0 = float(thetas[i_theta])
    phi0 = float(phis[i_phi])

    result = minimize(
        lambda x: _conditional_entropy_scalar(coeffs, x[0], x[1]),
        x0=np.array([theta0, phi0]),
        method="Nelder-Mead",
        options={"xatol": refine_tol, "fatol": refine_tol, "maxiter": 400},
    )
    if result.fun < best:
        best = float(result.fun)
        basis = _canonical_basis(float(result.x[0]), float(result.x[1]))
    else:
        basis = _canonical_basis(theta0, phi0)
    return _single_site_entropy(coeffs.c4) - best, basis


def quantum_discord(
    state: TwoSiteState,
    grid: tuple[int, int] = DEFAULT_GRID,
    refine_tol: float = DEFAULT_REFINE_TOL,
) -> CorrelationMeasures:
    """All measures of one state; discord = mutual information −
    classical correlation, clamped at 0 against rounding residue.

    A discord below −1e−6 raises ``RuntimeError``: the optimizer claims
    more extractable correlation than the total, which can only be an
    internal inconsistency.
    """
    mutual = mutual_information(state)
    classical, basis = classical_correlation(state, grid=grid, refine_tol=refine_tol)
    discord = mutual - classical
    if discord < -1e-6:
        raise RuntimeError(
            f"discord {discord:.3e} below -1e-6: optimizer exceeded the "
            "mutual information"
        )
    if discord < 0.0:
        discord = 0.0
    return CorrelationMeasures(
        concurrence=concurrence(state),
        mutual_information=mutual,
        classical_correlation=classical,
        discord=discord,
        argmax_basis=basis,
    )
