"""Hamiltonian parameters, momentum grid, and single-mode dispersion data.

The chain is a spin-1/2 XXZ ring written in a rotated frame where the
anisotropy Δ multiplies the xx exchange and a transverse field h couples
to S^z,

    H = Σ_j [ J (Δ S^x_j S^x_{j+1} + S^y_j S^y_{j+1} + S^z_j S^z_{j+1})
              − h S^z_j ],

with periodic boundary conditions and even N.  After fermionization and
mean-field decoupling of the quartic term, each momentum mode q carries
the coefficients

    A_q = J ((Δ+1)/2 − 2Υ₂) cos q + J (2Υ₁ − 1) − h,
    B_q = J ((Δ−1)/2 + 2Υ₃) sin q,

a quasiparticle energy ε_q = sqrt(A_q² + B_q²) and a Bogoliubov angle
θ_q fixed by the sign convention θ_q = ½·atan2(−B_q, A_q), i.e.

    cos(2θ_q)·ε_q = A_q,      sin(2θ_q)·ε_q = −B_q.

The momentum grid is the antiperiodic sector q = ±(2n−1)π/N, which never
contains q = 0 or q = π, so ε_q > 0 for every finite N whenever the
pairing channel is nonzero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ModelParams",
    "MomentumGrid",
    "ModeData",
    "momentum_grid",
    "mode_arrays",
    "mode_data",
]


@dataclass(frozen=True)
class ModelParams:
    """Couplings and chain size defining one Hamiltonian point.

    Attributes
    ----------
    coupling_j : float
        Antiferromagnetic exchange J > 0.  Energies are reported in units
        of J and times in units of 1/J.
    anisotropy : float
        Dimensionless anisotropy Δ of the xx exchange.
    field : float
        Transverse field h (same units as J).
    n_sites : int
        Chain length N; must be even and at least 4.
    """

    coupling_j: float = 1.0
    anisotropy: float = 1.0
    field: float = 0.0
    n_sites: int = 4

    def __post_init__(self) -> None:
        if not (self.coupling_j > 0 and math.isfinite(self.coupling_j)):
            raise ValueError(f"coupling_j must be positive and finite, got {self.coupling_j}")
        for name in ("anisotropy", "field"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.n_sites < 4 or self.n_sites % 2 != 0:
            raise ValueError(f"n_sites must be even and >= 4, got {self.n_sites}")


@dataclass(frozen=True)
class MomentumGrid:
    """Antiperiodic momentum grid q = ±(2n−1)π/N for n = 1..N/2.

    Attributes
    ----------
    n_sites : int
        Chain length N (even).
    positive_modes : ndarray
        The N/2 positive momenta in strictly ascending order.
    modes : ndarray
        All N momenta in ascending order, symmetric under q → −q.
    """

    n_sites: int
    positive_modes: np.ndarray = field(repr=False)
    modes: np.ndarray = field(repr=False)


def momentum_grid(n_sites: int) -> MomentumGrid:
    """Build the antiperiodic-sector momentum grid for an even chain.

    Parameters
    ----------
    n_sites : int
        Chain length N, even and >= 4.

    Returns
    -------
    MomentumGrid
        Grid with positive modes (2n−1)π/N, n = 1..N/2, and the full
        ±q list.  Contains neither q = 0 nor q = π.
    """
    if n_sites < 4 or n_sites % 2 != 0:
        raise ValueError(f"n_sites must be even and >= 4, got {n_sites}")
    n = np.arange(1, n_sites // 2 + 1)
    positive = (2 * n - 1) * math.pi / n_sites
    full = np.concatenate([-positive[::-1], positive])
    positive.setflags(write=False)
    full.setflags(write=False)
    return MomentumGrid(n_sites=n_sites, positive_modes=positive, modes=full)


@dataclass(frozen=True)
class ModeData:
    """Dispersion data of a single momentum mode.

    Attributes
    ----------
    q : float
        Momentum in (−π, π).
    a_q, b_q : float
        Mode coefficients (energy units).
    eps_q : float
        Quasiparticle energy sqrt(a_q² + b_q²) ≥ 0.
    theta_q : float
        Bogoliubov angle ½·atan2(−b_q, a_q); 0 by convention for a
        gapless mode (a_q = b_q = 0).
    gapless : bool
        True when eps_q = 0 exactly, in which case theta_q is the
        conventional 0 and callers should treat the mode as singular.
    """

    q: float
    a_q: float
    b_q: float
    eps_q: float
    theta_q: float
    gapless: bool = False


def mode_arrays(params: ModelParams, mf, q: np.ndarray):
    """Vectorized mode coefficients at the given momenta.

    Parameters
    ----------
    params : ModelParams
        Couplings (J, Δ, h).
    mf : MeanFieldParams
        Mean-field averages (Υ₁, Υ₂, Υ₃); any object with attributes
        u1, u2, u3 is accepted.
    q : ndarray
        Momenta.

    Returns
    -------
    (a, b, eps) : tuple of ndarray
        Coefficient arrays A_q, B_q and energies ε_q = sqrt(A² + B²).
    """
    j = params.coupling_j
    delta = params.anisotropy
    a = j * ((delta + 1.0) / 2.0 - 2.0 * mf.u2) * np.cos(q) + j * (2.0 * mf.u1 - 1.0) - params.field
    b = j * ((delta - 1.0) / 2.0 + 2.0 * mf.u3) * np.sin(q)
    eps = np.hypot(a, b)
    return a, b, eps


def mode_data(params: ModelParams, mf, q: float) -> ModeData:
    """Mode coefficients, energy, and Bogoliubov angle at one momentum.

    Parameters
    ----------
    params : ModelParams
        Couplings (J, Δ, h).
    mf : MeanFieldParams
        Mean-field averages; any object with attributes u1, u2, u3.
    q : float
        Momentum in (−π, π).

    Returns
    -------
    ModeData
        With eps_q = sqrt(a_q² + b_q²) and theta_q = ½·atan2(−b_q, a_q).
        A gapless mode (a_q = b_q = 0) gets theta_q = 0 and the
        ``gapless`` flag set.
    """
    if not -math.pi < q < math.pi:
        raise ValueError(f"momentum must lie in (-pi, pi), got {q}")
    a_arr, b_arr, eps_arr = mode_arrays(params, mf, np.asarray([q], dtype=float))
    a, b, eps = float(a_arr[0]), float(b_arr[0]), float(eps_arr[0])
    if eps == 0.0:
        return ModeData(q=q, a_q=a, b_q=b, eps_q=0.0, theta_q=0.0, gapless=True)
    theta = 0.5 * math.atan2(-b, a)
    return ModeData(q=q, a_q=a, b_q=b, eps_q=eps, theta_q=theta)
