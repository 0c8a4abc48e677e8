"""Shared helpers for the test suite."""

from __future__ import annotations

import math

import numpy as np

from xxzquench import gaussian


def random_xstate_matrices(count: int, seed: int) -> list[np.ndarray]:
    """Random translation-symmetric two-site X states as 4x4 matrices.

    The diagonal is drawn from a Dirichlet split (X⁺, 2Y, X⁻) with the
    Y weight shared equally between |↑↓⟩ and |↓↑⟩ (the form every
    translation-invariant chain state takes), and the off-diagonal
    magnitudes are drawn inside the positivity bounds |z| ≤ Y and
    |f| ≤ sqrt(X⁺ X⁻) with uniformly random phases.
    """
    rng = np.random.default_rng(seed)
    states = []
    for _ in range(count):
        x_plus, y_pair, x_minus = rng.dirichlet((1.0, 1.0, 1.0))
        y = y_pair / 2.0
        z = rng.uniform(0.0, y)
        f = rng.uniform(0.0, math.sqrt(x_plus * x_minus))
        rho = np.diag([x_plus, y, y, x_minus]).astype(complex)
        rho[1, 2] = z * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
        rho[2, 1] = np.conj(rho[1, 2])
        rho[3, 0] = f * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
        rho[0, 3] = np.conj(rho[3, 0])
        states.append(rho)
    return states


def random_xstates(count: int, seed: int) -> list[gaussian.TwoSiteState]:
    """The same family packaged as :class:`TwoSiteState` objects."""
    return [
        gaussian.xstate_from_matrix(rho)
        for rho in random_xstate_matrices(count, seed)
    ]


#: |Ψ⁻⟩⟨Ψ⁻| in the |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩ basis.
SINGLET_MATRIX = np.array(
    [
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.5, -0.5, 0.0],
        [0.0, -0.5, 0.5, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ],
    dtype=complex,
)
