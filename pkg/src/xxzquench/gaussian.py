"""Two-site reduced density matrices of the fermionic Gaussian state.

The two-site state of sites (i, i+m) is an X state fixed by the
occupation correlators

.. math::

    X^+ = ⟨n_i n_{i+m}⟩,  Y^± = ⟨n(1−n)⟩,  X^- = ⟨(1−n)(1−n)⟩,

and by the two string correlators

.. math::

    Z_m = ⟨a^†_i \\, Π_{l=i+1}^{i+m-1}(1−2n_l) \\, a_{i+m}⟩,
    f_m = ⟨a^†_i \\, Π_{l=i+1}^{i+m-1}(1−2n_l) \\, a^†_{i+m}⟩.

Everything is a Wick sum over the hopping/pairing correlators T, P of
the Gaussian state.  For m ≥ 2 each parity factor contributes a
Majorana pair 1 − 2n_l = i·w^A_l w^B_l, and the 2m-operator expectation
value is the Pfaffian of the matrix of pairwise contractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PhysicalityError
from .quench import CorrelatorBlock

__all__ = [
    "CovarianceMatrix",
    "RawTwoSiteData",
    "TwoSiteState",
    "pfaffian",
    "string_correlators",
    "occupation_pair",
    "two_site_state",
    "xstate_from_matrix",
    "density_matrix",
]

#: Largest tolerated negativity of a 2x2 block eigenvalue before repair.
NEGATIVITY_LIMIT = 1e-8
_ANTISYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class CovarianceMatrix:
    """Antisymmetric matrix of pairwise contractions ⟨O_j O_k⟩ (j < k)
    over the operator window spanning sites i..i+m."""

    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def pfaffian(mat: CovarianceMatrix | np.ndarray) -> complex:
    """Pfaffian of an (even-dimensional) antisymmetric matrix.

    Skew-symmetric Gaussian elimination with partial pivoting: at each
    even step the largest entry of the working column is permuted to
    the superdiagonal, its value multiplies the running product, and
    the trailing block receives the rank-2 update that zeroes the rest
    of the column pair.  Odd dimension returns 0 exactly.

    Raises ``ValueError`` if the matrix is not antisymmetric to 1e−12.
    """
    entries = mat.entries if isinstance(mat, CovarianceMatrix) else np.asarray(mat)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {entries.shape}")
    if entries.size and np.max(np.abs(entries + entries.T)) > _ANTISYMMETRY_TOL:
        raise ValueError("matrix is not antisymmetric within 1e-12")
    n = entries.shape[0]
    if n % 2 == 1:
        return 0j
    if n == 0:
        return 1 + 0j
    work = entries.astype(complex, copy=True)
    result = 1 + 0j
    for k in range(0, n - 1, 2):
        pivot = k + 1 + int(np.argmax(np.abs(work[k + 1 :, k])))
        if work[pivot, k] == 0:
            return 0j
        if pivot != k + 1:
            work[[k + 1, pivot], k:] = work[[pivot, k + 1], k:]
            work[k:, [k + 1, pivot]] = work[k:, [pivot, k + 1]]
            result = -result
        result *= work[k, k + 1]
        if k + 2 < n:
            tau = work[k, k + 2 :] / work[k, k + 1]
            column = work[k + 2 :, k + 1]
            work[k + 2 :, k + 2 :] += np.outer(tau, column) - np.outer(column, tau)
    return complex(result)


def _correlator_tables(block: CorrelatorBlock, m: int):
    """Distance-indexed tables (T[0..m], P[0..m]) from a block."""
    if m < 1:
        raise ValueError(f"m must be at least 1, got {m!r}")
    if len(block.hop) < m + 1 or len(block.pair) < m:
        raise ValueError(
            f"block holds distances up to {len(block.hop) - 1}, need {m}"
        )
    t_table = np.asarray(block.hop[: m + 1], dtype=float)
    p_table = np.zeros(m + 1, dtype=complex)
    p_table[1:] = np.asarray(block.pair[:m])
    return t_table, p_table


def _contraction(kind_j, site_j, kind_k, site_k, t_table, p_table) -> complex:
    """⟨O_j O_k⟩ for ordered operators (site_j ≤ site_k).

    Kinds: ``dag`` = a†, ``ann`` = a, ``A``/``B`` = the two Majorana
    flavours w^A = a + a†, w^B = i(a − a†).
    """
    d = site_k - site_j
    t = t_table[d]
    p = p_table[d]
    pair = (kind_j, kind_k)
    if pair == ("dag", "ann"):
        return complex(t)
    if pair == ("dag", "dag"):
        return p
    if pair == ("dag", "A"):
        return t + p
    if pair == ("dag", "B"):
        return 1j * (t - p)
    if pair == ("A", "A") or pair == ("B", "B"):
        sign = 1.0 if pair[0] == "A" else -1.0
        return sign * 2j * p.imag
    if pair == ("A", "B"):
        if d == 0:
            return 1j * (2.0 * t - 1.0)
        return 2j * (t - p.real)
    if pair == ("B", "A"):
        return -2j * (t + p.real)
    if pair == ("A", "ann"):
        return t - p.conjugate()
    if pair == ("B", "ann"):
        return -1j * (t + p.conjugate())
    if pair == ("A", "dag"):
        return -t + p
    if pair == ("B", "dag"):
        return -1j * (t + p)
    raise ValueError(f"unsupported operator pair {pair!r}")


def _string_operators(m: int, pairing: bool):
    """Operator list [a†_0, w^A_1, w^B_1, ..., a(†)_m] for the string."""
    ops = [("dag", 0)]
    for site in range(1, m):
        ops.append(("A", site))
        ops.append(("B", site))
    ops.append(("dag" if pairing else "ann", m))
    return ops


def _string_via_pfaffian(block: CorrelatorBlock, m: int) -> tuple[complex, complex]:
    """General Pfaffian evaluation of (Z_m, f_m); valid for any m ≥ 1."""
    t_table, p_table = _correlator_tables(block, m)
    prefactor = 1j ** (m - 1)
    results = []
    for pairing in (False, True):
        ops = _string_operators(m, pairing)
        size = len(ops)
        cov = np.zeros((size, size), dtype=complex)
        for j in range(size):
            kind_j, site_j = ops[j]
            for k in range(j + 1, size):
                kind_k, site_k = ops[k]
                value = _contraction(kind_j, site_j, kind_k, site_k, t_table, p_table)
                cov[j, k] = value
                cov[k, j] = -value
        results.append(prefactor * pfaffian(CovarianceMatrix(cov)))
    return results[0], results[1]


def string_correlators(block: CorrelatorBlock, m: int) -> tuple[complex, complex]:
    """The string correlators (Z_m, f_m) of a correlator block.

    For m = 1 the parity string is empty and the result is exactly
    (T_1, P_1); for m ≥ 2 the 2m-operator Wick sum is evaluated as a
    Pfaffian.
    """
    t_table, p_table = _correlator_tables(block, m)
    if m == 1:
        return complex(t_table[1]), complex(p_table[1])
    return _string_via_pfaffian(block, m)


def occupation_pair(block: CorrelatorBlock, m: int) -> tuple[float, float, float, float]:
    """Diagonal occupation correlators (X⁺, Y⁺, Y⁻, X⁻) at distance m.

    Wick's theorem gives ⟨n_i n_{i+m}⟩ = T_0² − |T_m|² + |P_m|²; the
    remaining entries follow from ⟨n⟩ = T_0 and translation invariance.
    """
    t_table, p_table = _correlator_tables(block, m)
    t0 = float(t_table[0])
    x_plus = t0 * t0 - abs(t_table[m]) ** 2 + abs(p_table[m]) ** 2
    y_plus = t0 - x_plus
    y_minus = t0 - x_plus
    x_minus = 1.0 - 2.0 * t0 + x_plus
    return x_plus, y_plus, y_minus, x_minus


@dataclass(frozen=True)
class RawTwoSiteData:
    """Pre-repair X-state data: assembled entries and the most negative
    2x2 block eigenvalue."""

    x_plus: float
    y_plus: float
    y_minus: float
    x_minus: float
    z: complex
    f: complex
    min_eigenvalue: float


@dataclass(frozen=True)
class TwoSiteState:
    """Repaired, phase-normalized two-site X state at distance m.

    ``z`` and ``f`` are real and nonnegative after the local phase
    rotation (entanglement and discord are invariant under it); ``raw``
    keeps the pre-repair entries for diagnostics.
    """

    m: int
    x_plus: float
    y_plus: float
    y_minus: float
    x_minus: float
    z: complex
    f: complex
    raw: RawTwoSiteData

    @property
    def diagonal(self) -> tuple[float, float, float, float]:
        return (self.x_plus, self.y_plus, self.y_minus, self.x_minus)


def _block_eigenvalues(diag_hi, diag_lo, off) -> tuple[float, float]:
    center = 0.5 * (diag_hi + diag_lo)
    radius = math.hypot(0.5 * (diag_hi - diag_lo), off)
    return center + radius, center - radius


def _repair_block(diag_hi: float, diag_lo: float, off: float):
    """Clamp negative eigenvalues of [[hi, off], [off, lo]] to zero."""
    block = np.array([[diag_hi, off], [off, diag_lo]])
    values, vectors = np.linalg.eigh(block)
    clamped = np.where((values < 0.0) & (values >= -NEGATIVITY_LIMIT), 0.0, values)
    repaired = (vectors * clamped) @ vectors.T
    return float(repaired[0, 0]), float(repaired[1, 1]), float(repaired[0, 1])


def two_site_state(block: CorrelatorBlock, m: int) -> TwoSiteState:
    """Assemble, phase-normalize and repair the two-site X state.

    The local phase rotation replaces Z and f by their moduli.  Block
    eigenvalues in [−1e−8, 0) are clamped to zero and the trace
    renormalized; negativity beyond 1e−8 raises
    :class:`PhysicalityError` (it signals a broken upstream pipeline,
    not a rounding residue).
    """
    x_plus, y_plus, y_minus, x_minus = occupation_pair(block, m)
    z_raw, f_raw = string_correlators(block, m)
    return _package_state(x_plus, y_plus, y_minus, x_minus, z_raw, f_raw, m)


def xstate_from_matrix(rho: np.ndarray, m: int = 1) -> TwoSiteState:
    """Package a 4x4 density matrix given in the |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩
    basis as a two-site X state.

    Entries outside the diagonal and anti-diagonal are discarded (the
    caller is responsible for checking they are negligible); the same
    phase normalization and repair as :func:`two_site_state` apply.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {rho.shape}")
    return _package_state(
        float(rho[0, 0].real),
        float(rho[1, 1].real),
        float(rho[2, 2].real),
        float(rho[3, 3].real),
        complex(rho[1, 2]),
        complex(rho[3, 0]),
        m,
    )


def _package_state(
    x_plus: float,
    y_plus: float,
    y_minus: float,
    x_minus: float,
    z_raw: complex,
    f_raw: complex,
    m: int,
) -> TwoSiteState:
    z = abs(z_raw)
    f = abs(f_raw)
    eig_x = _block_eigenvalues(x_plus, x_minus, f)
    eig_y = _block_eigenvalues(y_plus, y_minus, z)
    min_eig = min(eig_x[1], eig_y[1])
    raw = RawTwoSiteData(
        x_plus=x_plus,
        y_plus=y_plus,
        y_minus=y_minus,
        x_minus=x_minus,
        z=complex(z_raw),
        f=complex(f_raw),
        min_eigenvalue=min_eig,
    )
    if min_eig < -NEGATIVITY_LIMIT:
        raise PhysicalityError(
            f"block eigenvalue {min_eig:.3e} below -{NEGATIVITY_LIMIT:g} "
            f"at distance m={m}"
        )
    if eig_x[1] < 0.0:
        x_plus, x_minus, f = _repair_block(x_plus, x_minus, f)
    if eig_y[1] < 0.0:
        y_plus, y_minus, z = _repair_block(y_plus, y_minus, z)
    z = abs(z)
    f = abs(f)
    trace = x_plus + y_plus + y_minus + x_minus
    return TwoSiteState(
        m=m,
        x_plus=x_plus / trace,
        y_plus=y_plus / trace,
        y_minus=y_minus / trace,
        x_minus=x_minus / trace,
        z=complex(z / trace),
        f=complex(f / trace),
        raw=raw,
    )


def density_matrix(state: TwoSiteState) -> np.ndarray:
    """The 4x4 matrix in the |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩ basis (occupied = ↑)."""
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = state.x_plus
    rho[1, 1] = state.y_plus
    rho[2, 2] = state.y_minus
    rho[3, 3] = state.x_minus
    rho[1, 2] = state.z
    rho[2, 1] = np.conjugate(state.z)
    rho[0, 3] = np.conjugate(state.f)
    rho[3, 0] = state.f
    return rho
