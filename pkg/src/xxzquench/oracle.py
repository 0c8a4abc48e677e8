"""Independent ground-truth implementations for cross-checks.

Three families of oracles, none of which share code with the main
pipeline:

* exact diagonalization of the spin chain (dense many-body matrices,
  partial traces, a generic projector-algebra discord with no X-state
  shortcuts),
* single-particle (covariance-matrix) treatment of the quadratic
  mean-field fermion Hamiltonian — ground covariance from a real Schur
  decomposition and exact orthogonal time evolution,
* dense Fock-space fermion operators for direct expectation values of
  string products on small lattices.

The mean-field pipeline must agree with the fermionic oracles to
rounding-level tolerances; agreement with spin-chain exact
diagonalization is qualitative only, since the decoupling is an
approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg
import scipy.optimize

from .errors import ResourceError, SingularModeError
from .meanfield import MeanFieldParams, MeanFieldSolution
from .model import ModelParams

__all__ = [
    "DenseOperator",
    "DenseState",
    "build_hamiltonian",
    "ground_state",
    "ed_evolve",
    "reduced_two_site",
    "generic_discord",
    "generic_concurrence",
    "majorana_hamiltonian",
    "ground_covariance",
    "evolve_covariance",
    "covariance_correlators",
    "bdg_correlators",
    "fock_operators",
    "fock_model_matrices",
    "fock_quadratic_hamiltonian",
    "fock_ground_state",
    "fock_evolve",
    "fock_correlator_tables",
    "fock_string_expectation",
]

_MAX_ED_SITES = 14
_LOG2 = math.log(2.0)

_SX = np.array([[0.0, 0.5], [0.5, 0.0]])
_SY = np.array([[0.0, -0.5j], [0.5j, 0.0]])
_SZ = np.array([[0.5, 0.0], [0.0, -0.5]])


@dataclass(frozen=True)
class DenseOperator:
    """A dense Hermitian many-body operator."""

    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @cached_property
    def eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        return np.linalg.eigh(self.entries)


@dataclass(frozen=True)
class DenseState:
    """A normalized many-body state vector."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amplitudes = np.asarray(self.amplitudes, dtype=complex)
        norm = np.linalg.norm(amplitudes)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state norm deviates from 1 by {abs(norm - 1.0):.3e}")
        object.__setattr__(self, "amplitudes", amplitudes)


def _pair_operator(op: np.ndarray, j: int, k: int, n_sites: int) -> np.ndarray:
    """Embed op ⊗ op at sites j < k without full-space matrix products."""
    result = np.eye(2**j)
    for piece in (op, np.eye(2 ** (k - j - 1)), op, np.eye(2 ** (n_sites - 1 - k))):
        result = np.kron(result, piece)
    return result


def build_hamiltonian(
    params: ModelParams | None = None,
    *,
    periodic: bool = True,
    coupling_j: float = 1.0,
    anisotropy: float = 1.0,
    field: float = 0.0,
    n_sites: int | None = None,
) -> DenseOperator:
    """Dense spin-chain Hamiltonian Σ_j [J(Δ SˣSˣ + SʸSʸ + SᶻSᶻ) − h Sᶻ].

    Parameters normally come from ``params``; keyword arguments allow
    tiny chains (N = 2, open bond) that the mean-field machinery
    rejects, for closed-form algebra checks.  N > 14 raises
    :class:`ResourceError`.
    """
    if params is not None:
        coupling_j = params.coupling_j
        anisotropy = params.anisotropy
        field = params.field
        n_sites = params.n_sites
    if n_sites is None or n_sites < 2:
        raise ValueError(f"n_sites must be at least 2, got {n_sites!r}")
    if n_sites > _MAX_ED_SITES:
        raise ResourceError(
            f"dense diagonalization capped at {_MAX_ED_SITES} sites, got {n_sites}"
        )
    dim = 2**n_sites
    total = np.zeros((dim, dim))
    bonds = n_sites if periodic else n_sites - 1
    for bond in range(bonds):
        j, k = sorted((bond, (bond + 1) % n_sites))
        for op, weight in ((_SX, anisotropy), (_SY, 1.0), (_SZ, 1.0)):
            total += coupling_j * weight * np.real(_pair_operator(op, j, k, n_sites))
    indices = np.arange(dim)
    for j in range(n_sites):
        bit = (indices >> (n_sites - 1 - j)) & 1
        total[indices, indices] -= field * (0.5 - bit)
    return DenseOperator(entries=total)


def ground_state(ham: DenseOperator) -> DenseState:
    """Lowest eigenvector, with the largest amplitude made real
    positive for reproducibility."""
    values, vectors = ham.eigensystem
    vector = vectors[:, int(np.argmin(values))].astype(complex)
    anchor = int(np.argmax(np.abs(vector)))
    phase = vector[anchor] / abs(vector[anchor])
    return DenseState(amplitudes=vector / phase)


def ed_evolve(state: DenseState, ham: DenseOperator, t: float) -> DenseState:
    """e^{−iHt}|ψ⟩ via the (cached) full eigendecomposition of H."""
    values, vectors = ham.eigensystem
    coefficients = vectors.conj().T @ state.amplitudes
    evolved = vectors @ (np.exp(-1j * values * t) * coefficients)
    evolved = evolved / np.linalg.norm(evolved)
    return DenseState(amplitudes=evolved)


def reduced_two_site(state: DenseState, i: int, m: int) -> np.ndarray:
    """Reduced density matrix of sites (i, i+m), wrapping around the ring.

    Basis order is |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩ with the first slot at site i.
    """
    n_sites = int(round(math.log2(state.amplitudes.size)))
    if 2**n_sites != state.amplitudes.size:
        raise ValueError("state dimension is not a power of two")
    j = (i + m) % n_sites
    if i == j:
        raise ValueError(f"sites coincide: i={i}, m={m}, N={n_sites}")
    tensor = state.amplitudes.reshape([2] * n_sites)
    tensor = np.moveaxis(tensor, (i, j), (0, 1)).reshape(4, -1)
    return tensor @ tensor.conj().T


def _entropy_bits(eigenvalues: np.ndarray) -> float:
    total = 0.0
    for lam in eigenvalues:
        if lam > 0.0:
            total -= lam * math.log(lam) / _LOG2
    return total


def _check_density_matrix(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-8:
        raise ValueError("density matrix is not Hermitian within 1e-8")
    if abs(np.trace(rho).real - 1.0) > 1e-8:
        raise ValueError("density matrix trace deviates from 1 beyond 1e-8")
    if float(np.min(np.linalg.eigvalsh(rho))) < -1e-8:
        raise ValueError("density matrix has negativity beyond 1e-8")
    return rho


def _partial_traces(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    tensor = rho.reshape(2, 2, 2, 2)
    rho_a = np.trace(tensor, axis1=1, axis2=3)
    rho_b = np.trace(tensor, axis1=0, axis2=2)
    return rho_a, rho_b


def _projector(theta: float, phi: float, sign: float) -> np.ndarray:
    nx = math.sin(theta) * math.cos(phi)
    ny = math.sin(theta) * math.sin(phi)
    nz = math.cos(theta)
    direction = np.array(
        [[nz, nx - 1j * ny], [nx + 1j * ny, -nz]], dtype=complex
    )
    return 0.5 * (np.eye(2) + sign * direction)


def _conditional_entropy_projector(rho: np.ndarray, theta: float, phi: float) -> float:
    """Average post-measurement entropy via explicit projector algebra."""
    total = 0.0
    identity = np.eye(2)
    for sign in (1.0, -1.0):
        measured = rho @ np.kron(identity, _projector(theta, phi, sign))
        conditional = measured.reshape(2, 2, 2, 2)
        rho_a = np.trace(conditional, axis1=1, axis2=3)
        p = float(np.trace(rho_a).real)
        if p <= 0.0:
            continue
        eigenvalues = np.clip(np.linalg.eigvalsh(rho_a / p), 0.0, 1.0)
        total += p * _entropy_bits(eigenvalues)
    return total


def _conditional_entropy_grid(rho: np.ndarray, thetas: np.ndarray, phis: np.ndarray):
    """Projector-measurement conditional entropy on a basis grid.

    Batches the projector algebra of
    :func:`_conditional_entropy_projector` over all (θ, φ) points with
    closed-form 2x2 eigenvalues; returns the (n_theta, n_phi) array.
    """
    theta_grid, phi_grid = np.meshgrid(thetas, phis, indexing="ij")
    nx = (np.sin(theta_grid) * np.cos(phi_grid)).ravel()
    ny = (np.sin(theta_grid) * np.sin(phi_grid)).ravel()
    nz = np.cos(theta_grid).ravel()
    direction = np.empty((nx.size, 2, 2), dtype=complex)
    direction[:, 0, 0] = nz
    direction[:, 0, 1] = nx - 1j * ny
    direction[:, 1, 0] = nx + 1j * ny
    direction[:, 1, 1] = -nz
    tensor = rho.reshape(2, 2, 2, 2)
    total = np.zeros(nx.size)
    for sign in (1.0, -1.0):
        projector = 0.5 * (np.eye(2) + sign * direction)
        conditional = np.einsum("abcd,gdb->gac", tensor, projector)
        trace = (conditional[:, 0, 0] + conditional[:, 1, 1]).real
        radius = np.sqrt(
            0.25 * (conditional[:, 0, 0] - conditional[:, 1, 1]).real ** 2
            + np.abs(conditional[:, 0, 1]) ** 2
        )
        for branch in (1.0, -1.0):
            lam = np.clip(0.5 * trace + branch * radius, 0.0, None)
            positive = lam > 0.0
            # p * H contribution with the eigenvalue still unnormalized:
            # p * (-(lam/p) log2 (lam/p)) = -lam log2 lam + lam log2 p.
            total[positive] -= lam[positive] * np.log2(lam[positive])
            total[positive] += lam[positive] * np.log2(trace[positive])
    return total.reshape(thetas.size, phis.size)


def generic_discord(
    rho: np.ndarray,
    grid: tuple[int, int] = (65, 129),
    refine_tol: float = 1e-7,
) -> float:
    """Discord of an arbitrary two-qubit state by direct projector algebra.

    Mutual information comes from dense eigensolvers; the classical
    correlation maximization applies the measurement projectors
    explicitly on a (θ, φ) grid (ties toward smaller θ, then φ) with
    simplex refinement.  No X-state structure is assumed anywhere.
    """
    rho = _check_density_matrix(rho)
    rho_a, rho_b = _partial_traces(rho)
    entropy_a = _entropy_bits(np.clip(np.linalg.eigvalsh(rho_a), 0.0, 1.0))
    entropy_b = _entropy_bits(np.clip(np.linalg.eigvalsh(rho_b), 0.0, 1.0))
    entropy_ab = _entropy_bits(np.clip(np.linalg.eigvalsh(rho), 0.0, 1.0))
    mutual = entropy_a + entropy_b - entropy_ab

    n_theta, n_phi = grid
    thetas = np.linspace(0.0, math.pi, n_theta)
    phis = np.linspace(0.0, 2.0 * math.pi, n_phi)
    surface = _conditional_entropy_grid(rho, thetas, phis)
    flat_index = int(np.argmin(surface))
    best = float(surface.ravel()[flat_index])
    best_point = (
        float(thetas[flat_index // n_phi]),
        float(phis[flat_index % n_phi]),
    )
    result = scipy.optimize.minimize(
        lambda x: _conditional_entropy_projector(rho, x[0], x[1]),
        x0=np.array(best_point),
        method="Nelder-Mead",
        options={"xatol": refine_tol, "fatol": refine_tol, "maxiter": 400},
    )
    if result.fun < best:
        best = float(result.fun)
    classical = entropy_a - best
    return mutual - classical


_SIGMA_Y_PAIR = np.kron(
    np.array([[0.0, -1j], [1j, 0.0]]), np.array([[0.0, -1j], [1j, 0.0]])
)


def generic_concurrence(rho: np.ndarray) -> float:
    """Concurrence of an arbitrary two-qubit state (spin-flip spectrum),
    with no X-state assumptions."""
    rho = _check_density_matrix(rho)
    flipped = _SIGMA_Y_PAIR @ rho.conj() @ _SIGMA_Y_PAIR
    eigenvalues = np.linalg.eigvals(rho @ flipped)
    roots = np.sqrt(np.clip(eigenvalues.real, 0.0, None))
    roots = np.sort(roots)[::-1]
    return max(0.0, float(roots[0] - roots[1] - roots[2] - roots[3]))


# --------------------------------------------------------------------------
# Single-particle (covariance) treatment of the quadratic mean-field model
# --------------------------------------------------------------------------


def _quadratic_coefficients(params: ModelParams, mf: MeanFieldParams):
    """Real-space hopping/pairing/chemical coefficients (W, P, μ)."""
    j = params.coupling_j
    hopping = j * ((params.anisotropy + 1.0) / 4.0 - mf.u2)
    pairing = j * ((params.anisotropy - 1.0) / 4.0 + mf.u3)
    chemical = j * (2.0 * mf.u1 - 1.0) - params.field
    return hopping, pairing, chemical


def majorana_hamiltonian(params: ModelParams, mf: MeanFieldParams) -> np.ndarray:
    """Antisymmetric matrix M with H = (i/4) Σ w M w for the quadratic
    chain, Majorana order (w^A_0, w^B_0, w^A_1, w^B_1, ...).

    The boundary bond (N−1, 0) carries a flipped sign: the momentum
    grid ±(2n−1)π/N is the antiperiodic fermion sector.
    """
    n = params.n_sites
    hopping, pairing, chemical = _quadratic_coefficients(params, mf)
    matrix = np.zeros((2 * n, 2 * n))

    def add(row: int, col: int, value: float) -> None:
        matrix[row, col] += value
        matrix[col, row] -= value

    for site in range(n):
        add(2 * site, 2 * site + 1, -chemical)
    for site in range(n):
        neighbour = (site + 1) % n
        sign = -1.0 if neighbour != site + 1 else 1.0
        add(2 * site, 2 * neighbour + 1, sign * (-hopping + pairing))
        add(2 * site + 1, 2 * neighbour, sign * (hopping + pairing))
    return matrix


def _canonical_blocks(matrix: np.ndarray):
    """Real Schur form of an antisymmetric matrix: M = O T Oᵀ with T
    block-diagonal in 2×2 rotation generators [[0, b], [−b, 0]]."""
    t_form, orthogonal = scipy.linalg.schur(matrix, output="real")
    pairs = np.diag(t_form, 1)[::2]
    return t_form, orthogonal, pairs


def ground_covariance(params: ModelParams, mf: MeanFieldParams) -> np.ndarray:
    """Majorana covariance Ω (⟨w_μ w_ν⟩ = δ_{μν} + iΩ_{μν}) of the
    ground state of the quadratic chain.

    Each Schur mode pair contributes ±1 with the sign that minimizes
    the energy; an (accidentally) gapless mode has no preferred sign
    and raises :class:`SingularModeError`.
    """
    matrix = majorana_hamiltonian(params, mf)
    _, orthogonal, pairs = _canonical_blocks(matrix)
    if np.min(np.abs(pairs)) < 1e-12:
        raise SingularModeError(0.0)
    omega_canonical = np.zeros_like(matrix)
    for index, b in enumerate(pairs):
        sign = 1.0 if b > 0.0 else -1.0
        omega_canonical[2 * index, 2 * index + 1] = sign
        omega_canonical[2 * index + 1, 2 * index] = -sign
    return orthogonal @ omega_canonical @ orthogonal.T


def evolve_covariance(
    params: ModelParams, mf: MeanFieldParams, omega: np.ndarray, t: float
) -> np.ndarray:
    """Ω(t) = R Ω Rᵀ with R = e^{tM} for the quadratic Hamiltonian of
    (params, mf) — exact orthogonal single-particle evolution."""
    matrix = majorana_hamiltonian(params, mf)
    rotation = scipy.linalg.expm(t * matrix)
    return rotation @ omega @ rotation.T


def covariance_correlators(omega: np.ndarray, m_max: int, base: int = 0):
    """(T_m, P_m) for m = 0..m_max read off a Majorana covariance.

    ``base`` picks the left site; the pair (base, base+m) must not wrap
    the boundary bond, where the antiperiodic sector flips signs.
    """
    n = omega.shape[0] // 2
    if base + m_max >= n:
        raise ValueError(f"window [{base}, {base + m_max}] wraps the {n}-site ring")
    green = np.eye(2 * n) + 1j * omega
    hop = np.empty(m_max + 1, dtype=complex)
    pair = np.empty(m_max + 1, dtype=complex)
    l = base
    for m in range(m_max + 1):
        k = base + m
        aa = green[2 * l, 2 * k]
        ab = green[2 * l, 2 * k + 1]
        ba = green[2 * l + 1, 2 * k]
        bb = green[2 * l + 1, 2 * k + 1]
        hop[m] = 0.25 * (aa - 1j * ab + 1j * ba + bb)
        pair[m] = 0.25 * (aa + 1j * ab + 1j * ba - bb)
    return hop, pair


def bdg_correlators(
    pre: MeanFieldSolution, post: MeanFieldSolution, m_max: int, times
):
    """Quench correlators T_m(t), P_m(t) by direct covariance evolution.

    The pre-quench ground covariance is rotated by the post-quench
    single-particle propagator; correlators are read at a window far
    from the boundary bond.  Shapes match
    :func:`xxzquench.quench.correlator_series`.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    omega0 = ground_covariance(pre.params, pre.mf)
    matrix = majorana_hamiltonian(post.params, post.mf)
    _, orthogonal, pairs = _canonical_blocks(matrix)
    hop = np.empty((times.size, m_max + 1), dtype=complex)
    pair = np.empty((times.size, m_max + 1), dtype=complex)
    base = (post.params.n_sites - m_max) // 2
    for it, t in enumerate(times):
        blocks = np.zeros_like(matrix)
        for index, b in enumerate(pairs):
            angle = b * t
            c, s = math.cos(angle), math.sin(angle)
            blocks[2 * index, 2 * index] = c
            blocks[2 * index, 2 * index + 1] = s
            blocks[2 * index + 1, 2 * index] = -s
            blocks[2 * index + 1, 2 * index + 1] = c
        rotation = orthogonal @ blocks @ orthogonal.T
        omega_t = rotation @ omega0 @ rotation.T
        hop[it], pair[it] = covariance_correlators(omega_t, m_max, base=base)
    return hop[:, :], pair[:, 1:]


# --------------------------------------------------------------------------
# Dense Fock-space fermions (small lattices)
# --------------------------------------------------------------------------


def fock_operators(n_modes: int) -> list[np.ndarray]:
    """Annihilation matrices a_0..a_{n−1} on the 2^n occupation basis,
    with the standard parity-string sign convention."""
    if n_modes > 12:
        raise ResourceError(f"Fock construction capped at 12 modes, got {n_modes}")
    parity = np.array([[1.0, 0.0], [0.0, -1.0]])
    lower = np.array([[0.0, 1.0], [0.0, 0.0]])
    identity = np.eye(2)
    operators = []
    for j in range(n_modes):
        op = np.eye(1)
        for k in range(n_modes):
            if k < j:
                factor = parity
            elif k == j:
                factor = lower
            else:
                factor = identity
            op = np.kron(op, factor)
        operators.append(op)
    return operators


def fock_model_matrices(
    params: ModelParams, mf: MeanFieldParams
) -> tuple[np.ndarray, np.ndarray]:
    """Single-particle matrices (h, Δ) of the quadratic chain, with the
    antiperiodic boundary bond sign-flipped, for Fock-space builds."""
    n = params.n_sites
    hopping, pairing, chemical = _quadratic_coefficients(params, mf)
    h_matrix = np.zeros((n, n))
    d_matrix = np.zeros((n, n))
    np.fill_diagonal(h_matrix, chemical)
    for site in range(n):
        neighbour = (site + 1) % n
        sign = -1.0 if neighbour != site + 1 else 1.0
        h_matrix[site, neighbour] += sign * hopping
        h_matrix[neighbour, site] += sign * hopping
        d_matrix[site, neighbour] += sign * pairing
        d_matrix[neighbour, site] -= sign * pairing
    return h_matrix, d_matrix


def fock_quadratic_hamiltonian(
    hopping: np.ndarray, pairing: np.ndarray
) -> np.ndarray:
    """Dense H = Σ h_{jk} a†_j a_k + ½ Σ (Δ_{jk} a†_j a†_k + h.c.) with
    h real symmetric and Δ real antisymmetric."""
    hopping = np.asarray(hopping, dtype=float)
    pairing = np.asarray(pairing, dtype=float)
    n = hopping.shape[0]
    ops = fock_operators(n)
    dim = 2**n
    total = np.zeros((dim, dim))
    for j in range(n):
        for k in range(n):
            if hopping[j, k] != 0.0:
                total += hopping[j, k] * (ops[j].T @ ops[k])
            if pairing[j, k] != 0.0:
                total += 0.5 * pairing[j, k] * (ops[j].T @ ops[k].T)
                total += 0.5 * pairing[j, k] * (ops[k] @ ops[j])
    return total


def fock_ground_state(hamiltonian: np.ndarray) -> np.ndarray:
    """Lowest eigenvector of a dense Fock Hamiltonian (phase-anchored)."""
    values, vectors = np.linalg.eigh(hamiltonian)
    vector = vectors[:, int(np.argmin(values))]
    anchor = int(np.argmax(np.abs(vector)))
    return vector / vector[anchor] * abs(vector[anchor])


def fock_correlator_tables(
    state: np.ndarray, ops: list[np.ndarray], base: int, m_max: int
) -> tuple[np.ndarray, np.ndarray]:
    """Plain two-point tables T_m = ⟨a†_base a_{base+m}⟩ and
    P_m = ⟨a†_base a†_{base+m}⟩ from a dense Fock state."""
    hop = np.empty(m_max + 1, dtype=complex)
    pair = np.empty(m_max + 1, dtype=complex)
    left = ops[base].T
    for m in range(m_max + 1):
        right = ops[base + m]
        hop[m] = complex(state.conj() @ (left @ right) @ state)
        pair[m] = complex(state.conj() @ (left @ right.T) @ state)
    return hop, pair


def fock_evolve(state: np.ndarray, hamiltonian: np.ndarray, t: float) -> np.ndarray:
    """e^{−iHt}|ψ⟩ for a dense Fock Hamiltonian."""
    values, vectors = np.linalg.eigh(hamiltonian)
    coefficients = vectors.conj().T @ state.astype(complex)
    return vectors @ (np.exp(-1j * values * t) * coefficients)


def fock_string_expectation(
    state: np.ndarray, ops: list[np.ndarray], left: int, right: int, pairing: bool
) -> complex:
    """⟨a†_left Π_{l=left+1}^{right−1}(1 − 2n_l) a(†)_right⟩ evaluated
    directly in Fock space."""
    dim = state.size
    product = ops[left].T.astype(complex)
    for site in range(left + 1, right):
        number = ops[site].T @ ops[site]
        product = product @ (np.eye(dim) - 2.0 * number)
    product = product @ (ops[right].T if pairing else ops[right])
    return complex(state.conj() @ product @ state)
