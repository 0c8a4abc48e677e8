"""Exact-diagonalization, projector-measure, and covariance oracles.

The oracle module is itself cross-checked here against closed-form
spectra, an in-test sparse power iteration, and dense matrix
exponentials, so that the rest of the suite can lean on it.
"""

import math

import numpy as np
import pytest
import scipy.linalg

from conftest import SINGLET_MATRIX
from xxzquench import oracle
from xxzquench.errors import ResourceError, SingularModeError
from xxzquench.meanfield import MeanFieldParams, solve_self_consistent
from xxzquench.model import ModelParams
from xxzquench.oracle import (
    DenseState,
    bdg_correlators,
    build_hamiltonian,
    covariance_correlators,
    ed_evolve,
    evolve_covariance,
    fock_ground_state,
    fock_model_matrices,
    fock_operators,
    fock_quadratic_hamiltonian,
    generic_concurrence,
    generic_discord,
    ground_covariance,
    ground_state,
    majorana_hamiltonian,
    reduced_two_site,
)
from xxzquench.quench import ground_correlator_block


def _params(n, delta, h):
    return ModelParams(n_sites=n, coupling_j=1.0, anisotropy=delta, field=h)


# --------------------------------------------------------------------------
# Independent sparse ground-energy solver (bit arithmetic, no matrices)
# --------------------------------------------------------------------------


def _sparse_apply(psi, n, delta, h, periodic=True):
    """H|ψ⟩ with site j stored in bit (n−1−j), spin-up = bit 0."""
    dim = 1 << n
    indices = np.arange(dim)
    out = np.zeros(dim)
    bonds = n if periodic else n - 1
    for bond in range(bonds):
        j, k = bond, (bond + 1) % n
        bj = (indices >> (n - 1 - j)) & 1
        bk = (indices >> (n - 1 - k)) & 1
        aligned = bj == bk
        # S^z S^z is diagonal: +1/4 aligned, −1/4 anti-aligned
        out += np.where(aligned, 0.25, -0.25) * psi
        # the xy part flips anti-aligned pairs with weight (Δ+1)/4 and
        # aligned pairs with weight (Δ−1)/4
        flip = indices ^ ((1 << (n - 1 - j)) | (1 << (n - 1 - k)))
        out += np.where(aligned, (delta - 1.0) / 4.0, (delta + 1.0) / 4.0) * psi[flip]
    for j in range(n):
        bj = (indices >> (n - 1 - j)) & 1
        out -= h * (0.5 - bj) * psi
    return out


def _power_iteration_ground_energy(n, delta, h, shift, seed=7, max_iter=20000):
    """Smallest eigenvalue via power iteration on shift·1 − H."""
    rng = np.random.default_rng(seed)
    psi = rng.standard_normal(1 << n)
    psi /= np.linalg.norm(psi)
    energy = math.inf
    for _ in range(max_iter):
        image = shift * psi - _sparse_apply(psi, n, delta, h)
        image /= np.linalg.norm(image)
        applied = _sparse_apply(image, n, delta, h)
        rayleigh = float(image @ applied)
        if abs(rayleigh - energy) < 1e-13:
            return rayleigh
        energy = rayleigh
        psi = image
    return energy


class TestSpinHamiltonian:
    def test_two_site_heisenberg_spectrum(self):
        # single bond, Δ = 1: singlet at −3J/4, triplet at J/4
        ham = build_hamiltonian(periodic=False, n_sites=2)
        values = np.sort(np.linalg.eigvalsh(ham.entries))
        assert np.allclose(values, [-0.75, 0.25, 0.25, 0.25], atol=1e-12)

    def test_two_site_anisotropic_spectrum(self):
        # single Δ-bond: pairs 0.25 ± (Δ−1)/4 and −0.25 ± (Δ+1)/4
        delta = 0.4
        ham = build_hamiltonian(periodic=False, n_sites=2, anisotropy=delta)
        values = np.sort(np.linalg.eigvalsh(ham.entries))
        expected = np.sort(
            [
                0.25 + (delta - 1.0) / 4.0,
                0.25 - (delta - 1.0) / 4.0,
                -0.25 + (delta + 1.0) / 4.0,
                -0.25 - (delta + 1.0) / 4.0,
            ]
        )
        assert np.allclose(values, expected, atol=1e-12)

    def test_all_up_diagonal_entry(self):
        # ⟨↑…↑|H|↑…↑⟩ = N J/4 − N h/2 on the ring
        ham = build_hamiltonian(_params(4, 0.7, 0.3))
        assert ham.entries[0, 0] == pytest.approx(4 * 0.25 - 4 * 0.15, abs=1e-14)

    def test_field_sign_convention(self):
        # J = 0 leaves only −h Σ Sᶻ; the all-up state must sit lowest
        ham = build_hamiltonian(n_sites=2, coupling_j=0.0, field=1.0)
        assert np.allclose(np.diag(ham.entries), [-1.0, 0.0, 0.0, 1.0], atol=1e-15)

    def test_hermitian(self):
        ham = build_hamiltonian(_params(6, 1.3, 0.8))
        assert np.array_equal(ham.entries, ham.entries.T)

    def test_ground_energy_against_power_iteration(self):
        # independent route: matrix-free bit-arithmetic applications of
        # H and a shifted power iteration
        ham = build_hamiltonian(_params(8, 1.0, 0.0))
        dense = float(np.min(ham.eigensystem[0]))
        sparse = _power_iteration_ground_energy(8, 1.0, 0.0, shift=3.0)
        assert abs(dense - sparse) < 1e-8

    def test_open_chain_against_power_iteration(self):
        ham = build_hamiltonian(_params(6, 0.5, 0.7), periodic=False)
        dense = float(np.min(np.linalg.eigvalsh(ham.entries)))
        rng = np.random.default_rng(11)
        psi = rng.standard_normal(64)
        for _ in range(4000):
            psi = 4.0 * psi - _sparse_apply(psi, 6, 0.5, 0.7, periodic=False)
            psi /= np.linalg.norm(psi)
        sparse = float(psi @ _sparse_apply(psi, 6, 0.5, 0.7, periodic=False))
        assert abs(dense - sparse) < 1e-8

    @pytest.mark.parametrize(
        "delta, h, energy",
        [
            (0.6, 0.3, -3.1949771797460014),
            (1.5, 0.0, -4.303545409287706),
            (1.0, 0.0, -3.651093408937177),
        ],
    )
    def test_frozen_ground_energies(self, delta, h, energy):
        ham = build_hamiltonian(_params(8, delta, h))
        assert float(np.min(ham.eigensystem[0])) == pytest.approx(energy, rel=1e-12)

    def test_size_limits(self):
        with pytest.raises(ResourceError):
            build_hamiltonian(n_sites=15)
        with pytest.raises(ValueError):
            build_hamiltonian(n_sites=1)
        with pytest.raises(ValueError):
            build_hamiltonian()


@pytest.fixture(scope="module")
def system():
    ham = build_hamiltonian(_params(6, 0.8, 0.4))
    return ham, ground_state(build_hamiltonian(_params(6, 0.5, 0.0)))


@pytest.fixture(scope="module")
def solution():
    return solve_self_consistent(_params(16, 0.7, 0.4))


class TestEvolution:
    def test_zero_time_is_identity(self, system):
        ham, state = system
        evolved = ed_evolve(state, ham, 0.0)
        assert np.allclose(evolved.amplitudes, state.amplitudes, atol=1e-14)

    def test_norm_preserved(self, system):
        ham, state = system
        evolved = ed_evolve(state, ham, 3.7)
        assert np.linalg.norm(evolved.amplitudes) == pytest.approx(1.0, abs=1e-12)

    def test_energy_conserved(self, system):
        ham, state = system
        def energy(s):
            return float(np.real(s.amplitudes.conj() @ ham.entries @ s.amplitudes))
        assert abs(energy(ed_evolve(state, ham, 5.3)) - energy(state)) < 1e-10

    def test_matches_dense_exponential(self, system):
        # independent route: scaling-and-squaring matrix exponential
        ham, state = system
        evolved = ed_evolve(state, ham, 1.0)
        propagator = scipy.linalg.expm(-1j * ham.entries)
        reference = propagator @ state.amplitudes
        assert np.max(np.abs(evolved.amplitudes - reference)) < 1e-10

    def test_composition(self, system):
        ham, state = system
        two_step = ed_evolve(ed_evolve(state, ham, 1.3), ham, 2.1)
        one_step = ed_evolve(state, ham, 3.4)
        assert np.max(np.abs(two_step.amplitudes - one_step.amplitudes)) < 1e-12


def _embedded_pair_operator(op_left, op_right, i, m, n):
    """op_left at site i and op_right at site i+m (no wrap), MSB = site 0."""
    result = np.eye(1)
    for site in range(n):
        if site == i:
            factor = op_left
        elif site == i + m:
            factor = op_right
        else:
            factor = np.eye(2)
        result = np.kron(result, factor)
    return result


class TestReduction:
    def test_product_state(self):
        amplitudes = np.zeros(16, dtype=complex)
        amplitudes[0] = 1.0  # |↑↑↑↑⟩
        rho = reduced_two_site(DenseState(amplitudes=amplitudes), 0, 1)
        expected = np.zeros((4, 4))
        expected[0, 0] = 1.0
        assert np.allclose(rho, expected, atol=1e-15)

    def test_embedded_singlet(self):
        # (|↑↓⟩ − |↓↑⟩)/√2 on sites (0, 1) of four sites, rest up
        amplitudes = np.zeros(16, dtype=complex)
        amplitudes[0b0100] = 1.0 / math.sqrt(2.0)
        amplitudes[0b1000] = -1.0 / math.sqrt(2.0)
        rho = reduced_two_site(DenseState(amplitudes=amplitudes), 0, 1)
        assert np.allclose(rho, SINGLET_MATRIX, atol=1e-15)

    def test_translation_invariance_of_ring_ground_state(self):
        state = ground_state(build_hamiltonian(_params(8, 1.0, 0.0)))
        first = reduced_two_site(state, 0, 1)
        for i in (3, 7):
            assert np.allclose(reduced_two_site(state, i, 1), first, atol=1e-10)

    def test_against_translation_averaged_operators(self):
        # independent route: ρ₂[α, β] = ⟨ψ|(|β⟩⟨α|)_i ⊗ (|β⟩⟨α|)_{i+1}|ψ⟩
        # built from explicitly embedded operators, averaged over i
        n = 10
        state = ground_state(build_hamiltonian(_params(n, 1.0, 0.0)))
        psi = state.amplitudes
        basis = [np.array([[1.0, 0.0]]).T, np.array([[0.0, 1.0]]).T]
        direct = np.zeros((4, 4), dtype=complex)
        for alpha in range(4):
            for beta in range(4):
                ket_a, ket_b = basis[beta // 2], basis[beta % 2]
                bra_a, bra_b = basis[alpha // 2], basis[alpha % 2]
                op_left = ket_a @ bra_a.T
                op_right = ket_b @ bra_b.T
                total = 0.0
                for i in range(n - 1):
                    op = _embedded_pair_operator(op_left, op_right, i, 1, n)
                    total += complex(psi.conj() @ op @ psi)
                direct[alpha, beta] = total / (n - 1)
        averaged = sum(reduced_two_site(state, i, 1) for i in range(n - 1)) / (n - 1)
        assert np.max(np.abs(averaged - direct)) < 1e-12
        assert np.max(np.abs(reduced_two_site(state, 0, 1) - direct)) < 1e-12

    def test_coincident_sites_rejected(self):
        state = DenseState(amplitudes=np.ones(16, dtype=complex) / 4.0)
        with pytest.raises(ValueError):
            reduced_two_site(state, 1, 0)
        with pytest.raises(ValueError):
            reduced_two_site(state, 0, 4)


class TestGenericMeasures:
    def test_singlet(self):
        assert generic_discord(SINGLET_MATRIX) == pytest.approx(1.0, abs=1e-9)
        assert generic_concurrence(SINGLET_MATRIX) == pytest.approx(1.0, abs=1e-12)

    def test_classical_state(self):
        rho = np.diag([0.4, 0.1, 0.2, 0.3]).astype(complex)
        assert abs(generic_discord(rho)) < 1e-9
        assert generic_concurrence(rho) == 0.0

    def test_pure_product_state(self):
        plus = np.array([1.0, 1.0]) / math.sqrt(2.0)
        psi = np.kron(np.array([1.0, 0.0]), plus)
        rho = np.outer(psi, psi.conj())
        assert abs(generic_discord(rho)) < 1e-9
        assert generic_concurrence(rho) < 1e-12

    def test_pure_state_discord_is_entanglement_entropy(self):
        rng = np.random.default_rng(321)
        for _ in range(10):
            psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            psi /= np.linalg.norm(psi)
            rho = np.outer(psi, psi.conj())
            rho_a = np.trace(rho.reshape(2, 2, 2, 2), axis1=1, axis2=3)
            eigs = np.clip(np.linalg.eigvalsh(rho_a), 0.0, 1.0)
            entropy = -sum(p * math.log2(p) for p in eigs if p > 0.0)
            assert abs(generic_discord(rho) - entropy) < 1e-4

    def test_pure_state_concurrence_formula(self):
        # C(a|00⟩ + b|01⟩ + c|10⟩ + d|11⟩) = 2|ad − bc|
        rng = np.random.default_rng(654)
        for _ in range(10):
            psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            psi /= np.linalg.norm(psi)
            rho = np.outer(psi, psi.conj())
            expected = 2.0 * abs(psi[0] * psi[3] - psi[1] * psi[2])
            # rank-1 ρρ̃ has three zero eigenvalues whose square roots
            # carry √(machine-ε) noise, so the match is only ~1e-7
            assert generic_concurrence(rho) == pytest.approx(expected, abs=1e-6)

    def test_rejects_invalid_matrices(self):
        good = np.eye(4) / 4.0
        bad_shape = np.eye(3) / 3.0
        non_hermitian = good + 1e-4 * np.array([[0, 1, 0, 0]] + [[0] * 4] * 3)
        off_trace = good * 1.1
        negative = np.diag([0.6, 0.5, -0.1, 0.0])
        for rho in (bad_shape, non_hermitian, off_trace, negative):
            with pytest.raises(ValueError):
                generic_discord(rho)


class TestCovarianceRoute:
    def test_schur_pairs_match_mode_energies(self, solution):
        # |b_k| from the real Schur form must reproduce ε_q over the
        # full momentum grid (bilinear correlators then oscillate at
        # the sums 2ε, matching the momentum-space series)
        matrix = majorana_hamiltonian(solution.params, solution.mf)
        _, _, pairs = oracle._canonical_blocks(matrix)
        eps = np.array([mode.eps_q for mode in solution.modes])
        assert np.allclose(np.sort(np.abs(pairs)), np.sort(eps), atol=1e-10)

    def test_ground_covariance_is_pure(self, solution):
        omega = ground_covariance(solution.params, solution.mf)
        assert np.max(np.abs(omega + omega.T)) < 1e-12
        assert np.max(np.abs(omega @ omega + np.eye(32))) < 1e-10

    def test_ground_correlators_match_pipeline(self, solution):
        omega = ground_covariance(solution.params, solution.mf)
        hop, pair = covariance_correlators(omega, 3, base=6)
        block = ground_correlator_block(solution, 3)
        assert np.max(np.abs(hop.imag)) < 1e-12
        assert np.max(np.abs(hop.real - block.hop)) < 1e-12
        assert np.max(np.abs(pair[1:] - block.pair)) < 1e-12

    def test_window_wrap_rejected(self, solution):
        omega = ground_covariance(solution.params, solution.mf)
        with pytest.raises(ValueError):
            covariance_correlators(omega, 3, base=14)

    def test_zero_time_evolution_is_identity(self, solution):
        omega = ground_covariance(solution.params, solution.mf)
        evolved = evolve_covariance(solution.params, solution.mf, omega, 0.0)
        assert np.max(np.abs(evolved - omega)) < 1e-12

    def test_bdg_at_zero_time_matches_ground(self, solution):
        hop, pair = bdg_correlators(solution, solution, 3, [0.0])
        block = ground_correlator_block(solution, 3)
        assert np.max(np.abs(hop[0].real - block.hop)) < 1e-12
        assert np.max(np.abs(pair[0] - block.pair)) < 1e-12

    def test_degenerate_quadratic_chain_rejected(self):
        params = _params(8, 1.0, 0.0)
        mf = MeanFieldParams(u1=0.5, u2=0.5, u3=0.0)
        with pytest.raises(SingularModeError):
            ground_covariance(params, mf)


class TestFockRoute:
    def test_anticommutation(self):
        ops = fock_operators(4)
        dim = np.eye(16)
        for i in range(4):
            for j in range(4):
                anti = ops[i] @ ops[j].T + ops[j].T @ ops[i]
                assert np.allclose(anti, dim if i == j else 0.0, atol=1e-15)
                assert np.allclose(ops[i] @ ops[j] + ops[j] @ ops[i], 0.0, atol=1e-15)

    def test_mode_cap(self):
        with pytest.raises(ResourceError):
            fock_operators(13)

    def test_ground_energy_matches_schur_form(self):
        # E₀ = tr(h)/2 − Σ_k |b_k|/2 ties the dense Fock spectrum to the
        # Majorana Schur pairs
        solution = solve_self_consistent(_params(8, 0.7, 0.4))
        h_matrix, d_matrix = fock_model_matrices(solution.params, solution.mf)
        dense = fock_quadratic_hamiltonian(h_matrix, d_matrix)
        e0 = float(np.min(np.linalg.eigvalsh(dense)))
        matrix = majorana_hamiltonian(solution.params, solution.mf)
        _, _, pairs = oracle._canonical_blocks(matrix)
        expected = 0.5 * np.trace(h_matrix) - 0.5 * np.sum(np.abs(pairs))
        assert e0 == pytest.approx(expected, abs=1e-10)
        state = fock_ground_state(dense)
        assert float(state @ dense @ state) == pytest.approx(e0, abs=1e-10)


class TestMeanFieldAgainstSpinChain:
    def test_off_x_leakage_vanishes_without_field(self):
        # at h = 0 the evolved spin state keeps exact X structure
        pre = build_hamiltonian(_params(8, 0.98, 0.0))
        post = build_hamiltonian(_params(8, 1.0, 0.0))
        state = ground_state(pre)
        mask = np.ones((4, 4), dtype=bool)
        for i, j in ((0, 0), (1, 1), (2, 2), (3, 3), (0, 3), (3, 0), (1, 2), (2, 1)):
            mask[i, j] = False
        for t in (0.0, 1.5, 4.0):
            rho = reduced_two_site(ed_evolve(state, post, t), 0, 1)
            assert np.max(np.abs(rho[mask])) < 1e-10

    def test_discord_series_positively_correlated(self):
        # mean-field discord against the interacting chain on a small
        # ring: amplitudes differ, but the time profiles must agree in
        # sign of correlation
        from xxzquench.gaussian import two_site_state
        from xxzquench.measures import quantum_discord
        from xxzquench.quench import CorrelatorBlock, correlator_series, prepare_quench

        n = 10
        times = np.arange(0.0, 20.5, 1.0)
        pre = solve_self_consistent(_params(n, 0.98, 0.0))
        post = solve_self_consistent(_params(n, 1.0, 0.0))
        setup = prepare_quench(pre, post)
        hop, pair = correlator_series(setup, 1, times)
        mf_series = np.array(
            [
                quantum_discord(
                    two_site_state(
                        CorrelatorBlock(
                            time=float(t), hop=hop[it], pair=pair[it]
                        ),
                        1,
                    )
                ).discord
                for it, t in enumerate(times)
            ]
        )

        ham_pre = build_hamiltonian(_params(n, 0.98, 0.0))
        ham_post = build_hamiltonian(_params(n, 1.0, 0.0))
        state = ground_state(ham_pre)
        ed_series = np.array(
            [
                generic_discord(reduced_two_site(ed_evolve(state, ham_post, t), 0, 1))
                for t in times
            ]
        )
        pearson = np.corrcoef(mf_series, ed_series)[0, 1]
        assert pearson > 0.0
