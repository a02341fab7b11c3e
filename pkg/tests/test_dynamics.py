import numpy as np
import pytest

from spinchain import (
    ChainSpec,
    HamiltonianMatrix,
    IntegrationError,
    NoiseModel,
    basis_state,
    build_hamiltonian,
    dense_superoperator,
    density_from_pure,
    evolve_density_matrix,
    evolve_site_populations,
    liouvillian_apply,
    sample_disorder,
)

import oracles


def _free_hamiltonian(n):
    return HamiltonianMatrix(diagonal=np.zeros(n), off_diagonal=np.zeros(n - 1))


def _disordered(n, delta, seed, g=1.0):
    spec = ChainSpec(n_sites=n, g=g, delta=delta)
    return build_hamiltonian(spec, sample_disorder(spec, seed))


class TestNoiseModel:
    def test_from_rates_picks_kind(self):
        assert NoiseModel.from_rates(0, 0).kind == "none"
        assert NoiseModel.from_rates(1, 0).kind == "onsite_dephasing"
        assert NoiseModel.from_rates(0, 1).kind == "incoherent_hopping"
        assert NoiseModel.from_rates(1, 1).kind == "both"

    def test_inconsistent_kind_rejected(self):
        with pytest.raises(ValueError):
            NoiseModel("none", gamma=1.0)
        with pytest.raises(ValueError):
            NoiseModel("onsite_dephasing", big_gamma=1.0)
        with pytest.raises(ValueError):
            NoiseModel("bogus")
        with pytest.raises(ValueError):
            NoiseModel("both", gamma=-1.0)


class TestLiouvillianApply:
    def test_closed_system_is_pure_commutator(self):
        rng = np.random.default_rng(0)
        h = _disordered(7, 1.0, 1)
        rho = oracles.random_hermitian(rng, 7)
        hd = h.to_dense()
        expected = -1j * (hd @ rho - rho @ hd)
        got = liouvillian_apply(h, NoiseModel.none(), rho)
        assert np.abs(got - expected).max() < 1e-14

    def test_two_site_coherence_decay_rate(self):
        h = _free_hamiltonian(2)
        rho = np.array([[0.5, 0.3 - 0.1j], [0.3 + 0.1j, 0.5]])
        out = liouvillian_apply(h, NoiseModel.dephasing(0.9), rho)
        assert out[0, 1] == pytest.approx(-4 * 0.9 * rho[0, 1], abs=1e-15)
        assert out[0, 0] == 0.0 and out[1, 1] == 0.0

    def test_free_hopping_reduces_to_classical_rate_equation(self):
        n = 9
        h = _free_hamiltonian(n)
        p = np.random.default_rng(4).random(n)
        p /= p.sum()
        out = liouvillian_apply(h, NoiseModel.hopping(0.6), np.diag(p).astype(complex))
        a = oracles.classical_hop_generator(n, 0.6)
        assert np.abs(np.diag(out).real - a @ p).max() < 1e-14
        assert np.abs(out - np.diag(np.diag(out))).max() < 1e-15  # stays diagonal

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            liouvillian_apply(_free_hamiltonian(3), NoiseModel.none(), np.eye(4))


class TestDenseSuperoperator:
    def test_closed_system_structure(self):
        h = _disordered(2, 0.7, 8)
        hm = h.to_dense()
        eye = np.eye(2)
        expected = -1j * (np.kron(eye, hm) - np.kron(hm.T, eye))
        got = dense_superoperator(h, NoiseModel.none())
        assert np.abs(got - expected).max() < 1e-15

    @pytest.mark.parametrize(
        "model",
        [
            NoiseModel.none(),
            NoiseModel.dephasing(1.3),
            NoiseModel.hopping(0.7),
            NoiseModel.from_rates(1.3, 0.7),
        ],
    )
    def test_matches_liouvillian_apply_on_random_states(self, model):
        rng = np.random.default_rng(17)
        h = _disordered(6, 1.0, 2)
        s = dense_superoperator(h, model)
        for _ in range(3):
            rho = oracles.random_hermitian(rng, 6)
            via_s = (s @ rho.flatten("F")).reshape(6, 6, order="F")
            direct = liouvillian_apply(h, model, rho)
            assert np.abs(via_s - direct).max() < 1e-12

    def test_dephasing_eigenvalue_on_coherence_subspace(self):
        h = _free_hamiltonian(2)
        s = dense_superoperator(h, NoiseModel.dephasing(1.1))
        evals = np.linalg.eigvals(s)
        assert np.min(np.abs(evals - (-4 * 1.1))) < 1e-12

    def test_hopping_diagonal_block_is_birth_death_generator(self):
        n = 3
        s = dense_superoperator(_free_hamiltonian(n), NoiseModel.hopping(0.8))
        diag_idx = np.array([j * (n + 1) for j in range(n)])
        block = s[np.ix_(diag_idx, diag_idx)].real
        assert np.abs(block - oracles.classical_hop_generator(n, 0.8)).max() < 1e-12

    def test_size_guard(self):
        with pytest.raises(ValueError):
            dense_superoperator(_free_hamiltonian(9), NoiseModel.none())


class TestEvolveDensityMatrix:
    def test_unitary_oracle_at_gt5(self):
        h = _disordered(13, 1.0, 23)
        rho0 = density_from_pure(basis_state(13, 6))
        traj = evolve_density_matrix(rho0, h, NoiseModel.none(), 5.0, 5e-4, [5.0])
        expected = oracles.unitary_density_oracle(h.to_dense(), rho0, 5.0)
        assert np.abs(traj.states[-1] - expected).max() < 1e-8

    def test_matches_superoperator_exponential(self):
        h = HamiltonianMatrix(diagonal=np.zeros(2), off_diagonal=np.ones(1))
        model = NoiseModel.dephasing(1.0)
        rho0 = density_from_pure(basis_state(2, 0))
        traj = evolve_density_matrix(rho0, h, model, 2.0, 5e-4, [2.0])
        s = dense_superoperator(h, model)
        exact = oracles.propagate_superoperator(s, rho0, 2.0)
        assert np.abs(traj.states[-1] - exact).max() < 1e-8

    def test_trace_drift_per_unit_time(self):
        h = _disordered(11, 1.0, 3)
        rho0 = density_from_pure(basis_state(11, 5))
        for model in (NoiseModel.dephasing(1.0), NoiseModel.hopping(1.0),
                      NoiseModel.from_rates(0.5, 0.5)):
            traj = evolve_density_matrix(rho0, h, model, 5.0, 0.005)
            assert traj.diagnostics.max_trace_dev / 5.0 < 1e-9

    def test_pure_dephasing_freezes_populations(self):
        rng = np.random.default_rng(5)
        h = HamiltonianMatrix(diagonal=rng.normal(0, 1, 6), off_diagonal=np.zeros(5))
        rho0 = oracles.random_density_matrix(rng, 6)
        traj = evolve_density_matrix(rho0, h, NoiseModel.dephasing(0.8), 4.0, 0.005)
        for state in traj.states:
            assert np.abs(np.diag(state) - np.diag(rho0)).max() < 1e-10

    def test_decohered_diagonal_state_is_stationary(self):
        h = _free_hamiltonian(5)
        p = np.full(5, 0.2)
        traj = evolve_density_matrix(np.diag(p).astype(complex), h,
                                     NoiseModel.dephasing(2.0), 3.0, 0.01)
        assert np.abs(traj.states[-1] - np.diag(p)).max() < 1e-12

    def test_halving_dt_converges(self):
        h = _disordered(9, 1.0, 11)
        rho0 = density_from_pure(basis_state(9, 4))
        for model in (NoiseModel.dephasing(1.0), NoiseModel.hopping(1.0)):
            coarse = evolve_density_matrix(rho0, h, model, 20.0, 0.01, [20.0])
            fine = evolve_density_matrix(rho0, h, model, 20.0, 0.005, [20.0])
            assert np.abs(coarse.states[-1] - fine.states[-1]).max() < 1e-6

    def test_full_space_equivalence_small_chain(self):
        # single-excitation closure against the 2^N product-space oracle
        n = 4
        energies = np.random.default_rng(6).normal(0, 1.0, n)
        h = HamiltonianMatrix(diagonal=energies, off_diagonal=np.ones(n - 1))
        rho0 = density_from_pure(basis_state(n, n // 2))
        for gamma, big_gamma in ((1.0, 0.0), (0.0, 1.0)):
            model = NoiseModel.from_rates(gamma, big_gamma)
            traj = evolve_density_matrix(rho0, h, model, 2.0, 5e-4, [2.0])
            full = oracles.full_space_evolve(
                energies, 1.0, gamma, big_gamma,
                oracles.embed_single_excitation(rho0), 2.0, 5e-4,
            )
            sub = oracles.restrict_single_excitation(full, n)
            assert np.abs(traj.states[-1] - sub).max() < 1e-8

    def test_unstable_step_raises_with_diagnostic(self):
        h = _disordered(9, 20.0, 2)
        rho0 = density_from_pure(basis_state(9, 4))
        with pytest.raises(IntegrationError, match="step size too large"):
            evolve_density_matrix(rho0, h, NoiseModel.dephasing(5.0), 10.0, 0.5)

    def test_positivity_check_skipped_for_large_chains(self):
        spec = ChainSpec(n_sites=41, delta=0.5, gamma=1.0)
        h = build_hamiltonian(spec, sample_disorder(spec, 1))
        rho0 = density_from_pure(basis_state(41, 20))
        times, frames, report = evolve_site_populations(
            rho0, h, NoiseModel.dephasing(1.0), 1.0, 0.01
        )
        assert np.isnan(report.min_eigenvalue)
        assert frames.shape[1] == 41
        assert np.abs(frames.sum(axis=1) - 1.0).max() < 1e-9

    def test_site_populations_match_full_evolution(self):
        h = _disordered(11, 1.0, 9)
        model = NoiseModel.from_rates(0.5, 0.5)
        rho0 = density_from_pure(basis_state(11, 5))
        samples = np.linspace(0, 3.0, 13)
        traj = evolve_density_matrix(rho0, h, model, 3.0, 0.005, samples)
        times, frames, _ = evolve_site_populations(rho0, h, model, 3.0, 0.005, samples)
        assert np.array_equal(times, traj.times)
        diag = np.array([np.diag(s).real for s in traj.states])
        assert np.abs(diag - frames).max() < 1e-14
