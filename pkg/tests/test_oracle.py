import math

import numpy as np
import pytest
from scipy.linalg import expm

from atomfield.errors import (
    CutoffTooSmall,
    DimensionMismatch,
    NotConverged,
    RepresentationMismatch,
)
from atomfield.model_core import (
    EnvWavefunction,
    ModelParams,
    PositionGrid,
    QubitAmplitudes,
    gaussian_package,
    gaussian_to_fock,
)
from atomfield.oracle import (
    build_hamiltonian,
    compare_with_analytic,
    convergence_report,
    diagonalize,
    doubling_cutoffs,
    energy,
    parity_diagonal,
    product_state,
    propagate,
    reduced_density_exact,
    to_interaction_picture,
)

from conftest import random_qubit


def kron_hamiltonian(p: ModelParams, cutoff: int) -> np.ndarray:
    """Independent construction from tensor products of single-mode operators."""
    a = np.diag(np.sqrt(np.arange(1, cutoff + 1)), 1)
    num = np.diag(np.arange(cutoff + 1.0))
    sz = np.diag([1.0, -1.0])
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    eye_f, eye_s = np.eye(cutoff + 1), np.eye(2)
    return (0.5 * p.omega0 * np.kron(sz, eye_f) + p.omega * np.kron(eye_s, num)
            + p.g * np.kron(sx, a + a.T))


def random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


@pytest.fixture
def small_params():
    return ModelParams(1.0, 0.3, 0.45, 1.0, 0.15)


class TestHamiltonian:
    def test_matches_kron(self, small_params):
        h = build_hamiltonian(small_params, 12)
        assert np.max(np.abs(h.matrix - kron_hamiltonian(small_params, 12))) < 1e-15

    def test_hermitian_random(self, rng):
        for _ in range(5):
            p = ModelParams(*rng.uniform(0.1, 3, 2), rng.normal(), 1.0, 1.0)
            m = build_hamiltonian(p, 20).matrix
            assert np.max(np.abs(m - m.conj().T)) < 1e-13

    def test_coupling_entry(self, small_params):
        m = build_hamiltonian(small_params, 5).matrix
        n1 = 6
        assert m[n1 + 1, 0] == small_params.g  # <b,1|H|a,0>

    def test_zero_coupling_diagonal(self):
        p = ModelParams(1.0, 0.3, 0.0, 1.0, 1.0)
        m = build_hamiltonian(p, 7).matrix
        n = np.arange(8)
        assert np.array_equal(m, np.diag(np.concatenate([0.5 + 0.3 * n, -0.5 + 0.3 * n])))

    def test_apply_matches_matrix(self, small_params, rng):
        h = build_hamiltonian(small_params, 15)
        v = random_state(rng, h.dim)
        assert np.max(np.abs(h.apply(v) - h.matrix @ v)) < 1e-14

    def test_cutoff_too_small(self, small_params):
        with pytest.raises(CutoffTooSmall):
            build_hamiltonian(small_params, 0)

    def test_parity_commutes(self, small_params):
        h = build_hamiltonian(small_params, 25).matrix
        pi = np.diag(parity_diagonal(25))
        assert np.max(np.abs(h @ pi - pi @ h)) < 1e-12


class TestPropagation:
    def test_reconstruction(self, small_params):
        h = build_hamiltonian(small_params, 40)
        prop = diagonalize(h)
        m = h.matrix
        assert np.max(np.abs(prop.reconstruct() - m)) < 1e-10 * np.max(np.abs(m))
        v = prop.eigenvectors
        assert np.max(np.abs(v.T @ v - np.eye(h.dim))) < 1e-12

    def test_matches_expm(self, small_params, rng):
        h = build_hamiltonian(small_params, 30)
        prop = diagonalize(h)
        psi0 = random_state(rng, h.dim)
        for t in (0.0, 0.7, 5.3):
            ref = expm(-1j * kron_hamiltonian(small_params, 30) * t) @ psi0
            assert np.max(np.abs(propagate(prop, psi0, t) - ref)) < 1e-11

    def test_norm_energy_parity_conserved(self, small_params, rng):
        h = build_hamiltonian(small_params, 60)
        prop = diagonalize(h)
        psi0 = random_state(rng, h.dim)
        pd = parity_diagonal(60)
        e0 = energy(h, psi0)
        p0 = np.vdot(psi0, pd * psi0).real
        for psi in prop.propagate_many(psi0, np.linspace(0, 40, 9)):
            assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)
            assert energy(h, psi) == pytest.approx(e0, rel=1e-10)
            assert np.vdot(psi, pd * psi).real == pytest.approx(p0, abs=1e-12)

    def test_identity_at_zero(self, small_params, rng):
        prop = diagonalize(build_hamiltonian(small_params, 10))
        psi0 = random_state(rng, prop.dim)
        assert np.max(np.abs(propagate(prop, psi0, 0.0) - psi0)) < 1e-14

    def test_free_ground_state(self):
        p = ModelParams(1.3, 0.3, 0.0, 1.0, 1.0)
        prop = diagonalize(build_hamiltonian(p, 4))
        psi0 = np.zeros(prop.dim, complex)
        psi0[0] = 1.0
        t = 2.1
        out = propagate(prop, psi0, t)
        assert out[0] == pytest.approx(np.exp(-0.5j * 1.3 * t), abs=1e-15)
        assert np.max(np.abs(out[1:])) == 0.0

    def test_dimension_mismatch(self, small_params):
        prop = diagonalize(build_hamiltonian(small_params, 4))
        with pytest.raises(DimensionMismatch):
            propagate(prop, np.ones(3) / math.sqrt(3), 0.1)


class TestInteractionPicture:
    def test_identity_and_norm(self, small_params, rng):
        psi = random_state(rng, 22)
        assert np.array_equal(to_interaction_picture(psi, small_params, 0.0), psi)
        out = to_interaction_picture(psi, small_params, 3.3)
        assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-14)

    def test_free_run_constant(self, rng):
        p = ModelParams(1.0, 0.2, 0.0, 1.0, 1.0)
        prop = diagonalize(build_hamiltonian(p, 12))
        psi0 = random_state(rng, prop.dim)
        times = np.linspace(0, 20, 7)
        inter = to_interaction_picture(prop.propagate_many(psi0, times), p, times)
        assert np.max(np.abs(inter - psi0)) < 1e-13


class TestReducedDensity:
    def test_product(self, rng):
        q = random_qubit(rng)
        env = EnvWavefunction.fock([1.0, 0.0, 0.0])
        rho = reduced_density_exact(product_state(q, env))
        assert rho.rho_ab == pytest.approx(q.alpha * q.beta.conjugate(), abs=1e-15)

    def test_entangled(self):
        psi = np.zeros(4)
        psi[0] = psi[3] = 1 / math.sqrt(2)  # (|a,0> + |b,1>)/sqrt(2)
        rho = reduced_density_exact(psi)
        assert rho.rho_ab == 0.0 and rho.rho_aa == pytest.approx(0.5)

    def test_position_env_rejected(self):
        grid = PositionGrid.for_gaussian(1.0)
        with pytest.raises(RepresentationMismatch):
            product_state(QubitAmplitudes(1.0, 0.0), gaussian_package(1.0, grid))


class TestConvergence:
    def test_free_converges_immediately(self):
        p = ModelParams(1.0, 1e-3, 0.0, 1.0, 5e-4)
        rep = convergence_report(p, p.alpha0, 5.0, [4, 8])
        assert rep.converged_cutoff == 4
        assert rep.rows[0].drift < 1e-12

    def test_single_cutoff_not_converged(self, small_params):
        with pytest.raises(NotConverged) as exc:
            convergence_report(small_params, small_params.alpha0, 1.0, [8])
        assert exc.value.report.rows == ()

    def test_not_converged_carries_report(self):
        p = ModelParams.from_gchi(1.0, 1e-3, 100.0, 1.0, 5e-4)
        with pytest.raises(NotConverged) as exc:
            convergence_report(p, p.alpha0, 5.0, [16, 32])
        assert exc.value.report.rows[0].drift > 1e-3

    def test_increasing_required(self, small_params):
        with pytest.raises(ValueError):
            convergence_report(small_params, 0.15, 1.0, [8, 8])

    def test_pinned_regime_cutoff(self):
        # g = 2.5, chi = 40: omega0/omega = 1e3, (g chi/omega0)^2 = 1e4
        p = ModelParams.from_gchi(1.0, 1e-3, 100.0, 8e5, 400.0)
        rep = convergence_report(p, p.alpha0, 5.0, doubling_cutoffs(64, 1024))
        assert rep.converged_cutoff == 256

    def test_doubling(self):
        assert doubling_cutoffs(128, 1024) == [128, 256, 512, 1024]


class TestCompare:
    def test_free_fidelity_one(self):
        p = ModelParams(1.0, 1e-3, 0.0, 1.0, 5e-4)
        cmp = compare_with_analytic(p, QubitAmplitudes(1.0, 0.0), np.linspace(0, 5, 11), 8)
        assert np.max(np.abs(cmp.fidelity - 1.0)) < 1e-10
        assert cmp.max_rho_ab_abs_error < 1e-12

    def test_free_generic_qubit_dephases(self):
        # with g = 0 the closed form still evolves |a>,|b> by e^{-+ i omega0 t/2} relative
        # phases, which interaction-picture exact states do not; a basis qubit hides this
        p = ModelParams(1.0, 1e-3, 0.0, 1.0, 5e-4)
        cmp = compare_with_analytic(p, QubitAmplitudes.from_bloch(math.pi / 2, 0.0),
                                    [math.pi / 2], 8)
        assert cmp.fidelity[0] == pytest.approx(0.5, abs=1e-10)
