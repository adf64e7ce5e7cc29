import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from atomfield.errors import (
    CutoffTooSmall,
    GridTooNarrow,
    NonHermitianInput,
    NonPositiveParameter,
    NormalizationError,
    RepresentationMismatch,
)
from atomfield.model_core import (
    BlochVector,
    CompositeState,
    DensityMatrix2,
    EnvWavefunction,
    ModelParams,
    PositionGrid,
    QubitAmplitudes,
    bloch_from_density,
    coherent_state,
    fock_to_position,
    gaussian_package,
    gaussian_to_fock,
    ho_eigenfunctions,
    make_params,
)

finite = st.floats(-1e3, 1e3, allow_nan=False)


class TestModelParams:
    def test_derived_values(self):
        p = make_params(1.0, 1e-3, 1.0, 1.0, 0.5)
        assert p.chi == math.sqrt(2e-3)
        assert p.delta == pytest.approx(0.999, abs=0, rel=1e-15)
        assert p.chi ** 2 == pytest.approx(2 * p.m * p.omega, rel=1e-15)

    def test_zero_frequency_rejected(self):
        with pytest.raises(NonPositiveParameter):
            make_params(1.0, 0.0, 1.0, 1.0, 1.0)
        with pytest.raises(NonPositiveParameter):
            make_params(0.0, 1.0, 1.0, 1.0, 1.0)

    def test_zero_coupling_is_data(self):
        p = make_params(1.0, 1.0, 0.0, 1.0, 1.0)
        assert p.g == 0.0 and p.gchi == 0.0

    @pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
    def test_nonfinite_rejected(self, bad):
        with pytest.raises(ValueError):
            make_params(1.0, 1.0, bad, 1.0, 1.0)
        with pytest.raises(ValueError):
            make_params(1.0, bad, 1.0, 1.0, 1.0)

    def test_from_gchi(self):
        p = ModelParams.from_gchi(1.0, 1e-3, 100.0, 1.0, 5e-4)
        assert p.gchi == pytest.approx(100.0, rel=1e-14)

    def test_dict_round_trip(self):
        p = make_params(1.0, 2.0, -0.3, 4.0, 5.0)
        assert ModelParams.from_dict(p.to_dict()) == p

    @given(st.floats(1e-6, 1e6), st.floats(1e-6, 1e6))
    def test_chi_identity(self, m, omega):
        p = make_params(1.0, omega, 1.0, m, 1.0)
        assert p.chi ** 2 == pytest.approx(2 * m * omega, rel=1e-14)
        assert p.delta == 1.0 - omega


class TestQubit:
    def test_norm_enforced(self):
        with pytest.raises(NormalizationError):
            QubitAmplitudes(1.0, 0.1)

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            QubitAmplitudes(math.nan, 0.0)

    @given(st.floats(0, math.pi), st.floats(0, 2 * math.pi))
    def test_bloch_angles_normalized(self, theta, phi):
        q = QubitAmplitudes.from_bloch(theta, phi)
        r = q.bloch_vector()
        assert np.linalg.norm(r) == pytest.approx(1.0, abs=1e-12)
        assert r[2] == pytest.approx(math.cos(theta), abs=1e-12)

    def test_pointer_coefficients_round_trip(self):
        q = QubitAmplitudes.from_bloch(0.4, 2.2)
        back = QubitAmplitudes.from_pointer_basis(*q.pointer_coefficients())
        assert back.alpha == pytest.approx(q.alpha, abs=1e-15)
        assert back.beta == pytest.approx(q.beta, abs=1e-15)

    def test_dict_round_trip(self):
        q = QubitAmplitudes.from_bloch(0.4, 2.2)
        assert QubitAmplitudes.from_dict(q.to_dict()) == q


class TestGrid:
    def test_asymmetric_rejected(self):
        with pytest.raises(GridTooNarrow):
            PositionGrid(-1.0, 2.0, 11)

    def test_mirror_exact(self):
        g = PositionGrid.symmetric(3.7, 1001)
        assert np.array_equal(g.x, -g.x[::-1])


class TestGaussian:
    def test_peak_and_parity(self):
        # odd point count puts a node at x = 0
        grid = PositionGrid.symmetric(8 / math.sqrt(0.5), 2049)
        psi = gaussian_package(0.5, grid)
        assert grid.x[1024] == 0.0
        assert psi.values[1024].real == pytest.approx(math.pi ** -0.25, rel=1e-15)
        assert np.array_equal(psi.values, psi.values[::-1])

    @pytest.mark.parametrize("alpha0", [1e-4, 5e-4, 0.5, 3.0, 250.0])
    def test_quadrature_norm(self, alpha0):
        grid = PositionGrid.for_gaussian(alpha0)
        assert gaussian_package(alpha0, grid).norm2() == pytest.approx(1.0, abs=1e-10)

    def test_narrow_grid_raises(self):
        with pytest.raises(GridTooNarrow):
            gaussian_package(1.0, PositionGrid.symmetric(3.0, 256))


class TestFock:
    def test_ground_state(self):
        p = make_params(1.0, 0.7, 1.0, 2.0, 0.7)
        c = gaussian_to_fock(p.ground_alpha0, p, 16).values
        assert abs(c[0]) == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.abs(c[1:])) < 1e-12

    def test_odd_coefficients_zero(self):
        p = make_params(1.0, 1.0, 1.0, 1.0, 1.0)
        c = gaussian_to_fock(1.0, p, 40).values
        assert np.all(c[1::2] == 0)

    def test_squeezed_coefficients(self):
        # mpmath quadrature of Hermite functions at 30 digits, alpha0 = m omega = 1
        frozen = {0: 0.97098354341464684057, 2: -0.22886301598967975065,
                  4: 0.066067061944595614818, 6: -0.020103566741747857438}
        p = make_params(1.0, 1.0, 1.0, 1.0, 1.0)
        c = gaussian_to_fock(1.0, p, 40).values.real
        for n, v in frozen.items():
            assert c[n] == pytest.approx(v, abs=1e-12)

    def test_weight_monotone_in_cutoff(self):
        p = make_params(1.0, 1.0, 1.0, 1.0, 1.0)
        weights = []
        for cutoff in (2, 4, 8, 16):
            c = gaussian_to_fock(1.0, p, cutoff, tol=1.0).values
            weights.append(float(np.sum(np.abs(c) ** 2)))
        assert all(b >= a for a, b in zip(weights, weights[1:]))
        assert weights[-1] == pytest.approx(1.0, abs=1e-6)

    def test_cutoff_too_small(self):
        p = make_params(1.0, 1.0, 1.0, 1.0, 1.0)
        with pytest.raises(CutoffTooSmall):
            gaussian_to_fock(1.0, p, 2)

    @pytest.mark.parametrize("ratio", [0.25, 0.5, 1.0, 2.0, 4.0])
    def test_synthesis_round_trip(self, ratio):
        p = make_params(1.0, 1.0, 1.0, 1.0, 1.0)
        alpha0 = ratio * p.ground_alpha0
        grid = PositionGrid.for_gaussian(min(alpha0, p.ground_alpha0), 2048)
        c = gaussian_to_fock(alpha0, p, 64).values
        back = fock_to_position(c, grid, p.m, p.omega)
        ref = gaussian_package(alpha0, grid).values
        err = math.sqrt(grid.integrate(np.abs(back - ref) ** 2).real)
        assert err < 1e-6

    def test_eigenfunctions_orthonormal(self):
        grid = PositionGrid.symmetric(30.0, 4001)
        phi = ho_eigenfunctions(grid.x, 1.0, 1.0, 60)
        gram = (phi * grid.weights) @ phi.T
        assert np.max(np.abs(gram - np.eye(61))) < 1e-10

    def test_coherent_state(self):
        c = coherent_state(2.0, 60).values
        n = np.arange(61)
        assert np.sum(n * np.abs(c) ** 2) == pytest.approx(4.0, rel=1e-10)
        with pytest.raises(CutoffTooSmall):
            coherent_state(4.0, 10)


class TestEnvAndComposite:
    def test_representation_mismatch(self):
        grid = PositionGrid.for_gaussian(1.0)
        a = gaussian_package(1.0, grid)
        b = EnvWavefunction.fock([1.0, 0.0])
        with pytest.raises(RepresentationMismatch):
            a.inner(b)
        with pytest.raises(RepresentationMismatch):
            b.cutoff and a.cutoff

    def test_values_immutable(self):
        w = EnvWavefunction.fock([1.0, 0.0])
        with pytest.raises(ValueError):
            w.values[0] = 2.0

    def test_composite_norm(self):
        a = EnvWavefunction.fock([0.6, 0.0])
        b = EnvWavefunction.fock([0.0, 0.8j])
        s = CompositeState(a, b)
        assert s.norm2() == pytest.approx(1.0)
        with pytest.raises(NormalizationError):
            CompositeState(a, a)

    def test_fock_vector_round_trip(self):
        v = np.array([0.6, 0.0, 0.0, 0.8j])
        s = CompositeState.from_fock_vector(v, "schrodinger", 0.0)
        assert np.array_equal(s.fock_vector(), v)


class TestDensityAndBloch:
    def test_examples(self):
        assert bloch_from_density(np.diag([1.0, 0.0])).as_array() == pytest.approx([0, 0, 1])
        assert bloch_from_density(0.5 * np.ones((2, 2))).as_array() == pytest.approx([1, 0, 0])
        r = bloch_from_density(0.5 * np.array([[1, -1j], [1j, 1]]))
        assert r.as_array() == pytest.approx([0, 1, 0], abs=1e-15)

    def test_non_hermitian(self):
        with pytest.raises(NonHermitianInput):
            DensityMatrix2.from_array([[0.5, 0.5], [0.1, 0.5]])

    def test_trace_and_positivity(self):
        with pytest.raises(NormalizationError):
            DensityMatrix2.from_array([[0.6, 0], [0, 0.6]])
        with pytest.raises(NormalizationError):
            DensityMatrix2.from_array([[1.2, 0], [0, -0.2]])

    def test_bloch_too_long(self):
        with pytest.raises(NormalizationError):
            BlochVector(1.0, 0.1, 0.0)

    @settings(max_examples=200)
    @given(st.floats(0, math.pi), st.floats(0, 2 * math.pi), st.floats(0, 1))
    def test_round_trip(self, theta, phi, r):
        v = r * np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi),
                          math.cos(theta)])
        rho = BlochVector(*v).to_density()
        back = bloch_from_density(rho).to_density()
        assert np.max(np.abs(back.as_array() - rho.as_array())) < 1e-12
        assert bloch_from_density(rho).as_array() == pytest.approx(v, abs=1e-12)

    def test_pure_state_bloch(self):
        q = QubitAmplitudes.from_bloch(1.1, 0.7)
        r = bloch_from_density(DensityMatrix2.pure(q)).as_array()
        assert r == pytest.approx(q.bloch_vector(), abs=1e-15)
