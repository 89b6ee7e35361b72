import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.quantum.errors import DimensionError, StateValidationError
from src.quantum.oracle import ginibre_states
from src.quantum.qmatrix import (
    SIGMA3,
    BlochVector,
    DensityMatrix,
    Subsystem,
    bloch_to_state,
    decode_matrix,
    eig_hermitian,
    encode_matrix,
    maximally_mixed,
    partial_trace,
    pure_state,
    state_to_bloch,
    tensor_state,
    vn_entropy,
)


class TestDensityMatrix:
    def test_valid_state(self):
        rho = DensityMatrix.from_array([[0.75, 0.25], [0.25, 0.25]])
        assert rho.dim == 2
        assert rho.purity == pytest.approx(0.75)

    def test_rejects_non_hermitian(self):
        with pytest.raises(StateValidationError) as exc:
            DensityMatrix.from_array([[0.5, 0.1], [0.2, 0.5]])
        assert exc.value.invariant == "hermiticity"

    def test_rejects_wrong_trace(self):
        with pytest.raises(StateValidationError) as exc:
            DensityMatrix.from_array(np.eye(2))
        assert exc.value.invariant == "unit-trace"

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(StateValidationError) as exc:
            DensityMatrix.from_array([[1.2, 0.0], [0.0, -0.2]])
        assert exc.value.invariant == "positivity"
        assert exc.value.deviation == pytest.approx(0.2)

    def test_tolerance_is_configurable(self):
        slightly_off = np.diag([0.5 + 1e-7, 0.5])
        with pytest.raises(StateValidationError):
            DensityMatrix.from_array(slightly_off)
        assert DensityMatrix.from_array(slightly_off, tol=1e-6).dim == 2

    def test_rejects_non_square(self):
        with pytest.raises(DimensionError):
            DensityMatrix.from_array(np.ones((2, 3)) / 2)

    def test_rejects_oversized(self):
        with pytest.raises(DimensionError):
            maximally_mixed(26)

    def test_rejects_inconsistent_dims(self):
        with pytest.raises(DimensionError):
            maximally_mixed(4, dims=(2, 3))

    def test_matrix_is_read_only(self):
        rho = maximally_mixed(2)
        with pytest.raises(ValueError):
            rho.mat[0, 0] = 1.0

    @pytest.mark.parametrize("bad", [np.nan, np.inf])
    def test_rejects_non_finite(self, bad):
        m = np.eye(2, dtype=complex) / 2
        m[0, 1] = m[1, 0] = bad
        with pytest.raises(StateValidationError) as exc:
            DensityMatrix.from_array(m)
        assert exc.value.invariant == "finiteness"


class TestPartialTrace:
    def test_product_state_factors(self):
        zero = pure_state([1, 0])
        plus = pure_state([1, 1])
        rho = tensor_state(zero, plus)
        assert_allclose(partial_trace(rho, Subsystem.A).mat, zero.mat, atol=1e-12)
        assert_allclose(partial_trace(rho, Subsystem.B).mat, plus.mat, atol=1e-12)

    def test_singlet_marginal_is_mixed(self):
        singlet = pure_state([0, 1, -1, 0], dims=(2, 2))
        assert_allclose(partial_trace(singlet, "B").mat, np.eye(2) / 2, atol=1e-12)

    def test_unequal_subsystems(self):
        rho = tensor_state(maximally_mixed(2), pure_state([1, 0, 0]))
        assert partial_trace(rho, Subsystem.B).dim == 3
        assert partial_trace(rho, Subsystem.A).dim == 2

    def test_needs_dims(self):
        with pytest.raises(DimensionError):
            partial_trace(maximally_mixed(4), Subsystem.A)

    @pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 3)])
    def test_random_marginals_are_states(self, rng, dims):
        for mat in ginibre_states(rng, dims[0] * dims[1], shape=(25,)):
            rho = DensityMatrix.from_array(mat, dims)
            for keep, d in zip(Subsystem, dims):
                reduced = partial_trace(rho, keep)
                assert reduced.dim == d
                assert np.trace(reduced.mat).real == pytest.approx(1.0, abs=1e-12)
                assert np.linalg.eigvalsh(reduced.mat)[0] >= -1e-12


class TestSpectra:
    def test_eigenvalues_descending(self):
        values, vectors = eig_hermitian(np.diag([0.1, 0.7, 0.2]))
        assert_allclose(values, [0.7, 0.2, 0.1])
        assert_allclose(np.abs(vectors[:, 0]), [0, 1, 0], atol=1e-12)

    def test_eigensolver_rejects_non_hermitian(self):
        with pytest.raises(StateValidationError):
            eig_hermitian([[0, 1], [0, 0]])

    def test_eigen_decomposition_reconstructs(self, rng):
        g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        h = g + g.conj().T
        values, vectors = eig_hermitian(h)
        assert_allclose(vectors @ np.diag(values) @ vectors.conj().T, h, atol=1e-12)

    def test_entropy_limits(self):
        assert vn_entropy(pure_state([1, 1j])) == pytest.approx(0.0, abs=1e-12)
        assert vn_entropy(maximally_mixed(4)) == pytest.approx(2.0)


class TestBloch:
    def test_pole_is_computational_zero(self):
        rho = bloch_to_state(BlochVector(r1=0, r2=0, r3=1))
        assert_allclose(rho.mat, np.diag([1, 0]), atol=1e-12)
        assert np.real(np.trace(rho.mat @ SIGMA3)) == pytest.approx(1.0)

    def test_vector_recovered(self):
        r = BlochVector(r1=0.3, r2=-0.4, r3=0.5)
        assert_allclose(state_to_bloch(bloch_to_state(r)).as_array(), r.as_array(), atol=1e-12)

    def test_outside_ball_rejected(self):
        with pytest.raises(StateValidationError):
            BlochVector(r1=1.0, r2=0.5, r3=0.0)

    def test_only_qubits(self):
        with pytest.raises(DimensionError):
            state_to_bloch(maximally_mixed(3))

    def test_random_vectors_recovered(self, rng):
        directions = rng.standard_normal((1000, 3))
        radii = rng.uniform(0, 1, size=1000) ** (1 / 3)
        for r in directions / np.linalg.norm(directions, axis=1, keepdims=True) * radii[:, None]:
            back = state_to_bloch(bloch_to_state(BlochVector.from_array(r)))
            assert_allclose(back.as_array(), r, atol=1e-12)


class TestMatrixCodec:
    def test_encode_layout(self):
        encoded = encode_matrix(np.array([[1, 1j], [-1j, 0]]))
        assert encoded[0][1] == [0.0, 1.0]
        assert encoded[1][0] == [0.0, -1.0]

    def test_decode_ragged(self):
        with pytest.raises(DimensionError):
            decode_matrix([[[1, 0]], [[1, 0], [0, 0]]])
