"""Tests for the Hermitian linear-algebra helpers."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alphaz_fidelity.errors import NotPSDError, ParameterError, ValidationError
from alphaz_fidelity.linalg import (
    as_matrix,
    commutator_norm,
    eig_hermitian,
    exp_skew,
    expm_hermitian,
    frac_power,
    is_unitary,
    support_power,
    trace_power,
    unitary_log,
)
from alphaz_fidelity.states import haar_unitary, random_density


class TestAsMatrix:
    """Test input coercion."""

    def test_rejects_non_square(self):
        """Test non-square input is refused."""
        with pytest.raises(ValidationError, match="square"):
            as_matrix(np.ones((2, 3)))

    def test_rejects_non_finite(self):
        """Test NaN entries are refused."""
        with pytest.raises(ValidationError, match="non-finite"):
            as_matrix([[1.0, np.nan], [0.0, 1.0]])


class TestEigHermitian:
    """Test the reproducible eigendecomposition."""

    def test_descending_and_reconstructs(self):
        """Test eigenvalues are descending and the matrix is reconstructed."""
        rho = random_density(4, seed=3)
        eig = eig_hermitian(rho.matrix)

        assert np.all(np.diff(eig.eigenvalues) <= 0)
        np.testing.assert_allclose(eig.reconstruct(), rho.matrix, atol=1e-12)

    def test_phase_normalized(self):
        """Test every eigenvector's first non-negligible component is real positive."""
        eig = eig_hermitian(random_density(3, seed=5).matrix)
        for j in range(3):
            col = eig.eigenvectors[:, j]
            lead = col[np.flatnonzero(np.abs(col) > 1e-12)[0]]
            assert lead.real > 0
            assert abs(lead.imag) < 1e-12

    def test_degenerate_order_is_deterministic(self):
        """Test repeated calls agree on a degenerate spectrum."""
        u = haar_unitary(3, 9).matrix
        h = (u * np.array([1.0, 1.0, 0.5])) @ u.conj().T
        first, second = eig_hermitian(h), eig_hermitian(h.copy())
        np.testing.assert_array_equal(first.eigenvectors, second.eigenvectors)

    def test_rejects_non_hermitian(self):
        """Test a non-Hermitian input is refused."""
        with pytest.raises(ValidationError, match="not Hermitian"):
            eig_hermitian([[0.0, 1.0], [0.0, 0.0]])


class TestPowers:
    """Test fractional powers with the kernel convention."""

    def test_frac_power_diagonal(self):
        """Test diag(4, 9)^0.5 = diag(2, 3)."""
        np.testing.assert_allclose(frac_power(np.diag([4.0, 9.0]), 0.5), np.diag([2.0, 3.0]), atol=1e-12)

    def test_negative_power_on_support(self):
        """Test 0^p = 0 for a negative p."""
        np.testing.assert_allclose(frac_power(np.diag([0.25, 0.0]), -0.5), np.diag([2.0, 0.0]), atol=1e-12)

    def test_support_power(self):
        """Test eigenvalues below the clamp map to zero."""
        np.testing.assert_allclose(support_power(np.array([4.0, 1e-12, 0.0]), -1.0), [0.25, 0.0, 0.0])

    def test_frac_power_rejects_negative_eigenvalue(self):
        """Test a clearly negative eigenvalue raises NotPSDError."""
        with pytest.raises(NotPSDError):
            frac_power(np.diag([1.0, -1e-3]), 0.5)

    def test_trace_power(self):
        """Test Tr[A^z] on a diagonal matrix."""
        assert trace_power(np.diag([0.25, 0.75]), 2.0) == pytest.approx(0.625)

    def test_trace_power_requires_positive_z(self):
        """Test z <= 0 is refused."""
        with pytest.raises(ParameterError):
            trace_power(np.eye(2), 0.0)


class TestExponentials:
    """Test exponentials and the unitary logarithm."""

    def test_exp_skew_is_unitary(self):
        """Test exp(L) is unitary for skew-Hermitian L."""
        g = np.array([[0.3, 1.0 + 2.0j], [-0.5j, 0.2]])
        l = (g - g.conj().T) / 2
        assert is_unitary(exp_skew(l))

    def test_exp_skew_rejects_hermitian(self):
        """Test a Hermitian generator is refused."""
        with pytest.raises(ValidationError, match="skew-Hermitian"):
            exp_skew(np.diag([1.0, 2.0]))

    def test_unitary_log_minus_one(self):
        """Test the eigenvalue -1 gets phase +pi."""
        log = unitary_log(np.diag([-1.0, 1.0]))
        np.testing.assert_allclose(log, np.diag([1j * np.pi, 0.0]), atol=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=2, max_value=4))
    def test_log_then_exp_recovers_unitary(self, seed, d):
        """Test exp(log U) = U for Haar unitaries."""
        u = haar_unitary(d, seed).matrix
        np.testing.assert_allclose(exp_skew(unitary_log(u)), u, atol=1e-9)

    def test_expm_hermitian_diagonal(self):
        """Test exp of a diagonal Hermitian matrix."""
        np.testing.assert_allclose(expm_hermitian(np.diag([0.0, 1.0])), np.diag([1.0, np.e]), atol=1e-12)

    def test_commutator_norm(self):
        """Test commuting matrices give zero and Pauli X, Z do not."""
        x = np.array([[0.0, 1.0], [1.0, 0.0]])
        z = np.diag([1.0, -1.0])
        assert commutator_norm(z, z) == 0.0
        assert commutator_norm(x, z) == pytest.approx(2 * np.sqrt(2))
