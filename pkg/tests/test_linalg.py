import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lspca.exceptions import DegenerateEmbeddingError, RankDeficientError
from lspca.linalg import (
    complex_to_real_embed,
    fix_column_phases,
    hermitian_eig,
    is_orthonormal,
    projection,
    real_to_complex_subspace,
    require_hermitian,
    row_support,
    subspace_distance,
    thin_qr,
)

from conftest import random_basis, random_hermitian

E1 = np.array([[1.0], [0.0]], dtype=complex)
E2 = np.array([[0.0], [1.0]], dtype=complex)


class TestSubspaceDistance:
    def test_identical_lines(self):
        assert subspace_distance(E1, E1) == 0.0

    def test_orthogonal_lines(self):
        assert subspace_distance(E1, E2) == pytest.approx(np.sqrt(2), abs=1e-12)

    def test_conjugate_complex_lines(self):
        # Oracle: direct arithmetic on the projections of (1, i)/sqrt(2) and
        # (1, -i)/sqrt(2).  P1 - P2 = [[0, -i], [i, 0]] / ... has Frobenius
        # norm sqrt(2).
        a = np.array([[1.0], [1.0j]]) / np.sqrt(2)
        b = np.array([[1.0], [-1.0j]]) / np.sqrt(2)
        diff = projection(a) - projection(b)
        oracle = np.sqrt((np.abs(diff) ** 2).sum())
        assert oracle == pytest.approx(np.sqrt(2), abs=1e-12)
        assert subspace_distance(a, b) == pytest.approx(oracle, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            subspace_distance(E1, np.eye(3)[:, :1])

    def test_upper_bound_sqrt_2d(self, rng):
        for d in (1, 2, 3):
            a = random_basis(rng, 6, d)
            b = random_basis(rng, 6, d)
            assert subspace_distance(a, b) <= np.sqrt(2 * d) + 1e-10

    def test_complement_identity(self, rng):
        # distance(A, B) = sqrt(2) * ||A^H B_perp||_F for any orthonormal
        # complement B_perp of B.
        p, d = 7, 3
        a = random_basis(rng, p, d)
        full, _ = np.linalg.qr(
            np.hstack([random_basis(rng, p, d), random_basis(rng, p, p - d)]))
        b, b_perp = full[:, :d], full[:, d:]
        lhs = subspace_distance(a, b)
        rhs = np.sqrt(2) * np.linalg.norm(a.conj().T @ b_perp)
        assert lhs == pytest.approx(rhs, abs=1e-8)

    @given(st.integers(0, 2 ** 31 - 1))
    def test_unitary_invariance(self, seed):
        rng = np.random.default_rng(seed)
        a = random_basis(rng, 5, 2)
        b = random_basis(rng, 5, 2)
        w = np.linalg.qr(rng.standard_normal((2, 2))
                         + 1j * rng.standard_normal((2, 2)))[0]
        assert subspace_distance(a @ w, b) == pytest.approx(
            subspace_distance(a, b), abs=1e-10)
        assert subspace_distance(a, b @ w) == pytest.approx(
            subspace_distance(a, b), abs=1e-10)


class TestEmbedding:
    def test_scalar(self):
        np.testing.assert_allclose(complex_to_real_embed(np.array([[1.0]])), np.eye(2))

    def test_identity(self):
        np.testing.assert_allclose(complex_to_real_embed(np.eye(3, dtype=complex)),
                                   np.eye(6))

    def test_pauli_like_eigenvalues(self):
        # Oracle: dense eigensolve of the explicit 4x4 embedding.
        h = np.array([[0.0, -1.0j], [1.0j, 0.0]])
        e = complex_to_real_embed(h)
        expected = np.block([[np.zeros((2, 2)), np.array([[0, -1], [1, 0]])],
                             [np.array([[0, 1], [-1, 0]]), np.zeros((2, 2))]])
        np.testing.assert_allclose(e, expected)
        np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(e)), [-1, -1, 1, 1],
                                   atol=1e-12)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            complex_to_real_embed(np.array([[0.0, 1.0], [0.0, 0.0]]))

    @given(st.integers(0, 2 ** 31 - 1))
    def test_algebra_homomorphism(self, seed):
        rng = np.random.default_rng(seed)
        h1 = random_hermitian(rng, 4)
        h2 = random_hermitian(rng, 4)
        e1, e2 = complex_to_real_embed(h1), complex_to_real_embed(h2)
        prod = h1 @ h2  # not Hermitian; embed the raw blocks directly
        embedded_prod = np.block([[prod.real, prod.imag], [-prod.imag, prod.real]])
        assert np.linalg.norm(e1 @ e2 - embedded_prod) <= 1e-10 * max(
            1.0, np.linalg.norm(embedded_prod))
        np.testing.assert_allclose(complex_to_real_embed(h1 + h2), e1 + e2, atol=1e-12)

    @given(st.integers(0, 2 ** 31 - 1))
    def test_eigenvalue_duplication(self, seed):
        rng = np.random.default_rng(seed)
        h = random_hermitian(rng, 5)
        dup = np.sort(np.repeat(np.linalg.eigvalsh(h), 2))
        emb = np.sort(np.linalg.eigvalsh(complex_to_real_embed(h)))
        np.testing.assert_allclose(emb, dup, atol=1e-10 * max(1.0, np.abs(dup).max()))


class TestRealToComplex:
    def test_real_line(self):
        w = np.zeros((4, 2))
        w[0, 0] = 1.0  # [e1; 0]
        w[2, 1] = 1.0  # [0; e1]
        v = real_to_complex_subspace(w)
        assert v.shape == (2, 1)
        assert subspace_distance(v, E1) <= 1e-10

    def test_recovers_complex_line(self):
        u = np.array([1.0, 1.0j]) / np.sqrt(2)
        h = np.outer(u, u.conj())
        w_full = np.linalg.eigh(complex_to_real_embed(h))[1]
        w = w_full[:, ::-1][:, :2]  # eigenvectors of the duplicated eigenvalue 1
        v = real_to_complex_subspace(w)
        assert subspace_distance(v, u[:, None]) <= 1e-10

    def test_full_space(self):
        p = 3
        v = real_to_complex_subspace(np.eye(2 * p))
        assert v.shape == (p, p)
        assert is_orthonormal(v)

    def test_embed_back_distance(self, rng):
        # Returned basis must project back into span(W).
        p, d = 4, 2
        basis = random_basis(rng, p, d)
        w = np.linalg.eigh(complex_to_real_embed(projection(basis)))[1][:, ::-1][:, :2 * d]
        v = real_to_complex_subspace(w)
        back = complex_to_real_embed(projection(v))
        assert np.linalg.norm(back - w @ w.T) <= 1e-6
        assert subspace_distance(v, basis) <= 1e-8

    def test_rejects_unclosed_subspace(self):
        # span{[e1; 0], [0; e2]} is not closed under the pairing map.
        w = np.zeros((4, 2))
        w[0, 0] = 1.0
        w[3, 1] = 1.0
        with pytest.raises(DegenerateEmbeddingError):
            real_to_complex_subspace(w)

    def test_rejects_odd_shapes(self):
        with pytest.raises(ValueError):
            real_to_complex_subspace(np.eye(3))


class TestThinQr:
    def test_orthonormal_fixed_point(self, rng):
        q0 = random_basis(rng, 5, 3)
        q, r = thin_qr(q0)
        np.testing.assert_allclose(q, q0, atol=1e-10)
        np.testing.assert_allclose(r, np.eye(3), atol=1e-10)

    def test_column_scaling(self):
        q, r = thin_qr(np.array([[2.0], [0.0]]))
        np.testing.assert_allclose(q, [[1.0], [0.0]], atol=1e-14)
        np.testing.assert_allclose(r, [[2.0]], atol=1e-14)

    def test_reconstruction(self, rng):
        m = rng.standard_normal((5, 2)) + 1j * rng.standard_normal((5, 2))
        q, r = thin_qr(m)
        assert np.linalg.norm(m - q @ r) <= 1e-10
        assert is_orthonormal(q)
        diag = np.diagonal(r)
        assert np.all(diag.real >= 0) and np.all(np.abs(diag.imag) <= 1e-12)

    def test_rank_deficient(self):
        with pytest.raises(RankDeficientError):
            thin_qr(np.array([[1.0, 1.0], [0.0, 0.0], [1.0, 1.0]]))

    def test_zero_matrix(self):
        with pytest.raises(RankDeficientError):
            thin_qr(np.zeros((3, 2)))


class TestHelpers:
    def test_require_hermitian_accepts(self, make_hermitian):
        require_hermitian(make_hermitian(4))

    def test_require_hermitian_rejects_shape(self):
        with pytest.raises(ValueError):
            require_hermitian(np.zeros((2, 3)))

    def test_row_support(self):
        v = np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 2.0]])
        np.testing.assert_array_equal(row_support(v), [0, 2])

    def test_fix_column_phases(self, rng):
        v = random_basis(rng, 4, 2)
        fixed = fix_column_phases(v)
        for k in range(2):
            lead = np.flatnonzero(np.abs(fixed[:, k]) > 1e-9)[0]
            assert fixed[lead, k].real > 0
            assert abs(fixed[lead, k].imag) <= 1e-12
        # phase fixing preserves the spanned subspace
        assert subspace_distance(fixed, v) <= 1e-12

    def test_hermitian_eig_descending(self, make_hermitian):
        h = make_hermitian(5)
        w, v = hermitian_eig(h)
        assert np.all(np.diff(w) <= 1e-12)
        np.testing.assert_allclose(v @ np.diag(w) @ v.conj().T, h, atol=1e-10)
