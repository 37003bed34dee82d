import numpy as np
import pytest

from ciprec.errors import BadDimensions, NotPositiveDefinite
from ciprec.linalg import EPS_SOLVE, cholesky, gram, hermitian_solve, real_solve, symmetrize

from _instances import kernel_for


def test_identity_solve_returns_rhs():
    M = np.array([[1 + 2j, 3], [-1j, 4 - 1j]])
    np.testing.assert_allclose(hermitian_solve(np.eye(2), M), M, atol=1e-15)


def test_diagonal_solve():
    x = hermitian_solve(np.diag([2.0, 4.0]), np.array([1.0, 1.0]))
    np.testing.assert_allclose(x, [0.5, 0.25], atol=1e-15)


def test_gram_inverse_residual():
    rng = np.random.default_rng(3)
    H = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
    A = gram(H)
    X = hermitian_solve(A, np.eye(3))
    assert np.linalg.norm(A @ X - np.eye(3)) <= EPS_SOLVE * np.linalg.norm(np.eye(3))


def test_real_solve_cases():
    b = np.array([0.3, -1.2, 7.0])
    np.testing.assert_allclose(real_solve(np.eye(3), b), b)
    np.testing.assert_allclose(real_solve(np.array([[2.0, 0], [0, 1]]), [2.0, 3.0]), [1.0, 3.0])


def test_real_solve_rejects_complex():
    with pytest.raises(TypeError):
        real_solve(np.eye(2, dtype=complex), [1.0, 1.0])


@pytest.mark.parametrize("seed", range(20))
def test_kernel_row_sums_solve_to_ones(seed):
    k = kernel_for(seed, 4, 4)
    assert np.abs(real_solve(k.V, k.a) - 1).max() <= 1e-8


def test_gram_examples():
    np.testing.assert_array_equal(gram(np.eye(3)), np.eye(3))
    np.testing.assert_allclose(gram(np.array([[1, 1j]])), [[2]])
    rng = np.random.default_rng(0)
    H = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
    G = gram(H)
    np.testing.assert_array_equal(G, G.conj().T)
    assert np.all(G.diagonal().imag == 0) and np.all(G.diagonal().real >= 0)
    assert np.linalg.eigvalsh(G).min() >= -1e-10


def test_gram_rejects_vector():
    with pytest.raises(BadDimensions):
        gram(np.ones(3))


def test_singular_matrix_raises():
    with pytest.raises(NotPositiveDefinite):
        cholesky(np.array([[1.0, 1.0], [1.0, 1.0]]))


def test_tiny_pivot_raises():
    # PD in exact arithmetic but the second pivot is below the relative floor
    with pytest.raises(NotPositiveDefinite):
        cholesky(np.diag([1.0, 1e-14]))


def test_nonfinite_raises():
    with pytest.raises(NotPositiveDefinite):
        cholesky(np.array([[np.nan, 0], [0, 1.0]]))


def test_indefinite_raises():
    with pytest.raises(NotPositiveDefinite):
        cholesky(np.diag([1.0, -1.0]))


def test_non_square_raises():
    with pytest.raises(BadDimensions):
        cholesky(np.ones((2, 3)))


def test_ill_conditioned_roundtrip():
    rng = np.random.default_rng(11)
    Q, _ = np.linalg.qr(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
    A = symmetrize(Q @ np.diag(np.logspace(0, -6, 6)) @ Q.conj().T)
    B = rng.standard_normal((6, 2))
    X = hermitian_solve(A, A @ B)
    assert np.linalg.norm(X - B) <= 1e-9 * np.linalg.norm(B) * 1e6 ** 0.5


def test_complex_rhs_with_real_factor():
    L = cholesky(np.diag([2.0, 5.0]))
    np.testing.assert_allclose(L.solve(np.array([2 + 4j, 5j])), [1 + 2j, 1j])
