import numpy as np
import pytest
import scipy.linalg

from wzmsim.expm import expm


@pytest.mark.parametrize("n,scale", [(1, 0.1), (5, 1.0), (20, 10.0), (40, 50.0)])
def test_matches_scipy(n, scale):
    rng = np.random.default_rng(n)
    A = scale * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(n)
    np.testing.assert_allclose(expm(A), scipy.linalg.expm(A), rtol=1e-10, atol=1e-10 * np.abs(scipy.linalg.expm(A)).max())


def test_hermitian_against_eigendecomposition():
    rng = np.random.default_rng(7)
    H = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    H = H + H.conj().T
    w, V = np.linalg.eigh(H)
    expected = (V * np.exp(-1j * w)) @ V.conj().T
    U = expm(-1j * H)
    np.testing.assert_allclose(U, expected, atol=1e-12)
    np.testing.assert_allclose(U @ U.conj().T, np.eye(12), atol=1e-12)


def test_zero_and_diagonal():
    np.testing.assert_array_equal(expm(np.zeros((3, 3))), np.eye(3))
    d = np.array([0.5, -2.0, 3.0])
    np.testing.assert_allclose(expm(np.diag(d)), np.diag(np.exp(d)), rtol=1e-14)


def test_nilpotent():
    N = np.array([[0.0, 1.0], [0.0, 0.0]])
    np.testing.assert_allclose(expm(N), [[1.0, 1.0], [0.0, 1.0]], atol=1e-15)


def test_rejects_non_square():
    with pytest.raises(ValueError):
        expm(np.zeros((2, 3)))
