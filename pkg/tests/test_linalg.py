import os
import subprocess
import sys

import numpy as np
import pytest

from cmv_spectral import linalg
from cmv_spectral.errors import NotHermitian, NotPSD, NotUnitary, ShapeMismatch, Singular
from cmv_spectral.linalg import _kernels


def rand_c(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def herm(rng, n):
    X = rand_c(rng, n)
    return X + X.conj().T


@pytest.mark.parametrize("n", [1, 2, 5, 12])
def test_herm_eigen_matches_numpy(rng, n):
    A = herm(rng, n)
    e = linalg.herm_eigen(A)
    np.testing.assert_allclose(e.values, np.linalg.eigvalsh(A), atol=1e-12)
    np.testing.assert_allclose(e.reconstruct(), A, atol=1e-12)
    np.testing.assert_allclose(e.vectors.conj().T @ e.vectors, np.eye(n), atol=1e-12)


def test_op_norm_is_largest_singular_value(rng):
    for shape in [(3, 3), (4, 2), (2, 5)]:
        A = rand_c(rng, *shape)
        assert linalg.op_norm(A) == pytest.approx(np.linalg.svd(A, compute_uv=False)[0], rel=1e-12)
    assert linalg.op_norm(np.zeros((3, 3))) == 0.0


def test_condition_number_and_singular_extremes(rng):
    A = rand_c(rng, 4)
    s = np.linalg.svd(A, compute_uv=False)
    lo, hi = linalg.singular_extremes(A)
    assert (lo, hi) == pytest.approx((s[-1], s[0]), rel=1e-10)
    assert linalg.condition_number(np.diag([1.0, 0.0])) == np.inf
    assert not linalg.is_invertible(np.diag([1.0, 1e-12]))


def test_sqrt_pair(rng):
    X = rand_c(rng, 4)
    A = X @ X.conj().T + np.eye(4)
    S, Si = linalg.herm_sqrt_pair(A)
    np.testing.assert_allclose(S @ S, A, atol=1e-12)
    np.testing.assert_allclose(S @ Si, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(linalg.herm_sqrt(A), S, atol=1e-12)


def test_sqrt_rejects_indefinite_and_nonhermitian(rng):
    with pytest.raises(NotPSD):
        linalg.herm_sqrt(np.diag([1.0, -1.0]))
    with pytest.raises(NotHermitian):
        linalg.herm_sqrt(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(Singular):
        linalg.herm_sqrt_pair(np.diag([1.0, 0.0]))


def test_solve_and_rsolve(rng):
    A, B = rand_c(rng, 5), rand_c(rng, 5, 3)
    X = linalg.solve(A, B)
    np.testing.assert_allclose(A @ X, B, atol=1e-12)
    Y = linalg.rsolve(B.T, A)
    np.testing.assert_allclose(Y @ A, B.T, atol=1e-12)
    np.testing.assert_allclose(linalg.inv(A) @ A, np.eye(5), atol=1e-12)
    with pytest.raises(Singular):
        linalg.solve(np.ones((2, 2)), np.eye(2))
    with pytest.raises(ShapeMismatch):
        linalg.solve(np.eye(2), np.eye(3))


def test_unitary_eigen(rng):
    Q, _ = np.linalg.qr(rand_c(rng, 6))
    e = linalg.unitary_eigen(Q)
    np.testing.assert_allclose(np.abs(e.nodes), 1.0, atol=1e-14)
    np.testing.assert_allclose(e.reconstruct(), Q, atol=1e-10)
    np.testing.assert_allclose(np.sort(np.angle(e.nodes)), np.sort(np.angle(np.linalg.eigvals(Q))), atol=1e-10)
    with pytest.raises(NotUnitary):
        linalg.unitary_eigen(2 * Q)


def test_backends_agree(rng):
    kernels = _kernels.backends()
    A = herm(rng, 10)
    vals = {}
    for name, k in kernels.items():
        W = np.ascontiguousarray(A.copy())
        assert k(W, None, 1e-15, 60) >= 0
        vals[name] = np.sort(np.real(np.diagonal(W)))
    for v in vals.values():
        np.testing.assert_allclose(v, np.linalg.eigvalsh(A), atol=1e-12)


def test_pure_python_fallback_is_selectable():
    env = dict(os.environ, CMV_SPECTRAL_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import cmv_spectral.linalg as l; print(l.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
