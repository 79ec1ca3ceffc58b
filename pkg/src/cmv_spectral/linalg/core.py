"""Dense complex kernels: norms, Hermitian square roots, Hermitian/unitary eigensolvers, solves."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import CayleyDegenerate, NoConvergence, NotHermitian, NotPSD, NotUnitary, ShapeMismatch, Singular
from . import _kernels

DEFAULT_TOL = 1e-10
PSD_CLAMP = -1e-10
COND_MAX = 1e8
_KERNEL_TOL = 1e-15
_MAX_SWEEPS = 60
_CAYLEY_RETRIES = 16


def as_matrix(A, square: bool = False) -> np.ndarray:
    """Coerce to a 2-D complex128 array; optionally insist on a square shape."""
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2 or M.size == 0:
        raise ShapeMismatch(f"expected a nonempty 2-D matrix, got shape {M.shape}")
    if square and M.shape[0] != M.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {M.shape}")
    return M


def fro(A) -> float:
    return float(np.sqrt(np.sum(np.abs(A) ** 2)))


@dataclass(frozen=True)
class HermitianEigen:
    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        V = self.vectors
        return (V * self.values) @ V.conj().T


@dataclass(frozen=True)
class UnitaryEigen:
    nodes: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        V = self.vectors
        return (V * self.nodes) @ V.conj().T


def _check_hermitian(A: np.ndarray, tol: float) -> None:
    scale = max(1.0, fro(A))
    if fro(A - A.conj().T) > tol * scale:
        raise NotHermitian(f"||A - A*|| = {fro(A - A.conj().T):.3e} exceeds {tol:.1e}*{scale:.3e}")


def _jacobi(A: np.ndarray, want_vectors: bool):
    work = np.ascontiguousarray(0.5 * (A + A.conj().T))
    n = work.shape[0]
    Vt = np.eye(n, dtype=np.complex128) if want_vectors else None
    sweeps = _kernels.jacobi_sweeps(work, Vt, _KERNEL_TOL, _MAX_SWEEPS)
    if sweeps < 0:
        raise NoConvergence(f"cyclic Jacobi did not converge in {_MAX_SWEEPS} sweeps (n={n})")
    vals = np.real(np.diagonal(work)).copy()
    order = np.argsort(vals, kind="stable")
    return vals[order], (Vt.T[:, order] if want_vectors else None)


def herm_eigen(A, tol: float = DEFAULT_TOL) -> HermitianEigen:
    """Full eigendecomposition of a Hermitian matrix, ascending eigenvalues."""
    M = as_matrix(A, square=True)
    _check_hermitian(M, tol)
    vals, vecs = _jacobi(M, True)
    return HermitianEigen(vals, vecs)


def herm_eigvals(A, tol: float = DEFAULT_TOL) -> np.ndarray:
    M = as_matrix(A, square=True)
    _check_hermitian(M, tol)
    return _jacobi(M, False)[0]


def op_norm(A) -> float:
    """Largest singular value, as the square root of the top eigenvalue of A*A."""
    M = as_matrix(A)
    G = M.conj().T @ M if M.shape[1] <= M.shape[0] else M @ M.conj().T
    if not np.any(G):
        return 0.0
    return float(np.sqrt(max(_jacobi(G, False)[0][-1], 0.0)))


def singular_extremes(A) -> tuple[float, float]:
    """(smallest, largest) singular value of a square matrix."""
    M = as_matrix(A, square=True)
    if not np.any(M):
        return 0.0, 0.0
    vals = _jacobi(M.conj().T @ M, False)[0]
    return float(np.sqrt(max(vals[0], 0.0))), float(np.sqrt(max(vals[-1], 0.0)))


def condition_number(A) -> float:
    lo, hi = singular_extremes(A)
    return np.inf if lo == 0.0 else hi / lo


def is_invertible(A, cond_max: float = COND_MAX) -> bool:
    return condition_number(A) < cond_max


def herm_sqrt(A, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Principal square root of a Hermitian PSD matrix (small negative eigenvalues clamped)."""
    M = as_matrix(A, square=True)
    _check_hermitian(M, tol)
    vals, V = _jacobi(M, True)
    floor = min(PSD_CLAMP, -tol) * max(1.0, abs(vals).max())
    if vals[0] < floor:
        raise NotPSD(f"eigenvalue {vals[0]:.3e} below {floor:.1e}")
    root = np.sqrt(np.clip(vals, 0.0, None))
    return (V * root) @ V.conj().T


def herm_sqrt_pair(A, tol: float = DEFAULT_TOL):
    """Return (A^{1/2}, A^{-1/2}) from one eigendecomposition; A must be positive definite."""
    M = as_matrix(A, square=True)
    _check_hermitian(M, tol)
    vals, V = _jacobi(M, True)
    if vals[0] <= 0.0:
        raise Singular(f"matrix not positive definite (min eigenvalue {vals[0]:.3e})")
    root = np.sqrt(vals)
    return (V * root) @ V.conj().T, (V / root) @ V.conj().T


def solve(A, B) -> np.ndarray:
    """Solve AX = B by Gaussian elimination with partial pivoting."""
    M = as_matrix(A, square=True).copy()
    R = np.asarray(B, dtype=np.complex128)
    vec = R.ndim == 1
    R = (R.reshape(-1, 1) if vec else R).copy()
    n = M.shape[0]
    if R.shape[0] != n:
        raise ShapeMismatch(f"row mismatch: A is {M.shape}, B is {R.shape}")
    floor = 1e-13 * fro(M)
    if floor == 0.0:
        raise Singular("zero matrix")
    for j in range(n):
        piv = j + int(np.argmax(np.abs(M[j:, j])))
        if abs(M[piv, j]) < floor:
            raise Singular(f"pivot {abs(M[piv, j]):.3e} at column {j} below {floor:.3e}")
        if piv != j:
            M[[j, piv]] = M[[piv, j]]
            R[[j, piv]] = R[[piv, j]]
        if j + 1 < n:
            f = M[j + 1 :, j] / M[j, j]
            M[j + 1 :, j:] -= np.outer(f, M[j, j:])
            R[j + 1 :] -= np.outer(f, R[j])
    X = np.empty_like(R)
    for j in range(n - 1, -1, -1):
        X[j] = (R[j] - M[j, j + 1 :] @ X[j + 1 :]) / M[j, j]
    return X.ravel() if vec else X


def inv(A) -> np.ndarray:
    M = as_matrix(A, square=True)
    return solve(M, np.eye(M.shape[0], dtype=np.complex128))


def rsolve(B, A) -> np.ndarray:
    """X with XA = B."""
    return solve(as_matrix(A, square=True).T, np.asarray(B, dtype=np.complex128).T).T


def unitary_eigen(U, tol: float = DEFAULT_TOL, seed: int = 20240611) -> UnitaryEigen:
    """Eigendecomposition of a unitary matrix through a phase-shifted Cayley transform."""
    M = as_matrix(U, square=True)
    n = M.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    if fro(M.conj().T @ M - eye) > tol * np.sqrt(n):
        raise NotUnitary(f"||U*U - I||_F = {fro(M.conj().T @ M - eye):.3e}")
    rng = np.random.default_rng(seed)
    cap = 16.0 * n + 16.0
    for _ in range(_CAYLEY_RETRIES):
        Ue = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi)) * M
        try:
            K = 1j * solve(eye - Ue, eye + Ue)
        except Singular:
            continue
        if not np.all(np.isfinite(K)) or fro(K) > cap:
            continue
        _, V = _jacobi(K, True)
        # Rayleigh quotients are more accurate than inverting the Cayley map.
        nodes = np.einsum("ij,ij->j", V.conj(), M @ V)
        nodes = nodes / np.abs(nodes)
        return UnitaryEigen(nodes, V)
    raise CayleyDegenerate(f"no admissible phase in {_CAYLEY_RETRIES} attempts")
