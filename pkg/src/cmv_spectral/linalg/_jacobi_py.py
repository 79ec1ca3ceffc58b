"""Pure numpy cyclic Jacobi kernel (fallback when the compiled module is absent)."""

import numpy as np


def jacobi_sweeps(A, V, tol, max_sweeps):
    """Diagonalize Hermitian ``A`` in place by cyclic Jacobi rotations.

    ``V`` accumulates the rotations with eigenvectors stored as *rows* (pass
    ``None`` to skip). Returns the number
    of sweeps performed, or -1 if the off-diagonal mass did not drop below
    ``tol * ||A||_F`` within ``max_sweeps``.
    """
    n = A.shape[0]
    fro = float(np.sqrt(np.sum(np.abs(A) ** 2)))
    if n < 2 or fro == 0.0:
        return 0
    target = tol * fro
    skip = 1e-3 * target / n
    for sweep in range(max_sweeps):
        off = float(np.sqrt(np.sum(np.abs(A - np.diag(np.diagonal(A))) ** 2)))
        if off <= target:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = A[p, q]
                absb = abs(b)
                if absb <= skip:
                    continue
                e = b / absb
                app = A[p, p].real
                aqq = A[q, q].real
                tau = (aqq - app) / (2.0 * absb)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                se = s * e
                sec = s * e.conjugate()
                colp = A[:, p].copy()
                colq = A[:, q]
                A[:, p] = c * colp - sec * colq
                A[:, q] = se * colp + c * colq
                rowp = A[p, :].copy()
                rowq = A[q, :]
                A[p, :] = c * rowp - se * rowq
                A[q, :] = sec * rowp + c * rowq
                A[p, p] = app - t * absb
                A[q, q] = aqq + t * absb
                A[p, q] = 0.0
                A[q, p] = 0.0
                if V is not None:
                    vp = V[p, :].copy()
                    vq = V[q, :]
                    V[p, :] = c * vp - sec * vq
                    V[q, :] = se * vp + c * vq
    off = float(np.sqrt(np.sum(np.abs(A - np.diag(np.diagonal(A))) ** 2)))
    return max_sweeps if off <= target else -1
