"""Truncated power series in z with matrix coefficients."""

from __future__ import annotations

import numpy as np

from .errors import NonInvertibleConstantTerm, ShapeMismatch
from .linalg import COND_MAX, condition_number, inv


class MatrixPowerSeries:
    """sum_{j=0}^{N} C_j z^j, known exactly through order N."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=np.complex128)
        if c.ndim != 3 or c.shape[1] != c.shape[2]:
            raise ShapeMismatch(f"coefficients must have shape (N+1, m, m), got {c.shape}")
        c.setflags(write=False)
        self.coeffs = c

    @property
    def N(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def m(self) -> int:
        return self.coeffs.shape[1]

    def __getitem__(self, j: int) -> np.ndarray:
        return self.coeffs[j]

    @classmethod
    def constant(cls, M, N: int) -> "MatrixPowerSeries":
        M = np.asarray(M, dtype=np.complex128)
        c = np.zeros((N + 1,) + M.shape, dtype=np.complex128)
        c[0] = M
        return cls(c)

    @classmethod
    def identity(cls, m: int, N: int) -> "MatrixPowerSeries":
        return cls.constant(np.eye(m), N)

    @classmethod
    def zeros(cls, m: int, N: int) -> "MatrixPowerSeries":
        return cls(np.zeros((N + 1, m, m)))

    def truncate(self, N: int) -> "MatrixPowerSeries":
        if N > self.N:
            raise ShapeMismatch(f"cannot extend a series known to order {self.N} to {N}")
        return MatrixPowerSeries(self.coeffs[: N + 1])

    def _align(self, other: "MatrixPowerSeries"):
        if self.m != other.m:
            raise ShapeMismatch("matrix orders differ")
        N = min(self.N, other.N)
        return self.coeffs[: N + 1], other.coeffs[: N + 1]

    def __add__(self, other):
        if not isinstance(other, MatrixPowerSeries):
            return self + MatrixPowerSeries.constant(np.asarray(other) * np.eye(self.m) if np.ndim(other) == 0 else other, self.N)
        a, b = self._align(other)
        return MatrixPowerSeries(a + b)

    __radd__ = __add__

    def __neg__(self):
        return MatrixPowerSeries(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s: complex) -> "MatrixPowerSeries":
        return MatrixPowerSeries(self.coeffs * s)

    def lmul(self, M) -> "MatrixPowerSeries":
        return MatrixPowerSeries(np.einsum("ij,njk->nik", M, self.coeffs))

    def rmul(self, M) -> "MatrixPowerSeries":
        return MatrixPowerSeries(np.einsum("nij,jk->nik", self.coeffs, M))

    def __matmul__(self, other: "MatrixPowerSeries") -> "MatrixPowerSeries":
        a, b = self._align(other)
        N = a.shape[0] - 1
        out = np.zeros_like(a)
        for j in range(N + 1):
            for i in range(j + 1):
                out[j] += a[i] @ b[j - i]
        return MatrixPowerSeries(out)

    mul = __matmul__

    def poly_scale(self, p) -> "MatrixPowerSeries":
        """Multiply by the scalar polynomial sum_i p[i] z^i (order unchanged)."""
        out = np.zeros_like(self.coeffs)
        for i, pi in enumerate(p):
            if pi and i <= self.N:
                out[i:] += pi * self.coeffs[: self.N + 1 - i]
        return MatrixPowerSeries(out)

    def times_z(self) -> "MatrixPowerSeries":
        """z f, known through order N + 1."""
        out = np.zeros((self.N + 2, self.m, self.m), dtype=np.complex128)
        out[1:] = self.coeffs
        return MatrixPowerSeries(out)

    def divide_z(self, tol: float = 1e-9) -> "MatrixPowerSeries":
        """f / z for f(0) = 0, known through order N - 1."""
        if np.abs(self.coeffs[0]).max() > tol * max(1.0, np.abs(self.coeffs).max()):
            raise NonInvertibleConstantTerm("division by z needs a vanishing constant term")
        if self.N < 1:
            raise ShapeMismatch("nothing left after dividing an order-0 series by z")
        return MatrixPowerSeries(self.coeffs[1:])

    def invert(self) -> "MatrixPowerSeries":
        c0 = self.coeffs[0]
        if condition_number(c0) >= COND_MAX:
            raise NonInvertibleConstantTerm("constant term is not invertible")
        g0 = inv(c0)
        out = np.zeros_like(self.coeffs)
        out[0] = g0
        for j in range(1, self.N + 1):
            acc = np.zeros((self.m, self.m), dtype=np.complex128)
            for i in range(1, j + 1):
                acc += self.coeffs[i] @ out[j - i]
            out[j] = -g0 @ acc
        return MatrixPowerSeries(out)

    def __call__(self, z: complex) -> np.ndarray:
        powers = complex(z) ** np.arange(self.N + 1)
        return np.einsum("n,nij->ij", powers, self.coeffs)

    def adjoint_coeffs(self) -> "MatrixPowerSeries":
        return MatrixPowerSeries(np.conj(np.transpose(self.coeffs, (0, 2, 1))))

    def max_abs_diff(self, other: "MatrixPowerSeries") -> float:
        a, b = self._align(other)
        return float(np.abs(a - b).max())

    def max_abs(self) -> float:
        return float(np.abs(self.coeffs).max())

    def __repr__(self) -> str:
        return f"MatrixPowerSeries(m={self.m}, N={self.N})"


def add(f: MatrixPowerSeries, g: MatrixPowerSeries) -> MatrixPowerSeries:
    return f + g


def mul(f: MatrixPowerSeries, g: MatrixPowerSeries) -> MatrixPowerSeries:
    return f @ g


def invert(f: MatrixPowerSeries) -> MatrixPowerSeries:
    return f.invert()


def compose_affine(f: MatrixPowerSeries, A=None, B=None, C=None) -> MatrixPowerSeries:
    """A f B + C with constant matrices A, B and a constant matrix or series C."""
    out = f
    if A is not None:
        out = out.lmul(A)
    if B is not None:
        out = out.rmul(B)
    if C is not None:
        out = out + (C if isinstance(C, MatrixPowerSeries) else MatrixPowerSeries.constant(C, out.N))
    return out
