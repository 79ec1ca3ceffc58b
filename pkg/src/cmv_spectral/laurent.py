"""Matrix Laurent polynomials and the transfer-matrix solution families.

A pair (P, R) of solutions is advanced one site by the transfer matrix
T(z, k); going left uses its inverse. Everything happens on coefficient arrays,
so multiplication by z is an exponent shift and no sampling is involved.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import DepthMismatch, MissingLeadingTerm, OutOfWindow, ZeroArgument
from .linalg import COND_MAX, condition_number, fro
from .verblunsky import VerblunskyData


class LaurentPoly:
    """Finite Laurent series sum_e C_e z^e with r x s matrix coefficients.

    Stored densely from exponent ``lo``; exact-zero coefficients at either end
    are trimmed so the support reflects the structure of the recursion.
    """

    __slots__ = ("lo", "c")

    def __init__(self, lo: int, coeffs):
        c = np.asarray(coeffs, dtype=np.complex128)
        if c.ndim != 3:
            raise ValueError("coefficients must have shape (L, r, s)")
        nz = np.flatnonzero(np.any(c != 0, axis=(1, 2)))
        if nz.size == 0:
            self.lo = 0
            self.c = np.zeros((0,) + c.shape[1:], dtype=np.complex128)
        else:
            self.lo = int(lo) + int(nz[0])
            self.c = c[nz[0] : nz[-1] + 1].copy()

    @classmethod
    def monomial(cls, e: int, M) -> "LaurentPoly":
        M = np.asarray(M, dtype=np.complex128)
        return cls(e, M[None])

    @classmethod
    def from_dict(cls, coeffs: Mapping[int, np.ndarray], shape=None) -> "LaurentPoly":
        if not coeffs:
            return cls(0, np.zeros((0,) + tuple(shape)))
        lo, hi = min(coeffs), max(coeffs)
        first = np.asarray(next(iter(coeffs.values())))
        c = np.zeros((hi - lo + 1,) + first.shape, dtype=np.complex128)
        for e, M in coeffs.items():
            c[e - lo] = M
        return cls(lo, c)

    @property
    def shape(self):
        return self.c.shape[1:]

    @property
    def hi(self) -> int:
        return self.lo + len(self.c) - 1

    def is_zero(self) -> bool:
        return len(self.c) == 0

    def to_dict(self) -> dict[int, np.ndarray]:
        return {self.lo + i: C.copy() for i, C in enumerate(self.c) if np.any(C != 0)}

    def coeff(self, e: int) -> np.ndarray:
        i = e - self.lo
        if 0 <= i < len(self.c):
            return self.c[i]
        return np.zeros(self.shape, dtype=np.complex128)

    def shift(self, d: int) -> "LaurentPoly":
        return LaurentPoly(self.lo + d, self.c)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        c = np.zeros((hi - lo + 1,) + self.shape, dtype=np.complex128)
        c[self.lo - lo : self.hi - lo + 1] += self.c
        c[other.lo - lo : other.hi - lo + 1] += other.c
        return LaurentPoly(lo, c)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.lo, -self.c)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, s) -> "LaurentPoly":
        return LaurentPoly(self.lo, self.c * s)

    __rmul__ = __mul__

    def lmul(self, M) -> "LaurentPoly":
        """M @ self."""
        return LaurentPoly(self.lo, np.einsum("ij,ejk->eik", M, self.c))

    def rmul(self, M) -> "LaurentPoly":
        """self @ M."""
        return LaurentPoly(self.lo, np.einsum("eij,jk->eik", self.c, M))

    def matmul(self, other: "LaurentPoly") -> "LaurentPoly":
        if self.is_zero() or other.is_zero():
            return LaurentPoly(0, np.zeros((0, self.shape[0], other.shape[1])))
        L = len(self.c) + len(other.c) - 1
        c = np.zeros((L, self.shape[0], other.shape[1]), dtype=np.complex128)
        for i, A in enumerate(self.c):
            c[i : i + len(other.c)] += np.einsum("ij,ejk->eik", A, other.c)
        return LaurentPoly(self.lo + other.lo, c)

    def __call__(self, z) -> np.ndarray:
        z = complex(z)
        if self.is_zero():
            return np.zeros(self.shape, dtype=np.complex128)
        if z == 0 and self.lo < 0:
            raise ZeroArgument("negative powers at z = 0")
        powers = z ** np.arange(self.lo, self.hi + 1, dtype=float)
        return np.einsum("e,eij->ij", powers, self.c)

    def star_on_circle(self) -> "LaurentPoly":
        """The polynomial F^# with F^#(zeta) = F(zeta)^* for |zeta| = 1."""
        c = np.conj(np.transpose(self.c[::-1], (0, 2, 1)))
        return LaurentPoly(-self.hi, c)

    def max_abs_diff(self, other: "LaurentPoly") -> float:
        d = self - other
        return float(np.abs(d.c).max()) if not d.is_zero() else 0.0

    def __repr__(self) -> str:
        return f"LaurentPoly(lo={self.lo}, hi={self.hi}, shape={self.shape})"


def const(M) -> LaurentPoly:
    return LaurentPoly.monomial(0, M)


# -- transfer matrices ---------------------------------------------------------


def transfer(data: VerblunskyData, z: complex, k: int) -> np.ndarray:
    """T(z, k), mapping the solution pair at k-1 to the pair at k."""
    if abs(z) < 1e-300:
        raise ZeroArgument("transfer matrix needs z != 0")
    if k not in data:
        raise OutOfWindow(f"site {k} outside window")
    al = data.alpha_at(k)
    ri, rti = data.rho_inv(k), data.rhot_inv(k)
    if k % 2:
        return np.block([[rti @ al, z * rti], [ri / z, ri @ al.conj().T]])
    return np.block([[ri @ al.conj().T, ri], [rti, rti @ al]])


def transfer_inverse(data: VerblunskyData, z: complex, k: int) -> np.ndarray:
    if abs(z) < 1e-300:
        raise ZeroArgument("transfer matrix needs z != 0")
    if k not in data:
        raise OutOfWindow(f"site {k} outside window")
    al = data.alpha_at(k)
    ri, rti = data.rho_inv(k), data.rhot_inv(k)
    if k % 2:
        return np.block([[-ri @ al.conj().T, z * ri], [rti / z, -rti @ al]])
    return np.block([[-rti @ al, rti], [ri, -ri @ al.conj().T]])


def step_up(data: VerblunskyData, k: int, P: LaurentPoly, R: LaurentPoly):
    """(P, R) at site k-1 -> (P, R) at site k."""
    al = data.alpha_at(k)
    ri, rti = data.rho_inv(k), data.rhot_inv(k)
    if k % 2:
        return (P.lmul(rti @ al) + R.shift(1).lmul(rti), P.shift(-1).lmul(ri) + R.lmul(ri @ al.conj().T))
    return (P.lmul(ri @ al.conj().T) + R.lmul(ri), P.lmul(rti) + R.lmul(rti @ al))


def step_down(data: VerblunskyData, k: int, P: LaurentPoly, R: LaurentPoly):
    """(P, R) at site k -> (P, R) at site k-1."""
    al = data.alpha_at(k)
    ri, rti = data.rho_inv(k), data.rhot_inv(k)
    if k % 2:
        return (R.shift(1).lmul(ri) - P.lmul(ri @ al.conj().T), P.shift(-1).lmul(rti) - R.lmul(rti @ al))
    return (R.lmul(rti) - P.lmul(rti @ al), P.lmul(ri) - R.lmul(ri @ al.conj().T))


# -- solution families -----------------------------------------------------------

_PAIR_OF = {"P": ("P", "R"), "R": ("P", "R"), "Q": ("Q", "S"), "S": ("Q", "S")}


def initial_pair(m: int, k0: int, side: str, first_kind: bool):
    """Initial values at k0: (P, R) if ``first_kind`` else (Q, S)."""
    eye = np.eye(m, dtype=np.complex128)
    I0 = const(eye)
    Iz = LaurentPoly.monomial(1, eye)
    odd = k0 % 2 == 1
    if side == "plus":
        if odd:
            return (Iz, I0) if first_kind else (Iz, -I0)
        return (I0, I0) if first_kind else (-I0, I0)
    if side == "minus":
        if odd:
            return (I0, -I0) if first_kind else (I0, I0)
        return (-Iz, I0) if first_kind else (Iz, I0)
    raise ValueError(f"side must be 'plus' or 'minus', not {side!r}")


def solve_pairs(data: VerblunskyData, k0: int, init, k_lo: int, k_hi: int) -> dict[int, tuple]:
    """Propagate a solution pair given at k0 to every site of [k_lo, k_hi]."""
    if k_lo > k0 or k_hi < k0:
        raise OutOfWindow("range must contain k0")
    if k_hi > data.k_max or k_lo < data.k_min:
        raise OutOfWindow(f"[{k_lo}, {k_hi}] needs coefficients outside [{data.k_min}, {data.k_max}]")
    out = {k0: tuple(init)}
    P, R = init
    for k in range(k0 + 1, k_hi + 1):
        P, R = step_up(data, k, P, R)
        out[k] = (P, R)
    P, R = init
    for k in range(k0, k_lo, -1):
        P, R = step_down(data, k, P, R)
        out[k - 1] = (P, R)
    return out


@dataclass(frozen=True)
class SolutionFamily:
    """One of P, Q, R, S on the requested site range, with its partner kept alongside."""

    k0: int
    side: str
    kind: str
    polys: dict
    partner: dict

    @property
    def m(self) -> int:
        return next(iter(self.polys.values())).shape[0]

    @property
    def ks(self) -> list[int]:
        return sorted(self.polys)

    def __getitem__(self, k: int) -> LaurentPoly:
        if k not in self.polys:
            raise OutOfWindow(f"site {k} not in family range")
        return self.polys[k]

    def modified(self, k: int) -> LaurentPoly:
        """The tilde variant: P/z or -P/z depending on side and parity of k0 (P and Q only)."""
        if self.kind not in ("P", "Q"):
            return self[k]
        odd = self.k0 % 2 == 1
        if self.side == "plus":
            return self[k].shift(-1) if odd else self[k]
        return self[k] if odd else -self[k].shift(-1)


def family_range(data: VerblunskyData, k0: int, side: str, depth: int) -> tuple[int, int]:
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    lo, hi = (k0, k0 + depth) if side == "plus" else (k0 - depth, k0)
    if lo < data.k_min or hi > data.k_max:
        raise OutOfWindow(f"family [{lo}, {hi}] exceeds window [{data.k_min}, {data.k_max}]")
    return lo, hi


def family_over(data: VerblunskyData, k0: int, side: str, kind: str, k_lo: int, k_hi: int) -> SolutionFamily:
    names = _PAIR_OF[kind]
    pairs = solve_pairs(data, k0, initial_pair(data.m, k0, side, names[0] == "P"), k_lo, k_hi)
    first = {k: v[0] for k, v in pairs.items()}
    second = {k: v[1] for k, v in pairs.items()}
    if kind == names[0]:
        return SolutionFamily(k0, side, kind, first, second)
    return SolutionFamily(k0, side, kind, second, first)


def generate_family(data: VerblunskyData, k0: int, side: str, kind: str, depth: int) -> SolutionFamily:
    """P, Q, R or S for the given side on [k0, k0+depth] (plus) or [k0-depth, k0] (minus)."""
    if kind not in _PAIR_OF:
        raise ValueError(f"kind must be one of P, Q, R, S, not {kind!r}")
    lo, hi = family_range(data, k0, side, depth)
    return family_over(data, k0, side, kind, lo, hi)


# -- leading-order schedule ------------------------------------------------------


def _schedule_a(j: int) -> int:
    return -(j + 1) // 2 if j % 2 else j // 2


def _schedule_b(j: int) -> int:
    return (j + 1) // 2 if j % 2 else -j // 2


def leading_exponent(side: str, kind: str, k0: int, k: int) -> int:
    """Exponent of the leading-order term of the family member at site k."""
    j = abs(k - k0)
    odd = k0 % 2 == 1
    # (side, kind) -> (uses schedule A?, extra power of z) for k0 odd / even
    table_odd = {
        ("plus", "P"): (True, 1), ("plus", "Q"): (True, 1), ("plus", "R"): (False, 0), ("plus", "S"): (False, 0),
        ("minus", "P"): (False, 0), ("minus", "Q"): (False, 0), ("minus", "R"): (True, 0), ("minus", "S"): (True, 0),
    }
    table_even = {
        ("plus", "P"): (False, 0), ("plus", "Q"): (False, 0), ("plus", "R"): (True, 0), ("plus", "S"): (True, 0),
        ("minus", "P"): (True, 1), ("minus", "Q"): (True, 1), ("minus", "R"): (False, 0), ("minus", "S"): (False, 0),
    }
    use_a, extra = (table_odd if odd else table_even)[(side, kind)]
    return (_schedule_a(j) if use_a else _schedule_b(j)) + extra


def leading_sign(side: str, kind: str, k0: int, e: int) -> int:
    """Sign of the leading monomial in the free case (the Gram-Schmidt normalization)."""
    if kind not in ("P", "R"):
        raise ValueError("signs are tabulated for P and R only")
    if side == "plus":
        return 1
    odd = k0 % 2 == 1
    if kind == "P":
        return -1 if e > 0 else 1
    return -1 if (e >= 0 if odd else e > 0) else 1


def leading_term(fam: SolutionFamily, k: int) -> tuple[int, np.ndarray, bool]:
    """(exponent, coefficient, invertible?) of the leading-order term at site k."""
    e = leading_exponent(fam.side, fam.kind, fam.k0, k)
    C = fam[k].coeff(e)
    if fro(C) < 1e-14:
        raise MissingLeadingTerm(f"coefficient of z^{e} vanishes at site {k}")
    return e, C, condition_number(C) < COND_MAX


# -- connection between left and right families ------------------------------------


def connection_coefficients(z_shift_parity: int):
    """Scalar Laurent coefficients (c, d) as (lo, [coeffs]) for k0 odd (1) or even (0)."""
    if z_shift_parity % 2:
        return LaurentPolyScalar(-1, [0.5, -0.5]), LaurentPolyScalar(-1, [0.5, 0.5])
    return LaurentPolyScalar(0, [0.5, -0.5]), LaurentPolyScalar(0, [0.5, 0.5])


@dataclass(frozen=True)
class LaurentPolyScalar:
    lo: int
    coeffs: list

    def times(self, F: LaurentPoly) -> LaurentPoly:
        out = LaurentPoly(0, np.zeros((0,) + F.shape))
        for i, c in enumerate(self.coeffs):
            if c:
                out = out + F.shift(self.lo + i) * c
        return out


def connect_left_right(data: VerblunskyData, k0: int, fams: Mapping[str, SolutionFamily]):
    """Express the minus families anchored at k0-1 and at k0 through the plus families.

    ``fams`` maps "P", "Q", "R", "S" to plus families anchored at k0 over a common
    site range. Returns ``{"k0-1": {...}, "k0": {...}}`` with the four minus
    families (as dicts site -> LaurentPoly).
    """
    kinds = ("P", "Q", "R", "S")
    if any(fams[k].side != "plus" or fams[k].k0 != k0 for k in kinds):
        raise DepthMismatch("need the four plus families anchored at k0")
    ks = fams["P"].ks
    if any(fams[k].ks != ks for k in kinds):
        raise DepthMismatch("families must cover a common range")
    ri, rti = data.rho_inv(k0), data.rhot_inv(k0)
    a, b = data.a(k0), data.b(k0)
    X1 = (rti @ b - ri @ b.conj().T) / 2
    X2 = (rti @ b + ri @ b.conj().T) / 2
    Y1 = (rti @ a + ri @ a.conj().T) / 2
    Y2 = (rti @ a - ri @ a.conj().T) / 2
    prev = {"P": {}, "R": {}, "Q": {}, "S": {}}
    here = {"P": {}, "R": {}, "Q": {}, "S": {}}
    c, d = connection_coefficients(k0 % 2)
    for k in ks:
        P, Q, R, S = (fams[x][k] for x in kinds)
        prev["P"][k] = P.rmul(X1) + Q.rmul(X2)
        prev["R"][k] = R.rmul(X1) + S.rmul(X2)
        prev["Q"][k] = P.rmul(Y1) + Q.rmul(Y2)
        prev["S"][k] = R.rmul(Y1) + S.rmul(Y2)
        here["P"][k] = c.times(P) + d.times(Q)
        here["R"][k] = c.times(R) + d.times(S)
        here["Q"][k] = d.times(P) + c.times(Q)
        here["S"][k] = d.times(R) + c.times(S)
    return {"k0-1": prev, "k0": here}


# -- full-lattice basis -------------------------------------------------------------


def full_lattice_basis(data: VerblunskyData, k0: int, depth: int) -> dict[int, LaurentPoly]:
    """m x 2m polynomials P(z, k, k0) on [k0-depth, k0+depth] with P(k0-1) = (I, 0), P(k0) = (0, I)."""
    lo, hi = k0 - depth, k0 + depth
    if lo < data.k_min or hi > data.k_max:
        raise OutOfWindow(f"[{lo}, {hi}] exceeds window")
    P = family_over(data, k0, "plus", "P", lo, hi)
    Q = family_over(data, k0, "plus", "Q", lo, hi)
    a, b = data.a(k0), data.b(k0)
    if k0 % 2:
        r = data.rho(k0)
        mix_p = (LaurentPoly.monomial(-1, r / 2), LaurentPoly.monomial(-1, a.conj().T / 2))
        mix_q = (LaurentPoly.monomial(-1, -r / 2), LaurentPoly.monomial(-1, b.conj().T / 2))
    else:
        rt = data.rhot(k0)
        mix_p = (const(rt / 2), const(a / 2))
        mix_q = (const(rt / 2), const(-b / 2))
    out = {}
    for k in range(lo, hi + 1):
        left = P[k].matmul(mix_p[0]) + Q[k].matmul(mix_q[0])
        right = P[k].matmul(mix_p[1]) + Q[k].matmul(mix_q[1])
        out[k] = hstack(left, right)
    return out


def hstack(A: LaurentPoly, B: LaurentPoly) -> LaurentPoly:
    r, s1 = A.shape
    s2 = B.shape[1]
    if A.is_zero() and B.is_zero():
        return LaurentPoly(0, np.zeros((0, r, s1 + s2)))
    lo = min(x.lo for x in (A, B) if not x.is_zero())
    hi = max(x.hi for x in (A, B) if not x.is_zero())
    c = np.zeros((hi - lo + 1, r, s1 + s2), dtype=np.complex128)
    if not A.is_zero():
        c[A.lo - lo : A.hi - lo + 1, :, :s1] = A.c
    if not B.is_zero():
        c[B.lo - lo : B.hi - lo + 1, :, s1:] = B.c
    return LaurentPoly(lo, c)
