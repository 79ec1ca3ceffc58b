"""Atomic matrix spectral measures of CMV truncations and the moment-level inverse step.

Measures of finite truncations are exact finite sums. Gram-Schmidt works on
the block Toeplitz moment functional, so the same code serves measures given
by atoms and measures known only through finitely many moments (for example,
read off Taylor coefficients of m-functions).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMeasure, DepthMismatch, NodeCollision
from .laurent import (
    LaurentPoly,
    SolutionFamily,
    const,
    initial_pair,
    leading_exponent,
    leading_sign,
)
from .linalg import fro, herm_eigen, op_norm, unitary_eigen
from .verblunsky import CMVOperator

MERGE_TOL = 1e-12
DROP_TOL = 1e-14
GRAM_FLOOR = 1e-12


@dataclass(frozen=True)
class SpectralMeasure:
    """Atoms (node on the unit circle, PSD matrix weight)."""

    m: int
    nodes: np.ndarray
    weights: np.ndarray

    def total(self) -> np.ndarray:
        return self.weights.sum(axis=0)

    def moment(self, j: int) -> np.ndarray:
        """Integral of zeta^j against the measure (any integer j)."""
        return np.einsum("a,aij->ij", self.nodes**j, self.weights)

    def moments(self, k_max: int) -> list[np.ndarray]:
        return [self.moment(j) for j in range(k_max + 1)]

    def integrate(self, F, G=None) -> np.ndarray:
        """sum_a F(zeta_a) W_a G(zeta_a)^*, with G = identity when omitted."""
        out = None
        for z, Wt in zip(self.nodes, self.weights):
            left = F(z) @ Wt
            term = left if G is None else left @ G(z).conj().T
            out = term if out is None else out + term
        return out

    def rank(self) -> int:
        return int(sum(np.sum(np.linalg.eigvalsh(Wt) > 1e-10) for Wt in self.weights))

    def weights_psd_residual(self) -> float:
        worst = 0.0
        for Wt in self.weights:
            worst = max(worst, fro(Wt - Wt.conj().T))
            worst = max(worst, -min(0.0, float(herm_eigen(0.5 * (Wt + Wt.conj().T), tol=1e-6).values[0])))
        return worst


BlockSpectralMeasure = SpectralMeasure


def _merge(nodes: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    keep = np.array([fro(Wt) >= DROP_TOL for Wt in weights], dtype=bool)
    nodes, weights = nodes[keep], weights[keep]
    order = np.argsort(np.angle(nodes), kind="stable")
    nodes, weights = nodes[order], weights[order]
    out_n, out_w = [], []
    for z, Wt in zip(nodes, weights):
        if out_n and abs(z - out_n[-1]) < MERGE_TOL:
            out_w[-1] = out_w[-1] + Wt
        else:
            out_n.append(z)
            out_w.append(Wt.copy())
    if len(out_n) > 1 and abs(out_n[0] - out_n[-1]) < MERGE_TOL:
        out_w[0] = out_w[0] + out_w.pop()
        out_n.pop()
    return np.array(out_n), np.array(out_w)


def _measure_rows(op: CMVOperator, rows: slice, m_out: int) -> SpectralMeasure:
    eig = unitary_eigen(op.U)
    X = eig.vectors[rows, :]
    weights = np.einsum("ia,ja->aij", X, X.conj())
    nodes, weights = _merge(eig.nodes, weights)
    return SpectralMeasure(m_out, nodes, weights)


def measure_from_operator(op: CMVOperator, k0: int) -> SpectralMeasure:
    """Spectral measure of ``op`` compressed to the block of site k0."""
    return _measure_rows(op, op.block_slice(k0), op.m)


def block_measure(op: CMVOperator, k0: int) -> SpectralMeasure:
    """2m x 2m measure compressed to the blocks of sites k0-1 and k0."""
    s0, s1 = op.block_slice(k0 - 1), op.block_slice(k0)
    return _measure_rows(op, slice(s0.start, s1.stop), 2 * op.m)


def moments(mu: SpectralMeasure, k_max: int) -> list[np.ndarray]:
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    return mu.moments(k_max)


# -- moment functional ---------------------------------------------------------


class MomentFunctional:
    """Block Toeplitz inner product <F, G> = sum_{a,b} F_a mu_{a-b} G_b^*.

    Moments are known for |j| <= order; negative ones are adjoints of positive ones.
    """

    def __init__(self, positive: list[np.ndarray]):
        self.order = len(positive) - 1
        self.m = positive[0].shape[0]
        self._mu = {0: np.asarray(positive[0], dtype=np.complex128)}
        for j in range(1, self.order + 1):
            Mj = np.asarray(positive[j], dtype=np.complex128)
            self._mu[j] = Mj
            self._mu[-j] = Mj.conj().T

    @classmethod
    def from_measure(cls, mu: SpectralMeasure, order: int) -> "MomentFunctional":
        return cls(mu.moments(order))

    def mu(self, j: int) -> np.ndarray:
        if abs(j) > self.order:
            raise DepthMismatch(f"moment of order {j} needed, only |j| <= {self.order} available")
        return self._mu[j]

    def ip(self, F: LaurentPoly, G: LaurentPoly) -> np.ndarray:
        out = np.zeros((F.shape[0], G.shape[0]), dtype=np.complex128)
        if F.is_zero() or G.is_zero():
            return out
        for i, Fa in enumerate(F.c):
            a = F.lo + i
            acc = np.zeros((F.shape[1], G.shape[0]), dtype=np.complex128)
            for jdx, Gb in enumerate(G.c):
                acc += self.mu(a - (G.lo + jdx)) @ Gb.conj().T
            out += Fa @ acc
        return out


# -- orthonormality ----------------------------------------------------------------


def atom_ip(mu: SpectralMeasure, F: LaurentPoly, G: LaurentPoly) -> np.ndarray:
    return mu.integrate(F, G)


def orthonormality_check(mu: SpectralMeasure, fam: SolutionFamily, depth: int | None = None) -> float:
    """Largest ||<F_k, F_k'> - delta I|| over the first depth+1 members of the family."""
    ks = fam.ks if fam.side == "plus" else fam.ks[::-1]
    if depth is not None:
        ks = ks[: depth + 1]
    eye = np.eye(fam.m)
    worst = 0.0
    for i, k in enumerate(ks):
        for kp in ks[i:]:
            G = atom_ip(mu, fam[k], fam[kp])
            worst = max(worst, op_norm(G - (eye if k == kp else 0)))
    return worst


# -- Gram-Schmidt ----------------------------------------------------------------


def _normalize(mf: MomentFunctional, r: LaurentPoly, degree: int):
    G = mf.ip(r, r)
    G = 0.5 * (G + G.conj().T)
    eig = herm_eigen(G, tol=1e-8)
    if eig.values[0] < GRAM_FLOOR:
        raise DegenerateMeasure(degree, f"min eigenvalue {eig.values[0]:.3e}")
    V = eig.vectors
    return (V / np.sqrt(eig.values)) @ V.conj().T, (V * np.sqrt(eig.values)) @ V.conj().T


def _orthogonalize(mf: MomentFunctional, x: LaurentPoly, basis: list[LaurentPoly]) -> LaurentPoly:
    r = x
    for _ in range(2):  # one extra pass restores orthogonality lost to rounding
        for p in basis:
            r = r - p.lmul(mf.ip(r, p))
    return r


def _sites(k0: int, side: str, depth: int) -> list[int]:
    return [k0 + j for j in range(depth + 1)] if side == "plus" else [k0 - j for j in range(depth + 1)]


def _as_functional(mu, depth: int) -> MomentFunctional:
    if isinstance(mu, MomentFunctional):
        return mu
    return MomentFunctional.from_measure(mu, 2 * depth + 4)


def _guard_depth(mu, depth: int) -> None:
    if isinstance(mu, SpectralMeasure):
        n_eff = mu.rank() // mu.m
        if 2 * depth > n_eff:
            raise DegenerateMeasure(depth, f"depth exceeds half of the effective support ({n_eff} sites)")


def gram_schmidt(mu, k0: int, side: str, kind: str, depth: int, gauge: str = "hermitian") -> SolutionFamily:
    """Orthonormal Laurent polynomials of the measure, one per site k0, k0+-1, ...

    ``gauge="hermitian"`` orthonormalizes the signed monomial schedule with a
    positive definite leading coefficient (times the schedule sign).
    ``gauge="recursion"`` orthonormalizes the transfer-recursion predecessors
    instead; for m > 1 this fixes the unitary freedom the same way the forward
    recursion does, which is what coefficient reconstruction needs.
    """
    if kind not in ("P", "R"):
        raise ValueError("Gram-Schmidt builds P or R families")
    if side not in ("plus", "minus"):
        raise ValueError(f"side must be 'plus' or 'minus', not {side!r}")
    _guard_depth(mu, depth)
    mf = _as_functional(mu, depth)
    m = mf.m
    sites = _sites(k0, side, depth)
    if gauge == "recursion":
        P, R = _recursion_gauge(mf, k0, side, depth)
        return SolutionFamily(k0, side, kind, P if kind == "P" else R, R if kind == "P" else P)
    if gauge != "hermitian":
        raise ValueError(f"unknown gauge {gauge!r}")
    eye = np.eye(m, dtype=np.complex128)
    basis: list[LaurentPoly] = []
    polys = {}
    for j, k in enumerate(sites):
        e = leading_exponent(side, kind, k0, k)
        x = LaurentPoly.monomial(e, leading_sign(side, kind, k0, e) * eye)
        r = _orthogonalize(mf, x, basis)
        inv_sqrt, _ = _normalize(mf, r, j)
        p = r.lmul(inv_sqrt)
        basis.append(p)
        polys[k] = p
    return SolutionFamily(k0, side, kind, polys, {})


def _recursion_gauge(mf: MomentFunctional, k0: int, side: str, depth: int):
    m = mf.m
    P0, R0 = initial_pair(m, k0, side, True)
    P, R = {k0: P0}, {k0: R0}
    bP, bR = [P0], [R0]
    prev = k0
    for j in range(1, depth + 1):
        k = k0 + j if side == "plus" else k0 - j
        t = k if side == "plus" else prev  # site whose transfer matrix links the two levels
        if t % 2:
            xP, xR = R[prev].shift(1), P[prev].shift(-1)
        else:
            xP, xR = R[prev], P[prev]
        rP = _orthogonalize(mf, xP, bP)
        rR = _orthogonalize(mf, xR, bR)
        P[k] = rP.lmul(_normalize(mf, rP, j)[0])
        R[k] = rR.lmul(_normalize(mf, rR, j)[0])
        bP.append(P[k])
        bR.append(R[k])
        prev = k
    return P, R


def reconstruct_alpha(mu, k0: int, side: str, depth: int) -> dict[int, np.ndarray]:
    """Recover alpha_{k0+1..k0+depth} (plus) or alpha_{k0-depth+1..k0} (minus) from the measure."""
    _guard_depth(mu, depth)
    mf = _as_functional(mu, depth)
    P, R = _recursion_gauge(mf, k0, side, depth)
    out = {}
    targets = range(k0 + 1, k0 + depth + 1) if side == "plus" else range(k0, k0 - depth, -1)
    for k in targets:
        lvl = k - 1
        if k % 2:
            out[k] = -mf.ip(R[lvl].shift(1), P[lvl])
        else:
            out[k] = -mf.ip(P[lvl], R[lvl])
    return out


# -- second-kind polynomials ----------------------------------------------------------


def second_kind_from_measure(mu: SpectralMeasure, fam: SolutionFamily, z: complex, k: int) -> np.ndarray:
    """+-sum_a (zeta_a + z)/(zeta_a - z) (F(zeta_a) - F(z)) W_a with F the modified P or R member."""
    if fam.kind not in ("P", "R"):
        raise ValueError("family must be of kind P or R")
    if z == 0 or abs(abs(z) - 1.0) < 1e-14:
        raise NodeCollision("z must be nonzero and off the unit circle")
    if np.min(np.abs(mu.nodes - z)) < 1e-12:
        raise NodeCollision(f"z = {z} collides with an atom")
    F = fam.modified(k)
    Fz = F(z)
    sign = 1.0 if fam.side == "plus" else -1.0
    out = np.zeros((fam.m, fam.m), dtype=np.complex128)
    for zeta, Wt in zip(mu.nodes, mu.weights):
        out += (zeta + z) / (zeta - z) * (F(zeta) - Fz) @ Wt
    return sign * out


def block_orthonormality_check(mu: SpectralMeasure, basis: dict[int, LaurentPoly]) -> float:
    """Largest ||<P_k, P_k'> - delta I|| for the m x 2m full-lattice basis."""
    ks = sorted(basis)
    m = basis[ks[0]].shape[0]
    worst = 0.0
    for i, k in enumerate(ks):
        for kp in ks[i:]:
            G = atom_ip(mu, basis[k], basis[kp])
            worst = max(worst, op_norm(G - (np.eye(m) if k == kp else 0)))
    return worst


def total_mass_residual(mu: SpectralMeasure) -> float:
    return fro(mu.total() - np.eye(mu.m))


def identity_measure(m: int) -> SpectralMeasure:
    """Point mass I at zeta = 1."""
    return SpectralMeasure(m, np.array([1.0 + 0j]), np.eye(m, dtype=np.complex128)[None])


__all__ = [
    "BlockSpectralMeasure",
    "MomentFunctional",
    "SpectralMeasure",
    "block_measure",
    "block_orthonormality_check",
    "const",
    "gram_schmidt",
    "identity_measure",
    "measure_from_operator",
    "moments",
    "orthonormality_check",
    "reconstruct_alpha",
    "second_kind_from_measure",
    "total_mass_residual",
]


