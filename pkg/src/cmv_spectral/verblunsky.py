"""Verblunsky coefficient windows, derived blocks and finite CMV truncations.

Lattice sites are integers. The block Theta_k acts on the site pair (k-1, k);
V collects the blocks with even k and W those with odd k, so U = V W.
A finite operator on sites [lo, hi] uses Theta_lo restricted to site lo and
Theta_{hi+1} restricted to site hi. Closing a boundary ("split") sets the
corresponding coefficient to the identity, which decouples the window from the
rest of the lattice and makes the truncation exactly unitary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import MissingAlpha, NormTooLarge, OutOfWindow, ShapeMismatch, WindowTooSmall
from .linalg import as_matrix, fro, herm_sqrt_pair, op_norm

NORM_CAP = 1.0 - 1e-8


@dataclass(frozen=True)
class SiteBlocks:
    """Derived quantities at one lattice site."""

    alpha: np.ndarray
    rho: np.ndarray
    rhot: np.ndarray
    rho_inv: np.ndarray | None
    rhot_inv: np.ndarray | None

    @property
    def a(self) -> np.ndarray:
        return np.eye(self.alpha.shape[0]) + self.alpha

    @property
    def b(self) -> np.ndarray:
        return np.eye(self.alpha.shape[0]) - self.alpha

    @property
    def theta(self) -> np.ndarray:
        al = self.alpha
        return np.block([[-al, self.rhot], [self.rho, al.conj().T]])


def _site_blocks(alpha: np.ndarray, split: bool) -> SiteBlocks:
    m = alpha.shape[0]
    eye = np.eye(m, dtype=np.complex128)
    if split:
        zero = np.zeros((m, m), dtype=np.complex128)
        return SiteBlocks(alpha, zero, zero, None, None)
    rho, rho_inv = herm_sqrt_pair(eye - alpha.conj().T @ alpha)
    rhot, rhot_inv = herm_sqrt_pair(eye - alpha @ alpha.conj().T)
    return SiteBlocks(alpha, rho, rhot, rho_inv, rhot_inv)


@dataclass(frozen=True)
class VerblunskyData:
    """A window alpha_{k_min..k_max} of m x m coefficients with derived blocks."""

    k_min: int
    k_max: int
    m: int
    alpha: Mapping[int, np.ndarray]
    split_sites: frozenset = field(default_factory=frozenset)
    _blocks: Mapping[int, SiteBlocks] = field(default_factory=dict, repr=False, compare=False)

    def __contains__(self, k: int) -> bool:
        return self.k_min <= k <= self.k_max

    @property
    def sites(self) -> range:
        return range(self.k_min, self.k_max + 1)

    def _site(self, k: int) -> SiteBlocks:
        if k not in self:
            raise MissingAlpha(f"alpha_{k} outside window [{self.k_min}, {self.k_max}]")
        return self._blocks[k]

    def alpha_at(self, k: int) -> np.ndarray:
        return self._site(k).alpha

    def rho(self, k: int) -> np.ndarray:
        return self._site(k).rho

    def rhot(self, k: int) -> np.ndarray:
        return self._site(k).rhot

    def rho_inv(self, k: int) -> np.ndarray:
        s = self._site(k)
        if s.rho_inv is None:
            raise MissingAlpha(f"rho_{k}^-1 undefined at split site {k}")
        return s.rho_inv

    def rhot_inv(self, k: int) -> np.ndarray:
        s = self._site(k)
        if s.rhot_inv is None:
            raise MissingAlpha(f"rhot_{k}^-1 undefined at split site {k}")
        return s.rhot_inv

    def a(self, k: int) -> np.ndarray:
        return self._site(k).a

    def b(self, k: int) -> np.ndarray:
        return self._site(k).b

    def theta(self, k: int) -> np.ndarray:
        return self._site(k).theta

    def alphas(self) -> list[np.ndarray]:
        return [self.alpha[k] for k in self.sites]

    def restrict(self, lo: int, hi: int) -> "VerblunskyData":
        if lo < self.k_min or hi > self.k_max or lo > hi:
            raise OutOfWindow(f"[{lo}, {hi}] not inside [{self.k_min}, {self.k_max}]")
        return derive({k: self.alpha[k] for k in range(lo, hi + 1)}, split_sites=self.split_sites & set(range(lo, hi + 1)))

    def replace(self, updates: Mapping[int, np.ndarray], split_sites: Iterable[int] = ()) -> "VerblunskyData":
        """New window with some coefficients replaced (and optionally flagged as split points)."""
        new = dict(self.alpha)
        for k, v in updates.items():
            if k not in self:
                raise OutOfWindow(f"site {k} outside window")
            new[k] = v
        flagged = (self.split_sites - set(updates)) | set(split_sites)
        return derive(new, split_sites=flagged)


def derive(alpha_window, split_sites: Iterable[int] = (), k_min: int | None = None) -> VerblunskyData:
    """Validate a coefficient window and compute rho, rho-tilde, a, b, Theta at every site.

    ``alpha_window`` is either a mapping k -> matrix over a contiguous range or a
    sequence (then ``k_min`` gives the first index).
    """
    if not isinstance(alpha_window, Mapping):
        start = 0 if k_min is None else int(k_min)
        alpha_window = {start + i: a for i, a in enumerate(alpha_window)}
    if not alpha_window:
        raise WindowTooSmall("empty coefficient window")
    keys = sorted(int(k) for k in alpha_window)
    if keys != list(range(keys[0], keys[-1] + 1)):
        raise ShapeMismatch("coefficient window must be contiguous")
    splits = frozenset(int(k) for k in split_sites)
    mats = {}
    m = None
    for k in keys:
        A = as_matrix(alpha_window[k], square=True)
        if m is None:
            m = A.shape[0]
        elif A.shape[0] != m:
            raise ShapeMismatch(f"alpha_{k} has order {A.shape[0]}, expected {m}")
        mats[k] = A.copy()
        mats[k].setflags(write=False)
    blocks = {}
    for k in keys:
        A = mats[k]
        if k in splits:
            if fro(A - np.eye(m)) > 1e-12:
                raise ShapeMismatch(f"split site {k} must carry the identity")
            blocks[k] = _site_blocks(A, True)
            continue
        nrm = op_norm(A)
        if nrm >= NORM_CAP:
            raise NormTooLarge(k, nrm)
        blocks[k] = _site_blocks(A, False)
    return VerblunskyData(keys[0], keys[-1], m, mats, splits, blocks)


def identity_residuals(data: VerblunskyData) -> dict[int, float]:
    """Worst residual of the intertwining and a/b identities at every non-split site."""
    out = {}
    m = data.m
    eye = np.eye(m)
    for k in data.sites:
        if k in data.split_sites:
            continue
        al, r, rt = data.alpha_at(k), data.rho(k), data.rhot(k)
        ri, rti = data.rho_inv(k), data.rhot_inv(k)
        a, b = data.a(k), data.b(k)
        res = [
            fro(rt @ al - al @ r),
            fro(rti @ al - al @ ri),
            fro(a.conj().T @ rti @ rti @ a - a @ ri @ ri @ a.conj().T),
            fro(a.conj().T @ rti @ rti @ b + a @ ri @ ri @ b.conj().T - 2 * eye),
            fro(data.theta(k).conj().T @ data.theta(k) - np.eye(2 * m)),
        ]
        out[k] = max(res)
    return out


@dataclass(frozen=True)
class CMVOperator:
    """Dense finite CMV matrix on sites [offset, offset + n_sites - 1]."""

    data: VerblunskyData
    offset: int
    n_sites: int
    U: np.ndarray
    V: np.ndarray
    W: np.ndarray
    split_left: bool
    split_right: bool

    @property
    def m(self) -> int:
        return self.data.m

    @property
    def sites(self) -> range:
        return range(self.offset, self.offset + self.n_sites)

    def block_slice(self, k: int) -> slice:
        if k not in self.sites:
            raise OutOfWindow(f"site {k} outside operator sites [{self.sites.start}, {self.sites.stop - 1}]")
        i = (k - self.offset) * self.m
        return slice(i, i + self.m)

    def block(self, M: np.ndarray, k: int, kp: int) -> np.ndarray:
        return M[self.block_slice(k), self.block_slice(kp)]

    def unitarity_residual(self) -> float:
        """Frobenius norm of U*U - I (an upper bound for the operator norm)."""
        return fro(self.U.conj().T @ self.U - np.eye(self.U.shape[0]))

    def factor_residual(self) -> float:
        return fro(self.U - self.V @ self.W)

    def band_violation(self) -> float:
        """Largest |entry| of U lying more than two blocks off the diagonal."""
        n, m = self.n_sites, self.m
        worst = 0.0
        for i in range(n):
            for j in range(n):
                if abs(i - j) > 2:
                    worst = max(worst, float(np.abs(self.U[i * m : (i + 1) * m, j * m : (j + 1) * m]).max()))
        return worst


def _boundary_alpha(data: VerblunskyData, k: int, split: bool) -> np.ndarray:
    if split:
        return np.eye(data.m, dtype=np.complex128)
    if k in data:
        return data.alpha_at(k)
    return np.zeros((data.m, data.m), dtype=np.complex128)


def build_cmv(data: VerblunskyData, split_left: bool = True, split_right: bool = True) -> CMVOperator:
    """Finite CMV truncation on the sites of ``data``.

    With ``split_left`` the first coefficient is replaced by I; with
    ``split_right`` a virtual identity coefficient closes the right edge.
    Without splits the blocks are simply cut (the right virtual coefficient
    is taken as zero) and the matrix is not unitary.
    """
    n = data.k_max - data.k_min + 1
    if n < 2:
        raise WindowTooSmall(f"window of {n} site(s); need at least 2")
    m = data.m
    N = n * m
    V = np.zeros((N, N), dtype=np.complex128)
    W = np.zeros((N, N), dtype=np.complex128)
    for k in range(data.k_min, data.k_max + 2):
        target = V if k % 2 == 0 else W
        if k == data.k_min:
            # only the (k, k) corner of Theta_k lies inside the window
            al = _boundary_alpha(data, k, split_left)
            target[0:m, 0:m] = al.conj().T
            continue
        if k == data.k_max + 1:
            al = _boundary_alpha(data, k, split_right)
            i = (n - 1) * m
            target[i : i + m, i : i + m] = -al
            continue
        i = (k - 1 - data.k_min) * m
        target[i : i + 2 * m, i : i + 2 * m] = data.theta(k)
    U = V @ W
    return CMVOperator(data, data.k_min, n, U, V, W, split_left, split_right)


def half_lattice(data: VerblunskyData, k0: int, side: str) -> CMVOperator:
    """Truncated half-lattice operator U_{+,k0} (sites [k0, k_max]) or U_{-,k0} (sites [k_min, k0])."""
    if side not in ("plus", "minus"):
        raise ValueError(f"side must be 'plus' or 'minus', not {side!r}")
    if k0 not in data:
        raise OutOfWindow(f"k0={k0} outside window [{data.k_min}, {data.k_max}]")
    if side == "plus":
        if k0 + 1 > data.k_max:
            raise OutOfWindow(f"no room to the right of k0={k0}")
        sub = data.restrict(k0, data.k_max)
    else:
        if k0 - 1 < data.k_min:
            raise OutOfWindow(f"no room to the left of k0={k0}")
        sub = data.restrict(data.k_min, k0)
    return build_cmv(sub, True, True)


def from_alphas(alphas, k_min: int = 0) -> VerblunskyData:
    return derive(list(alphas), k_min=k_min)


def constant(alpha, k_min: int, k_max: int) -> VerblunskyData:
    A = as_matrix(alpha, square=True)
    return derive({k: A for k in range(k_min, k_max + 1)})


def free(m: int, k_min: int, k_max: int) -> VerblunskyData:
    return constant(np.zeros((m, m)), k_min, k_max)


def random_data(m: int, k_min: int, k_max: int, norm_cap: float, rng: np.random.Generator) -> VerblunskyData:
    """Random coefficients, each rescaled to an operator norm uniform in (0, norm_cap]."""
    out = {}
    for k in range(k_min, k_max + 1):
        X = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        target = norm_cap * (1.0 - rng.random())
        out[k] = X * (target / op_norm(X))
    return derive(out)
