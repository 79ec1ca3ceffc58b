"""Reconstruction of Verblunsky coefficients from spectral and Green's data.

Half-lattice data of any kind is first turned into moments of the spectral
measure, then Gram-Schmidt and the inner-product formulas give the
coefficients. Full-lattice Green's data is turned into the two half-lattice
Weyl functions first: directly through M_+/- (g and h), or through a
Riccati equation for Phi_+ (two diagonal entries g plus alpha_{k0}).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AlphaNotInvertible,
    ContractionViolated,
    DepthMismatch,
    HNotInvertible,
    HypothesisViolated,
    NoConvergence,
    SeriesOrderSolveFailed,
    WindowTooNarrow,
)
from .greens import GreensData, greens_series, locality_radius
from .linalg import COND_MAX, condition_number, herm_sqrt_pair, inv, op_norm, rsolve, solve
from .series import MatrixPowerSeries
from .spectral import MomentFunctional, SpectralMeasure, reconstruct_alpha
from .verblunsky import VerblunskyData, _site_blocks
from .weyl import WeylFunction, convert

DEFAULT_TOL = 1e-10


# -- Riccati fixed point --------------------------------------------------------------


@dataclass(frozen=True)
class RiccatiProblem:
    """X A X + B X + X C + D = 0."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    mode: str = "B_invertible"

    def __post_init__(self):
        if self.mode not in ("B_invertible", "C_invertible"):
            raise ValueError(f"unknown mode {self.mode!r}")

    def residual(self, X: np.ndarray) -> np.ndarray:
        return X @ self.A @ X + self.B @ X + X @ self.C + self.D

    def _norms(self):
        inv_side = self.B if self.mode == "B_invertible" else self.C
        other = self.C if self.mode == "B_invertible" else self.B
        if condition_number(inv_side) >= COND_MAX:
            raise ContractionViolated(f"{'B' if self.mode == 'B_invertible' else 'C'} is not invertible")
        return op_norm(self.A), op_norm(inv(inv_side)), op_norm(other), op_norm(self.D)

    def contraction_margin(self) -> float:
        """1 - [2 sqrt(|A||D|) + |C|] |B^{-1}| (or the C-mode analogue); positive when the fixed-point iteration contracts."""
        a, binv, c, d = self._norms()
        return 1.0 - (2 * np.sqrt(a * d) + c) * binv

    def radius(self) -> float:
        a, binv, c, _ = self._norms()
        return (1 - c * binv) / (2 * a * binv)

    def norm_bound(self) -> float:
        a, binv, c, d = self._norms()
        r = (1 - c * binv) / (2 * a * binv)
        return r - np.sqrt(max(r * r - d / a, 0.0))


def riccati_solve(p: RiccatiProblem, tol: float = DEFAULT_TOL, max_iter: int = 10_000, info: bool = False):
    """Fixed-point iteration from X = 0; returns X (and a diagnostics dict with ``info``)."""
    if op_norm(p.A) == 0:
        raise ContractionViolated("A must be nonzero")
    margin = p.contraction_margin()
    if not margin > 0:
        raise ContractionViolated(f"contraction condition fails (margin {margin:.3e})")
    bound = p.norm_bound()
    X = np.zeros_like(np.asarray(p.D, dtype=np.complex128))
    if p.mode == "B_invertible":
        Binv = inv(p.B)

        def step(X):
            return -Binv @ (X @ p.A @ X + X @ p.C + p.D)

    else:
        Cinv = inv(p.C)

        def step(X):
            return -(X @ p.A @ X + p.B @ X + p.D) @ Cinv

    max_norm = 0.0
    for it in range(1, max_iter + 1):
        Xn = step(X)
        max_norm = max(max_norm, op_norm(Xn))
        if op_norm(Xn - X) < tol:
            X = Xn
            break
        X = Xn
    else:
        raise NoConvergence(f"no convergence in {max_iter} iterations")
    if not info:
        return X
    scale = max(1.0, op_norm(p.D), op_norm(p.B) * op_norm(X))
    return X, {
        "iterations": it,
        "bound": bound,
        "max_iterate_norm": max_norm,
        "residual": op_norm(p.residual(X)),
        "residual_ok": op_norm(p.residual(X)) < 10 * tol * scale,
        "margin": margin,
    }


def perturbation_lambda(a: float, b: float) -> float:
    if not (a > 0 and b > 0) or 2 * a * b * (1 + 2 * a * a) > 1:
        raise HypothesisViolated(f"need a, b > 0 with 2ab(1 + 2a^2) <= 1 (a={a}, b={b})")
    q = 1 - a * b
    num = max(a, 2 * a * a * b / q, a * a * b + 2 * a**3 * b * b / q + 4 * a**5 * b * b / q**2, 4 * a**3 * b * b / q**2)
    return num / (q - 4 * a**3 * b / q)


def riccati_perturbation_bound(p1: RiccatiProblem, p2: RiccatiProblem, a: float, b: float) -> float:
    """lambda(a, b) times the summed coefficient differences, after checking the hypotheses."""
    if p1.mode != p2.mode:
        raise HypothesisViolated("both problems must use the same invertibility mode")
    lam = perturbation_lambda(a, b)
    for p in (p1, p2):
        A_n = op_norm(p.A)
        if p.mode == "B_invertible":
            inv_n, small = op_norm(inv(p.B)), (op_norm(p.C), op_norm(p.D))
        else:
            inv_n, small = op_norm(inv(p.C)), (op_norm(p.B), op_norm(p.D))
        if not (0 < A_n <= a and inv_n <= a and max(small) <= b):
            raise HypothesisViolated("coefficient norms exceed the stated a, b")
    diff = sum(op_norm(getattr(p1, n) - getattr(p2, n)) for n in "ABCD")
    return lam * diff


# -- reports ---------------------------------------------------------------------------


@dataclass
class ReconstructionReport:
    recovered: dict
    window: tuple
    route: str
    reference: dict | None = None
    errors: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)

    def compare(self, reference) -> "ReconstructionReport":
        ref = {k: reference.alpha_at(k) for k in self.recovered if k in reference} if isinstance(reference, VerblunskyData) else dict(reference)
        self.reference = ref
        self.errors = {k: op_norm(self.recovered[k] - ref[k]) for k in self.recovered if k in ref}
        return self

    @property
    def max_error(self) -> float:
        lo, hi = self.window
        inside = [e for k, e in self.errors.items() if lo <= k <= hi]
        return max(inside) if inside else 0.0


# -- half-lattice inversion ---------------------------------------------------------------

RIGHT_KINDS = ("measure_plus", "moments_plus", "m_plus", "M_plus", "Phi_plus")
LEFT_KINDS = ("measure_minus", "moments_minus", "m_minus", "M_minus", "Phi_minus_inv")


def _series_of(payload) -> MatrixPowerSeries:
    if isinstance(payload, WeylFunction):
        if payload.series is None:
            raise DepthMismatch("Weyl function carries no Taylor series")
        return payload.series
    if isinstance(payload, MatrixPowerSeries):
        return payload
    return MatrixPowerSeries(payload)


def _moments_from_m(mser: MatrixPowerSeries, sign: int, N: int) -> list[np.ndarray]:
    if mser.N < N:
        raise DepthMismatch(f"need m-function coefficients through order {N}, have {mser.N}")
    mus = [np.eye(mser.m, dtype=np.complex128)]
    for k in range(1, N + 1):
        mus.append(sign * 0.5 * mser[k].conj().T)
    return mus


def data_to_moments(data_kind: str, payload, k0: int, N: int) -> list[np.ndarray]:
    """Moments mu_0 = I, mu_1..mu_N of the half-lattice measure from any data kind."""
    sign = 1 if data_kind in RIGHT_KINDS else -1
    if data_kind in ("measure_plus", "measure_minus"):
        if not isinstance(payload, SpectralMeasure):
            raise TypeError("measure kinds take a SpectralMeasure")
        return payload.moments(N)
    if data_kind in ("moments_plus", "moments_minus"):
        mus = [np.asarray(x, dtype=np.complex128) for x in payload]
        if mus and mus[0].shape == () or len(mus) < N:
            raise DepthMismatch(f"need moments 1..{N}")
        m = mus[0].shape[0]
        return [np.eye(m, dtype=np.complex128)] + mus[:N]
    series = _series_of(payload)
    if data_kind in ("m_plus", "m_minus"):
        return _moments_from_m(series, sign, N)
    if data_kind in ("M_plus", "Phi_plus"):
        f = convert(data_kind, "m_plus", WeylFunction(data_kind, k0, series))
        return _moments_from_m(f.series, 1, N)
    if data_kind in ("M_minus", "Phi_minus_inv"):
        f = convert(data_kind, "m_minus", WeylFunction(data_kind, k0, series, sign=-1))
        return _moments_from_m(f.series, -1, N)
    raise ValueError(f"unknown data kind {data_kind!r}")


def half_lattice_invert(data_kind: str, payload, k0: int, N: int, method: str = "moments") -> dict[int, np.ndarray]:
    """alpha_{k0+1..k0+N} (right kinds) or alpha_{k0-N+1..k0} (left kinds).

    Orders follow the data-equivalence count: moments and m-coefficients 1..N,
    M_+ and Phi_+ coefficients 1..N, M_- and Phi_-^{-1} coefficients 0..N-1.
    ``method="schur"`` peels Phi_+ or Phi_-^{-1} directly (Taylor kinds only).
    """
    if N < 1:
        raise ValueError("N must be positive")
    side = "plus" if data_kind in RIGHT_KINDS else "minus"
    if data_kind not in RIGHT_KINDS + LEFT_KINDS:
        raise ValueError(f"unknown data kind {data_kind!r}")
    if method == "schur":
        series = _series_of(payload)
        target = "Phi_plus" if side == "plus" else "Phi_minus_inv"
        if data_kind != target:
            if data_kind.startswith("measure") or data_kind.startswith("moments"):
                raise ValueError("schur peeling needs Taylor data")
            series = convert(data_kind, target, WeylFunction(data_kind, k0, series, sign=1 if side == "plus" else -1)).series
        return schur_peel(series, k0, side, N)
    if method != "moments":
        raise ValueError(f"unknown method {method!r}")
    mus = data_to_moments(data_kind, payload, k0, N)
    return reconstruct_alpha(MomentFunctional(mus), k0, side, N)


def schur_peel(series: MatrixPowerSeries, k0: int, side: str, N: int) -> dict[int, np.ndarray]:
    """Peel coefficients off Phi_+(., k0) (or Phi_-^{-1}(., k0)) one site at a time."""
    need = N if side == "plus" else N - 1
    if series.N < need:
        raise DepthMismatch(f"need Schur coefficients through order {need}, have {series.N}")
    m = series.m
    out = {}
    f = series.truncate(need)
    if side == "plus":
        for j in range(1, N + 1):
            al = -f[1].conj().T
            out[k0 + j] = al
            if j == N:
                break
            sb = _site_blocks(al, False)
            q = f.divide_z()
            num = q + MatrixPowerSeries.constant(al.conj().T, q.N)
            den = q.lmul(al) + MatrixPowerSeries.identity(m, q.N)
            f = (num @ den.invert()).lmul(sb.rho_inv).rmul(sb.rhot)
        return out
    for j in range(N):
        k = k0 - j
        al = f[0].copy()
        out[k] = al
        if j == N - 1:
            break
        sb = _site_blocks(al, False)
        X = f.lmul(sb.rhot).rmul(sb.rho_inv)
        num = (X - MatrixPowerSeries.constant(al, X.N)).divide_z()
        den = MatrixPowerSeries.identity(m, X.N) - X.rmul(al.conj().T)
        f = den.truncate(num.N).invert() @ num
    return out


# -- full-lattice inversion -------------------------------------------------------------


def _alpha_from_gh(g0: np.ndarray, h0: np.ndarray, k0: int):
    if condition_number(h0) >= COND_MAX:
        raise HNotInvertible("h(0, k0) is not invertible")
    X = rsolve(g0, h0) if k0 % 2 else solve(h0, g0)
    m = X.shape[0]
    _, rho = herm_sqrt_pair(np.eye(m) + X.conj().T @ X)
    return X @ rho


def weyl_from_gh(g: MatrixPowerSeries, h: MatrixPowerSeries, k0: int):
    """(alpha_{k0}, M_- to order N, M_+ to order N + 1) from g, h at k0."""
    N = min(g.N, h.N)
    g, h = g.truncate(N), h.truncate(N)
    al = _alpha_from_gh(g[0], h[0], k0)
    sb = _site_blocks(al, False)
    m = al.shape[0]
    bs = sb.b.conj().T
    I = MatrixPowerSeries.identity(m, N)
    if k0 % 2:
        K = g.lmul(bs) - h.lmul(sb.rho)
        Mm = (g @ K.invert()).scale(2) - I
    else:
        K = g.rmul(bs) - h.rmul(sb.rhot)
        Mm = (K.invert() @ g).scale(2) - I
    zg, zK = g.times_z(), K.times_z()
    I1 = MatrixPowerSeries.identity(m, N + 1)
    if k0 % 2:
        Mp = ((I1 + zg) @ (I1 + zK).invert()).scale(2) - I1
    else:
        Mp = ((I1 + zK).invert() @ (I1 + zg)).scale(2) - I1
    return al, Mm, Mp


def full_lattice_invert_gh(g, h, k0: int, N: int | None = None) -> ReconstructionReport:
    """Coefficients on [k0 - N, k0 + N + 1] from g(., k0), h(., k0) through order N."""
    g = g.g if isinstance(g, GreensData) else g
    h = h.h if isinstance(h, GreensData) else h
    N = min(g.N, h.N) if N is None else N
    if min(g.N, h.N) < N:
        raise DepthMismatch(f"Green's data known to order {min(g.N, h.N)} < {N}")
    al, Mm, Mp = weyl_from_gh(g.truncate(N), h.truncate(N), k0)
    right = half_lattice_invert("M_plus", Mp, k0, N + 1)
    left = half_lattice_invert("M_minus", Mm, k0, N + 1)
    rec = {**left, **right}
    checks = {"alpha_k0_closed_form_vs_left": op_norm(al - left[k0])}
    return ReconstructionReport(rec, (k0 - N, k0 + N + 1), "gh", checks=checks)


def _gg_setup(g_prev: MatrixPowerSeries, g: MatrixPowerSeries, al: np.ndarray, k0: int):
    sb = _site_blocks(al, False)
    Np = min(g_prev.N, g.N) + 1
    m = al.shape[0]
    zg = g.times_z().truncate(Np)
    A = MatrixPowerSeries.identity(m, Np) + zg
    if k0 % 2:
        T = g_prev.times_z().truncate(Np).lmul(sb.rho).rmul(sb.rho)
        B = T - A.lmul(al.conj().T).rmul(al)
    else:
        T = g_prev.times_z().truncate(Np).lmul(sb.rhot).rmul(sb.rhot)
        B = T - A.lmul(al).rmul(al.conj().T)
    return A, B, T, zg, Np


def phi_plus_from_gg(g_prev: MatrixPowerSeries, g: MatrixPowerSeries, al: np.ndarray, k0: int) -> MatrixPowerSeries:
    """Order-by-order solution of the Phi_+ Riccati equation built from g(., k0-1), g(., k0)."""
    A, B, _, zg, Np = _gg_setup(g_prev, g, al, k0)
    m = al.shape[0]
    B0 = B[0]
    if condition_number(B0) >= COND_MAX:
        raise SeriesOrderSolveFailed("constant term of the Riccati linear coefficient is singular")
    phi = [np.zeros((m, m), dtype=np.complex128)]
    ast = al.conj().T
    # k0 odd:  Phi (A al) Phi + B Phi - Phi zg + al^* zg = 0, solved from the left
    # k0 even: Phi (al A) Phi + Phi B - zg Phi + zg al^* = 0, solved from the right
    Q = A.rmul(al) if k0 % 2 else A.lmul(al)
    for j in range(1, Np + 1):
        acc = np.zeros((m, m), dtype=np.complex128)
        for a in range(1, j):
            for c in range(1, j - a + 1):
                b = j - a - c
                acc += phi[a] @ Q[b] @ phi[c]
        for i in range(1, j):
            acc += (B[i] @ phi[j - i]) if k0 % 2 else (phi[j - i] @ B[i])
        for a in range(1, j):
            acc -= (phi[a] @ zg[j - a]) if k0 % 2 else (zg[j - a] @ phi[a])
        acc += (ast @ zg[j]) if k0 % 2 else (zg[j] @ ast)
        phi.append(-solve(B0, acc) if k0 % 2 else -rsolve(acc, B0))
    return MatrixPowerSeries(np.array(phi))


def psi_from_gg(Phi: MatrixPowerSeries, g_prev: MatrixPowerSeries, g: MatrixPowerSeries, al: np.ndarray, k0: int) -> MatrixPowerSeries:
    """Phi_-^{-1}(., k0) from Phi_+ and the Green's data."""
    A, _, T, _, Np = _gg_setup(g_prev, g, al, k0)
    m = al.shape[0]
    gap = MatrixPowerSeries.constant(al.conj().T, Np) - Phi.truncate(Np)
    alS = MatrixPowerSeries.constant(al, Np)
    if k0 % 2:
        return alS - A.invert() @ gap.invert() @ T
    return alS - T @ gap.invert() @ A.invert()


def _pointwise_gg_check(g_prev, g, al, k0, Phi: MatrixPowerSeries, z0: float = 0.05):
    """Contraction fixed point of the Phi_+ Riccati equation at a small real z."""
    z = z0 * min(1.0, 1.0 / (1.0 + max(g.max_abs(), g_prev.max_abs())))
    for _ in range(12):
        A, B, _, zg, _ = _gg_setup(g_prev, g, al, k0)
        Av, Bv, zgv = A(z), B(z), zg(z)
        if k0 % 2:
            p = RiccatiProblem(Av @ al, Bv, -zgv, al.conj().T @ zgv, "B_invertible")
        else:
            p = RiccatiProblem(al @ Av, -zgv, Bv, zgv @ al.conj().T, "C_invertible")
        try:
            X = riccati_solve(p, tol=1e-14)
            return {"z": z, "diff": float(np.abs(X - Phi(z)).max()), "truncation_scale": float(abs(z) ** (Phi.N + 1))}
        except ContractionViolated:
            z /= 2
    return {"z": z, "diff": None, "error": "contraction never satisfied"}


def full_lattice_invert_gg(g_prev, g, alpha_k0, k0: int, N: int | None = None) -> ReconstructionReport:
    """Coefficients on [k0 - N - 1, k0 + N + 1] from g(., k0-1), g(., k0) and alpha_{k0}."""
    g_prev = g_prev.g if isinstance(g_prev, GreensData) else g_prev
    g = g.g if isinstance(g, GreensData) else g
    N = min(g_prev.N, g.N) if N is None else N
    if min(g_prev.N, g.N) < N:
        raise DepthMismatch(f"Green's data known to order {min(g_prev.N, g.N)} < {N}")
    g_prev, g = g_prev.truncate(N), g.truncate(N)
    al = np.asarray(alpha_k0, dtype=np.complex128)
    if condition_number(al) >= COND_MAX:
        raise AlphaNotInvertible("alpha_{k0} must be invertible")
    Phi = phi_plus_from_gg(g_prev, g, al, k0)
    Psi = psi_from_gg(Phi, g_prev, g, al, k0)
    right = half_lattice_invert("Phi_plus", Phi, k0, N + 1)
    left = half_lattice_invert("Phi_minus_inv", Psi, k0, N + 2)
    rec = {**left, **right}
    checks = {
        "alpha_k0_input_vs_left": op_norm(al - left[k0]),
        "pointwise": _pointwise_gg_check(g_prev, g, al, k0, Phi),
        "Phi_plus": Phi,
        "Phi_minus_inv": Psi,
    }
    return ReconstructionReport(rec, (k0 - N - 1, k0 + N + 1), "gg", checks=checks)


# -- local uniqueness ------------------------------------------------------------------------


def local_uniqueness_check(data1: VerblunskyData, data2: VerblunskyData, k0: int, N: int, tol: float = 1e-10) -> dict:
    """Both directions of the local Borg-Marchenko statement for g, h at k0."""
    R = locality_radius(N)
    for d in (data1, data2):
        if k0 - R < d.k_min or k0 + R > d.k_max:
            raise WindowTooNarrow(f"windows must cover [{k0 - R}, {k0 + R}]")
    lo, hi = k0 - N, k0 + N + 1
    alpha_diff = max(op_norm(data1.alpha_at(k) - data2.alpha_at(k)) for k in range(lo, hi + 1))
    G1, G2 = greens_series(data1, k0, N), greens_series(data2, k0, N)
    gh_diff = max(G1.g.max_abs_diff(G2.g), G1.h.max_abs_diff(G2.h))
    per_order = [
        float(max(np.abs(G1.g[j] - G2.g[j]).max(), np.abs(G1.h[j] - G2.h[j]).max())) for j in range(N + 1)
    ]
    out = {
        "window": (lo, hi),
        "alpha_max_diff_in_window": alpha_diff,
        "gh_max_diff": gh_diff,
        "gh_diff_per_order": per_order,
    }
    out["alphas_agree"] = alpha_diff < 1e-14
    out["direction_a_ok"] = (not out["alphas_agree"]) or gh_diff < 1e-12
    out["gh_agree"] = gh_diff < tol
    if out["gh_agree"]:
        r1 = full_lattice_invert_gh(G1.g, G1.h, k0, N).recovered
        r2 = full_lattice_invert_gh(G2.g, G2.h, k0, N).recovered
        rd = max(op_norm(r1[k] - r2[k]) for k in range(lo, hi + 1))
        out["recovered_max_diff"] = rd
        out["direction_b_ok"] = rd < 1e-6
    else:
        out["direction_b_ok"] = True
    return out
