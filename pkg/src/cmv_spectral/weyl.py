"""Weyl-Titchmarsh functions m, M and the Schur functions Phi.

Every function is a ``WeylFunction``: a kind label, the reference site k0,
an optional Taylor series at z = 0 and an optional pointwise evaluator (present
when the function was built from a measure, or converted from one that was).

Phi_- only appears through its inverse ``Phi_minus_inv``, which is the Schur
function; Phi_- itself blows up in the free case.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import MissingAlpha, NodeCollision, OutOfWindow
from .linalg import herm_eigvals, inv, op_norm, rsolve, solve
from .series import MatrixPowerSeries
from .spectral import SpectralMeasure, measure_from_operator
from .verblunsky import VerblunskyData, _site_blocks, half_lattice

KINDS = (
    "m_plus",
    "m_minus",
    "M_plus",
    "M_minus",
    "Phi_plus",
    "Phi_minus_inv",
    "M_00",
    "M_11",
    "M_01",
    "M_10",
    "Phi_11",
)
CARATHEODORY = ("m_plus", "M_plus", "M_00", "M_11")
ANTI_CARATHEODORY = ("m_minus", "M_minus")
SCHUR = ("Phi_plus", "Phi_minus_inv", "Phi_11")

GRID_RADII = (0.3, 0.6, 0.9)
GRID_ANGLES = 16


@dataclass(frozen=True)
class WeylFunction:
    kind: str
    k0: int
    series: MatrixPowerSeries | None = None
    evaluator: Callable[[complex], np.ndarray] | None = field(default=None, repr=False)
    measure: SpectralMeasure | None = field(default=None, repr=False)
    sign: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown Weyl function kind {self.kind!r}")

    @property
    def m(self) -> int:
        if self.series is not None:
            return self.series.m
        return self.measure.m if self.measure is not None else self.evaluator(0.0).shape[0]

    @property
    def N(self) -> int | None:
        return None if self.series is None else self.series.N

    def __call__(self, z: complex) -> np.ndarray:
        if self.evaluator is not None:
            return self.evaluator(z)
        if self.series is None:
            raise ValueError("function has neither a series nor an evaluator")
        return self.series(z)


# -- Riccati Taylor recursions ----------------------------------------------


def _need(data: VerblunskyData, lo: int, hi: int, what: str) -> None:
    if lo < data.k_min or hi > data.k_max:
        raise OutOfWindow(f"{what} needs alpha on [{lo}, {hi}], window is [{data.k_min}, {data.k_max}]")


def phi_plus_series(data: VerblunskyData, k: int, N: int) -> MatrixPowerSeries:
    """Taylor coefficients of Phi_+(., k) through order N.

    phi_j(k) only involves alpha_{k+1}, ..., alpha_{k+j}.
    """
    m = data.m
    if N < 0:
        raise ValueError("N must be nonnegative")
    if N >= 1:
        _need(data, k + 1, k + N, "phi_plus_series")
    # table[i][j] = phi_j(k + i), needed for j <= N - i
    table = [[np.zeros((m, m), dtype=np.complex128) for _ in range(N + 1 - i)] for i in range(N + 1)]
    for i in range(N - 1, -1, -1):
        s = k + i + 1
        rho, rhot_inv, al = data.rho(s), data.rhot_inv(s), data.alpha_at(s)
        row, nxt = table[i], table[i + 1] if i + 1 <= N else None
        for j in range(1, N + 1 - i):
            if j == 1:
                row[1] = -al.conj().T
                continue
            left = [rho @ nxt[j - l] @ rhot_inv for l in range(1, j)]
            acc = rho @ nxt[j - 1] @ rhot_inv
            for l in range(1, j):
                acc = acc + left[l - 1] @ al @ row[l]
            row[j] = acc
    return MatrixPowerSeries(np.array(table[0]))


def phi_minus_inv_series(data: VerblunskyData, k: int, N: int) -> MatrixPowerSeries:
    """Taylor coefficients of Phi_-(., k)^{-1} through order N.

    The coefficient of z^j involves alpha_{k-j}, ..., alpha_k. The sum is
    ordered as forced by the Riccati equation for Phi_-^{-1}:
    psi_j(k) = rhot_k^{-1} psi_{j-1}(k-1) rho_k
               - sum_l psi_l(k) rho_k^{-1} alpha_k^* psi_{j-1-l}(k-1) rho_k.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    _need(data, k - N, k, "phi_minus_inv_series")
    # table[i][j] = psi_j(k - i) for j <= N - i
    table: list[list[np.ndarray]] = [[] for _ in range(N + 1)]
    for i in range(N, -1, -1):
        s = k - i
        al = data.alpha_at(s)
        row = table[i]
        row.append(al.copy())
        if i == N:
            continue
        rho, rho_inv, rhot_inv = data.rho(s), data.rho_inv(s), data.rhot_inv(s)
        prev = table[i + 1]
        mid = rho_inv @ al.conj().T
        for j in range(1, N + 1 - i):
            acc = rhot_inv @ prev[j - 1] @ rho
            for l in range(j):
                acc = acc - row[l] @ mid @ prev[j - 1 - l] @ rho
            row.append(acc)
    return MatrixPowerSeries(np.array(table[0]))


def riccati_residual_plus(data: VerblunskyData, k: int, N: int) -> MatrixPowerSeries:
    """Residual of the Phi_+ Riccati equation linking sites k-1 and k."""
    P1 = phi_plus_series(data, k, N)
    P0 = phi_plus_series(data, k - 1, N)
    al, rho_inv, rhot_inv = data.alpha_at(k), data.rho_inv(k), data.rhot_inv(k)
    lhs = (P1.rmul(rhot_inv @ al) @ P0) + P1.rmul(rhot_inv).times_z().truncate(N) - P0.lmul(rho_inv)
    rhs = np.zeros((N + 1, data.m, data.m), dtype=np.complex128)
    if N >= 1:
        rhs[1] = rho_inv @ al.conj().T
    return lhs - MatrixPowerSeries(rhs)


def riccati_residual_minus(data: VerblunskyData, k: int, N: int) -> MatrixPowerSeries:
    """Residual of the Phi_-^{-1} Riccati equation linking sites k-1 and k."""
    S1 = phi_minus_inv_series(data, k, N)
    S0 = phi_minus_inv_series(data, k - 1, N)
    al, rho_inv, rhot_inv = data.alpha_at(k), data.rho_inv(k), data.rhot_inv(k)
    quad = (S1.rmul(rho_inv @ al.conj().T) @ S0).times_z().truncate(N)
    lin = S1.rmul(rho_inv) - S0.lmul(rhot_inv).times_z().truncate(N)
    return quad + lin - MatrixPowerSeries.constant(rhot_inv @ al, N)


# -- measures ------------------------------------------------------------------


def _herglotz(mu: SpectralMeasure, z: complex) -> np.ndarray:
    d = mu.nodes - z
    if np.min(np.abs(d)) < 1e-14:
        raise NodeCollision(f"z = {z} coincides with a node of the measure")
    return np.einsum("a,aij->ij", (mu.nodes + z) / d, mu.weights)


def m_from_measure(mu: SpectralMeasure, sign: int, z: complex | None = None, N: int | None = None, k0: int = 0):
    """m_{+/-} = +/- integral (zeta + z)/(zeta - z) dOmega.

    With ``z`` returns the matrix value; otherwise returns a WeylFunction with a
    pointwise evaluator and, when ``N`` is given, the Taylor series
    +/- (I + 2 sum_k z^k (moment_k)^*).
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if z is not None:
        return sign * _herglotz(mu, z)
    series = None
    if N is not None:
        c = np.zeros((N + 1, mu.m, mu.m), dtype=np.complex128)
        c[0] = np.eye(mu.m)
        for j in range(1, N + 1):
            c[j] = 2 * mu.moment(j).conj().T
        series = MatrixPowerSeries(sign * c)
    kind = "m_plus" if sign == 1 else "m_minus"
    return WeylFunction(kind, k0, series, lambda w: sign * _herglotz(mu, w), mu, sign)


def weyl_from_data(data: VerblunskyData, k0: int, side: str, N: int | None = None) -> WeylFunction:
    """m_{+/-}(., k0) of the truncated half-lattice operator."""
    op = half_lattice(data, k0, side)
    mu = measure_from_operator(op, k0)
    return m_from_measure(mu, 1 if side == "plus" else -1, N=N, k0=k0)


# -- conversions ---------------------------------------------------------------

def _eye(m: int) -> np.ndarray:
    return np.eye(m, dtype=np.complex128)


def _p_cayley(M):  # (M - I)(M + I)^{-1}
    I = _eye(M.shape[0])
    return rsolve(M - I, M + I)


def _p_cayley_inv(P):  # (I - P)^{-1}(I + P)
    I = _eye(P.shape[0])
    return solve(I - P, I + P)


def _p_minus_to_psi(M):  # (M + I)(M - I)^{-1}
    I = _eye(M.shape[0])
    return rsolve(M + I, M - I)


def _p_psi_to_minus(S):  # (S - I)^{-1}(S + I)
    I = _eye(S.shape[0])
    return solve(S - I, S + I)


def _s_cayley(M: MatrixPowerSeries) -> MatrixPowerSeries:
    I = MatrixPowerSeries.identity(M.m, M.N)
    return (M - I) @ (M + I).invert()


def _s_cayley_inv(P: MatrixPowerSeries) -> MatrixPowerSeries:
    I = MatrixPowerSeries.identity(P.m, P.N)
    return (I - P).invert() @ (I + P)


def _s_minus_to_psi(M: MatrixPowerSeries) -> MatrixPowerSeries:
    I = MatrixPowerSeries.identity(M.m, M.N)
    return (M + I) @ (M - I).invert()


def _s_psi_to_minus(S: MatrixPowerSeries) -> MatrixPowerSeries:
    I = MatrixPowerSeries.identity(S.m, S.N)
    return (S - I).invert() @ (S + I)


def _s_mminus_to_psi(mm: MatrixPowerSeries) -> MatrixPowerSeries:
    # z Psi = (I - m)^{-1}(I + m); I + m vanishes at 0, order drops by one
    I = MatrixPowerSeries.identity(mm.m, mm.N)
    num = (I + mm).divide_z()
    return (I - mm).truncate(num.N).invert() @ num


def _p_mminus_to_psi(mm, z):
    I = _eye(mm.shape[0])
    return solve(I - mm, I + mm) / z if z != 0 else None


def _s_psi_to_mminus(S: MatrixPowerSeries) -> MatrixPowerSeries:
    # m = (z Psi + I)^{-1}(z Psi - I), one order gained
    zS = S.times_z()
    I = MatrixPowerSeries.identity(S.m, zS.N)
    return (zS + I).invert() @ (zS - I)


def _p_psi_to_mminus(S, z):
    I = _eye(S.shape[0])
    return solve(z * S + I, z * S - I)


def _s_mminus_to_Mminus(mm: MatrixPowerSeries) -> MatrixPowerSeries:
    # [(1+z)I + (1-z)m][(1-z)I + (1+z)m]^{-1}; both factors vanish at 0
    I = MatrixPowerSeries.identity(mm.m, mm.N)
    num = (I.poly_scale([1, 1]) + mm.poly_scale([1, -1])).divide_z()
    den = (I.poly_scale([1, -1]) + mm.poly_scale([1, 1])).divide_z()
    return num @ den.invert()


def _p_mminus_to_Mminus(mm, z):
    I = _eye(mm.shape[0])
    return rsolve((1 + z) * I + (1 - z) * mm, (1 - z) * I + (1 + z) * mm)


def _shift_blocks(alpha_k0):
    sb = _site_blocks(np.asarray(alpha_k0, dtype=np.complex128), False)
    a, b = sb.a, sb.b
    ri, rti = sb.rho_inv, sb.rhot_inv
    A1 = rti @ a + ri @ a.conj().T
    B1 = rti @ b - ri @ b.conj().T
    A2 = rti @ a - ri @ a.conj().T
    B2 = rti @ b + ri @ b.conj().T
    return A1, B1, A2, B2


def _s_shift(mm: MatrixPowerSeries, alpha_k0) -> MatrixPowerSeries:
    A1, B1, A2, B2 = _shift_blocks(alpha_k0)
    N = mm.N
    num = mm.lmul(B1) + MatrixPowerSeries.constant(A1, N)
    den = mm.lmul(B2) + MatrixPowerSeries.constant(A2, N)
    return num @ den.invert()


def _p_shift(mm, alpha_k0):
    A1, B1, A2, B2 = _shift_blocks(alpha_k0)
    return rsolve(A1 + B1 @ mm, A2 + B2 @ mm)


# edge: (series map, pointwise map taking (value, z))
_EDGES: dict[tuple[str, str], tuple[Callable, Callable]] = {
    ("m_plus", "M_plus"): (lambda f: f, lambda v, z: v),
    ("M_plus", "m_plus"): (lambda f: f, lambda v, z: v),
    ("M_plus", "Phi_plus"): (_s_cayley, lambda v, z: _p_cayley(v)),
    ("Phi_plus", "M_plus"): (_s_cayley_inv, lambda v, z: _p_cayley_inv(v)),
    ("M_minus", "Phi_minus_inv"): (_s_minus_to_psi, lambda v, z: _p_minus_to_psi(v)),
    ("Phi_minus_inv", "M_minus"): (_s_psi_to_minus, lambda v, z: _p_psi_to_minus(v)),
    ("m_minus", "Phi_minus_inv"): (_s_mminus_to_psi, _p_mminus_to_psi),
    ("Phi_minus_inv", "m_minus"): (_s_psi_to_mminus, _p_psi_to_mminus),
    ("m_minus", "M_minus"): (_s_mminus_to_Mminus, _p_mminus_to_Mminus),
}


def conversion_path(kind_from: str, kind_to: str) -> list[str]:
    if kind_from == kind_to:
        return [kind_from]
    prev = {kind_from: None}
    queue = deque([kind_from])
    while queue:
        u = queue.popleft()
        for a, b in _EDGES:
            if a == u and b not in prev:
                prev[b] = u
                queue.append(b)
    if kind_to not in prev:
        raise ValueError(f"no conversion from {kind_from} to {kind_to}")
    path = [kind_to]
    while path[-1] != kind_from:
        path.append(prev[path[-1]])
    return path[::-1]


def _apply_edge(f: WeylFunction, to: str) -> WeylFunction:
    s_map, p_map = _EDGES[(f.kind, to)]
    series = s_map(f.series) if f.series is not None else None
    ev = None
    if f.evaluator is not None:
        src = f.evaluator

        def ev(z, src=src, p_map=p_map):
            return p_map(src(z), z)

    return WeylFunction(to, f.k0, series, ev, f.measure if to in ("m_plus", "M_plus") else None, f.sign)


def convert(kind_from: str, kind_to: str, f: WeylFunction, alpha_k0=None) -> WeylFunction:
    """Walk the conversion graph from ``kind_from`` to ``kind_to``.

    ``kind_from = "m_minus_prev"`` means ``f`` is m_-(., k0 - 1); the step to
    M_-(., k0) then needs ``alpha_k0``.
    """
    if kind_from == "m_minus_prev":
        if f.kind != "m_minus":
            raise ValueError("m_minus_prev expects an m_minus function")
        if alpha_k0 is None:
            raise MissingAlpha("the shift m_-(., k0-1) -> M_-(., k0) needs alpha_{k0}")
        al = np.asarray(alpha_k0, dtype=np.complex128)
        series = _s_shift(f.series, al) if f.series is not None else None
        ev = None
        if f.evaluator is not None:
            src = f.evaluator

            def ev(z):
                return _p_shift(src(z), al)

        f = WeylFunction("M_minus", f.k0 + 1, series, ev, None, -1)
        kind_from = "M_minus"
    if f.kind != kind_from:
        raise ValueError(f"function is {f.kind}, not {kind_from}")
    for to in conversion_path(kind_from, kind_to)[1:]:
        f = _apply_edge(f, to)
    return f


# -- Caratheodory / Schur diagnostics -------------------------------------------


def sample_grid(radii=GRID_RADII, n_angles: int = GRID_ANGLES) -> np.ndarray:
    th = 2 * np.pi * np.arange(n_angles) / n_angles
    return np.array([r * np.exp(1j * t) for r in radii for t in th])


def caratheodory_tools(F: WeylFunction, grid=None, reflect_points=(2.0, 3.0j)) -> dict:
    """Grid diagnostics for a Weyl function. Never raises; failures are reported."""
    grid = sample_grid() if grid is None else np.asarray(grid)
    out: dict = {"kind": F.kind, "k0": F.k0, "grid_points": int(grid.size)}
    try:
        vals = [np.asarray(F(z)) for z in grid]
    except Exception as exc:  # noqa: BLE001 - diagnostics report, never raise
        out["error"] = f"{type(exc).__name__}: {exc}"
        return out
    s = -1.0 if F.kind in ANTI_CARATHEODORY else 1.0
    re_min = min(float(herm_eigvals(s * 0.5 * (v + v.conj().T), tol=1e-6)[0]) for v in vals)
    out["min_re_eig"] = re_min
    out["max_op_norm"] = max(op_norm(v) for v in vals)
    if F.kind in CARATHEODORY or F.kind in ANTI_CARATHEODORY:
        out["caratheodory_ok"] = re_min >= -1e-9
    if F.kind in SCHUR:
        out["schur_ok"] = out["max_op_norm"] <= 1 + 1e-9
    if F.measure is not None and F.kind in ("m_plus", "M_plus", "m_minus"):
        try:
            F0 = np.asarray(F(0.0))
            C = (F0 - F0.conj().T) / 2j
            res = 0.0
            for z, v in zip(grid, vals):
                rep = 1j * C + F.sign * _herglotz(F.measure, z)
                res = max(res, float(np.abs(v - rep).max()))
            out["herglotz_residual"] = res
            out["herglotz_C"] = C
            refl = 0.0
            for z in reflect_points:
                w = 1.0 / np.conj(z)
                refl = max(refl, float(np.abs(F(z) + F(w).conj().T).max()))
            out["reflection_residual"] = refl
        except Exception as exc:  # noqa: BLE001
            out["herglotz_error"] = f"{type(exc).__name__}: {exc}"
    return out


def schur_cayley(F: WeylFunction, inverse: bool = False) -> WeylFunction:
    """(F - I)(F + I)^{-1}, or with ``inverse`` the map back (I - F)^{-1}(I + F)."""
    if inverse:
        kind = {"Phi_plus": "M_plus", "Phi_11": "M_11"}.get(F.kind, F.kind)
        s_map, p_map = _s_cayley_inv, _p_cayley_inv
    else:
        kind = {"M_plus": "Phi_plus", "m_plus": "Phi_plus", "M_11": "Phi_11"}.get(F.kind, F.kind)
        s_map, p_map = _s_cayley, _p_cayley
    series = s_map(F.series) if F.series is not None else None
    ev = None
    if F.evaluator is not None:
        src = F.evaluator

        def ev(z):
            return p_map(src(z))

    return WeylFunction(kind, F.k0, series, ev, None, F.sign)


def series_function(kind: str, k0: int, series: MatrixPowerSeries) -> WeylFunction:
    return WeylFunction(kind, k0, series)


def weyl_series(data: VerblunskyData, k0: int, kind: str, N: int) -> WeylFunction:
    """Series of ``kind`` at k0 computed from the Riccati recursions."""
    if kind in ("Phi_plus", "M_plus", "m_plus"):
        f = WeylFunction("Phi_plus", k0, phi_plus_series(data, k0, N))
        return convert("Phi_plus", kind, f)
    if kind in ("Phi_minus_inv", "M_minus"):
        f = WeylFunction("Phi_minus_inv", k0, phi_minus_inv_series(data, k0, N), sign=-1)
        return convert("Phi_minus_inv", kind, f)
    if kind == "m_minus":
        f = WeylFunction("Phi_minus_inv", k0, phi_minus_inv_series(data, k0, max(N - 1, 0)), sign=-1)
        return convert("Phi_minus_inv", "m_minus", f)
    raise ValueError(f"no series route for {kind}")
