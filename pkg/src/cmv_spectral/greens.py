"""Wronskians, Weyl solutions, resolvent formulas and Green's data g, h.

Pointwise quantities on a finite window treat the window as the whole
lattice: the full truncation is closed at both ends, M_+ comes from the
half-lattice truncation to the right of k0 and M_- from the one to the left of
k0 - 1 shifted across alpha_{k0}. With this choice the closed-form resolvent
is exact for the truncated operator, not just asymptotically correct.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SingularWronskian, WindowTooNarrow, ZeroArgument
from .laurent import initial_pair, transfer, transfer_inverse
from .linalg import COND_MAX, condition_number, inv, rsolve, solve
from .series import MatrixPowerSeries
from .verblunsky import CMVOperator, VerblunskyData, build_cmv, half_lattice
from .weyl import _p_shift, _s_cayley


def _eye(m: int) -> np.ndarray:
    return np.eye(m, dtype=np.complex128)


# -- solutions at a fixed z ---------------------------------------------------------


def pair_values(data: VerblunskyData, k0: int, z: complex, first_kind: bool, k_lo: int, k_hi: int, side: str = "plus"):
    """Values (U(k), V(k)) of P/R (``first_kind``) or Q/S on [k_lo, k_hi]."""
    if z == 0:
        raise ZeroArgument("solutions are evaluated at z != 0")
    P0, R0 = initial_pair(data.m, k0, side, first_kind)
    m = data.m
    x = np.vstack([P0(z), R0(z)])
    out = {k0: (x[:m], x[m:])}
    y = x
    for k in range(k0 + 1, k_hi + 1):
        y = transfer(data, z, k) @ y
        out[k] = (y[:m], y[m:])
    y = x
    for k in range(k0, k_lo, -1):
        y = transfer_inverse(data, z, k) @ y
        out[k - 1] = (y[:m], y[m:])
    return out


def wronskian(U1, V1, U2, V2, k: int) -> np.ndarray:
    """(-1)^{k+1}/2 [U1^* U2 - V1^* V2]; U1, V1 are the values at 1/conj(z)."""
    sgn = 1.0 if k % 2 else -1.0
    return 0.5 * sgn * (U1.conj().T @ U2 - V1.conj().T @ V2)


def reflect(z: complex) -> complex:
    return 1.0 / np.conj(z)


# -- M_+/- at a point -----------------------------------------------------------------


def _resolvent_block(op: CMVOperator, z: complex, k: int, kp: int) -> np.ndarray:
    n = op.U.shape[0]
    rhs = np.zeros((n, op.m), dtype=np.complex128)
    rhs[op.block_slice(kp)] = _eye(op.m)
    X = solve(op.U - z * np.eye(n), rhs)
    return X[op.block_slice(k)]


def half_m_value(data: VerblunskyData, k0: int, side: str, z: complex, op: CMVOperator | None = None) -> np.ndarray:
    """m_+/-(z, k0) of the truncated half-lattice operator, via its resolvent."""
    op = half_lattice(data, k0, side) if op is None else op
    val = _eye(data.m) + 2 * z * _resolvent_block(op, z, k0, k0)
    return val if side == "plus" else -val


def M_values(data: VerblunskyData, k0: int, z: complex) -> tuple[np.ndarray, np.ndarray]:
    """(M_+(z, k0), M_-(z, k0)) for the truncated window (valid at z = 0 too)."""
    Mp = half_m_value(data, k0, "plus", z)
    mm_prev = half_m_value(data, k0 - 1, "minus", z)
    Mm = _p_shift(mm_prev, data.alpha_at(k0))
    return Mp, Mm


def W_value(data: VerblunskyData, k0: int, z: complex) -> np.ndarray:
    Mp, Mm = M_values(data, k0, z)
    return Mp - Mm


def wronskian_W(M_plus, M_minus):
    """W = M_+ - M_-; series when both carry series, otherwise a callable."""
    sp = getattr(M_plus, "series", None)
    sm = getattr(M_minus, "series", None)
    if sp is not None and sm is not None:
        return sp - sm
    return lambda z: np.asarray(M_plus(z)) - np.asarray(M_minus(z))


def symmetry_residual(Mp: np.ndarray, Mm: np.ndarray) -> float:
    """max |M_+ W^{-1} M_- - M_- W^{-1} M_+|."""
    Wi = inv(Mp - Mm)
    return float(np.abs(Mp @ Wi @ Mm - Mm @ Wi @ Mp).max())


@dataclass(frozen=True)
class WeylSolutionPair:
    """U_+/- = Q_+ + P_+ M_+/-, V_+/- = S_+ + R_+ M_+/- at one z."""

    k0: int
    z: complex
    M_plus: np.ndarray
    M_minus: np.ndarray
    U_plus: dict = field(repr=False)
    V_plus: dict = field(repr=False)
    U_minus: dict = field(repr=False)
    V_minus: dict = field(repr=False)

    def decay_profile(self, side: str) -> dict[int, float]:
        from .linalg import op_norm

        U = self.U_plus if side == "plus" else self.U_minus
        return {k: op_norm(v) for k, v in U.items()}


def weyl_solutions(data: VerblunskyData, k0: int, z: complex, k_lo: int, k_hi: int, M=None) -> WeylSolutionPair:
    Mp, Mm = M_values(data, k0, z) if M is None else M
    PR = pair_values(data, k0, z, True, k_lo, k_hi)
    QS = pair_values(data, k0, z, False, k_lo, k_hi)
    Up, Vp, Um, Vm = {}, {}, {}, {}
    for k in PR:
        (P, R), (Q, S) = PR[k], QS[k]
        Up[k], Vp[k] = Q + P @ Mp, S + R @ Mp
        Um[k], Vm[k] = Q + P @ Mm, S + R @ Mm
    return WeylSolutionPair(k0, z, Mp, Mm, Up, Vp, Um, Vm)


def _checked_inverse(W: np.ndarray) -> np.ndarray:
    if condition_number(W) >= COND_MAX:
        raise SingularWronskian("W(z, k0) is not invertible")
    return inv(W)


def resolvent_formula(data: VerblunskyData, k0: int, z: complex, k: int, kp: int) -> np.ndarray:
    """(U - z)^{-1}(k, k') from Weyl solutions anchored at k0."""
    if z == 0:
        raise ZeroArgument("use greens_series at z = 0")
    lo, hi = min(k, kp, k0), max(k, kp, k0)
    at_z = weyl_solutions(data, k0, z, lo, hi)
    w = reflect(z)
    at_w = weyl_solutions(data, k0, w, lo, hi)
    Wi = _checked_inverse(at_z.M_plus - at_z.M_minus)
    if k < kp or (k == kp and k % 2):
        val = at_z.U_minus[k] @ Wi @ at_w.U_plus[kp].conj().T
    else:
        val = at_z.U_plus[k] @ Wi @ at_w.U_minus[kp].conj().T
    return val / (2 * z)


def truncated_resolvent(data: VerblunskyData, z: complex, k: int, kp: int) -> np.ndarray:
    """Direct linear solve against the closed truncation of the whole window."""
    return _resolvent_block(build_cmv(data, True, True), z, k, kp)


def closed_form_blocks(Mp: np.ndarray, Mm: np.ndarray, data: VerblunskyData, k: int, z: complex) -> dict:
    """The four resolvent blocks around (k-1, k) from M_+/-(z, k), times 2z."""
    m = data.m
    I = _eye(m)
    Wi = _checked_inverse(Mp - Mm)
    a, b = data.a(k), data.b(k)
    if k % 2:
        ri = data.rho_inv(k)
        kk = (I + Mm) @ Wi @ (I - Mp)
        pp = ri @ (a.conj().T - b.conj().T @ Mp) @ Wi @ (a + Mm @ b) @ ri
        pk = -ri @ (a.conj().T - b.conj().T @ Mm) @ Wi @ (I - Mp)
        kp = -(I + Mp) @ Wi @ (a + Mm @ b) @ ri
    else:
        rti = data.rhot_inv(k)
        kk = (I - Mp) @ Wi @ (I + Mm)
        pp = rti @ (a + b @ Mm) @ Wi @ (a.conj().T - Mp @ b.conj().T) @ rti
        pk = -rti @ (a + b @ Mm) @ Wi @ (I + Mp)
        kp = -(I - Mp) @ Wi @ (a.conj().T - Mm @ b.conj().T) @ rti
    return {"kk": kk, "pp": pp, "pk": pk, "kp": kp}


# -- bilinear identities ------------------------------------------------------------


def polynomial_identity_residuals(data: VerblunskyData, k0: int, z: complex, k: int) -> dict[str, float]:
    """Residuals of the four bilinear P/Q/R/S identities and the two mixed Weyl identities at site k."""
    lo, hi = min(k, k0), max(k, k0)
    w = reflect(z)
    PRz = pair_values(data, k0, z, True, lo, hi)[k]
    QSz = pair_values(data, k0, z, False, lo, hi)[k]
    PRw = pair_values(data, k0, w, True, lo, hi)[k]
    QSw = pair_values(data, k0, w, False, lo, hi)[k]
    P, R = PRz
    Q, S = QSz
    Pw, Rw = PRw
    Qw, Sw = QSw
    H = lambda X: X.conj().T  # noqa: E731
    I = _eye(data.m)
    sgn = 1.0 if k % 2 else -1.0
    out = {
        "PQ": float(np.abs(P @ H(Qw) + Q @ H(Pw) - 2 * sgn * I).max()),
        "RS": float(np.abs(R @ H(Sw) + S @ H(Rw) + 2 * sgn * I).max()),
        "PS": float(np.abs(P @ H(Sw) + Q @ H(Rw)).max()),
        "RQ": float(np.abs(R @ H(Qw) + S @ H(Pw)).max()),
    }
    at_z = weyl_solutions(data, k0, z, lo, hi)
    at_w = weyl_solutions(data, k0, w, lo, hi)
    Wi = _checked_inverse(at_z.M_plus - at_z.M_minus)
    out["UU"] = float(
        np.abs(at_z.U_plus[k] @ Wi @ H(at_w.U_minus[k]) - at_z.U_minus[k] @ Wi @ H(at_w.U_plus[k]) - 2 * sgn * I).max()
    )
    out["VU"] = float(np.abs(at_z.V_plus[k] @ Wi @ H(at_w.U_minus[k]) - at_z.V_minus[k] @ Wi @ H(at_w.U_plus[k])).max())
    return out


def wronskian_constancy(data: VerblunskyData, k0: int, z: complex, sites) -> dict:
    """Wronskians along ``sites``.

    "PQ" is W(P_+(1/conj z), Q_+(z)), which is I. "UU" is W(U_-(1/conj z), U_+(z)),
    which equals W(z, k0) = M_+ - M_-; "UU_swapped" is W(U_+(1/conj z), U_-(z)) = -W(z, k0).
    """
    sites = list(sites)
    lo, hi = min(sites + [k0]), max(sites + [k0])
    w = reflect(z)
    PRw = pair_values(data, k0, w, True, lo, hi)
    QSz = pair_values(data, k0, z, False, lo, hi)
    at_z = weyl_solutions(data, k0, z, lo, hi)
    at_w = weyl_solutions(data, k0, w, lo, hi)
    pq = {k: wronskian(*PRw[k], *QSz[k], k) for k in sites}
    uu = {k: wronskian(at_w.U_minus[k], at_w.V_minus[k], at_z.U_plus[k], at_z.V_plus[k], k) for k in sites}
    sw = {k: wronskian(at_w.U_plus[k], at_w.V_plus[k], at_z.U_minus[k], at_z.V_minus[k], k) for k in sites}
    return {"PQ": pq, "UU": uu, "UU_swapped": sw, "W": at_z.M_plus - at_z.M_minus}


# -- Green's data as Taylor series ------------------------------------------------


@dataclass(frozen=True)
class GreensData:
    k0: int
    g: MatrixPowerSeries
    h: MatrixPowerSeries
    samples: dict = field(default_factory=dict, repr=False)

    @property
    def N(self) -> int:
        return min(self.g.N, self.h.N)


def locality_radius(N: int) -> int:
    return 2 * (N + 2)


def neumann_blocks(data: VerblunskyData, k0: int, N: int, rows, col: int) -> dict[int, MatrixPowerSeries]:
    """Taylor coefficients of (U - z)^{-1}(r, col) for r in ``rows``: blocks of U^{-(j+1)}."""
    R = locality_radius(N)
    if k0 - R < data.k_min or k0 + R > data.k_max:
        raise WindowTooNarrow(
            f"order {N} at k0={k0} needs the window to cover [{k0 - R}, {k0 + R}], have [{data.k_min}, {data.k_max}]"
        )
    op = build_cmv(data, True, True)
    Ustar = op.U.conj().T
    n = Ustar.shape[0]
    x = np.zeros((n, data.m), dtype=np.complex128)
    x[op.block_slice(col)] = _eye(data.m)
    coeffs = {r: [] for r in rows}
    for _ in range(N + 1):
        x = Ustar @ x
        for r in rows:
            coeffs[r].append(x[op.block_slice(r)].copy())
    return {r: MatrixPowerSeries(np.array(c)) for r, c in coeffs.items()}


def greens_series(data: VerblunskyData, k0: int, N: int) -> GreensData:
    """g(., k0) and h(., k0) through order N by the Neumann expansion at z = 0."""
    if k0 % 2:
        blocks = neumann_blocks(data, k0, N, (k0 - 1, k0), k0)
        g, h = blocks[k0], blocks[k0 - 1]
    else:
        g = neumann_blocks(data, k0, N, (k0,), k0)[k0]
        h = neumann_blocks(data, k0, N, (k0,), k0 - 1)[k0]
    return GreensData(k0, g, h)


def greens_pointwise(data: VerblunskyData, k0: int, z: complex) -> tuple[np.ndarray, np.ndarray]:
    """g(z, k0), h(z, k0) from the closed forms in M_+/-(z, k0)."""
    Mp, Mm = M_values(data, k0, z)
    blocks = closed_form_blocks(Mp, Mm, data, k0, z)
    g = blocks["kk"] / (2 * z)
    h = (blocks["pk"] if k0 % 2 else blocks["kp"]) / (2 * z)
    return g, h


# -- the 2m x 2m M-matrix --------------------------------------------------------------


def m_matrix(data: VerblunskyData, k: int, z: complex) -> dict:
    """M_{00}, M_{01}, M_{10}, M_{11} and Phi_{11} at z from M_+/-(z, k)."""
    I = _eye(data.m)
    Mp, Mm = M_values(data, k, z)
    b = closed_form_blocks(Mp, Mm, data, k, z)
    out = {"M_00": I + b["pp"], "M_01": b["pk"], "M_10": b["kp"], "M_11": I + b["kk"]}
    out["Phi_11"] = rsolve(out["M_11"] - I, out["M_11"] + I)
    out["M_plus"], out["M_minus"] = Mp, Mm
    return out


def m_matrix_direct(data: VerblunskyData, k: int, z: complex) -> dict:
    """Same blocks straight from the truncated resolvent."""
    I = _eye(data.m)
    op = build_cmv(data, True, True)
    n = op.U.shape[0]
    s0, s1 = op.block_slice(k - 1), op.block_slice(k)
    rhs = np.zeros((n, 2 * data.m), dtype=np.complex128)
    rhs[s0, : data.m] = I
    rhs[s1, data.m :] = I
    X = solve(op.U - z * np.eye(n), rhs)
    m = data.m
    G = np.vstack([X[s0], X[s1]])
    M = np.eye(2 * m) + 2 * z * G
    return {"M_00": M[:m, :m], "M_01": M[:m, m:], "M_10": M[m:, :m], "M_11": M[m:, m:]}


def m_matrix_series(data: VerblunskyData, k: int, N: int) -> dict[str, MatrixPowerSeries]:
    """Taylor series of the four blocks: delta I + 2 sum_j z^{j+1} U^{-(j+1)} blocks."""
    m = data.m
    out = {}
    for l, col in ((0, k - 1), (1, k)):
        blocks = neumann_blocks(data, k, N, (k - 1, k), col)
        for lp, row in ((0, k - 1), (1, k)):
            c = np.zeros((N + 1, m, m), dtype=np.complex128)
            c[0] = _eye(m) if l == lp else 0
            c[1:] = 2 * blocks[row].coeffs[:N]
            out[f"M_{lp}{l}"] = MatrixPowerSeries(c)
    out["Phi_11"] = _s_cayley(out["M_11"])
    return out


def phi11_factorization_residual(data: VerblunskyData, k: int, z: complex) -> float:
    """|Phi_11 - Phi_-^{-1} Phi_+| (k odd) or |Phi_11 - Phi_+ Phi_-^{-1}| (k even)."""
    I = _eye(data.m)
    blocks = m_matrix(data, k, z)
    Mp, Mm = blocks["M_plus"], blocks["M_minus"]
    Pp = rsolve(Mp - I, Mp + I)
    Pm_inv = rsolve(Mm + I, Mm - I)
    prod = Pm_inv @ Pp if k % 2 else Pp @ Pm_inv
    return float(np.abs(blocks["Phi_11"] - prod).max())
