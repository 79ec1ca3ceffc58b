"""Command-line front end: gen, forward, invert, verify, roundtrip.

Every command writes one JSON document (stdout, or --out). Exit codes:
0 every requested check passed, 1 a check failed, 2 bad configuration,
3 a numerical error inside the library.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import io
from .errors import BadConfig, CMVError
from .greens import (
    greens_series,
    polynomial_identity_residuals,
    resolvent_formula,
    truncated_resolvent,
    wronskian_constancy,
)
from .inverse import ReconstructionReport, full_lattice_invert_gg, full_lattice_invert_gh, half_lattice_invert
from .laurent import generate_family
from .linalg import BACKEND, op_norm
from .spectral import measure_from_operator, orthonormality_check
from .verblunsky import build_cmv, constant, half_lattice, random_data
from .weyl import riccati_residual_minus, riccati_residual_plus, weyl_series

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

SERIES_TARGETS = ("m_plus", "m_minus", "M_plus", "M_minus", "Phi_plus", "Phi_minus_inv")
TARGETS = ("measure_plus", "measure_minus") + SERIES_TARGETS + ("greens",)
ROUTES = ("gh", "gg", "moments", "taylor-m", "taylor-M", "taylor-phi")
_TAYLOR = {"taylor-m": ("m_plus", "m_minus"), "taylor-M": ("M_plus", "M_minus"), "taylor-phi": ("Phi_plus", "Phi_minus_inv")}


@dataclass(frozen=True)
class JobConfig:
    command: str
    m: int = 1
    window: tuple[int, int] = (-24, 23)
    k0: int = 1
    N: int = 3
    seed: int = 0
    norm_cap: float = 0.5
    tol: float = 1e-6
    route: str = "gh"
    side: str = "full"
    targets: tuple[str, ...] = TARGETS
    constant: complex | None = None
    inp: str | None = None
    reference: str | None = None
    out: str | None = None
    threads: int = 1


def parse_window(text: str) -> tuple[int, int]:
    """'LO:HI' inclusive, or a site count n centred on 0."""
    try:
        if ":" in text:
            lo, hi = (int(t) for t in text.split(":"))
        else:
            n = int(text)
            if n < 1:
                raise ValueError
            lo, hi = -(n // 2), n - 1 - n // 2
    except ValueError as e:
        raise BadConfig(f"bad --window {text!r}; use LO:HI or a positive site count") from e
    if hi < lo:
        raise BadConfig("window must satisfy LO <= HI")
    return lo, hi


def _threads() -> int:
    raw = os.environ.get("CMV_SPECTRAL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError as e:
        raise BadConfig(f"CMV_SPECTRAL_THREADS must be an integer, got {raw!r}") from e


def config_from_args(ns: argparse.Namespace) -> JobConfig:
    targets = TARGETS
    if getattr(ns, "targets", None):
        targets = tuple(t.strip() for t in ns.targets.split(",") if t.strip())
        bad = [t for t in targets if t not in TARGETS]
        if bad:
            raise BadConfig(f"unknown targets: {', '.join(bad)}")
    const = None
    if getattr(ns, "constant", None) is not None:
        try:
            const = complex(ns.constant.replace(" ", ""))
        except ValueError as e:
            raise BadConfig(f"bad --constant {ns.constant!r}") from e
    cfg = JobConfig(
        command=ns.command,
        m=ns.m,
        window=parse_window(ns.window),
        k0=ns.k0,
        N=ns.order,
        seed=ns.seed,
        norm_cap=ns.norm_cap,
        tol=ns.tol,
        route=ns.route,
        side=ns.side,
        targets=targets,
        constant=const,
        inp=ns.inp,
        reference=getattr(ns, "reference", None),
        out=ns.out,
        threads=_threads(),
    )
    if cfg.m < 1:
        raise BadConfig("--m must be positive")
    if cfg.N < 1:
        raise BadConfig("--order must be positive")
    if not 0 < cfg.norm_cap < 1:
        raise BadConfig("--norm-cap must lie in (0, 1)")
    if cfg.constant is not None and not abs(cfg.constant) < 1:
        raise BadConfig("--constant must have modulus < 1")
    return cfg


def provenance(cfg: JobConfig, data=None) -> dict:
    out = {
        "command": cfg.command,
        "k0": cfg.k0,
        "N": cfg.N,
        "tol": cfg.tol,
        "seed": cfg.seed,
        "backend": BACKEND,
        "threads": cfg.threads,
        "parallel": cfg.threads > 1,
    }
    if data is not None:
        out["window"] = [data.k_min, data.k_max]
        out["m"] = data.m
    return out


# -- commands -----------------------------------------------------------------------


def gen(cfg: JobConfig):
    lo, hi = cfg.window
    if cfg.constant is not None:
        return constant(cfg.constant * np.eye(cfg.m), lo, hi)
    return random_data(cfg.m, lo, hi, cfg.norm_cap, np.random.default_rng(cfg.seed))


def _load_data(cfg: JobConfig):
    if cfg.inp is None:
        return gen(cfg)
    return io.data_from_json(io.load(cfg.inp))


def _capture(fn, *args):
    try:
        return fn(*args), None
    except CMVError as e:
        return None, {"name": e.name, "message": str(e)}


def forward(data, cfg: JobConfig) -> dict:
    k0, N = cfg.k0, cfg.N
    results, errors = {}, {}
    for side in ("plus", "minus"):
        key = f"measure_{side}"
        if key in cfg.targets:
            mu, err = _capture(lambda s=side: measure_from_operator(half_lattice(data, k0, s), k0))
            if err:
                errors[key] = err
            else:
                results[key] = io.measure_to_json(mu)
    for kind in SERIES_TARGETS:
        if kind in cfg.targets:
            f, err = _capture(weyl_series, data, k0, kind, N)
            if err:
                errors[kind] = err
            else:
                results[kind] = io.series_to_json(f.series)
    if "greens" in cfg.targets:
        G, err = _capture(greens_series, data, k0, N)
        Gp, err2 = _capture(greens_series, data, k0 - 1, N)
        if err or err2:
            errors["greens"] = err or err2
        else:
            results["greens"] = io.greens_to_json(G)
            results["greens_prev"] = io.greens_to_json(Gp)
            results["alpha_k0"] = io.matrix_to_json(data.alpha_at(k0))
    return {"provenance": provenance(cfg, data), "results": results, "errors": errors}


def _invert_taylor(results: dict, cfg: JobConfig, kinds) -> ReconstructionReport:
    rec = {}
    sides = ("plus", "minus") if cfg.side == "full" else (cfg.side,)
    for side in sides:
        kind = kinds[0] if side == "plus" else kinds[1]
        if kind not in results:
            raise BadConfig(f"forward report lacks {kind}")
        payload = io.measure_from_json(results[kind]) if kind.startswith("measure") else io.series_from_json(results[kind])
        rec.update(half_lattice_invert(kind, payload, cfg.k0, cfg.N))
    lo = cfg.k0 - cfg.N + 1 if "minus" in sides else cfg.k0 + 1
    hi = cfg.k0 + cfg.N if "plus" in sides else cfg.k0
    return ReconstructionReport(rec, (lo, hi), cfg.route)


def invert(report: dict, cfg: JobConfig) -> ReconstructionReport:
    res = report.get("results", report)
    if cfg.route == "moments":
        return _invert_taylor(res, cfg, ("measure_plus", "measure_minus"))
    if cfg.route in _TAYLOR:
        return _invert_taylor(res, cfg, _TAYLOR[cfg.route])
    if "greens" not in res:
        raise BadConfig("forward report lacks greens data")
    G = io.greens_from_json(res["greens"])
    if G.k0 != cfg.k0:
        raise BadConfig(f"greens data is at k0 = {G.k0}, not {cfg.k0}")
    if cfg.route == "gh":
        return full_lattice_invert_gh(G.g, G.h, cfg.k0, cfg.N)
    Gp = io.greens_from_json(res["greens_prev"])
    return full_lattice_invert_gg(Gp.g, G.g, io.matrix_from_json(res["alpha_k0"]), cfg.k0, cfg.N)


def _targets_for(cfg: JobConfig) -> tuple[str, ...]:
    if cfg.route in ("gh", "gg"):
        return ("greens",)
    if cfg.route == "moments":
        return ("measure_plus", "measure_minus")
    return _TAYLOR[cfg.route]


def roundtrip(cfg: JobConfig) -> tuple[dict, bool]:
    data = _load_data(cfg)
    fcfg = JobConfig(**{**cfg.__dict__, "targets": _targets_for(cfg)})
    fwd = forward(data, fcfg)
    if fwd["errors"]:
        name, err = next(iter(fwd["errors"].items()))
        return {"provenance": provenance(cfg, data), "error": {**err, "stage": f"forward:{name}"}}, False
    fwd = io.json.loads(io.dumps(fwd))  # exercise the interchange format
    rep = invert(fwd, cfg).compare(data)
    out = io.report_to_json(rep)
    ok = rep.max_error < cfg.tol
    return {"provenance": provenance(cfg, data), "report": out, "passed": ok}, ok


# -- verify ----------------------------------------------------------------------------


def _suite_unitarity(data, cfg):
    op = build_cmv(data)
    r = {"unitarity": op.unitarity_residual(), "factorization": op.factor_residual(), "band": op.band_violation()}
    return r, max(r.values()) < 1e-10


def _suite_orthonormality(data, cfg):
    depth = min(4, cfg.N + 1)
    r = {}
    for side in ("plus", "minus"):
        mu = measure_from_operator(half_lattice(data, cfg.k0, side), cfg.k0)
        r[side] = max(orthonormality_check(mu, generate_family(data, cfg.k0, side, kind, depth)) for kind in ("P", "R"))
    return r, max(r.values()) < 1e-7


def _rand_z(rng, n):
    return [r * np.exp(2j * np.pi * t) for r, t in zip(rng.uniform(0.2, 0.7, n), rng.random(n))]


def _suite_wronskian(data, cfg):
    rng = np.random.default_rng(cfg.seed + 1)
    sites = range(cfg.k0 - 3, cfg.k0 + 5)
    pq = uu = 0.0
    for z in _rand_z(rng, 5):
        w = wronskian_constancy(data, cfg.k0, z, sites)
        I = np.eye(data.m)
        pq = max(pq, max(op_norm(v - I) for v in w["PQ"].values()))
        uu = max(uu, max(op_norm(v - w["W"]) for v in w["UU"].values()))
    r = {"PQ_minus_I": pq, "UU_minus_W": uu}
    return r, max(r.values()) < 1e-10


def _suite_identities(data, cfg):
    rng = np.random.default_rng(cfg.seed + 2)
    worst = {}
    for z in _rand_z(rng, 3):
        for k in range(cfg.k0 - 2, cfg.k0 + 3):
            for name, v in polynomial_identity_residuals(data, cfg.k0, z, k).items():
                worst[name] = max(worst.get(name, 0.0), v)
    return worst, max(worst.values()) < 1e-8


def _suite_resolvent(data, cfg):
    c = (data.k_min + data.k_max) // 2
    worst = 0.0
    for r in (0.3, 0.5):
        z = r * np.exp(0.7j)
        for k, kp in ((c, c), (c, c + 1), (c + 1, c), (c - 1, c + 1)):
            worst = max(worst, op_norm(resolvent_formula(data, c, z, k, kp) - truncated_resolvent(data, z, k, kp)))
    return {"max_diff": worst}, worst < 1e-7


def _suite_riccati(data, cfg):
    n = 8
    r = {
        "plus": riccati_residual_plus(data, cfg.k0, n).max_abs(),
        "minus": riccati_residual_minus(data, cfg.k0, n).max_abs(),
    }
    return r, max(r.values()) < 1e-10


SUITES = {
    "unitarity": _suite_unitarity,
    "orthonormality": _suite_orthonormality,
    "wronskian": _suite_wronskian,
    "identities": _suite_identities,
    "resolvent": _suite_resolvent,
    "riccati": _suite_riccati,
}


def _run_suite(name, data, cfg):
    try:
        res, ok = SUITES[name](data, cfg)
        return {"passed": bool(ok), "values": io.plain(res)}
    except CMVError as e:
        return {"passed": False, "error": {"name": e.name, "message": str(e)}}


def verify(cfg: JobConfig) -> tuple[dict, bool]:
    data = _load_data(cfg)
    names = list(SUITES)
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as ex:
            outs = list(ex.map(lambda n: _run_suite(n, data, cfg), names))
    else:
        outs = [_run_suite(n, data, cfg) for n in names]
    suites = dict(zip(names, outs))
    ok = all(s["passed"] for s in suites.values())
    return {"provenance": provenance(cfg, data), "suites": suites, "passed": ok}, ok


# -- entry point ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cmv-spectral", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("gen", "forward", "invert", "verify", "roundtrip"):
        s = sub.add_parser(name)
        s.add_argument("--m", type=int, default=1)
        s.add_argument("--window", default="48", help="LO:HI or a site count centred on 0")
        s.add_argument("--k0", type=int, default=1)
        s.add_argument("--order", type=int, default=3)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--norm-cap", type=float, default=0.5)
        s.add_argument("--tol", type=float, default=1e-6)
        s.add_argument("--in", dest="inp")
        s.add_argument("--out")
        s.add_argument("--route", choices=ROUTES, default="gh")
        s.add_argument("--side", choices=("plus", "minus", "full"), default="full")
        s.add_argument("--constant", help="use alpha = c I instead of random data (gen, verify, roundtrip)")
        if name == "forward":
            s.add_argument("--targets", help="comma list from: " + ", ".join(TARGETS))
        if name == "invert":
            s.add_argument("--reference", help="data file to compare against")
    return p


def run(argv=None) -> tuple[dict, int]:
    """Execute one command; returns (JSON document, exit code). The document carries its --out path under "_out"."""
    try:
        ns = build_parser().parse_args(argv)
    except SystemExit as e:
        if e.code == 0:
            raise
        return {"error": {"name": "BadConfig", "message": "invalid command line"}}, EXIT_CONFIG
    out, code = _dispatch(ns)
    out["_out"] = ns.out
    return out, code


def _dispatch(ns) -> tuple[dict, int]:
    try:
        cfg = config_from_args(ns)
        if cfg.command == "gen":
            data = gen(cfg)
            return io.data_to_json(data), EXIT_OK
        if cfg.command == "forward":
            data = _load_data(cfg)
            out = forward(data, cfg)
            return out, EXIT_FAIL if out["errors"] else EXIT_OK
        if cfg.command == "invert":
            if cfg.inp is None:
                raise BadConfig("invert needs --in <forward report>")
            rep = invert(io.load(cfg.inp), cfg)
            ok = True
            if cfg.reference:
                rep.compare(io.data_from_json(io.load(cfg.reference)))
                ok = rep.max_error < cfg.tol
            out = {"provenance": provenance(cfg), "report": io.report_to_json(rep), "passed": ok}
            return out, EXIT_OK if ok else EXIT_FAIL
        if cfg.command == "roundtrip":
            out, ok = roundtrip(cfg)
        else:
            out, ok = verify(cfg)
        return out, EXIT_OK if ok else EXIT_FAIL
    except BadConfig as e:
        return {"error": {"name": e.name, "message": str(e)}}, EXIT_CONFIG
    except CMVError as e:
        return {"error": {"name": e.name, "message": str(e)}}, EXIT_NUMERIC


def main(argv=None) -> int:
    out, code = run(argv)
    path = out.pop("_out", None) if isinstance(out, dict) else None
    text = io.dump(out, path)
    if path is None or code != EXIT_OK:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
