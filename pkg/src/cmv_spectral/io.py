"""JSON (de)serialization of coefficients, measures, series, Green's data and reports.

Complex scalars are [re, im] pairs and matrices are lists of rows of pairs.
Floats are written with Python's shortest round-trip repr, so a load after a
dump reproduces every value bit for bit.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import BadConfig
from .greens import GreensData
from .laurent import LaurentPoly
from .series import MatrixPowerSeries
from .spectral import SpectralMeasure
from .verblunsky import VerblunskyData, derive


def _num(x: float):
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def complex_to_json(c) -> list:
    c = complex(c)
    return [_num(c.real), _num(c.imag)]


def complex_from_json(p) -> complex:
    try:
        re, im = p
        return complex(float(re), float(im))
    except (TypeError, ValueError) as e:
        raise BadConfig(f"expected [re, im], got {p!r}") from e


def matrix_to_json(M) -> list:
    M = np.atleast_2d(np.asarray(M, dtype=np.complex128))
    return [[complex_to_json(v) for v in row] for row in M]


def matrix_from_json(rows) -> np.ndarray:
    try:
        return np.array([[complex_from_json(p) for p in row] for row in rows], dtype=np.complex128)
    except TypeError as e:
        raise BadConfig("malformed matrix") from e


def _require(obj: dict, *keys):
    if not isinstance(obj, dict):
        raise BadConfig("expected a JSON object")
    missing = [k for k in keys if k not in obj]
    if missing:
        raise BadConfig(f"missing keys: {', '.join(missing)}")


def data_to_json(d: VerblunskyData) -> dict:
    return {"m": d.m, "k_min": d.k_min, "alphas": [matrix_to_json(d.alpha_at(k)) for k in d.sites]}


def data_from_json(obj: dict) -> VerblunskyData:
    _require(obj, "m", "k_min", "alphas")
    mats = [matrix_from_json(a) for a in obj["alphas"]]
    if any(A.shape != (obj["m"], obj["m"]) for A in mats):
        raise BadConfig(f"every alpha must be {obj['m']}x{obj['m']}")
    return derive(mats, k_min=int(obj["k_min"]))


def measure_to_json(mu: SpectralMeasure) -> dict:
    return {
        "m": mu.m,
        "atoms": [{"node": complex_to_json(z), "weight": matrix_to_json(w)} for z, w in zip(mu.nodes, mu.weights)],
    }


def measure_from_json(obj: dict) -> SpectralMeasure:
    _require(obj, "m", "atoms")
    m = int(obj["m"])
    nodes = np.array([complex_from_json(a["node"]) for a in obj["atoms"]], dtype=np.complex128)
    weights = np.array([matrix_from_json(a["weight"]) for a in obj["atoms"]], dtype=np.complex128).reshape(-1, m, m)
    return SpectralMeasure(m, nodes, weights)


def series_to_json(s: MatrixPowerSeries) -> dict:
    return {"m": s.m, "N": s.N, "coeffs": [matrix_to_json(s[j]) for j in range(s.N + 1)]}


def series_from_json(obj: dict) -> MatrixPowerSeries:
    _require(obj, "m", "N", "coeffs")
    coeffs = [matrix_from_json(c) for c in obj["coeffs"]]
    if len(coeffs) != int(obj["N"]) + 1:
        raise BadConfig("series length disagrees with N")
    return MatrixPowerSeries(np.array(coeffs).reshape(len(coeffs), obj["m"], obj["m"]))


def greens_to_json(G: GreensData) -> dict:
    return {"k0": G.k0, "g": series_to_json(G.g), "h": series_to_json(G.h)}


def greens_from_json(obj: dict) -> GreensData:
    _require(obj, "k0", "g", "h")
    return GreensData(int(obj["k0"]), series_from_json(obj["g"]), series_from_json(obj["h"]))


def laurent_to_json(p: LaurentPoly) -> list:
    return [{"exponent": e, "matrix": matrix_to_json(M)} for e, M in sorted(p.to_dict().items())]


def laurent_from_json(items) -> LaurentPoly:
    return LaurentPoly.from_dict({int(t["exponent"]): matrix_from_json(t["matrix"]) for t in items})


def alphas_to_json(alphas: dict) -> dict:
    return {str(k): matrix_to_json(v) for k, v in sorted(alphas.items())}


def alphas_from_json(obj: dict) -> dict:
    return {int(k): matrix_from_json(v) for k, v in obj.items()}


def report_to_json(rep) -> dict:
    """ReconstructionReport -> JSON (series-valued checks are dropped, scalars kept)."""
    checks = {}
    for k, v in rep.checks.items():
        if isinstance(v, MatrixPowerSeries):
            continue
        checks[k] = _plain(v)
    return {
        "route": rep.route,
        "window": list(rep.window),
        "recovered": alphas_to_json(rep.recovered),
        "errors": {str(k): _num(v) for k, v in sorted(rep.errors.items())},
        "max_error": _num(rep.max_error) if rep.errors else None,
        "checks": checks,
    }


def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return _num(v)
    if isinstance(v, (complex, np.complexfloating)):
        return complex_to_json(v)
    if isinstance(v, np.ndarray):
        return matrix_to_json(v) if v.ndim == 2 else [_plain(x) for x in v]
    if v is None or isinstance(v, str):
        return v
    return str(v)


plain = _plain


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=False)


def dump(obj, path: str | Path | None) -> str:
    text = dumps(obj)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def load(path: str | Path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as e:
        raise BadConfig(f"no such file: {path}") from e
    except json.JSONDecodeError as e:
        raise BadConfig(f"{path}: invalid JSON ({e})") from e
