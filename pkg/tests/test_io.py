import json

import numpy as np
import pytest

from cmv_spectral import io
from cmv_spectral.errors import BadConfig
from cmv_spectral.greens import greens_series
from cmv_spectral.inverse import full_lattice_invert_gh
from cmv_spectral.laurent import generate_family
from cmv_spectral.spectral import measure_from_operator
from cmv_spectral.verblunsky import half_lattice, random_data
from cmv_spectral.weyl import phi_plus_series


def through_text(obj):
    return json.loads(io.dumps(obj))


def test_data_round_trip_is_bitwise(rng):
    d = random_data(2, -4, 5, 0.7, rng)
    obj = io.data_to_json(d)
    assert set(obj) == {"m", "k_min", "alphas"}
    d2 = io.data_from_json(through_text(obj))
    assert d2.k_min == -4 and all(np.array_equal(d.alpha_at(k), d2.alpha_at(k)) for k in d.sites)


def test_measure_round_trip(rng):
    d = random_data(2, -6, 6, 0.7, rng)
    mu = measure_from_operator(half_lattice(d, 1, "plus"), 1)
    mu2 = io.measure_from_json(through_text(io.measure_to_json(mu)))
    assert np.array_equal(mu.nodes, mu2.nodes) and np.array_equal(mu.weights, mu2.weights)


def test_series_and_greens_round_trip(rng):
    d = random_data(2, -20, 20, 0.5, rng)
    s = phi_plus_series(d, 1, 4)
    assert io.series_from_json(through_text(io.series_to_json(s))).max_abs_diff(s) == 0.0
    G = greens_series(d, 1, 2)
    G2 = io.greens_from_json(through_text(io.greens_to_json(G)))
    assert G2.k0 == 1 and G2.g.max_abs_diff(G.g) == 0.0 and G2.h.max_abs_diff(G.h) == 0.0


def test_laurent_round_trip(rng):
    d = random_data(1, -5, 5, 0.5, rng)
    p = generate_family(d, 1, "plus", "P", 3)[4]
    q = io.laurent_from_json(through_text(io.laurent_to_json(p)))
    assert p.max_abs_diff(q) == 0.0
    assert all(set(t) == {"exponent", "matrix"} for t in io.laurent_to_json(p))


def test_report_json(rng):
    d = random_data(1, -20, 20, 0.5, rng)
    G = greens_series(d, 1, 3)
    out = through_text(io.report_to_json(full_lattice_invert_gh(G.g, G.h, 1, 3).compare(d)))
    assert out["route"] == "gh" and out["window"] == [-2, 5]
    assert set(out["errors"]) == {str(k) for k in range(-2, 6)}
    assert out["max_error"] < 1e-10


def test_nonfinite_and_bad_input(tmp_path):
    assert io.complex_to_json(complex(np.nan, np.inf)) == ["nan", "inf"]
    with pytest.raises(BadConfig):
        io.data_from_json({"m": 1})
    with pytest.raises(BadConfig):
        io.complex_from_json([1.0])
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(BadConfig):
        io.load(bad)
    with pytest.raises(BadConfig):
        io.load(tmp_path / "missing.json")
    with pytest.raises(BadConfig):
        io.data_from_json({"m": 2, "k_min": 0, "alphas": [[[[0, 0]]]]})
