import numpy as np
import pytest

from cmv_spectral.errors import MissingAlpha, OutOfWindow
from cmv_spectral.verblunsky import constant, free, random_data
from cmv_spectral.weyl import (
    WeylFunction,
    caratheodory_tools,
    conversion_path,
    convert,
    m_from_measure,
    phi_minus_inv_series,
    phi_plus_series,
    riccati_residual_minus,
    riccati_residual_plus,
    schur_cayley,
    weyl_from_data,
    weyl_series,
)


def test_scalar_half_oracle():
    d = constant(0.5, -20, 20)
    np.testing.assert_allclose(phi_plus_series(d, 1, 3).coeffs.ravel(), [0, -0.5, -0.375, -0.1875], atol=1e-15)
    np.testing.assert_allclose(phi_minus_inv_series(d, 1, 2).coeffs.ravel(), [0.5, 0.375, 0.1875], atol=1e-15)


def test_first_coefficients(rng):
    d = random_data(2, -10, 10, 0.6, rng)
    np.testing.assert_allclose(phi_plus_series(d, 2, 3)[1], -d.alpha_at(3).conj().T, atol=1e-15)
    np.testing.assert_allclose(phi_minus_inv_series(d, 2, 3)[0], d.alpha_at(2), atol=1e-15)


def test_free_case_weyl_functions_are_plus_minus_identity():
    d = free(2, -10, 10)
    Mp = weyl_series(d, 1, "M_plus", 4).series
    Mm = weyl_series(d, 1, "M_minus", 4).series
    assert Mp.max_abs_diff(Mp.identity(2, 4)) == 0.0
    assert Mm.max_abs_diff(Mm.identity(2, 4).scale(-1)) == 0.0


@pytest.mark.parametrize("m", [1, 2, 3])
def test_riccati_residuals(rng, m):
    d = random_data(m, -15, 15, 0.8, rng)
    for k in (0, 1):
        assert riccati_residual_plus(d, k, 6).max_abs() < 1e-12
        assert riccati_residual_minus(d, k, 6).max_abs() < 1e-12


def test_window_preconditions(rng):
    d = random_data(1, 0, 5, 0.5, rng)
    phi_plus_series(d, 1, 4)
    with pytest.raises(OutOfWindow):
        phi_plus_series(d, 1, 5)
    with pytest.raises(OutOfWindow):
        phi_minus_inv_series(d, 3, 4)


@pytest.mark.parametrize("k0", [1, 2])
def test_series_route_matches_measure_route(rng, k0):
    d = random_data(2, -25, 25, 0.6, rng)
    N = 5
    for side, kind in (("plus", "m_plus"), ("minus", "m_minus")):
        via_measure = weyl_from_data(d, k0, side, N=N).series
        via_riccati = weyl_series(d, k0, kind, N).series
        assert via_measure.max_abs_diff(via_riccati) < 1e-12


def test_conversion_round_trips(rng):
    d = random_data(2, -20, 20, 0.6, rng)
    f = weyl_series(d, 1, "Phi_plus", 5)
    back = convert("M_plus", "Phi_plus", convert("Phi_plus", "M_plus", f))
    assert back.series.max_abs_diff(f.series) < 1e-13
    g = weyl_series(d, 1, "Phi_minus_inv", 5)
    back = convert("M_minus", "Phi_minus_inv", convert("Phi_minus_inv", "M_minus", g))
    assert back.series.max_abs_diff(g.series) < 1e-13
    assert conversion_path("m_plus", "Phi_plus")[0] == "m_plus"


def test_pointwise_conversion_matches_series(rng):
    d = random_data(1, -30, 30, 0.5, rng)
    mm = weyl_from_data(d, 2, "minus", N=12)
    to = convert("m_minus", "M_minus", mm)
    z = 0.05
    np.testing.assert_allclose(to(z), to.series(z), atol=1e-10)


def test_shift_needs_alpha(rng):
    d = random_data(1, -20, 20, 0.5, rng)
    mm = weyl_from_data(d, 1, "minus", N=4)
    with pytest.raises(MissingAlpha):
        convert("m_minus_prev", "M_minus", mm)
    shifted = convert("m_minus_prev", "M_minus", mm, alpha_k0=d.alpha_at(2))
    direct = weyl_series(d, 2, "M_minus", 4).series
    assert shifted.k0 == 2
    assert shifted.series.max_abs_diff(direct) < 1e-12


def test_caratheodory_and_herglotz(rng):
    d = random_data(2, -15, 15, 0.7, rng)
    mp = weyl_from_data(d, 1, "plus")
    r = caratheodory_tools(mp)
    assert r["caratheodory_ok"] and r["herglotz_residual"] < 1e-12 and r["reflection_residual"] < 1e-12
    r = caratheodory_tools(weyl_from_data(d, 1, "minus"))
    assert r["caratheodory_ok"]
    r = caratheodory_tools(schur_cayley(mp))
    assert r["schur_ok"]


def test_caratheodory_flags_a_violation():
    bad = WeylFunction("m_plus", 0, evaluator=lambda z: -np.eye(1))
    assert not caratheodory_tools(bad)["caratheodory_ok"]
    broken = WeylFunction("Phi_plus", 0, evaluator=lambda z: 2 * np.eye(1))
    assert not caratheodory_tools(broken)["schur_ok"]


def test_m_from_measure_value_and_series(rng):
    d = random_data(1, -12, 12, 0.5, rng)
    f = weyl_from_data(d, 1, "plus", N=20)
    z = 0.1
    np.testing.assert_allclose(m_from_measure(f.measure, 1, z=z), f.series(z), atol=1e-12)
