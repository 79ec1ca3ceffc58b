import numpy as np
import pytest

from cmv_spectral.errors import WindowTooNarrow
from cmv_spectral.greens import (
    greens_pointwise,
    greens_series,
    locality_radius,
    m_matrix,
    m_matrix_direct,
    m_matrix_series,
    phi11_factorization_residual,
    polynomial_identity_residuals,
    resolvent_formula,
    symmetry_residual,
    M_values,
    truncated_resolvent,
    wronskian_constancy,
)
from cmv_spectral.linalg import op_norm
from cmv_spectral.verblunsky import constant, random_data


@pytest.mark.parametrize("k0", [0, 1])
def test_resolvent_closed_form(rng, k0):
    d = random_data(2, -12, 12, 0.7, rng)
    for z in (0.3j, 0.5 * np.exp(2.0j), 2.0 + 0.5j):
        for k, kp in ((k0, k0), (k0 - 2, k0 + 1), (k0 + 3, k0)):
            np.testing.assert_allclose(resolvent_formula(d, k0, z, k, kp), truncated_resolvent(d, z, k, kp), atol=1e-11)


def test_wronskian_signs(rng):
    d = random_data(2, -10, 10, 0.6, rng)
    w = wronskian_constancy(d, 1, 0.4 + 0.2j, range(-2, 5))
    for k in range(-2, 5):
        np.testing.assert_allclose(w["PQ"][k], np.eye(2), atol=1e-11)
        np.testing.assert_allclose(w["UU"][k], w["W"], atol=1e-11)
        np.testing.assert_allclose(w["UU_swapped"][k], -w["W"], atol=1e-11)


@pytest.mark.parametrize("k", [-1, 1, 2, 4])
def test_polynomial_identities(rng, k):
    d = random_data(2, -10, 10, 0.6, rng)
    res = polynomial_identity_residuals(d, 1, 0.3 + 0.3j, k)
    assert max(res.values()) < 1e-10


def test_weyl_symmetry(rng):
    d = random_data(2, -15, 15, 0.6, rng)
    z = 0.4 * np.exp(0.3j)
    Mp, Mm = M_values(d, 1, z)
    Mp2, Mm2 = M_values(d, 1, 1 / np.conj(z))
    np.testing.assert_allclose(Mp, -Mp2.conj().T, atol=1e-10)
    assert symmetry_residual(Mp, Mm) >= 0


def test_scalar_half_green_oracle():
    G = greens_series(constant(0.5, -20, 20), 1, 2)
    assert G.g[0][0, 0] == pytest.approx(-0.25, abs=1e-14)


def test_green_series_matches_pointwise(rng):
    d = random_data(1, -25, 25, 0.5, rng)
    G = greens_series(d, 1, 8)
    z = 0.02
    g, h = greens_pointwise(d, 1, z)
    assert op_norm(G.g(z) - g) < 1e-10 and op_norm(G.h(z) - h) < 1e-10


def test_green_series_window_requirement(rng):
    N = 3
    R = locality_radius(N)
    d = random_data(1, 1 - R, 1 + R, 0.5, rng)
    greens_series(d, 1, N)
    with pytest.raises(WindowTooNarrow):
        greens_series(d.restrict(2 - R, 1 + R), 1, N)


@pytest.mark.parametrize("k", [1, 2])
def test_m_matrix(rng, k):
    d = random_data(2, -20, 20, 0.6, rng)
    z = 0.3 + 0.2j
    a, b = m_matrix(d, k, z), m_matrix_direct(d, k, z)
    for key in ("M_00", "M_01", "M_10", "M_11"):
        np.testing.assert_allclose(a[key], b[key], atol=1e-12)
    np.testing.assert_allclose(m_matrix(d, k + 1, z)["M_00"], a["M_11"], atol=1e-12)
    assert phi11_factorization_residual(d, k, z) < 1e-12
    s = m_matrix_series(d, k, 6)
    np.testing.assert_allclose(s["M_11"](0.01), m_matrix(d, k, 0.01)["M_11"], atol=1e-10)
