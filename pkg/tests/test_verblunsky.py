import numpy as np
import pytest

from cmv_spectral.errors import NormTooLarge, OutOfWindow, WindowTooSmall
from cmv_spectral.linalg import op_norm
from cmv_spectral.verblunsky import build_cmv, constant, derive, free, half_lattice, identity_residuals, random_data


def test_derived_blocks_satisfy_defect_identities(rng):
    d = random_data(3, -4, 4, 0.9, rng)
    for k in d.sites:
        al, r, rt = d.alpha_at(k), d.rho(k), d.rhot(k)
        np.testing.assert_allclose(r @ r, np.eye(3) - al.conj().T @ al, atol=1e-13)
        np.testing.assert_allclose(rt @ rt, np.eye(3) - al @ al.conj().T, atol=1e-13)
        np.testing.assert_allclose(rt @ al, al @ r, atol=1e-13)
        th = d.theta(k)
        np.testing.assert_allclose(th.conj().T @ th, np.eye(6), atol=1e-13)
    assert max(identity_residuals(d).values()) < 1e-12


def test_norm_cap_enforced():
    with pytest.raises(NormTooLarge):
        derive([np.eye(2)])


def test_random_data_respects_cap_and_seed():
    a = random_data(2, 0, 30, 0.5, np.random.default_rng(7))
    b = random_data(2, 0, 30, 0.5, np.random.default_rng(7))
    assert all(op_norm(a.alpha_at(k)) <= 0.5 + 1e-15 for k in a.sites)
    assert all(np.array_equal(a.alpha_at(k), b.alpha_at(k)) for k in a.sites)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_truncation_is_unitary_five_diagonal(rng, m):
    d = random_data(m, -7, 8, 0.8, rng)
    op = build_cmv(d)
    assert op.unitarity_residual() < 1e-12
    assert op.factor_residual() == 0.0
    assert op.band_violation() == 0.0


def test_V_and_W_hold_even_and_odd_blocks(rng):
    d = random_data(1, 1, 6, 0.5, rng)
    op = build_cmv(d)
    # Theta_2 sits in V on sites (1, 2); Theta_3 in W on sites (2, 3)
    np.testing.assert_allclose(op.V[0:2, 0:2], d.theta(2))
    np.testing.assert_allclose(op.W[1:3, 1:3], d.theta(3))


def test_free_operator_is_a_permutation():
    U = build_cmv(free(1, 0, 9)).U
    assert np.allclose(np.abs(U) ** 2 @ np.ones(10), 1)
    assert set(np.round(np.abs(U).ravel(), 12)) <= {0.0, 1.0}


def test_unsplit_truncation_is_not_unitary(rng):
    d = random_data(1, 0, 9, 0.8, rng)
    assert build_cmv(d, False, False).unitarity_residual() > 1e-3


def test_half_lattice_sites():
    d = constant(0.3 * np.eye(2), -5, 5)
    assert list(half_lattice(d, 1, "plus").sites) == list(range(1, 6))
    assert list(half_lattice(d, 1, "minus").sites) == list(range(-5, 2))
    with pytest.raises(OutOfWindow):
        half_lattice(d, 5, "plus")


def test_window_too_small():
    with pytest.raises(WindowTooSmall):
        build_cmv(constant(0.1, 0, 0))


def test_replace_and_restrict(rng):
    d = random_data(2, 0, 6, 0.5, rng)
    d2 = d.replace({3: np.zeros((2, 2))})
    assert np.all(d2.alpha_at(3) == 0) and np.array_equal(d2.alpha_at(4), d.alpha_at(4))
    r = d.restrict(2, 4)
    assert (r.k_min, r.k_max) == (2, 4)
    with pytest.raises(OutOfWindow):
        d.replace({9: np.zeros((2, 2))})
