import numpy as np
import pytest

from cmv_spectral.errors import OutOfWindow, ZeroArgument
from cmv_spectral.greens import pair_values
from cmv_spectral.laurent import (
    LaurentPoly,
    connect_left_right,
    family_over,
    generate_family,
    leading_term,
    transfer,
    transfer_inverse,
)
from cmv_spectral.verblunsky import random_data


def test_laurent_arithmetic():
    I = np.eye(2)
    p = LaurentPoly(-1, [I, 2 * I])  # z^-1 I + 2 I
    q = LaurentPoly.monomial(1, 3 * I)
    z = 0.4 + 0.3j
    np.testing.assert_allclose((p + q)(z), p(z) + q(z))
    np.testing.assert_allclose(p.matmul(q)(z), p(z) @ q(z))
    np.testing.assert_allclose(p.shift(2)(z), z**2 * p(z))
    assert (p - p).is_zero()
    assert p.hi == 0 and p.lo == -1


def test_star_on_circle():
    A = np.array([[1, 2j], [0, 1]])
    p = LaurentPoly(-1, [A, A.T])
    z = np.exp(0.7j)
    np.testing.assert_allclose(p.star_on_circle()(z), p(z).conj().T)


@pytest.mark.parametrize("k", [3, 4])
def test_transfer_inverse(rng, k):
    d = random_data(2, 0, 8, 0.7, rng)
    z = 0.6 * np.exp(1.1j)
    np.testing.assert_allclose(transfer(d, z, k) @ transfer_inverse(d, z, k), np.eye(4), atol=1e-12)
    with pytest.raises(ZeroArgument):
        transfer(d, 0, k)


def test_family_matches_transfer_products(rng):
    d = random_data(2, -6, 6, 0.6, rng)
    z = 0.5 + 0.2j
    P = generate_family(d, 1, "plus", "P", 4)
    R = generate_family(d, 1, "plus", "R", 4)
    vals = pair_values(d, 1, z, True, 1, 5)
    v = np.vstack([P[1](z), R[1](z)])
    for k in range(2, 6):
        v = transfer(d, z, k) @ v
        np.testing.assert_allclose(v, np.vstack(vals[k]), atol=1e-12)
        np.testing.assert_allclose(np.vstack([P[k](z), R[k](z)]), v, atol=1e-12)


def test_leading_terms_invertible(rng):
    d = random_data(2, -6, 6, 0.6, rng)
    for side in ("plus", "minus"):
        for kind in "PQRS":
            fam = generate_family(d, 2, side, kind, 4)
            for k in fam.ks:
                _, C, ok = leading_term(fam, k)
                assert ok


def test_out_of_window(rng):
    d = random_data(1, 0, 4, 0.5, rng)
    with pytest.raises(OutOfWindow):
        generate_family(d, 2, "plus", "P", 5)


@pytest.mark.parametrize("k0", [1, 2])
def test_minus_families_from_plus_families(rng, k0):
    d = random_data(2, -8, 8, 0.6, rng)
    lo, hi = k0 - 3, k0 + 3
    fams = {x: family_over(d, k0, "plus", x, lo, hi) for x in "PQRS"}
    out = connect_left_right(d, k0, fams)
    z = 0.3 + 0.4j
    for anchor, key in ((k0 - 1, "k0-1"), (k0, "k0")):
        for x in "PQRS":
            direct = family_over(d, anchor, "minus", x, lo, hi)
            for k in range(lo, hi + 1):
                np.testing.assert_allclose(out[key][x][k](z), direct[k](z), atol=1e-11)
