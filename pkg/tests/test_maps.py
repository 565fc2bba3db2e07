import numpy as np
import pytest

from germforge.maps import (
    ConjugatedGerm,
    Germ,
    NewtonError,
    Poly,
    PolyInverse,
    as_conjugated,
    compose_polys,
    newton_solve,
)
from germforge.series import compose, conjugate_by
from helpers import anti, holo, random_h


def test_poly_matches_numpy():
    c = [1, 0.5 - 0.2j, 0.3j, -0.1]
    z = np.array([0.1, -0.2 + 0.05j, 0.03j])
    expected = np.polyval([*c[::-1], 0], z)
    np.testing.assert_allclose(Poly(c)(z), expected, rtol=1e-14)
    h = 1e-7
    fd = (Poly(c)(z + h) - Poly(c)(z - h)) / (2 * h)
    np.testing.assert_allclose(Poly(c).deriv(z), fd, rtol=1e-7)


def test_poly_inverse_round_trip():
    p = Poly([1, 0.4, -0.3j, 0.2])
    w = np.array([0.05, -0.03 + 0.02j, 0.01j])
    np.testing.assert_allclose(p(PolyInverse(p)(w)), w, atol=1e-15)


def test_newton_failure_is_reported():
    with pytest.raises(NewtonError):
        newton_solve(lambda z: np.ones_like(z), lambda z: np.ones_like(z), 0.0, 0.0, cap=20)


def test_antiholomorphic_germ_evaluation():
    f = Germ(anti(1, 1, order=4))
    z = 0.02 + 0.03j
    w = np.conj(z)
    assert f(z) == pytest.approx(w + w**2)
    assert f.g(z) == pytest.approx(f(f(z)))
    assert f.g_inv(f.g(z)) == pytest.approx(z, abs=1e-15)
    # the jet of g is f o f as a series
    np.testing.assert_allclose(f.g_jet(4).coeffs, [1, 2, 2, 1])


def test_holomorphic_germ_g_is_itself():
    g = Germ(holo(1, 1, order=3))
    assert g.g(0.1) == pytest.approx(0.11)
    assert g(0.1) == pytest.approx(0.11)


def test_compose_polys_is_exact():
    out = compose_polys(holo(1, 1, order=2), holo(1, 1, order=2))
    np.testing.assert_allclose(out.coeffs, [1, 2, 2, 1])


def test_conjugated_germ_matches_series(rng):
    f = anti(1, 0.5, 0.1j, order=10)
    h = random_h(rng)
    F = as_conjugated(f, h)
    assert isinstance(F, ConjugatedGerm)
    assert F.jet(10).allclose(conjugate_by(h.truncate(10), f), 1e-12)
    w = 0.01 - 0.004j
    assert F(w) == pytest.approx(complex(F.jet(10)(w)), abs=1e-18)
    assert F.g(w) == pytest.approx(F(F(w)), abs=1e-16)
    assert F.g_inv(F.g(w)) == pytest.approx(w, abs=1e-15)


def test_as_conjugated_nests(rng):
    f = anti(1, 0.5, order=8)
    h1, h2 = random_h(rng, 3), random_h(rng, 3)
    F = as_conjugated(as_conjugated(f, h1), h2)
    G = as_conjugated(f, compose_polys(h2, h1))
    assert F.base is not None and F.jet(8).allclose(G.jet(8), 1e-12)
    assert F.jet(8).allclose(conjugate_by(compose(h2.truncate(8), h1.truncate(8)), f), 1e-12)
