import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from germforge.series import (
    ANTIHOLOMORPHIC,
    HOLOMORPHIC,
    SeriesError,
    TruncatedSeries,
    compose,
    conjugate_by,
    invert,
    residue_iteratif,
    series_arith,
)
from helpers import anti, holo

z = sympy.symbols("z")


def sym_coeffs(expr, order):
    """Coefficients of z^1..z^order of a sympy polynomial/series."""
    poly = sympy.series(expr, z, 0, order + 1).removeO()
    return [complex(sympy.expand(poly).coeff(z, n)) for n in range(1, order + 1)]


def test_sigma_is_involution():
    s = TruncatedSeries.sigma(6)
    out = compose(s, s)
    assert out.parity == HOLOMORPHIC
    assert out.allclose(TruncatedSeries.identity(6))


def test_anti_square_hand_expansion():
    # (zbar + zbar^2) o (zbar + zbar^2) = z + z^2 + (z + z^2)^2
    f = anti(1, 1, order=4)
    out = compose(f, f)
    assert out.parity == HOLOMORPHIC
    np.testing.assert_allclose(out.coeffs, [1, 2, 2, 1])


def test_holo_compose_symbolic():
    out = compose(holo(1, 1, order=4), holo(1, 0, 1, order=4))
    expected = sym_coeffs((z + z**3) + (z + z**3) ** 2, 4)
    np.testing.assert_allclose(out.coeffs, expected)
    np.testing.assert_allclose(out.coeffs, [1, 1, 1, 2])


def test_anti_outer_conjugates_inner():
    # A(conj(B(z))) with B = z + i z^2 and A = zbar + zbar^2
    f = anti(1, 1, order=4)
    g = holo(1, 1j, order=4)
    out = compose(f, g)
    assert out.parity == ANTIHOLOMORPHIC
    w = sympy.symbols("w")  # stands for zbar
    b_conj = w - sympy.I * w**2
    expected = [complex(sympy.expand(b_conj + b_conj**2).coeff(w, n)) for n in range(1, 5)]
    np.testing.assert_allclose(out.coeffs, expected)


def test_invert_lagrange():
    # Lagrange inversion: z + z^2 has inverse sum (-1)^{n-1} Catalan(n-1) z^n
    inv = invert(holo(1, 1, order=6))
    catalan = [sympy.catalan(n - 1) * (-1) ** (n - 1) for n in range(1, 7)]
    np.testing.assert_allclose(inv.coeffs, [float(c) for c in catalan])
    np.testing.assert_allclose(inv.coeffs[:4], [1, -1, 2, -5])


def test_invert_sigma_and_identity():
    assert invert(TruncatedSeries.sigma(5)).allclose(TruncatedSeries.sigma(5))
    assert invert(TruncatedSeries.identity(5)).allclose(TruncatedSeries.identity(5))


def test_invert_rejects_bad_linear_part():
    with pytest.raises(SeriesError):
        invert(holo(0, 1, order=3))
    with pytest.raises(SeriesError):
        invert(anti(2, 1, order=3))


def test_compose_order_mismatch():
    with pytest.raises(SeriesError):
        compose(holo(1, 1, order=3), holo(1, 1, order=4))


def test_no_constant_term():
    with pytest.raises(SeriesError):
        TruncatedSeries.from_terms({0: 1, 1: 1}, 3)


def test_conjugate_by_identity_and_scaling():
    f = anti(1, 0.3, -0.2j, order=5)
    assert conjugate_by(TruncatedSeries.identity(5), f).allclose(f)
    lam = 0.7 * np.exp(0.4j)
    out = conjugate_by(holo(lam, order=1), anti(1, order=1))
    assert out.coeffs[0] == pytest.approx(lam / np.conj(lam))


def test_conjugate_by_symbolic():
    h = holo(1, 1, order=5)
    f = holo(1, 1, order=5)
    out = conjugate_by(h, f)
    # h = z + z^2 inverts in closed form
    hinv = sympy.series((-1 + sympy.sqrt(1 + 4 * z)) / 2, z, 0, 6).removeO()
    fz = hinv + hinv**2
    expected = sym_coeffs(fz + fz**2, 5)
    np.testing.assert_allclose(out.coeffs, expected, atol=1e-12)


def residue_oracle(coeffs):
    g = sum(c * z ** (n + 1) for n, c in enumerate(coeffs))
    return complex(sympy.residue(1 / (z - g), z, 0))


@pytest.mark.parametrize("coeffs,expected", [([1, 1], 0), ([1, 1, 1], 1)])
def test_residue_examples(coeffs, expected):
    g = holo(*coeffs, order=5)
    assert residue_iteratif(g) == pytest.approx(expected, abs=1e-14)
    assert residue_oracle(coeffs) == pytest.approx(expected)


def test_residue_needs_parabolic_term():
    with pytest.raises(SeriesError):
        residue_iteratif(TruncatedSeries.identity(5))


def test_series_arith():
    f = holo(1, 1, order=3)
    assert np.all(series_arith(f, f, "sub").coeffs == 0)
    assert series_arith(f, 1, "scale").allclose(f)
    np.testing.assert_allclose(series_arith(f, holo(1, -1, order=3), "add").coeffs, [2, 0, 0])
    with pytest.raises(SeriesError):
        series_arith(f, anti(1, 1, order=3), "add")


coef = st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False)


def _series(draw_coeffs, parity):
    c = np.array([1.0] + list(draw_coeffs), complex)
    if parity == ANTIHOLOMORPHIC:
        c[0] = np.exp(1j * 0.3)
    return TruncatedSeries(c, parity)


@settings(max_examples=40, deadline=None)
@given(st.lists(coef, min_size=5, max_size=5), st.lists(coef, min_size=5, max_size=5),
       st.lists(coef, min_size=5, max_size=5), st.sampled_from([HOLOMORPHIC, ANTIHOLOMORPHIC]),
       st.sampled_from([HOLOMORPHIC, ANTIHOLOMORPHIC]), st.sampled_from([HOLOMORPHIC, ANTIHOLOMORPHIC]))
def test_associativity_and_parity(a, b, c, pa, pb, pc):
    f, g, h = _series(a, pa), _series(b, pb), _series(c, pc)
    left = compose(compose(f, g), h)
    right = compose(f, compose(g, h))
    assert left.allclose(right, 1e-12)
    assert (compose(f, g).parity == ANTIHOLOMORPHIC) == ((pa == ANTIHOLOMORPHIC) != (pb == ANTIHOLOMORPHIC))


@settings(max_examples=40, deadline=None)
@given(st.lists(coef, min_size=6, max_size=6), st.sampled_from([HOLOMORPHIC, ANTIHOLOMORPHIC]))
def test_invert_two_sided(a, parity):
    f = _series(a, parity)
    ident = TruncatedSeries.identity(7)
    assert compose(f, invert(f)).allclose(ident, 1e-9)
    assert compose(invert(f), f).allclose(ident, 1e-9)


def test_residue_conjugation_invariant(rng):
    g = holo(1, 0.5, 0.3 - 0.2j, 0.1, 0.05j, order=9)
    r0 = residue_iteratif(g)
    for _ in range(10):
        h = np.zeros(9, complex)
        h[0] = 1
        h[1:5] = 0.3 * (rng.normal(size=4) + 1j * rng.normal(size=4))
        gh = conjugate_by(TruncatedSeries(h), g)
        assert residue_iteratif(gh) == pytest.approx(r0, abs=1e-10)


def test_exact_backend_round_trip():
    f = TruncatedSeries([1, sympy.Rational(1, 2), sympy.I], ANTIHOLOMORPHIC, exact=True)
    g = compose(f, f)
    assert g.exact
    assert [sympy.simplify(c) for c in g.coeffs[:2]] == [1, 1]
