import cmath
import math

import numpy as np
import pytest
import sympy

from germforge.formal import (
    FormalError,
    NegativeTypeError,
    VectorFieldParams,
    antiholomorphic_normal_form,
    classify,
    conjugacy_residual,
    default_order,
    flow_map,
    iterate_series,
    normal_form_root_families,
    prenormalize,
    realify,
    sigma_ell,
)
from germforge.series import ANTIHOLOMORPHIC, TruncatedSeries, compose, conjugate_by, invert
from helpers import anti, holo

z = sympy.symbols("z")


def b_oracle(coeffs, k):
    """b = (k+1)/2 - Res_0 1/(z - f o f) for an antiholomorphic f with the given real coefficients."""
    A = z + sum(sympy.Rational(float(c)) * z ** (n + 1) for n, c in enumerate(coeffs) if n and abs(c) > 1e-12)
    g = sympy.expand(A.subs(z, A))
    return (k + 1) / 2 - complex(sympy.residue(1 / (z - g), z, 0))


# ----------------------------------------------------------------------
# realify
# ----------------------------------------------------------------------

def test_realify_fixed_point():
    f = anti(1, 0.5, -0.25, 0.1, order=8)
    f_dag, h = realify(f)
    assert f_dag.allclose(f, 1e-14)
    assert h.allclose(TruncatedSeries.identity(8), 1e-14)


@pytest.mark.parametrize("coeffs", [(-1, 1), (1, 1j), (1j, 0.3 - 0.2j, 0.1j)])
def test_realify_conjugacy(coeffs):
    f = anti(*coeffs, order=6)
    f_dag, h = realify(f)
    assert np.max(np.abs(f_dag.coeffs.imag)) <= 1e-12
    assert conjugacy_residual(h, f, f_dag) <= 1e-12
    # linear part of h: arg b_1 = -arg(a_1)/2
    assert cmath.phase(h[1]) == pytest.approx(-cmath.phase(coeffs[0]) / 2, abs=1e-12)


def test_realify_idempotent():
    f_dag, _ = realify(anti(1, 1j, 0.3, order=7))
    again, h = realify(f_dag)
    assert h.allclose(TruncatedSeries.identity(7), 1e-12)
    assert again.allclose(f_dag, 1e-12)


def test_realify_exact_backend():
    f = TruncatedSeries([1, sympy.I, sympy.Rational(1, 3)], ANTIHOLOMORPHIC, exact=True)
    f_dag, h = realify(f)
    assert all(sympy.simplify(sympy.im(c)) == 0 for c in f_dag.coeffs)
    d = compose(h, f) - compose(f_dag, h)
    assert all(sympy.simplify(c) == 0 for c in d.coeffs)


def test_realify_rejects_non_unit_linear_part():
    with pytest.raises(FormalError):
        realify(anti(2, 1, order=3))


# ----------------------------------------------------------------------
# classify / prenormalize
# ----------------------------------------------------------------------

def test_classify_examples():
    c = classify(anti(1, 0.5, order=12))
    assert c.k == 1 and not c.degenerate
    assert c.b == pytest.approx(b_oracle([1, 0.5], 1), abs=1e-12)
    assert classify(TruncatedSeries.sigma(8)).degenerate
    neg = classify(anti(1, 0, -0.5, order=10))
    assert neg.k == 2 and neg.type_sign == "negative"
    pos = classify(anti(1, 0, 0.5, order=10))
    assert pos.type_sign == "positive"


@pytest.mark.parametrize("coeffs,k", [([1, 1], 1), ([1, 0.3, -0.2], 1), ([1, 0, 1, 0.2], 2), ([1, 0, 0, 0.7], 3)])
def test_classify_b_matches_residue_oracle(coeffs, k):
    c = classify(anti(*coeffs, order=4 * k + 4))
    assert c.k == k
    assert c.b == pytest.approx(b_oracle(coeffs, k), abs=1e-10)


def test_prenormalize_normal_form_is_fixed():
    f = antiholomorphic_normal_form(VectorFieldParams(1, 0.0), 10)
    f_pre, p, h = prenormalize(f)
    assert (p.k, p.b) == (1, pytest.approx(0.0, abs=1e-14))
    assert h.allclose(TruncatedSeries.identity(10), 1e-14)


@pytest.mark.parametrize("coeffs", [(1, 1), (1j, 0.5 + 0.5j, 0.2), (1, 0, 0.7, 0.1j, 0.3)])
def test_prenormalize_shape(coeffs):
    f = anti(*coeffs, order=14)
    f_pre, p, h = prenormalize(f)
    k = p.k
    # h is a polynomial of degree <= 2k+2 and f_pre = h o f o h^{-1}
    assert np.all(h.coeffs[2 * k + 2:] == 0)
    assert f_pre.allclose(conjugate_by(h, f), 1e-12)
    expected = np.zeros(2 * k + 1, complex)
    expected[0], expected[k] = 1, 0.5
    expected[2 * k] = (k + 1) / 8 - p.b / 2
    np.testing.assert_allclose(f_pre.coeffs[: 2 * k + 1], expected, atol=1e-12)
    assert p.b == pytest.approx(b_oracle(realify(f)[0].coeffs.real[: 2 * k + 1].tolist(), k), abs=1e-9)


def test_prenormalize_holomorphic():
    g = holo(1, 1, order=8)
    g_pre, p, h = prenormalize(g)
    assert p.k == 1 and p.b == pytest.approx(1.0)
    assert g_pre[3] == pytest.approx(0.0, abs=1e-14)


def test_prenormalize_refuses_negative_type():
    with pytest.raises(NegativeTypeError):
        prenormalize(anti(1, 0, -0.5, order=10))


def test_prenormalize_order_too_small():
    with pytest.raises(FormalError):
        prenormalize(anti(1, 1, order=2))


def test_classify_is_conjugacy_invariant():
    f = anti(1, 0.4 - 0.1j, 0.2, 0.3j, order=14)
    c0 = classify(f)
    f_pre, p, _ = prenormalize(f)
    c1 = classify(f_pre)
    assert (c1.k, c1.b) == (c0.k, pytest.approx(c0.b, abs=1e-10))
    assert p.b == pytest.approx(c0.b, abs=1e-10)


def test_default_order():
    assert default_order(3) == 10


# ----------------------------------------------------------------------
# flow maps
# ----------------------------------------------------------------------

def test_flow_riccati_closed_form():
    t = 0.3 - 0.2j
    v = flow_map(VectorFieldParams(1, 0.0), t, 8)
    np.testing.assert_allclose(v.coeffs, [t**n for n in range(8)], atol=1e-15)


@pytest.mark.parametrize("k,b", [(1, 0.25), (2, 0.1), (3, -0.7)])
def test_time_one_map(k, b):
    v = flow_map(VectorFieldParams(k, b), 1, 2 * k + 2)
    assert v[k + 1] == pytest.approx(1.0)
    assert v[2 * k + 1] == pytest.approx((k + 1) / 2 - b, abs=1e-14)
    assert all(v[n] == 0 for n in range(2, k + 1))


def test_flow_time_zero():
    assert flow_map(VectorFieldParams(2, 0.3), 0, 9).allclose(TruncatedSeries.identity(9))


def test_flow_exact_time_one_symbolic():
    b = sympy.Rational(1, 4)
    v = flow_map(VectorFieldParams(1, b), sympy.Integer(1), 4)
    assert sympy.simplify(v[3] - (1 - b)) == 0


def test_flow_group_law(rng):
    for k, b in [(1, 0.25), (2, -0.4), (3, 0.1)]:
        p = VectorFieldParams(k, b)
        for _ in range(5):
            t, s = rng.uniform(-1, 1, 2) + 1j * rng.uniform(-1, 1, 2)
            lhs = compose(flow_map(p, t, 12), flow_map(p, s, 12))
            assert lhs.allclose(flow_map(p, t + s, 12), 1e-12)


def test_flow_symmetries():
    for k in (1, 2, 3):
        p = VectorFieldParams(k, 0.3)
        v = flow_map(p, 0.7, 13)
        assert np.max(np.abs(v.coeffs.imag)) == 0
        rot = TruncatedSeries.from_terms({1: cmath.exp(2j * math.pi / k)}, 13)
        assert conjugate_by(rot, v).allclose(v, 1e-13)
        vt = flow_map(p, 0.3 + 0.4j, 13)
        for ell in range(k):
            s = sigma_ell(k, ell, 13)
            assert compose(compose(s, vt), s).allclose(flow_map(p, 0.3 - 0.4j, 13), 1e-13)


def test_even_k_normal_form_commutes_with_minus():
    f = antiholomorphic_normal_form(VectorFieldParams(2, 0.3), 11)
    minus = TruncatedSeries.from_terms({1: -1}, 11)
    assert conjugate_by(minus, f).allclose(f, 1e-14)


def test_normal_form_linear_and_leading_terms():
    f = antiholomorphic_normal_form(VectorFieldParams(2, 0.3), 9)
    assert f.is_antiholomorphic
    assert (f[1], f[3]) == (1, pytest.approx(0.5))


# ----------------------------------------------------------------------
# roots
# ----------------------------------------------------------------------

def test_square_root_family():
    p = VectorFieldParams(1, 0.2)
    (fam,) = normal_form_root_families(p, 2)
    r = fam.jet(12)
    assert compose(r, r).allclose(flow_map(p, 1, 12), 1e-13)
    assert r.allclose(antiholomorphic_normal_form(p, 12), 1e-14)


def test_cube_root_of_normal_form():
    p = VectorFieldParams(2, 0.3)
    (fam,) = normal_form_root_families(p, 3)
    r = fam.jet(12)
    assert iterate_series(r, 3).allclose(antiholomorphic_normal_form(p, 12), 1e-13)
    with pytest.raises(FormalError):
        fam.jet(12, y=0.1)


def test_even_root_families_k2():
    p = VectorFieldParams(2, 0.1)
    fams = normal_form_root_families(p, 2)
    assert [f.ell for f in fams] == [0, 1]
    assert [f.linear_part for f in fams] == [pytest.approx(1), pytest.approx(-1)]
    for fam in fams:
        r = fam.jet(11, y=0.3)
        assert compose(r, r).allclose(flow_map(p, 1, 11), 1e-12)


def test_flow_inverse_is_negative_time():
    p = VectorFieldParams(1, 0.3)
    assert invert(flow_map(p, 1, 10)).allclose(flow_map(p, -1, 10), 1e-13)
