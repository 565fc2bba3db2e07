import math

import numpy as np
import pytest

from germforge.fatou import (
    FatouControls,
    FatouError,
    FatouSystem,
    formal_fatou_series,
    fourier_extract,
    fourier_from_samples,
)
from germforge.formal import VectorFieldParams, flow_map
from germforge.modulus import prepare
from germforge.sectors import chart_eval, chart_invert
from helpers import anti, nf


@pytest.fixture(scope="module")
def nf_system():
    germ, p = prepare(nf(2, 0.3))
    return FatouSystem(germ, p)


@pytest.fixture(scope="module")
def quad_system():
    germ, p = prepare(anti(1, 1))
    s = FatouSystem(germ, p)
    s.calibrate()
    return s


def _petal_points(p, j, n=6):
    # chart values deep in petal j, mapped back to the plane
    side = 1 if j % 2 else -1
    Z = side * 30.0 + np.linspace(-3, 3, n) + 1j * np.linspace(-4, 4, n)
    return chart_invert(p, j, Z)


def test_formal_series_vanishes_for_time_one_map():
    p = VectorFieldParams(2, 0.3)
    H = formal_fatou_series(flow_map(p, 1, 40), p, 30)
    # round-off grows with the degree; what matters is the size at evaluation radii
    assert np.max(np.abs(H) * 0.3 ** np.arange(H.size)) < 1e-15


def test_formal_series_needs_prenormalized_germ():
    with pytest.raises(FatouError):
        formal_fatou_series(flow_map(VectorFieldParams(1, 0.0), 2, 20), VectorFieldParams(1, 0.0), 10)


def test_normal_form_fatou_is_chart(nf_system):
    # for sigma o v^{1/2} the charts Z_j are exact Fatou coordinates of v^1
    s = nf_system
    for j in range(-2, 3):
        w = _petal_points(s.p, j)
        d = s.phi(j, w) - chart_eval(s.p, j, w)
        assert np.max(np.abs(d - d[0])) < 1e-10


@pytest.mark.parametrize("j", [-1, 0, 1])
def test_abel_equation(quad_system, j):
    s = quad_system
    w = _petal_points(s.p, j)
    lhs = s.phi(j, s.germ.g(w))
    assert np.max(np.abs(lhs - s.phi(j, w) - 1)) <= 1e-6


def test_fatou_invert_round_trip(quad_system):
    s = quad_system
    for j in (-1, 0, 1):
        W = (1 if j % 2 else -1) * 25 + np.array([0.3 + 2j, -1.2 - 3j])
        np.testing.assert_allclose(s.phi(j, s.phi_inv(j, W)), W, atol=1e-9)
        Z = s.fatou_invert(j, W)
        np.testing.assert_allclose(s.fatou_eval(j, Z), W, atol=1e-9)


def test_calibrated_relation(quad_system):
    # Phi_j o f o Phi_{-j}^{-1} = Sigma T_{1/2} up to a real translation
    s = quad_system
    for j in (0, 1):
        W = s._validation_points(-j, 8, 3.0)
        d = s.relation_defect(j, W)
        assert np.max(np.abs(d - d.mean())) <= 1e-6
        assert abs(d.mean().imag) <= 1e-6


def test_transition_is_periodic(quad_system):
    s = quad_system
    for j in (1, -1):
        side = s.transition_half_plane(j)
        W = np.array([0.1, 0.37, 0.8]) + 2j * side
        lhs = s.transition_eval(j, W + 1)
        np.testing.assert_allclose(lhs, s.transition_eval(j, W) + 1, atol=1e-8)


def test_transition_bookkeeping(nf_system):
    s = nf_system
    assert [s.transition_charts(j) for j in (1, 2, -1, -2)] == [(1, 0), (1, 2), (-1, 0), (-1, -2)]
    assert [s.transition_half_plane(j) for j in (1, 2, -1, -2)] == [1, -1, -1, 1]
    with pytest.raises(FatouError):
        s.transition_charts(0)
    with pytest.raises(FatouError):
        s.transition_eval(1, 0.3 + 0.1j)


def test_normal_form_transitions_are_translations(nf_system):
    for j in (1, 2, -1, -2):
        tab = fourier_extract(nf_system, j, height=2.0, samples=64, n_max=6, resolve=1e-5)
        assert all(abs(c) <= tab.floors[n] for n, c in tab.coeffs.items())
        # the sectors overlap inside one chart branch, so the constant is the chart shift
        tgt, src = nf_system.transition_charts(j)
        assert tab.const == pytest.approx(1j * math.pi * 0.3 * (src - tgt) / 2, abs=1e-8)


def test_fourier_synthetic_single_harmonic():
    M, Y = 128, 1.5
    W = np.arange(M) / M + 1j * Y
    tab = fourier_from_samples(0.25 + np.exp(2j * math.pi * W), Y, 5, resolve=1e-5)
    assert tab.const == pytest.approx(0.25)
    assert tab.coeffs[1] == pytest.approx(1.0, rel=1e-12)
    assert all(abs(tab.coeffs[n]) < tab.floors[n] for n in range(2, 6) if n in tab.coeffs)
    W = np.arange(M) / M - 1j * Y
    low = fourier_from_samples(np.exp(-4j * math.pi * W) * (0.3 - 0.1j), -Y, 4, resolve=1e-5)
    assert low.coeffs[-2] == pytest.approx(0.3 - 0.1j, rel=1e-12)
    assert 1 not in low.coeffs


def test_fourier_marks_unresolved():
    M = 64
    noisy = np.random.default_rng(0).normal(size=M) * 1e-3
    tab = fourier_from_samples(noisy, 0.2, 8, resolve=1e-5)
    assert tab.unresolved and set(tab.unresolved).isdisjoint(tab.coeffs)


def test_low_height_fails_cleanly():
    germ, p = prepare(anti(1, 1))
    s = FatouSystem(germ, p, FatouControls())
    with pytest.raises(FatouError, match="height is too small"):
        fourier_extract(s, 1, height=1.0, samples=64, n_max=4)
