"""Numerical evaluation of germs given by polynomial jets.

A germ is kept as a callable built from its polynomial jet, so that a
prenormalized germ ``h o f o h^{-1}`` is *exactly* conjugate to the input
(only ``h^{-1}`` is solved numerically, by Newton's method).
"""
from __future__ import annotations

import numpy as np

from germforge.series import ANTIHOLOMORPHIC, HOLOMORPHIC, TruncatedSeries, compose, invert

NEWTON_TOL = 1e-15
NEWTON_CAP = 60


class NewtonError(ArithmeticError):
    pass


def _horner(coeffs: np.ndarray, z):
    """``sum_{n>=1} coeffs[n-1] z^n``."""
    acc = np.zeros_like(np.asarray(z, dtype=complex))
    for c in coeffs[::-1]:
        acc = (acc + c) * z
    return acc


def _horner_deriv(coeffs: np.ndarray, z):
    d = np.arange(1, coeffs.size + 1) * coeffs
    acc = np.zeros_like(np.asarray(z, dtype=complex))
    for c in d[:0:-1]:
        acc = (acc + c) * z
    return acc + d[0]


class Poly:
    """Holomorphic polynomial fixing 0."""

    def __init__(self, coeffs):
        self.coeffs = np.asarray([complex(c) for c in coeffs])

    def __call__(self, z):
        return _horner(self.coeffs, z)

    def deriv(self, z):
        return _horner_deriv(self.coeffs, z)

    def conj(self) -> "Poly":
        return Poly(np.conj(self.coeffs))

    def jet(self, order: int) -> TruncatedSeries:
        c = np.zeros(order, complex)
        m = min(order, self.coeffs.size)
        c[:m] = self.coeffs[:m]
        return TruncatedSeries(c)


def newton_solve(fun, dfun, target, seed, tol=NEWTON_TOL, cap=NEWTON_CAP):
    """Vectorized Newton for ``fun(z) = target``."""
    z = np.array(seed, dtype=complex, copy=True)
    target = np.asarray(target, dtype=complex)
    scale = np.maximum(np.abs(target), 1e-300)
    for _ in range(cap):
        step = (fun(z) - target) / dfun(z)
        z = z - step
        if np.all(np.abs(step) <= tol * np.maximum(np.abs(z), 1e-300)):
            return z
    resid = np.abs(fun(z) - target) / scale
    if np.all(resid <= 1e-12):
        return z
    raise NewtonError(f"Newton did not converge (max rel. residual {np.max(resid):.3g})")


class PolyInverse:
    """Local inverse of a polynomial tangent to ``a_1 z``, seeded by the reverted jet."""

    def __init__(self, p: Poly, seed_order: int = 8):
        self.p = p
        self.seed = Poly(invert(p.jet(seed_order)).coeffs)

    def __call__(self, w):
        return newton_solve(self.p, self.p.deriv, w, self.seed(w))

    def deriv(self, w):
        return 1.0 / self.p.deriv(self(w))


class Germ:
    """Germ ``f`` with holomorphic representative ``A`` (``f = A o sigma`` if antiholomorphic).

    ``g`` is the holomorphic return map conjugate to ``T_1`` in Fatou
    coordinates: ``f o f = A o conj(A)`` for antiholomorphic ``f``, ``f`` itself otherwise.
    """

    def __init__(self, jet: TruncatedSeries):
        self.series = jet.as_float() if jet.exact else jet
        self.anti = jet.is_antiholomorphic
        self.A = Poly(self.series.coeffs)
        self.Abar = self.A.conj()
        self._ginv = None

    @property
    def order(self) -> int:
        return self.series.order

    def jet(self, order: int) -> TruncatedSeries:
        return self.series.truncate(order)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return self.A(np.conj(z) if self.anti else z)

    def g(self, z):
        z = np.asarray(z, dtype=complex)
        return self.A(self.Abar(z)) if self.anti else self.A(z)

    def g_deriv(self, z):
        if not self.anti:
            return self.A.deriv(z)
        return self.A.deriv(self.Abar(z)) * self.Abar.deriv(z)

    def g_jet(self, order: int) -> TruncatedSeries:
        j = self.series.truncate(order)
        return compose(j, j) if self.anti else j

    def g_inv(self, w):
        if self._ginv is None:
            self._ginv = Poly(invert(self.g_jet(8)).coeffs)
        return newton_solve(self.g, self.g_deriv, w, self._ginv(w))


class ConjugatedGerm:
    """``F = h o f o h^{-1}`` with ``h`` a polynomial change of coordinate."""

    def __init__(self, base: Germ, h: TruncatedSeries):
        self.base = base
        self.h = Poly(h.as_float().coeffs if h.exact else h.coeffs)
        self.h_inv = PolyInverse(self.h)
        self.anti = base.anti
        self.h_jet = h.as_float() if h.exact else h

    def __call__(self, w):
        return self.h(self.base(self.h_inv(w)))

    def g(self, w):
        return self.h(self.base.g(self.h_inv(w)))

    def g_inv(self, w):
        return self.h(self.base.g_inv(self.h_inv(w)))

    def jet(self, order: int) -> TruncatedSeries:
        hj = self.h.jet(order)
        return compose(compose(hj, self.base.jet(order)), invert(hj))

    @property
    def order(self) -> int:
        return self.base.order

    def g_jet(self, order: int) -> TruncatedSeries:
        hj = self.h.jet(order)
        return compose(compose(hj, self.base.g_jet(order)), invert(hj))

    # orbit helpers working in base coordinates, which avoid repeated Newton
    def to_base(self, w):
        return self.h_inv(w)

    def from_base(self, z):
        return self.h(z)

    def from_base_deriv(self, z):
        return self.h.deriv(z)


def poly_degree(s: TruncatedSeries) -> int:
    nz = np.nonzero(np.abs(s.as_float().coeffs))[0]
    return int(nz[-1]) + 1 if nz.size else 1


def compose_polys(outer: TruncatedSeries, inner: TruncatedSeries) -> TruncatedSeries:
    """Exact (untruncated) composition of two holomorphic polynomials."""
    d = poly_degree(outer) * poly_degree(inner)
    n = max(d, outer.order, inner.order)
    o = outer.as_float().truncate(n)
    i = inner.as_float().truncate(n)
    return compose(o, i).truncate(d)


def as_conjugated(germ, h: TruncatedSeries | None = None) -> ConjugatedGerm:
    """``h o germ o h^{-1}`` for a polynomial ``h``, keeping a single base germ."""
    if isinstance(germ, TruncatedSeries):
        germ = Germ(germ)
    if h is None:
        h = TruncatedSeries.identity(1)
    if isinstance(germ, ConjugatedGerm):
        return ConjugatedGerm(germ.base, compose_polys(h, germ.h_jet))
    return ConjugatedGerm(germ, h)


__all__ = ["ANTIHOLOMORPHIC", "HOLOMORPHIC", "ConjugatedGerm", "Germ", "NewtonError", "Poly",
           "PolyInverse", "as_conjugated", "compose_polys", "newton_solve", "poly_degree"]
