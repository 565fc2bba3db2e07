"""Formal classification: realification, codimension, type, prenormal forms,
the model flow ``dz/dt = z^{k+1} / (1 + b z^k)`` and its root families.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import sympy

from germforge.series import (
    ANTIHOLOMORPHIC,
    HOLOMORPHIC,
    SeriesError,
    TruncatedSeries,
    compose,
    conjugate_by,
    invert,
    poly_compose,
    poly_mul,
    residue_iteratif,
)

ZERO_TOL = 1e-10


class FormalError(ValueError):
    pass


class NegativeTypeError(FormalError):
    """Even codimension with ``A_{k+1} < 0``: prenormalize the inverse instead."""


class UndeterminedError(FormalError):
    pass


@dataclass(frozen=True)
class VectorFieldParams:
    k: int
    b: complex = 0.0

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise FormalError(f"codimension must be a positive integer, got {self.k}")


@dataclass
class FormalClass:
    k: Optional[int]
    type_sign: str  # "positive" | "negative" | "n/a"
    b: Optional[complex]
    degenerate: bool
    residue: Optional[complex] = None
    scaling: Optional[complex] = None
    notes: list = field(default_factory=list)


def default_order(k: int) -> int:
    return 2 * k + 4


# ----------------------------------------------------------------------
# small helpers for the float / exact backends
# ----------------------------------------------------------------------

def _re(x):
    return sympy.re(x) if isinstance(x, sympy.Basic) else x.real


def _im(x):
    return sympy.im(x) if isinstance(x, sympy.Basic) else x.imag


def _sqrt(x):
    if isinstance(x, sympy.Basic):
        return sympy.sqrt(x)
    return cmath.sqrt(complex(x))


def _monomial(order: int, coeffs: dict, exact: bool, parity=HOLOMORPHIC) -> TruncatedSeries:
    return TruncatedSeries.from_terms(coeffs, order, parity, exact=exact)


# ----------------------------------------------------------------------
# realification
# ----------------------------------------------------------------------

def realify(f: TruncatedSeries, order: Optional[int] = None):
    """Conjugate an antiholomorphic jet to one with real coefficients.

    Returns ``(f_dag, h)`` with ``h o f = f_dag o h`` to the given order.
    ``arg h'(0) = -arg(a_1)/2`` and the free real parts of the higher
    coefficients of ``h`` are set to zero.
    """
    if not f.is_antiholomorphic:
        raise FormalError("realify expects an antiholomorphic jet")
    n_ord = order or f.order
    f = f.truncate(n_ord)
    a1 = f[1]
    if not f.exact and abs(abs(a1) - 1) > 1e-12:
        raise FormalError(f"|a_1| = {abs(a1)} != 1")
    exact = f.exact
    b1 = 1 / _sqrt(a1)
    if exact:
        b1 = sympy.nsimplify(b1) if not isinstance(b1, sympy.Basic) else sympy.simplify(b1)
    h = _monomial(n_ord, {1: b1}, exact)
    f1 = conjugate_by(h, f)
    hh = [0] * n_ord if exact else np.zeros(n_ord, complex)
    hh[0] = 1
    dag = [0] * n_ord if exact else np.zeros(n_ord, complex)
    dag[0] = 1
    for n in range(2, n_ord + 1):
        hn = TruncatedSeries(hh[:n], HOLOMORPHIC, exact=exact)
        dn = TruncatedSeries(dag[:n], ANTIHOLOMORPHIC, exact=exact)
        fn = f1.truncate(n)
        r0 = (compose(hn, fn) - compose(dn, hn))[n]
        if exact:
            r0 = sympy.expand(r0)
        hh[n - 1] = -sympy.I * _im(r0) / 2 if exact else -0.5j * r0.imag
        dag[n - 1] = _re(r0)
    h_real = TruncatedSeries(hh, HOLOMORPHIC, exact=exact)
    f_dag = TruncatedSeries(dag, ANTIHOLOMORPHIC, exact=exact)
    return f_dag, compose(h_real, h)


def conjugacy_residual(h: TruncatedSeries, f: TruncatedSeries, f_new: TruncatedSeries) -> float:
    """``max |coeff(h o f - f_new o h)|``."""
    d = (compose(h, f) - compose(f_new, h)).as_float()
    return float(np.max(np.abs(d.coeffs)))


# ----------------------------------------------------------------------
# codimension, type, prenormalization
# ----------------------------------------------------------------------

def is_degenerate(f: TruncatedSeries, tol: float = ZERO_TOL) -> bool:
    """``f o f = id`` to the order of the jet (conjugate to sigma at this order)."""
    if not f.is_antiholomorphic:
        return False
    g = compose(f, f).as_float()
    return bool(np.max(np.abs(g.coeffs - TruncatedSeries.identity(f.order).coeffs)) <= tol)


def _first_nonlinear(s: TruncatedSeries, tol: float) -> Optional[int]:
    c = s.as_float().coeffs
    for n in range(2, s.order + 1):
        if abs(c[n - 1]) > tol:
            return n
    return None


def _holo_k(g: TruncatedSeries, tol: float) -> int:
    if abs(complex(g[1]) - 1) > tol:
        raise FormalError("holomorphic germ is not tangent to the identity")
    n0 = _first_nonlinear(g, tol)
    if n0 is None:
        raise UndeterminedError("g - z vanishes to this order; undetermined at this order")
    return n0 - 1


def classify(f: TruncatedSeries, tol: float = ZERO_TOL) -> FormalClass:
    if not f.is_antiholomorphic:
        k = _holo_k(f, tol)
        cls = FormalClass(k=k, type_sign="n/a", b=None, degenerate=False)
        if 2 * k + 1 <= f.order:
            cls.residue = complex(residue_iteratif(f))
            cls.b = (k + 1) / 2 - cls.residue
        else:
            cls.notes.append(f"order {f.order} < 2k+1 = {2 * k + 1}: b undetermined")
        return cls
    if is_degenerate(f, tol):
        return FormalClass(k=None, type_sign="n/a", b=None, degenerate=True,
                           notes=["f o f = id at this order: conjugate to sigma"])
    f_dag, _ = realify(f.as_float() if f.exact else f)
    n0 = _first_nonlinear(f_dag, tol)
    if n0 is None:
        raise UndeterminedError("realified jet is sigma but f o f != id; undetermined at this order")
    k = n0 - 1
    lead = float(np.real(f_dag[k + 1]))
    if k % 2 == 0:
        type_sign = "positive" if lead > 0 else "negative"
    else:
        type_sign = "n/a"
    cls = FormalClass(k=k, type_sign=type_sign, b=None, degenerate=False)
    if 2 * k + 1 > f.order:
        cls.notes.append(f"order {f.order} < 2k+1 = {2 * k + 1}: b undetermined")
        return cls
    g = compose(f, f).as_float()
    cls.residue = complex(residue_iteratif(g))
    if type_sign == "negative":
        cls.b = ((k + 1) / 2 - cls.residue).real
        cls.notes.append("negative type: b read from the fixed-point index of f o f")
    else:
        _, params, _, scaling = _prenormalize(f, tol)
        cls.b = params.b
        cls.scaling = scaling
    return cls


def _kill_degree(F: TruncatedSeries, m: int, target: int, real: bool):
    """Conjugate by ``z + beta z^m`` so the ``target`` coefficient vanishes."""
    order = F.order
    c0 = complex(F[target])
    probe = _monomial(order, {1: 1, m: 1}, False)
    d = complex(conjugate_by(probe, F)[target]) - c0
    beta = -c0 / d
    if real:
        beta = beta.real
    h = _monomial(order, {1: 1, m: beta}, False)
    return conjugate_by(h, F), h


def _prenormalize(f: TruncatedSeries, tol: float = ZERO_TOL):
    f = f.as_float() if f.exact else f
    N = f.order
    anti = f.is_antiholomorphic
    if anti:
        F, h = realify(f)
        n0 = _first_nonlinear(F, tol)
        if n0 is None:
            raise UndeterminedError("no parabolic term at this order")
        k = n0 - 1
        lead = F[k + 1].real
        if k % 2 == 0 and lead < 0:
            raise NegativeTypeError("negative type: prenormalize the inverse germ instead")
        lam = math.copysign(abs(2 * lead) ** (1.0 / k), lead)
    else:
        F, h = f, TruncatedSeries.identity(N)
        k = _holo_k(f, tol)
        c = complex(F[k + 1])
        lam = abs(c) ** (1.0 / k) * cmath.exp(1j * (cmath.phase(c) % (2 * math.pi)) / k)
    if 2 * k + 1 > N:
        raise FormalError(f"order {N} too small: need N >= 2k+1 = {2 * k + 1}")
    s = _monomial(N, {1: lam}, False)
    F = conjugate_by(s, F)
    h = compose(s, h)
    for m in range(2, k + 1):
        F, hm = _kill_degree(F, m, m + k, real=anti)
        h = compose(hm, h)
    # only the (2k+2)-jet of h is kept, which is an honest analytic change
    h = TruncatedSeries(np.concatenate([h.coeffs[: 2 * k + 2], np.zeros(N - min(N, 2 * k + 2))])[:N])
    f_pre = conjugate_by(h, f)
    top = complex(f_pre[2 * k + 1])
    if anti:
        b = ((k + 1) / 4 - 2 * top).real
    else:
        b = (k + 1) / 2 - top
    return f_pre, VectorFieldParams(k, b), h, lam


def prenormalize(f: TruncatedSeries, tol: float = ZERO_TOL):
    """Return ``(f_pre, VectorFieldParams(k, b), h)`` with ``f_pre = h o f o h^{-1}``.

    ``h`` is a polynomial of degree at most ``2k+2`` and ``f_pre`` agrees
    with the model normal form up to degree ``2k+1``.
    """
    f_pre, params, h, _ = _prenormalize(f, tol)
    return f_pre, params, h


# ----------------------------------------------------------------------
# the model vector field
# ----------------------------------------------------------------------

def vector_field_coeffs(p: VectorFieldParams, order: int, exact: bool = False) -> np.ndarray:
    """Coefficients (index = degree) of ``z^{k+1} / (1 + b z^k)``."""
    v = np.zeros(order + 1, dtype=object if exact else complex)
    if exact:
        v[:] = 0
    j = 0
    while p.k + 1 + j * p.k <= order:
        v[p.k + 1 + j * p.k] = (-p.b) ** j
        j += 1
    return v


def flow_map(p: VectorFieldParams, t, order: int) -> TruncatedSeries:
    """Jet of the time-``t`` map via the Lie series ``sum t^m X^m(z) / m!``."""
    if order < p.k + 1:
        raise FormalError(f"order must be at least k+1 = {p.k + 1}")
    exact = isinstance(t, sympy.Basic) or isinstance(p.b, sympy.Basic)
    v = vector_field_coeffs(p, order, exact)
    term = np.zeros(order + 1, dtype=object if exact else complex)
    if exact:
        term[:] = 0
    term[1] = 1
    total = term.copy()
    m = 1
    tm = 1
    # python ints divided by m would turn into floats on the exact backend
    degrees = np.array(range(1, order + 1), dtype=object) if exact else np.arange(1, order + 1)
    while m * p.k + 1 <= order:
        deriv = np.zeros_like(term)
        if exact:
            deriv[:] = 0
        deriv[:-1] = term[1:] * degrees
        term = poly_mul(v, deriv, order)
        term = term * sympy.Rational(1, m) if exact else term / m
        tm = tm * t
        total = total + tm * term
        m += 1
    if exact:
        total = np.array([sympy.expand(c) for c in total], dtype=object)
    return TruncatedSeries(total[1:], HOLOMORPHIC, exact=exact)


def sigma_ell(k: int, ell: int, order: int) -> TruncatedSeries:
    """Reflection ``z -> exp(2 i pi ell / k) conj(z)``."""
    return _monomial(order, {1: cmath.exp(2j * math.pi * ell / k)}, False, ANTIHOLOMORPHIC)


def antiholomorphic_normal_form(p: VectorFieldParams, order: int) -> TruncatedSeries:
    """Jet of ``sigma o v^{1/2}``."""
    return compose(TruncatedSeries.sigma(order), flow_map(p, 0.5, order))


@dataclass(frozen=True)
class RootFamily:
    """Antiholomorphic roots ``sigma_ell o v^{s + i y}`` of the normal form."""

    params: VectorFieldParams
    n: int
    ell: int
    real_time: float
    parametrized: bool

    @property
    def linear_part(self) -> complex:
        return cmath.exp(2j * math.pi * self.ell / self.params.k)

    def jet(self, order: int, y: float = 0.0) -> TruncatedSeries:
        if not self.parametrized and y != 0:
            raise FormalError("odd-order root is unique; no imaginary time parameter")
        return compose(sigma_ell(self.params.k, self.ell, order),
                       flow_map(self.params, self.real_time + 1j * y, order))


def normal_form_root_families(p: VectorFieldParams, n: int) -> list[RootFamily]:
    """For ``n`` even: the ``k`` families of n-th roots of ``v^1``;
    for ``n`` odd: the single n-th root of ``sigma o v^{1/2}``.
    """
    if n < 2:
        raise FormalError("root order must be at least 2")
    if n % 2 == 0:
        return [RootFamily(p, n, ell, 1.0 / n, True) for ell in range(p.k)]
    return [RootFamily(p, n, 0, 1.0 / (2 * n), False)]


def iterate_series(f: TruncatedSeries, n: int) -> TruncatedSeries:
    out = f
    for _ in range(n - 1):
        out = compose(f, out)
    return out


__all__ = [
    "FormalClass", "FormalError", "NegativeTypeError", "UndeterminedError", "VectorFieldParams",
    "RootFamily", "antiholomorphic_normal_form", "classify", "conjugacy_residual", "default_order",
    "flow_map", "invert", "is_degenerate", "iterate_series", "normal_form_root_families",
    "prenormalize", "realify", "sigma_ell", "vector_field_coeffs", "SeriesError", "poly_compose",
]
