"""Truncated power series for germs fixing the origin.

A :class:`TruncatedSeries` stores the coefficients ``a_1 .. a_N`` of a jet.
Antiholomorphic jets are stored through their holomorphic representative:
``f = A o sigma`` where ``sigma(z) = conj(z)``, so ``f(z) = sum a_n conj(z)^n``.
All conjugate-linear bookkeeping happens in :func:`compose`.

Coefficients live in a numpy array, either ``complex128`` (default) or
``object`` (exact backend: :class:`fractions.Fraction`, sympy numbers).
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

HOLOMORPHIC = "holomorphic"
ANTIHOLOMORPHIC = "antiholomorphic"
PARITIES = (HOLOMORPHIC, ANTIHOLOMORPHIC)


class SeriesError(ValueError):
    pass


def _as_coeffs(coeffs, exact: bool) -> np.ndarray:
    if exact:
        arr = np.array(list(coeffs), dtype=object)
    else:
        arr = np.asarray(coeffs, dtype=complex).copy()
    arr.setflags(write=False)
    return arr


class TruncatedSeries:
    """Order-N jet ``a_1 z + ... + a_N z^N`` (or in ``conj(z)``). Immutable."""

    __slots__ = ("coeffs", "parity")

    def __init__(self, coeffs: Sequence, parity: str = HOLOMORPHIC, exact: bool | None = None):
        if parity not in PARITIES:
            raise SeriesError(f"unknown parity {parity!r}")
        if exact is None:
            exact = isinstance(coeffs, np.ndarray) and coeffs.dtype == object
        arr = _as_coeffs(coeffs, exact)
        if arr.ndim != 1 or arr.size == 0:
            raise SeriesError("need at least the linear coefficient")
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "parity", parity)

    def __setattr__(self, name, value):
        raise AttributeError("TruncatedSeries is immutable")

    # -- constructors ---------------------------------------------------
    @classmethod
    def identity(cls, order: int, parity: str = HOLOMORPHIC, exact: bool = False) -> "TruncatedSeries":
        c = [0] * order if exact else np.zeros(order, dtype=complex)
        c[0] = 1
        return cls(c, parity, exact=exact)

    @classmethod
    def sigma(cls, order: int, exact: bool = False) -> "TruncatedSeries":
        """Complex conjugation ``z -> conj(z)``."""
        return cls.identity(order, ANTIHOLOMORPHIC, exact)

    @classmethod
    def from_terms(cls, terms: dict, order: int, parity: str = HOLOMORPHIC,
                   exact: bool = False) -> "TruncatedSeries":
        """Build from ``{degree: coefficient}``; degrees above ``order`` are dropped."""
        c = [0] * order if exact else np.zeros(order, dtype=complex)
        for deg, val in terms.items():
            if deg < 1:
                raise SeriesError("germs fixing 0 have no constant term")
            if deg <= order:
                c[deg - 1] = val
        return cls(c, parity, exact=exact)

    # -- basic properties -------------------------------------------------
    @property
    def order(self) -> int:
        return self.coeffs.size

    @property
    def exact(self) -> bool:
        return self.coeffs.dtype == object

    @property
    def is_antiholomorphic(self) -> bool:
        return self.parity == ANTIHOLOMORPHIC

    def __getitem__(self, degree: int):
        """Coefficient of degree ``degree`` (1-based, 0 for the absent constant)."""
        if degree == 0:
            return 0
        return self.coeffs[degree - 1]

    def __repr__(self) -> str:
        return f"TruncatedSeries({self.parity}, N={self.order}, {list(self.coeffs)!r})"

    def padded(self) -> np.ndarray:
        """Coefficients with the constant term prepended (index = degree)."""
        zero = np.zeros(1, dtype=self.coeffs.dtype)
        if self.exact:
            zero[0] = 0
        return np.concatenate([zero, self.coeffs])

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            extra = [0] * (order - self.order) if self.exact else np.zeros(order - self.order, complex)
            return TruncatedSeries(np.concatenate([self.coeffs, np.array(extra, dtype=self.coeffs.dtype)]),
                                   self.parity, exact=self.exact)
        return TruncatedSeries(self.coeffs[:order], self.parity, exact=self.exact)

    def conj_coeffs(self) -> "TruncatedSeries":
        """Series with every coefficient conjugated (same parity)."""
        return TruncatedSeries(np.conj(self.coeffs), self.parity, exact=self.exact)

    def as_float(self) -> "TruncatedSeries":
        return TruncatedSeries(np.array([complex(c) for c in self.coeffs]), self.parity)

    def allclose(self, other: "TruncatedSeries", tol: float = 1e-12) -> bool:
        if self.parity != other.parity or self.order != other.order:
            return False
        return bool(np.max(np.abs(self.as_float().coeffs - other.as_float().coeffs)) <= tol)

    def __call__(self, z):
        """Evaluate the polynomial jet at ``z`` (scalar or array)."""
        if self.is_antiholomorphic:
            z = np.conj(z)
        acc = 0
        for c in self.coeffs[::-1]:
            acc = (acc + c) * z
        return acc

    def derivative_coeffs(self) -> np.ndarray:
        """Coefficients of ``A'`` (index = degree), for the holomorphic representative."""
        return np.arange(1, self.order + 1) * self.coeffs

    def __add__(self, other):
        return series_arith(self, other, "add")

    def __sub__(self, other):
        return series_arith(self, other, "sub")

    def __neg__(self):
        return series_arith(self, -1, "scale")


# ----------------------------------------------------------------------
# truncated polynomial kernels (index = degree, constant included)
# ----------------------------------------------------------------------

def poly_mul(a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    return np.convolve(a, b)[: order + 1]


def poly_compose(outer: np.ndarray, inner: np.ndarray, order: int) -> np.ndarray:
    """Horner substitution ``outer(inner)``; ``inner[0]`` must vanish."""
    out = np.zeros(order + 1, dtype=np.result_type(outer, inner))
    if out.dtype == object:
        out[:] = 0
    for c in outer[: order + 1][::-1]:
        out = poly_mul(out, inner, order)
        out[0] = out[0] + c
    return out


def poly_inverse_unit(a: np.ndarray, order: int) -> np.ndarray:
    """``1/a`` as a power series, ``a[0] != 0``."""
    inv = np.zeros(order + 1, dtype=a.dtype)
    if inv.dtype == object:
        inv[:] = 0
    inv[0] = 1 / a[0]
    for n in range(1, order + 1):
        s = 0
        for m in range(1, min(n, a.size - 1) + 1):
            s = s + a[m] * inv[n - m]
        inv[n] = -s / a[0]
    return inv


# ----------------------------------------------------------------------
# public operations
# ----------------------------------------------------------------------

def _check_pair(a: TruncatedSeries, b: TruncatedSeries) -> None:
    if a.order != b.order:
        raise SeriesError(f"order mismatch: {a.order} vs {b.order}")


def _result_parity(outer: TruncatedSeries, inner: TruncatedSeries) -> str:
    anti = outer.is_antiholomorphic != inner.is_antiholomorphic
    return ANTIHOLOMORPHIC if anti else HOLOMORPHIC


def compose(outer: TruncatedSeries, inner: TruncatedSeries) -> TruncatedSeries:
    """Order-N jet of ``outer o inner``.

    If ``outer`` is antiholomorphic the inner coefficients are conjugated
    before substitution, since ``A(conj(B(z))) = A(conj(B)(conj z))``.
    """
    _check_pair(outer, inner)
    n = outer.order
    inner_c = inner.conj_coeffs() if outer.is_antiholomorphic else inner
    res = poly_compose(outer.padded(), inner_c.padded(), n)
    return TruncatedSeries(res[1:], _result_parity(outer, inner), exact=outer.exact or inner.exact)


def _revert(a: np.ndarray, order: int) -> np.ndarray:
    """Compositional inverse of the holomorphic series ``a`` (index = degree)."""
    if a[1] == 0:
        raise SeriesError("non-invertible linear part")
    b = np.zeros(order + 1, dtype=a.dtype)
    if b.dtype == object:
        b[:] = 0
    b[1] = 1 / a[1]
    for n in range(2, order + 1):
        c = poly_compose(a, b, n)
        b[n] = b[n] - c[n] / a[1]
    return b


def invert(s: TruncatedSeries) -> TruncatedSeries:
    """Compositional inverse to order N.

    For ``f = A o sigma`` the inverse is ``sigma o A^{-1} = conj(A^{-1}) o sigma``.
    """
    if s.is_antiholomorphic and not s.exact and abs(abs(s[1]) - 1) > 1e-12:
        raise SeriesError("antiholomorphic parabolic candidate needs |a_1| = 1")
    rev = _revert(s.padded(), s.order)
    if s.is_antiholomorphic:
        rev = np.conj(rev)
    return TruncatedSeries(rev[1:], s.parity, exact=s.exact)


def conjugate_by(h: TruncatedSeries, f: TruncatedSeries) -> TruncatedSeries:
    """``h o f o h^{-1}`` for a holomorphic change of variable ``h``."""
    if h.is_antiholomorphic:
        raise SeriesError("conjugating map must be holomorphic")
    _check_pair(h, f)
    return compose(compose(h, f), invert(h))


def residue_iteratif(g: TruncatedSeries, tol: float = 1e-12) -> complex:
    """Residue at 0 of ``1/(z - g(z))`` for a parabolic ``g`` tangent to the identity.

    Writing ``z - g(z) = z^{k+1} u(z)`` the residue is the ``z^k`` coefficient
    of ``1/u``; ``g`` must be known to order ``2k+1``. On the float backend,
    terms of ``z - g`` below ``tol`` ahead of the first real one are round-off.
    """
    if g.is_antiholomorphic:
        raise SeriesError("residue_iteratif needs a holomorphic germ")
    d = -g.padded()
    d[1] = d[1] + 1
    cut = 0 if g.exact else tol
    nz = [i for i in range(1, d.size) if abs(d[i]) > cut]
    if not nz:
        raise SeriesError("g is the identity to this order")
    if nz[0] == 1:
        raise SeriesError("g is not tangent to the identity")
    k = nz[0] - 1
    if 2 * k + 1 > g.order:
        raise SeriesError(f"order {g.order} too small to read the residue (need {2 * k + 1})")
    u = d[k + 1:]
    return poly_inverse_unit(u, k)[k]


def series_arith(a: TruncatedSeries, b, op: str) -> TruncatedSeries:
    if op == "scale":
        return TruncatedSeries(a.coeffs * b, a.parity, exact=a.exact)
    if a.parity != b.parity:
        raise SeriesError("parity mismatch")
    _check_pair(a, b)
    if op == "add":
        c = a.coeffs + b.coeffs
    elif op == "sub":
        c = a.coeffs - b.coeffs
    else:
        raise SeriesError(f"unknown op {op!r}")
    return TruncatedSeries(c, a.parity, exact=a.exact or b.exact)
