"""Time charts ``Z_j``, their inverses, conjugation across charts, petals and orbits."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from germforge.formal import VectorFieldParams
from germforge.maps import NewtonError

TWO_PI = 2 * math.pi


class ChartError(ValueError):
    pass


class UndeterminedError(RuntimeError):
    """Petal membership could not be settled within the iteration cap."""


@dataclass(frozen=True)
class TimePoint:
    chart: int
    value: complex


@dataclass(frozen=True)
class SectorSpec:
    delta: float
    k: int
    cap: int = 100_000

    @classmethod
    def default(cls, p: VectorFieldParams, cap: int = 100_000) -> "SectorSpec":
        return cls(default_delta(p), p.k, cap)

    def base_point(self, j: int) -> complex:
        return self.delta * cmath.exp(1j * j * math.pi / self.k)


def default_delta(p: VectorFieldParams) -> float:
    return 0.15 * min(1.0, 1.0 / (1.0 + abs(p.b))) ** (1.0 / p.k)


def _check_chart(p: VectorFieldParams, j: int) -> None:
    if not -p.k <= j <= p.k:
        raise ChartError(f"chart index {j} outside -{p.k}..{p.k}")


def branch_arg(p: VectorFieldParams, j: int, z):
    """``arg z`` on the branch used by chart ``j``."""
    a = np.angle(z)
    if j == p.k:
        a = np.where(a < 0, a + TWO_PI, a)
    elif j == -p.k:
        a = np.where(a > 0, a - TWO_PI, a)
    return a


def _on_cut(p: VectorFieldParams, j: int, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    zero = z == 0
    if j == p.k:
        cut = (z.imag == 0) & (z.real > 0)
    elif j == -p.k:
        cut = (z.imag == 0) & (z.real > 0)
    else:
        cut = (z.imag == 0) & (z.real < 0)
    return zero | cut


def chart_eval(p: VectorFieldParams, j: int, z):
    """``Z_j(z) = -1/(k z^k) + b log z - j i pi b / k`` on the chart's branch of log."""
    _check_chart(p, j)
    z = np.asarray(z, dtype=complex)
    if np.any(_on_cut(p, j, z)):
        raise ChartError(f"point on the branch cut of chart {j}")
    k, b = p.k, p.b
    log = np.log(np.abs(z)) + 1j * branch_arg(p, j, z)
    out = -1.0 / (k * z ** k) + b * log - 1j * j * math.pi * b / k
    return out[()] if out.ndim == 0 else out


def chart_deriv(p: VectorFieldParams, z):
    """``dZ/dz = 1/z^{k+1} + b/z`` (the reciprocal of the vector field)."""
    z = np.asarray(z, dtype=complex)
    return 1.0 / z ** (p.k + 1) + p.b / z


def _seed(p: VectorFieldParams, j: int, Z):
    """k-th root of ``-1/(kZ)`` whose argument lies in ``[(j-1)pi/k, (j+1)pi/k)``."""
    k = p.k
    base = (-1.0 / (k * np.asarray(Z, dtype=complex))) ** (1.0 / k)
    lo = (j - 1) * math.pi / k
    best = base.copy()
    ang0 = np.angle(base)
    for m in range(k):
        ang = ang0 + TWO_PI * m / k
        # shift into [lo, lo + 2pi)
        ang = lo + np.mod(ang - lo, TWO_PI)
        ok = ang < lo + 2 * math.pi / k
        best = np.where(ok, np.abs(base) * np.exp(1j * ang), best)
    return best


def chart_invert(p: VectorFieldParams, j: int, Z, tol: float = 1e-13, cap: int = 80):
    """Newton solution of ``chart_eval(p, j, z) = Z``."""
    _check_chart(p, j)
    Z = np.asarray(Z, dtype=complex)
    z = _seed(p, j, Z + 0j)
    for _ in range(cap):
        step = (chart_eval(p, j, z) - Z) / chart_deriv(p, z)
        z = z - step
        if np.all(np.abs(step) <= tol * np.abs(z)):
            return z[()] if z.ndim == 0 else z
    resid = np.abs(chart_eval(p, j, z) - Z)
    if np.all(resid <= 1e-10 * np.maximum(1, np.abs(Z))):
        return z[()] if z.ndim == 0 else z
    raise NewtonError(f"chart_invert did not converge on chart {j}")


def sigma_on_charts(p: VectorFieldParams, t: TimePoint) -> TimePoint:
    """``Sigma``: ``(j, Z) -> (-j, Z_{-j}(conj z))``, which equals ``conj(Z)`` for real ``b``."""
    z = chart_invert(p, t.chart, t.value)
    ell = -t.chart
    return TimePoint(ell, complex(chart_eval(p, ell, np.conj(z))))


def chart_of_point(k: int, z: complex) -> int:
    """Nearest petal centre ``j pi / k`` with ``arg z`` taken in ``(-pi, pi]``."""
    a = math.atan2(z.imag, z.real)
    if a == -math.pi:
        a = math.pi
    j = int(round(a * k / math.pi))
    if j == -k:
        j = k if a > 0 else -k
    return j


def is_attracting(j: int) -> bool:
    return j % 2 == 1 or j % 2 == -1


def petal_membership(germ, p: VectorFieldParams, spec: SectorSpec, j: int, z: complex) -> bool:
    """Whether a ``g``-iterate of ``z`` crosses the base line ``Re Z = Re Z_j(z_j*)``.

    Iterates forward for attracting charts (``j`` odd) and backward otherwise,
    staying within ``|z| < 2 delta``.
    """
    _check_chart(p, j)
    if z == 0:
        return False
    zstar = spec.base_point(j)
    ref = chart_eval(p, j, zstar).real
    attracting = is_attracting(j)
    step = germ.g if attracting else germ.g_inv
    w = complex(z)
    # the base strip is approached from the left for attracting, right for repelling
    for _ in range(spec.cap):
        if abs(w) > 2 * spec.delta:
            return False
        if abs(w) < 1e-300:
            return False
        if chart_of_point(p.k, w) == j or (abs(j) == p.k and abs(chart_of_point(p.k, w)) == p.k):
            x = chart_eval(p, j if abs(j) < p.k else _seam_chart(p, j, w), w).real
            if attracting and x >= ref:
                return True
            if not attracting and x <= ref:
                return True
        w = complex(step(w))
    raise UndeterminedError(f"petal membership undetermined after {spec.cap} iterations")


def _seam_chart(p: VectorFieldParams, j: int, w: complex) -> int:
    return p.k if w.imag >= 0 else -p.k


@dataclass(frozen=True)
class OrbitPoint:
    step: int
    z: complex
    chart: int
    time: TimePoint | None


def orbit_trace(germ, p: VectorFieldParams, z0: complex, n_steps: int, escape: float = 1.0) -> list[OrbitPoint]:
    """Forward orbit of ``f`` annotated with petal index and chart value."""
    out = []
    z = complex(z0)
    for n in range(n_steps + 1):
        if not np.isfinite(z) or abs(z) > escape:
            raise ChartError(f"orbit left the chart neighbourhood at step {n}")
        j = chart_of_point(p.k, z) if z != 0 else 0
        tp = None
        if z != 0:
            jj = j if abs(j) < p.k else _seam_chart(p, j, z)
            try:
                tp = TimePoint(jj, complex(chart_eval(p, jj, z)))
            except ChartError:
                tp = None
        out.append(OrbitPoint(n, z, j, tp))
        if n < n_steps:
            z = complex(germ(z))
    return out


def telescoping_sum(p: VectorFieldParams, delta: float = 0.1) -> complex:
    """``sum_{j=-k+1}^{k} (Z_j(z_{j+1}) - Z_j(z_j))`` with ``z_j = delta e^{i(2j-1)pi/2k}``."""
    k = p.k
    pts = {j: delta * cmath.exp(1j * (2 * j - 1) * math.pi / (2 * k)) for j in range(-k + 1, k + 2)}
    tot = 0j
    for j in range(-k + 1, k + 1):
        tot += complex(chart_eval(p, j, pts[j + 1])) - complex(chart_eval(p, j, pts[j]))
    return tot


def petal_boundary(p: VectorFieldParams, j: int, radius: float, n: int = 64) -> np.ndarray:
    """Closed polyline of the model petal of chart ``j``.

    The boundary is the level set ``Re(e^{-i j pi} / (k z^k)) = 1 / (k radius^k)``
    of the ``b = 0`` chart, i.e. ``r = radius cos(k phi)^{1/k}`` with ``phi`` the
    angle from the petal axis ``j pi / k``; it passes through 0 at both ends.
    """
    k = p.k
    centre = j * math.pi / k
    phi = np.linspace(-math.pi / (2 * k), math.pi / (2 * k), n)
    r = radius * np.clip(np.cos(k * phi), 0.0, None) ** (1.0 / k)
    return r * np.exp(1j * (centre + phi))


__all__ = ["ChartError", "OrbitPoint", "SectorSpec", "TimePoint", "UndeterminedError", "branch_arg",
           "chart_deriv", "chart_eval", "chart_invert", "chart_of_point", "default_delta",
           "is_attracting", "orbit_trace", "petal_boundary", "petal_membership", "sigma_on_charts",
           "telescoping_sum"]
