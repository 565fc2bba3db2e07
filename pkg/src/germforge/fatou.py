"""Fatou coordinates, transition functions and their Fourier tables.

Fatou coordinates are computed as

    phi_j(w) = Z(w_n) + H(w_n) -/+ n,

where ``w_n`` is the forward (attracting petal) or backward (repelling petal)
``g``-orbit of ``w``, ``Z`` is the time chart continued along the orbit and
``H`` is the formal Fatou series solving ``Z + H`` o g = ``Z + H + 1``. The
orbit is stopped once ``|Z|`` is large enough for the (Gevrey) series ``H``
to be accurate to machine precision, so no limit acceleration is needed.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from germforge.formal import VectorFieldParams
from germforge.maps import ConjugatedGerm, NewtonError
from germforge.sectors import branch_arg, chart_deriv, chart_eval, chart_invert, is_attracting
from germforge.series import TruncatedSeries, poly_compose, poly_mul

log = logging.getLogger(__name__)

EPS = np.finfo(float).eps


class FatouError(RuntimeError):
    pass


# ----------------------------------------------------------------------
# formal Fatou series
# ----------------------------------------------------------------------

def _log1p_series(u: np.ndarray, order: int) -> np.ndarray:
    out = np.zeros(order + 1, complex)
    term = np.zeros(order + 1, complex)
    term[0] = 1
    i = 1
    while True:
        term = poly_mul(term, u, order)
        if not np.any(term):
            break
        out += (-1) ** (i + 1) * term / i
        i += 1
        if i > order + 1:
            break
    return out


def _binom_series(u: np.ndarray, expo: float, order: int) -> np.ndarray:
    """``(1+u)^expo - 1`` for ``u`` without constant term."""
    out = np.zeros(order + 1, complex)
    term = np.zeros(order + 1, complex)
    term[0] = 1
    coef = 1.0
    for i in range(1, order + 2):
        term = poly_mul(term, u, order)
        if not np.any(term):
            break
        coef *= (expo - i + 1) / i
        out += coef * term
    return out


def formal_fatou_series(g: TruncatedSeries, p: VectorFieldParams, m_max: int) -> np.ndarray:
    """Coefficients ``h_1..h_{m_max}`` (index = degree, ``h_0 = 0``) of ``H``.

    ``H o g - H = 1 - (Z o g - Z)`` with ``Z = -1/(k w^k) + b log w``;
    ``g`` must be known to order ``m_max + 2k + 1``.
    """
    k, b = p.k, p.b
    N = m_max + k
    if g.order < N + k + 1:
        raise FatouError(f"jet of order {g.order} too short for H up to degree {m_max}")
    gp = g.truncate(N + k + 1).padded()
    # g/w - 1
    u = np.zeros(N + k + 1, complex)
    u[: N + k + 1] = gp[1: N + k + 2]
    u[0] -= 1
    u = u[: N + k + 1]
    P = _binom_series(u, -k, N + k)[k:]  # ((1+u)^{-k} - 1) / w^k
    dZ = -P[: N + 1] / k + b * _log1p_series(u, N)[: N + 1]
    R = -dZ
    R[0] += 1
    if abs(R[0]) > 1e-8 * max(1.0, abs(b)):
        raise FatouError("germ is not prenormalized: Z o g - Z does not tend to 1")
    gw = gp[: N + 1].copy()
    H = np.zeros(N + 1, complex)
    for m in range(1, m_max + 1):
        D = poly_compose(H, gw, N) - H - R
        H[m] = -D[m + k] / m
    return H[: m_max + 1]


def _horner0(c: np.ndarray, w):
    acc = np.zeros_like(w)
    for a in c[:0:-1]:
        acc = (acc + a) * w
    return acc


def _horner0_deriv(c: np.ndarray, w):
    d = np.arange(c.size) * c
    acc = np.zeros_like(w)
    for a in d[:1:-1]:
        acc = (acc + a) * w
    return acc + d[1]


# ----------------------------------------------------------------------
# the evaluator
# ----------------------------------------------------------------------

@dataclass
class FatouControls:
    series_order: int | None = None   # degree of H, default 20k (capped)
    stop_tol: float = 1e-15           # target truncation error of H
    min_radius: float = 4.0
    cap: int = 20_000
    escape: float = 1.0               # orbits leaving |w| < escape are rejected


class FatouSystem:
    """All sectorial Fatou coordinates of a prenormalized germ.

    ``germ`` is a :class:`ConjugatedGerm` ``h o f o h^{-1}``; orbits are run in
    the coordinates of ``f`` and mapped by the polynomial ``h``.
    """

    def __init__(self, germ: ConjugatedGerm, p: VectorFieldParams, controls: FatouControls | None = None):
        self.germ = germ
        self.p = p
        self.controls = controls or FatouControls()
        k = p.k
        m = self.controls.series_order or min(24 * k, 96)
        self.H = formal_fatou_series(germ.g_jet(m + 2 * k + 2), p, m)
        self.radius = self._stop_radius()
        self.offsets: dict[int, complex] = {j: 0j for j in range(-k, k + 1)}

    def _stop_radius(self) -> float:
        """Smallest ``|Z|`` where the last terms of ``H`` are below ``stop_tol``."""
        k = self.p.k
        tail = np.abs(self.H[-3 * k:])
        degs = np.arange(self.H.size - tail.size, self.H.size)
        R = self.controls.min_radius
        while R < 1e4:
            r = (k * R) ** (-1.0 / k)
            if np.max(tail * r ** degs) <= self.controls.stop_tol:
                return R
            R *= 1.15
        raise FatouError("formal Fatou series does not reach tolerance")

    # -- orbit evaluation ---------------------------------------------------
    def _orbit_value(self, j: int, w0: np.ndarray, with_deriv: bool = True):
        """``phi_j`` at points ``w0`` (prenormalized coordinates), and ``dphi/dw``."""
        p, k, b = self.p, self.p.k, self.p.b
        germ = self.germ
        fwd = is_attracting(j)
        sgn = 1.0 if fwd else -1.0
        w0 = np.atleast_1d(np.asarray(w0, dtype=complex))
        z = germ.to_base(w0)
        w = w0.copy()
        # log is continued along the orbit from the chart's branch at the start
        theta = np.asarray(branch_arg(p, j, w), dtype=float).reshape(w.shape)
        dz = np.ones_like(w)
        n = np.zeros(w.shape, dtype=int)
        active = np.ones(w.shape, dtype=bool)
        R = self.radius
        for it in range(self.controls.cap + 1):
            Zc = -1.0 / (k * w ** k) + b * (np.log(np.abs(w)) + 1j * theta) - 1j * j * math.pi * b / k
            done = (np.abs(Zc) >= R) & (sgn * Zc.real >= -np.abs(Zc.imag))
            active &= ~done
            if not np.any(active):
                break
            if it == self.controls.cap:
                raise FatouError(f"Fatou orbit on chart {j} did not reach |Z| >= {R:.3g} within {self.controls.cap} steps")
            za = z[active]
            if fwd:
                znew = germ.base.g(za)
                if not np.all(np.abs(znew) < self.controls.escape):
                    raise FatouError(f"forward orbit on chart {j} left |w| < {self.controls.escape}")
                if with_deriv:
                    dz[active] *= germ.base.g_deriv(za)
            else:
                try:
                    znew = germ.base.g_inv(za)
                except NewtonError as exc:
                    raise FatouError(f"backward orbit on chart {j}: {exc}") from exc
                if np.any(np.abs(znew - za) > 0.5 * np.abs(za)):
                    raise FatouError(f"backward orbit on chart {j} left the petal")
                if with_deriv:
                    dz[active] /= germ.base.g_deriv(znew)
            wnew = germ.from_base(znew)
            theta[active] += np.angle(wnew / w[active])
            z[active] = znew
            w[active] = wnew
            n[active] += 1
        if not np.all(np.isfinite(w)) or np.any(w == 0):
            raise FatouError(f"Fatou orbit on chart {j} degenerated (NaN or exact zero)")
        val = Zc + _horner0(self.H, w) - sgn * n + self.offsets[j]
        if not with_deriv:
            return val, None
        dw = germ.from_base_deriv(z) * dz / germ.from_base_deriv(germ.to_base(w0))
        der = (chart_deriv(p, w) + _horner0_deriv(self.H, w)) * dw
        return val, der

    def phi(self, j: int, w):
        """Fatou coordinate ``phi_j = Phi_j o Z_j`` at points ``w`` of petal ``j``."""
        val, _ = self._orbit_value(j, w, with_deriv=False)
        return val

    def phi_inv(self, j: int, W, tol: float = 1e-14, cap: int = 40):
        """Point ``w`` with ``phi_j(w) = W``.

        On repelling petals the inverse extends by ``phi^{-1}(W) = g^n(phi^{-1}(W - n))``:
        ``W - n`` is taken deep in the petal, where no backward orbit is needed,
        and the result is pushed forward by the (polynomial) return map.
        """
        W = np.atleast_1d(np.asarray(W, dtype=complex))
        if is_attracting(j):
            return self._newton_inv(j, W, tol, cap)
        n = np.maximum(0, np.ceil(W.real + self.radius + 1)).astype(int)
        w = self._newton_inv(j, W - n, tol, cap)
        z = self.germ.to_base(w)
        for step in range(int(n.max(initial=0))):
            live = n > step
            z[live] = self.germ.base.g(z[live])
            if not np.all(np.abs(z[live]) < self.controls.escape):
                raise FatouError(f"pushed-forward inverse on chart {j} left |w| < {self.controls.escape}: "
                                 "the height is too small for this germ")
        out = np.where(n > 0, self.germ.from_base(z), w)
        if not np.all(np.isfinite(out)):
            raise FatouError(f"pushed-forward inverse on chart {j} overflowed")
        return out

    def _newton_inv(self, j: int, W, tol: float, cap: int):
        w = np.asarray(chart_invert(self.p, j, W - self.offsets[j]), dtype=complex).reshape(W.shape)
        for _ in range(cap):
            val, der = self._orbit_value(j, w)
            step = (val - W) / der
            w = w - step
            if np.all(np.abs(step) <= tol * np.abs(w)):
                return w
        val, _ = self._orbit_value(j, w, with_deriv=False)
        if np.max(np.abs(val - W)) <= 1e-10:
            return w
        raise FatouError(f"fatou_invert did not converge on chart {j}")

    # -- chart-valued interface -----------------------------------------------
    def fatou_eval(self, j: int, Z):
        """``Phi_j(Z)`` for ``Z`` a value of the chart ``Z_j``."""
        Z = np.asarray(Z, dtype=complex)
        return self.phi(j, chart_invert(self.p, j, Z)).reshape(Z.shape)

    def fatou_invert(self, j: int, W):
        W = np.asarray(W, dtype=complex)
        return np.asarray(chart_eval(self.p, j, self.phi_inv(j, W)), dtype=complex).reshape(W.shape)

    # -- transition functions ------------------------------------------------
    def transition_charts(self, j: int) -> tuple[int, int]:
        """``(target, source)`` so that ``Psi_j = Phi_target o Phi_source^{-1}``."""
        k = self.p.k
        if j == 0 or abs(j) > k:
            raise FatouError(f"no transition function with index {j}")
        s = 1 if j > 0 else -1
        if j % 2:
            return j, j - s
        return j - s, j

    def transition_half_plane(self, j: int) -> int:
        """+1 if ``Psi_j`` lives on an upper half-plane, -1 for a lower one."""
        return 1 if (j > 0) == bool(j % 2) else -1

    def transition_eval(self, j: int, W, min_height: float = 0.5):
        W = np.atleast_1d(np.asarray(W, dtype=complex))
        side = self.transition_half_plane(j)
        if np.any(side * W.imag < min_height):
            raise FatouError(f"W below the reliability height {min_height} for Psi_{j}")
        tgt, src = self.transition_charts(j)
        w = self.phi_inv(src, W)
        return self.phi(tgt, w)

    # -- calibration ---------------------------------------------------------
    def relation_defect(self, j: int, W):
        """``Phi_j o F o Phi_{-j}^{-1}(W) - Sigma T_{1/2}(W)`` at ``W`` (Fatou values on chart -j)."""
        if not self.germ.anti:
            raise FatouError("the Sigma T_1/2 relation needs an antiholomorphic germ")
        W = np.atleast_1d(np.asarray(W, dtype=complex))
        w = self.phi_inv(-j, W)
        return self.phi(j, self.germ(w)) - (np.conj(W) + 0.5)

    def calibrate(self, samples: int = 16, height: float = 3.0) -> dict[int, complex]:
        """Translate the ``Phi_j`` so that ``Phi_j o F o Phi_{-j}^{-1} = Sigma T_{1/2}``.

        Only imaginary shifts are applied: real translations are the residual
        freedom of the modulus. Returns the measured constants ``c_j - 1/2``.
        """
        k = self.p.k
        measured = {}
        for j in range(0, k + 1):
            W = self._validation_points(-j, samples, height)
            d = self.relation_defect(j, W)
            c = np.mean(d)
            if np.max(np.abs(d - c)) > 1e-6:
                raise FatouError(f"Phi_{j} o F o Phi_{-j}^-1 is not a translate of Sigma T_1/2 "
                                 f"(spread {np.max(np.abs(d - c)):.2e})")
            measured[j] = complex(c)
            y = c.imag
            if j in (0, k):
                self.offsets[j] -= 0.5j * y
                if j == k:
                    self.offsets[-k] = self.offsets[k]
            else:
                self.offsets[j] -= 1j * y
        return measured

    def _validation_points(self, j: int, n: int, height: float) -> np.ndarray:
        """Points of the Fatou image of chart ``j`` away from the boundary."""
        x = np.linspace(-0.5, 0.5, n, endpoint=False)
        side = 1 if is_attracting(j) else -1
        # a vertical segment deep inside the petal, mixed heights
        return side * (self.radius + 2.0) + x + 1j * height * np.where(np.arange(n) % 2, 1, -1) * (0.2 + np.abs(x))


# ----------------------------------------------------------------------
# Fourier tables
# ----------------------------------------------------------------------

@dataclass
class FourierTable:
    j: int
    height: float
    const: complex
    coeffs: dict[int, complex]
    floors: dict[int, float]
    tail: float
    unresolved: list[int] = field(default_factory=list)


def fourier_from_samples(samples: np.ndarray, height: float, n_max: int, resolve: float = 1e-3) -> FourierTable:
    """Fourier table of ``Psi(W) - W`` from ``M`` samples on ``Im W = height``, ``Re W = m/M``."""
    M = samples.size
    a = np.fft.fft(samples) / M
    freqs = np.fft.fftfreq(M, d=1.0 / M).astype(int)
    side = 1 if height > 0 else -1
    forbidden = np.abs(a[(side * freqs < 0)])
    tail = max(float(np.max(forbidden)) if forbidden.size else 0.0,
               EPS * max(1.0, float(np.max(np.abs(samples)))))
    coeffs, floors, unresolved = {}, {}, []
    for n in range(1, n_max + 1):
        idx = side * n
        floor = 10 * tail * math.exp(2 * math.pi * n * abs(height))
        c = complex(a[idx % M] * math.exp(2 * math.pi * n * abs(height)))
        # zeros must be certified to ``resolve``; large coefficients only relative to their size
        if floor > resolve * max(1.0, abs(c)) or n >= M // 2:
            unresolved.append(idx)
            continue
        coeffs[idx] = c
        floors[idx] = floor
    return FourierTable(0, height, complex(a[0]), coeffs, floors, tail, unresolved)


def fourier_extract(system: FatouSystem, j: int, height: float = 2.0, samples: int = 256,
                    n_max: int = 12, resolve: float = 1e-3) -> FourierTable:
    side = system.transition_half_plane(j)
    Y = side * abs(height)
    W = np.arange(samples) / samples + 1j * Y
    vals = system.transition_eval(j, W) - W
    tab = fourier_from_samples(vals, Y, n_max, resolve)
    tab.j = j
    return tab


__all__ = ["FatouControls", "FatouError", "FatouSystem", "FourierTable", "formal_fatou_series",
           "fourier_extract", "fourier_from_samples"]
