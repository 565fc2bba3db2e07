"""Modulus descriptors: normalization, negative-index reconstruction, horn maps
and the end-to-end extraction pipeline.
"""
from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass, field

import numpy as np

from germforge.fatou import FatouControls, FatouError, FatouSystem, fourier_extract
from germforge.formal import (
    FormalError,
    VectorFieldParams,
    prenormalize,
)
from germforge.maps import ConjugatedGerm, Germ, as_conjugated
from germforge.series import TruncatedSeries


class ModulusError(RuntimeError):
    pass


@dataclass
class ModulusEntry:
    j: int
    const: complex
    coeffs: dict[int, complex] = field(default_factory=dict)
    floors: dict[int, float] = field(default_factory=dict)

    def floor(self, n: int, default: float) -> float:
        return self.floors.get(n, default)

    def copy(self) -> "ModulusEntry":
        return ModulusEntry(self.j, self.const, dict(self.coeffs), dict(self.floors))


@dataclass
class ModulusDescriptor:
    """``(k, b, [Psi_j])``: constants and Fourier tables of the transition functions.

    ``kind == "f"`` stores ``j = 1..k`` (antiholomorphic germs, negative indices
    are determined by the symmetry); ``kind == "g"`` stores all ``j = +-1..+-k``.
    """

    kind: str
    k: int
    b: complex
    noise_floor: float
    entries: dict[int, ModulusEntry]
    translations: dict[int, complex] = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("f", "g"):
            raise ModulusError(f"unknown modulus kind {self.kind!r}")
        if self.kind == "f" and abs(complex(self.b).imag) > 1e-9:
            raise ModulusError("b must be real for an antiholomorphic germ")

    @property
    def params(self) -> VectorFieldParams:
        b = complex(self.b)
        return VectorFieldParams(self.k, b.real if self.kind == "f" else b)

    def indices(self) -> list[int]:
        if self.kind == "f":
            return list(range(1, self.k + 1))
        return [j for j in range(-self.k, self.k + 1) if j != 0]

    def is_zero(self, j: int, n: int) -> bool:
        e = self.entries[j]
        return abs(e.coeffs.get(n, 0)) <= e.floor(n, self.noise_floor)

    def nonzero(self) -> list[tuple[int, int, complex]]:
        """All ``(j, n, c_{n,j})`` above their floors."""
        out = []
        for j in sorted(self.entries):
            for n, c in sorted(self.entries[j].coeffs.items()):
                if not self.is_zero(j, n):
                    out.append((j, n, c))
        return out

    def translated(self, C: complex) -> "ModulusDescriptor":
        """Representative ``T_C o Psi_j o T_{-C}``."""
        ents = {}
        for j, e in self.entries.items():
            ne = e.copy()
            ne.coeffs = {n: c * cmath.exp(-2j * math.pi * n * C) for n, c in e.coeffs.items()}
            ne.floors = {n: fl * abs(cmath.exp(-2j * math.pi * n * C)) for n, fl in e.floors.items()}
            ents[j] = ne
        return ModulusDescriptor(self.kind, self.k, self.b, self.noise_floor, ents)

    def full_table(self) -> "ModulusDescriptor":
        """``g``-kind descriptor with all ``2k`` tables."""
        if self.kind == "g":
            return self
        ents = dict(self.entries)
        ents.update(reconstruct_negative(self))
        return ModulusDescriptor("g", self.k, complex(self.b), self.noise_floor, ents)


def normalized_constant(k: int, b: complex, j: int) -> complex:
    """``c_j = (-1)^j i pi b / k`` for ``j > 0``; ``c_{-j} = -c_j``."""
    c = (-1) ** abs(j) * 1j * math.pi * b / k
    return c if j > 0 else -c


def transition_charts(k: int, j: int) -> tuple[int, int]:
    """``(target, source)`` with ``Psi_j = Phi_target o Phi_source^{-1}``."""
    s = 1 if j > 0 else -1
    if j % 2:
        return j, j - s
    return j - s, j


def coefficient_side(j: int) -> int:
    """+1 if ``Psi_j`` carries positive harmonics (upper half-plane)."""
    return 1 if (j > 0) == bool(j % 2) else -1


def alternating_sum(consts: dict[int, complex], k: int) -> complex:
    """``sum_j (-1)^{j-1} c_{-j} + (-1)^j c_j``, equal to ``2 i pi b``."""
    return sum((-1) ** (j - 1) * consts[-j] + (-1) ** j * consts[j] for j in range(1, k + 1))


def normalize_modulus(kind: str, k: int, b: complex, raw: dict[int, ModulusEntry],
                      noise_floor: float, tol: float = 1e-5) -> ModulusDescriptor:
    """Apply the translation cascade ``Phi_j -> T_{a_j} o Phi_j`` so the constants are normalized.

    ``raw`` holds entries for ``j = 1..k`` (and optionally negatives). For
    ``kind == "f"`` the negative charts are shifted by ``conj(a_j)``.
    """
    a = {0: 0j}
    for sgn in (1, -1):
        for m in range(1, k + 1):
            j = sgn * m
            if j not in raw:
                continue
            tgt, src = transition_charts(k, j)
            new = j
            known = src if new == tgt else tgt
            if known not in a:
                raise ModulusError(f"cascade broken at index {j}")
            c = raw[j].const
            want = normalized_constant(k, b, j)
            # c + a_tgt - a_src = want
            if new == tgt:
                a[new] = want - c + a[known]
            else:
                a[new] = c + a[known] - want
    if kind == "f":
        for m in range(1, k + 1):
            if -m not in raw and m in a:
                a[-m] = a[m].conjugate()
    raw_consts = {j: e.const for j, e in raw.items()}
    for m in range(1, k + 1):
        if -m not in raw_consts and kind == "f":
            raw_consts[-m] = raw_consts[m].conjugate()
    alt = alternating_sum(raw_consts, k) if all((m in raw_consts and -m in raw_consts)
                                                 for m in range(1, k + 1)) else None
    diag = {}
    if alt is not None:
        diag["alternating_sum_residual"] = abs(alt - 2j * math.pi * b)
        if diag["alternating_sum_residual"] > tol:
            raise ModulusError(f"alternating sum {alt:.6g} differs from 2i pi b by "
                               f"{diag['alternating_sum_residual']:.3g}")
    if kind == "f" and k in a and abs(a[k].imag) > tol:
        raise ModulusError(f"chart k translation {a[k]:.3g} is not real: inconsistent constants")
    entries = {}
    for j, e in raw.items():
        tgt, src = transition_charts(k, j)
        shift = a[src]
        ne = ModulusEntry(j, e.const + a[tgt] - a[src])
        for n, c in e.coeffs.items():
            fac = cmath.exp(-2j * math.pi * n * shift)
            ne.coeffs[n] = c * fac
            ne.floors[n] = e.floors.get(n, noise_floor) * abs(fac)
        entries[j] = ne
    keep = {j: entries[j] for j in entries if kind == "g" or j > 0}
    d = ModulusDescriptor(kind, k, b, noise_floor, keep, translations=a, diagnostics=diag)
    if kind == "f":
        d.diagnostics["negative_direct"] = {j: entries[j] for j in entries if j < 0}
    return d


def reconstruct_negative(m: ModulusDescriptor) -> dict[int, ModulusEntry]:
    """Tables of ``Psi_{-j} = Sigma T_{1/2} Psi_j Sigma T_{-1/2}``:
    ``c_{-j} = conj(c_j)`` and ``c_{-n,-j} = (-1)^n conj(c_{n,j})``.
    """
    out = {}
    for j, e in m.entries.items():
        if j < 0:
            continue
        ne = ModulusEntry(-j, e.const.conjugate())
        for n, c in e.coeffs.items():
            ne.coeffs[-n] = (-1) ** n * c.conjugate()
            ne.floors[-n] = e.floor(n, m.noise_floor)
        out[-j] = ne
    return out


# ----------------------------------------------------------------------
# horn maps and the Ecalle height
# ----------------------------------------------------------------------

def horn_map_eval(m: ModulusDescriptor, j: int, w):
    """``psi_j = E o Psi_j o E^{-1}`` with ``E(W) = exp(-2 i pi W)``.

    ``psi_j(w) = w e^{-2 i pi c_j} exp(-2 i pi sum_n c_{n,j} w^{-n})``; the fixed
    end is ``infinity`` for tables with positive harmonics and ``0`` otherwise.
    """
    e = _entry(m, j)
    w = np.asarray(w, dtype=complex)
    if np.any(w == 0):
        raise ModulusError("horn maps are defined on a punctured neighbourhood")
    s = sum(c * w ** (-n) for n, c in e.coeffs.items()) if e.coeffs else 0
    return w * cmath.exp(-2j * math.pi * e.const) * np.exp(-2j * math.pi * s)


def horn_map_derivative(m: ModulusDescriptor, j: int, radius: float = 1e-3, samples: int = 32) -> complex:
    """Derivative of ``psi_j`` at its fixed end, by a Cauchy integral in the local coordinate."""
    side = coefficient_side(j)
    u = radius * np.exp(2j * math.pi * np.arange(samples) / samples)
    if side > 0:
        vals = 1.0 / horn_map_eval(m, j, 1.0 / u)
    else:
        vals = horn_map_eval(m, j, u)
    return complex(np.mean(vals / u))


def horn_map_negative(m: ModulusDescriptor, j: int, w):
    """``psi_{-j} = L_{-1} o tau o psi_j o L_{-1} o tau`` with ``tau(w) = 1/conj(w)``."""
    w = np.asarray(w, dtype=complex)
    inner = -1.0 / np.conj(w)
    return -1.0 / np.conj(horn_map_eval(m, j, inner))


def ecalle_height(W: complex, chart: int, k: int) -> float:
    """``Im W``; intrinsic only on the petals meeting the symmetry axis."""
    if chart not in (0, k, -k):
        raise ModulusError(f"the Ecalle height is only defined on charts 0 and +-{k}, not {chart}")
    return float(np.imag(W))


def _entry(m: ModulusDescriptor, j: int) -> ModulusEntry:
    if j in m.entries:
        return m.entries[j]
    if m.kind == "f" and -j in m.entries:
        return reconstruct_negative(m)[j]
    raise ModulusError(f"no table for index {j}")


# ----------------------------------------------------------------------
# pipeline
# ----------------------------------------------------------------------

@dataclass
class ExtractionControls:
    order: int | None = None
    height: float = 2.0
    samples: int = 256
    n_max: int = 12
    resolve: float = 1e-5
    negatives: bool = False
    calibrate: bool = True
    fatou: FatouControls = field(default_factory=FatouControls)


@dataclass
class ModulusRun:
    descriptor: ModulusDescriptor
    system: FatouSystem
    params: VectorFieldParams
    calibration: dict
    elapsed: float


def _as_germ(f):
    if isinstance(f, TruncatedSeries):
        return Germ(f)
    if isinstance(f, (Germ, ConjugatedGerm)):
        return f
    raise TypeError(f"cannot interpret {type(f).__name__} as a germ")


def prepare(f, order: int | None = None):
    """Prenormalize a germ; returns ``(ConjugatedGerm, params)``."""
    germ = _as_germ(f)
    # polynomial germs are exact at any order, so pad short jets
    N = order or max(germ.order, 32)
    jet = germ.jet(N)
    try:
        _, params, h = prenormalize(jet)
    except FormalError as exc:
        raise ModulusError(f"prenormalize stage: {exc}") from exc
    return as_conjugated(germ, h), params


def compute_modulus(f, controls: ExtractionControls | None = None) -> ModulusRun:
    """classify -> prenormalize -> Fatou coordinates -> Fourier tables -> normalization."""
    ctl = controls or ExtractionControls()
    t0 = time.perf_counter()
    germ, params = prepare(f, ctl.order)
    try:
        system = FatouSystem(germ, params, ctl.fatou)
        calib = system.calibrate() if (germ.anti and ctl.calibrate) else {}
        k = params.k
        idx = list(range(1, k + 1))
        if not germ.anti or ctl.negatives:
            idx += [-j for j in range(1, k + 1)]
        raw, tails = {}, []
        for j in idx:
            tab = fourier_extract(system, j, ctl.height, ctl.samples, ctl.n_max, ctl.resolve)
            raw[j] = ModulusEntry(j, tab.const, tab.coeffs, tab.floors)
            tails.append(tab.tail)
    except FatouError as exc:
        raise ModulusError(f"fatou stage: {exc}") from exc
    floor = 10 * max(tails) * math.exp(2 * math.pi * abs(ctl.height))
    kind = "f" if germ.anti else "g"
    d = normalize_modulus(kind, params.k, params.b, raw, floor)
    d.diagnostics["stop_radius"] = system.radius
    d.diagnostics["max_resolved_n"] = max([max(map(abs, e.coeffs), default=0) for e in raw.values()])
    return ModulusRun(d, system, params, calib, time.perf_counter() - t0)


__all__ = ["ExtractionControls", "ModulusDescriptor", "ModulusEntry", "ModulusError", "ModulusRun",
           "alternating_sum", "coefficient_side", "compute_modulus", "ecalle_height", "horn_map_derivative",
           "horn_map_eval", "horn_map_negative", "normalize_modulus", "normalized_constant", "prepare",
           "reconstruct_negative", "transition_charts"]
