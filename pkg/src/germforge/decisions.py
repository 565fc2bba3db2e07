"""Coefficient-level decisions on modulus descriptors.

Every verdict is qualified by the noise floors recorded in the descriptor:
a coefficient counts as zero iff it is below its floor, and each report
carries the margin that decided it.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Callable, Iterable

import numpy as np

from germforge.formal import classify
from germforge.maps import ConjugatedGerm, Germ
from germforge.modulus import (
    ExtractionControls,
    ModulusDescriptor,
    ModulusEntry,
    compute_modulus,
)

PRECISION = "at numerical precision"


@dataclass
class DecisionReport:
    name: str
    verdict: object
    witnesses: dict = field(default_factory=dict)
    margin: float = 0.0
    notes: list = field(default_factory=list)
    qualifier: str = PRECISION

    def as_dict(self) -> dict:
        return {"decision": self.name, "verdict": _plain(self.verdict), "witnesses": _plain(self.witnesses),
                "margin": self.margin, "qualifier": self.qualifier, "notes": list(self.notes)}


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    return x


# ----------------------------------------------------------------------
# dihedral bookkeeping
# ----------------------------------------------------------------------

def sector_position(k: int, j: int) -> int:
    """Counterclockwise position of ``Psi_j`` in the order ``1..k, -k..-1``."""
    if j == 0 or abs(j) > k:
        raise ValueError(f"index {j} outside +-1..+-{k}")
    return j - 1 if j > 0 else 2 * k + j


def sector_index(k: int, pos: int) -> int:
    pos %= 2 * k
    return pos + 1 if pos < k else pos - 2 * k


@dataclass(frozen=True)
class IndexPermutation:
    k: int
    kind: str  # "rotation" | "reflection"
    param: int
    mapping: tuple

    def __call__(self, j: int) -> int:
        return dict(self.mapping)[j]

    def as_dict(self) -> dict[int, int]:
        return dict(self.mapping)

    def compose(self, other: "IndexPermutation") -> dict[int, int]:
        """``self o other`` as a plain mapping."""
        return {j: self(other(j)) for j in dict(other.mapping)}


def dihedral_permute(k: int, kind: str, param: int) -> IndexPermutation:
    """Index permutation of a rotation by ``m pi / k`` or the reflection in the axis ``e^{i l pi / k}``."""
    idx = [j for j in range(1, k + 1)] + [j for j in range(-k, 0)]
    if kind == "rotation":
        f = lambda j: sector_index(k, sector_position(k, j) - param)  # noqa: E731
    elif kind == "reflection":
        f = lambda j: sector_index(k, 2 * param - 1 - sector_position(k, j))  # noqa: E731
    else:
        raise ValueError(f"unknown dihedral element {kind!r}")
    return IndexPermutation(k, kind, param, tuple((j, f(j)) for j in idx))


def dihedral_group(k: int) -> list[IndexPermutation]:
    """The ``2k`` symmetries of the formal normal form: rotations by ``2 pi m / k`` and ``k`` reflections."""
    rots = [dihedral_permute(k, "rotation", 2 * m) for m in range(k)]
    refl = [dihedral_permute(k, "reflection", ell) for ell in range(k)]
    return rots + refl


# ----------------------------------------------------------------------
# helpers
# ----------------------------------------------------------------------

def _coeff(m: ModulusDescriptor, j: int, n: int) -> tuple[complex, float]:
    e = m.entries.get(j)
    if e is None:
        return 0j, m.noise_floor
    return e.coeffs.get(n, 0j), e.floor(n, m.noise_floor)


def _all_keys(*ms: ModulusDescriptor) -> list[tuple[int, int]]:
    keys = set()
    for m in ms:
        for j, e in m.entries.items():
            keys.update((j, n) for n in e.coeffs)
    return sorted(keys, key=lambda t: (abs(t[1]), t[0], t[1]))


def _mismatch(a: complex, b: complex, fa: float, fb: float) -> float:
    """Relative mismatch; values within the floors count as equal."""
    d = abs(a - b) - fa - fb
    return max(0.0, d) / max(1.0, abs(a), abs(b))


def _gcd_all(vals: Iterable[int]) -> int:
    return reduce(math.gcd, vals, 0)


def divisors(p: int) -> list[int]:
    return [d for d in range(1, p + 1) if p % d == 0]


# ----------------------------------------------------------------------
# equivalence of moduli
# ----------------------------------------------------------------------

def _kpair_transform(m: ModulusDescriptor) -> ModulusDescriptor:
    """``Psi'_j = Sigma T_{1/2} Psi_{k-j+1} Sigma T_{-1/2}`` (extra relation for even ``k``)."""
    full = m.full_table()
    ents = {}
    for j in m.entries:
        src = full.entries[m.k - j + 1]
        ne = ModulusEntry(j, src.const.conjugate())
        for n, c in src.coeffs.items():
            ne.coeffs[-n] = (-1) ** n * c.conjugate()
            ne.floors[-n] = src.floor(n, m.noise_floor)
        ents[j] = ne
    return ModulusDescriptor(m.kind, m.k, m.b, m.noise_floor, ents)


def _search_translation(m1: ModulusDescriptor, m2: ModulusDescriptor, real: bool, rtol: float):
    """Find ``C`` with ``c2 = e^{-2 i pi n C} c1`` on every coefficient; returns ``(C, margin)``."""
    keys = _all_keys(m1, m2)
    worst_zero = 0.0
    pivot = None
    for j, n in keys:
        c1, f1 = _coeff(m1, j, n)
        c2, f2 = _coeff(m2, j, n)
        z1, z2 = abs(c1) <= f1, abs(c2) <= f2
        if z1 and z2:
            continue
        if z1 != z2:
            worst_zero = max(worst_zero, _mismatch(abs(c1), abs(c2), f1, f2))
            if worst_zero > rtol:
                return None, worst_zero
            continue
        if pivot is None:
            pivot = (j, n, c1, c2)
    if pivot is None:
        return 0.0, worst_zero
    _, n, c1, c2 = pivot
    rho = c2 / c1
    if real and abs(abs(rho) - 1) > rtol:
        return None, abs(abs(rho) - 1)
    best = (None, math.inf)
    for mm in range(abs(n)):
        C = (1j * cmath.log(rho) - 2 * math.pi * mm) / (2 * math.pi * n)
        if real:
            C = C.real
        margin = worst_zero
        for jj, nn in keys:
            a, fa = _coeff(m1, jj, nn)
            b, fb = _coeff(m2, jj, nn)
            fac = cmath.exp(-2j * math.pi * nn * C)
            margin = max(margin, _mismatch(a * fac, b, fa * abs(fac), fb))
        if margin < best[1]:
            best = (C % 1 if real else complex(C.real % 1, C.imag), margin)
    if best[1] > rtol:
        return None, best[1]
    return best


def moduli_equivalent(m1: ModulusDescriptor, m2: ModulusDescriptor, k_even_rule: bool = True,
                      rtol: float = 1e-4, btol: float = 1e-6) -> DecisionReport:
    rep = DecisionReport("moduli_equivalent", False)
    if m1.kind != m2.kind:
        m1, m2 = m1.full_table(), m2.full_table()
    if m1.k != m2.k or abs(complex(m1.b) - complex(m2.b)) > btol:
        rep.notes.append(f"formal invariants differ: (k, b) = ({m1.k}, {m1.b}) vs ({m2.k}, {m2.b})")
        rep.margin = abs(complex(m1.b) - complex(m2.b)) if m1.k == m2.k else float(abs(m1.k - m2.k))
        return rep
    const_gap = max(abs(m1.entries[j].const - m2.entries[j].const) for j in m1.entries)
    real = m1.kind == "f"
    candidates = [("identity", m2)]
    if k_even_rule and real and m1.k % 2 == 0:
        candidates.append(("k-even relation", _kpair_transform(m2)))
    margins = []
    for tag, other in candidates:
        C, margin = _search_translation(m1, other, real, rtol)
        margins.append(margin)
        if C is not None and const_gap <= rtol:
            rep.verdict = True
            rep.witnesses = {"C": C, "transform": tag}
            rep.margin = max(margin, const_gap)
            if not m1.nonzero() and not m2.nonzero():
                rep.notes.append("all coefficients below the noise floor: indistinguishable at precision")
            return rep
    rep.margin = min(margins) if margins else math.inf
    if const_gap > rtol:
        rep.notes.append(f"constant terms differ by {const_gap:.3g}")
    return rep


# ----------------------------------------------------------------------
# modulus of the inverse
# ----------------------------------------------------------------------

def _series_exp(a: np.ndarray, order: int) -> np.ndarray:
    """``exp(a)`` for a power series with ``a[0] = 0``."""
    out = np.zeros(order + 1, complex)
    out[0] = 1
    da = np.arange(order + 1) * a[: order + 1]
    for n in range(1, order + 1):
        out[n] = np.dot(da[1: n + 1], out[n - 1::-1][:n]) / n
    return out


def _reversion(alpha: np.ndarray, rate: complex, n_max: int) -> np.ndarray:
    """Solve ``delta = -sum_m alpha_m q^m exp(rate m delta)`` as a power series in ``q``.

    With ``rate = 2 pi`` and ``alpha <= 0`` this is the positive majorant used for error bounds.
    """
    delta = np.zeros(n_max + 1, complex)
    for _ in range(n_max + 1):
        new = np.zeros(n_max + 1, complex)
        for m in range(1, n_max + 1):
            if alpha[m] == 0:
                continue
            e = _series_exp(rate * m * delta, n_max)
            new[m:] -= alpha[m] * e[: n_max + 1 - m]
        if np.array_equal(new, delta):
            break
        delta = new
    return delta


def _harmonics(const: complex, coeffs: dict[int, complex], n_max: int) -> tuple[int, np.ndarray]:
    s = 1 if next(iter(coeffs), 1) > 0 else -1
    alpha = np.zeros(n_max + 1, complex)
    for n, c in coeffs.items():
        if abs(n) <= n_max:
            alpha[abs(n)] = c * cmath.exp(-2j * math.pi * n * const)
    return s, alpha


def invert_periodic(const: complex, coeffs: dict[int, complex], n_max: int) -> tuple[complex, dict[int, complex]]:
    """``Psi^{-1}`` for ``Psi(W) = W + c + sum a_n e^{2 i pi n W}`` (all ``n`` of one sign).

    Returns ``(-c, {n: d_n})`` with ``Psi^{-1}(V) = V - c + sum d_n e^{2 i pi n V}``.
    """
    if not coeffs:
        return -const, {}
    s, alpha = _harmonics(const, coeffs, n_max)
    delta = _reversion(alpha, 2j * math.pi * s, n_max)
    return -const, {s * m: complex(delta[m]) for m in range(1, n_max + 1) if delta[m] != 0}


def _inverse_floors(const: complex, coeffs: dict[int, complex], floors: dict[int, float], default: float,
                    side: int, n_max: int) -> dict[int, float]:
    """Bound on the change of the ``d_n`` when each ``a_n`` moves within its floor.

    Compares the majorant reversions for ``|alpha|`` and ``|alpha| + floor``, so
    cross terms (products of a noisy coefficient with a large one) are covered.
    """
    _, alpha = _harmonics(const, coeffs, n_max)
    phi = np.zeros(n_max + 1)
    for m in range(1, n_max + 1):
        phi[m] = floors.get(side * m, default) * abs(cmath.exp(-2j * math.pi * side * m * const))
    lo = _reversion(-np.abs(alpha).astype(complex), 2 * math.pi, n_max).real
    hi = _reversion(-(np.abs(alpha) + phi).astype(complex), 2 * math.pi, n_max).real
    eps = 10 * np.finfo(float).eps * max(1.0, float(np.max(hi)))
    return {side * m: float(hi[m] - lo[m] + eps) for m in range(1, n_max + 1)}


def modulus_of_inverse(m: ModulusDescriptor, height: float = 2.0, n_max: int = 12) -> ModulusDescriptor:
    """``b -> -b`` and ``Psi~_j = L_{-1} o Psi_{r_1^{-1}(j)}^{-1} o L_{-1}``."""
    full = m.full_table()
    k = full.k
    r1 = dihedral_permute(k, "rotation", 1).as_dict()
    r1_inv = {v: u for u, v in r1.items()}
    ents = {}
    for j in full.indices():
        src = full.entries[r1_inv[j]]
        test = sum(abs(c) * 2 * math.pi * abs(n) * math.exp(-2 * math.pi * abs(n) * height)
                   for n, c in src.coeffs.items())
        if test >= 1:
            raise ValueError(f"Psi_{src.j} is not invertible on the line |Im W| = {height} "
                             f"(derivative defect {test:.3g})")
        side = 1 if (src.j > 0) == bool(src.j % 2) else -1
        top = max([abs(n) for n in src.coeffs], default=0)
        N = max(n_max, top)
        c_inv, d = invert_periodic(src.const, src.coeffs, N)
        fl = _inverse_floors(src.const, src.coeffs, src.floors, full.noise_floor, side, N)
        # conjugation by L_{-1}: W -> -W flips harmonics and signs
        ne = ModulusEntry(j, -c_inv)
        for n in range(1, N + 1):
            ne.coeffs[-side * n] = -d.get(side * n, 0j)
            ne.floors[-side * n] = fl[side * n]
        ents[j] = ne
    return ModulusDescriptor("g", k, -complex(full.b), full.noise_floor, ents)


# ----------------------------------------------------------------------
# decisions
# ----------------------------------------------------------------------

def decide_embeddable(m: ModulusDescriptor) -> DecisionReport:
    nz = m.nonzero()
    ratio = max((abs(c) / max(m.entries[j].floor(n, m.noise_floor), 1e-300) for j, n, c in nz), default=0.0)
    rep = DecisionReport("embeddable", not nz, margin=ratio)
    if nz:
        j, n, c = max(nz, key=lambda t: abs(t[2]))
        rep.witnesses = {"largest": {"j": j, "n": n, "c": c}}
    return rep


def decide_real_curve_f(m: ModulusDescriptor) -> DecisionReport:
    """Preserved real analytic curve: ``Psi_j`` commutes with ``T_{1/2}``, i.e. no odd harmonics."""
    if m.kind != "f":
        raise ValueError("decide_real_curve_f needs an antiholomorphic (kind f) modulus")
    odd = [(j, n, c) for j, n, c in m.nonzero() if n % 2]
    rep = DecisionReport("real_curve_f", not odd)
    if odd:
        j, n, c = max(odd, key=lambda t: abs(t[2]))
        rep.witnesses = {"violating": {"j": j, "n": n, "c": c}}
        rep.margin = abs(c)
    return rep


def _pairs(full: ModulusDescriptor, partner: Callable[[int], int]):
    """``((j, n), (partner(j), -n))`` pairs over every stored coefficient of positive ``j``-side."""
    seen = set()
    for j, n in _all_keys(full):
        key = (j, n)
        other = (partner(j), -n)
        if key in seen or other in seen:
            continue
        seen.update((key, other))
        yield key, other


def _solve_scalar(pairs, full, phase: Callable[[int], complex], expo: Callable[[int], float], rtol: float):
    """Find real ``y`` with ``lhs(j,n) * phase(n) * exp(expo(n) y) = conj(rhs)`` on every pair.

    Returns ``(ok, y, margin, violating_pair)``.
    """
    y = None
    worst = 0.0
    data = []
    for (j, n), (i, mneg) in pairs:
        a, fa = _coeff(full, j, n)
        b, fb = _coeff(full, i, mneg)
        za, zb = abs(a) <= fa, abs(b) <= fb
        if za and zb:
            continue
        if za != zb:
            return False, None, max(abs(a), abs(b)), ((j, n), (i, mneg))
        data.append(((j, n), (i, mneg), a * phase(n), b.conjugate(), fa, fb))
    for (jn, im, a, b, fa, fb) in data:
        ratio = b / a
        if abs(ratio.imag) > rtol * abs(ratio) + (fa + fb) / max(abs(a), 1e-300) or ratio.real <= 0:
            return False, None, abs(cmath.phase(ratio)), (jn, im)
        y = math.log(ratio.real) / expo(jn[1]) + 0.0
        break
    if y is None:
        return True, 0.0, 0.0, None
    for (jn, im, a, b, fa, fb) in data:
        pred = a * math.exp(expo(jn[1]) * y)
        mis = _mismatch(pred, b, fa * math.exp(expo(jn[1]) * y), fb)
        worst = max(worst, mis)
        if mis > rtol:
            return False, y, mis, (jn, im)
    return True, y, worst, None


def decide_real_curve_g(m: ModulusDescriptor, rtol: float = 1e-4) -> DecisionReport:
    """Exists real ``y`` with ``Sigma T_{iy} o Psi_j = Psi_{-j} o Sigma T_{iy}``, where
    ``Sigma T_t(W) = conj(W) + t``: ``conj(c_{n,j}) = e^{2 pi n y} c_{-n,-j}`` and ``conj(c_j) = c_{-j}``.
    """
    full = m.full_table()
    const_gap = max(abs(full.entries[j].const.conjugate() - full.entries[-j].const) for j in range(1, full.k + 1))
    rep = DecisionReport("real_curve_g", False)
    if const_gap > rtol:
        rep.margin = const_gap
        rep.notes.append("constant terms violate conj(c_j) = c_{-j}")
        return rep
    ok, y, margin, bad = _solve_scalar(_sigma_pairs(full), full, lambda nu: 1.0, lambda nu: -2 * math.pi * nu, rtol)
    rep.verdict = ok
    rep.margin = margin
    rep.witnesses = {"y": y} if ok else {"violating_pair": bad}
    return rep


def _sigma_pairs(full: ModulusDescriptor):
    """Pairs read from the ``(-n, -j)`` side, so with ``nu = -n`` the helper solves
    ``c_{nu,-j} e^{-2 pi nu y} phase = conj(c_{-nu,j})``."""
    return [((i, mneg), (j, n)) for (j, n), (i, mneg) in _pairs(full, lambda j: -j)]


def _axis_condition(full: ModulusDescriptor, ell: int, n_root: int, rtol: float):
    """``c_{m,j} e^{2 i pi m/n} e^{4 pi m eta} = conj(c_{-m, s_l(j)})`` for a real ``eta``."""
    s = dihedral_permute(full.k, "reflection", ell)
    const_gap = max(abs(full.entries[j].const - full.entries[s(j)].const.conjugate()) for j in full.indices())
    if const_gap > rtol:
        return False, None, const_gap, "constants"
    pairs = []
    seen = set()
    for j, n in _all_keys(full):
        if (j, n) in seen:
            continue
        other = (s(j), -n)
        seen.update(((j, n), other))
        pairs.append(((j, n), other))
    ok, eta, margin, bad = _solve_scalar(pairs, full, lambda m: cmath.exp(2j * math.pi * m / n_root),
                                         lambda m: 4 * math.pi * m, rtol)
    # the pairing is symmetric; check the reversed orientation too
    if ok:
        rev = [(o, k) for k, o in pairs]
        ok2, margin2, bad2 = _solve_scalar_fixed(rev, full, n_root, eta, rtol)
        ok, margin, bad = ok2, max(margin, margin2), bad2
    return ok, eta, margin, bad


def _solve_scalar_fixed(pairs, full, n_root, eta, rtol):
    worst = 0.0
    for (j, n), (i, mneg) in pairs:
        a, fa = _coeff(full, j, n)
        b, fb = _coeff(full, i, mneg)
        fac = cmath.exp(2j * math.pi * n / n_root) * math.exp(4 * math.pi * n * eta)
        mis = _mismatch(a * fac, b.conjugate(), fa * abs(fac), fb)
        worst = max(worst, mis)
        if mis > rtol:
            return False, worst, ((j, n), (i, mneg))
    return True, worst, None


def decide_antiholo_root_g(m: ModulusDescriptor, n: int, rtol: float = 1e-4) -> DecisionReport:
    """Antiholomorphic ``n``-th roots (``n`` even) of the holomorphic germ, per symmetry axis."""
    if n < 2 or n % 2:
        raise ValueError("antiholomorphic roots of g have even order")
    full = m.full_table()
    admitting, margins, etas = [], {}, {}
    for ell in range(full.k):
        ok, eta, margin, _ = _axis_condition(full, ell, n, rtol)
        margins[ell] = margin
        if ok:
            admitting.append(ell)
            etas[ell] = eta
    rep = DecisionReport("antiholo_root_g", bool(admitting), margin=max(margins.values(), default=0.0))
    rep.witnesses = {"axes": admitting, "eta": etas}
    if admitting:
        g = _gcd_all([a - admitting[0] for a in admitting[1:]] + [full.k])
        rep.witnesses["independent_transition_functions"] = g
    return rep


def decide_antiholo_root_f(m: ModulusDescriptor, n: int) -> DecisionReport:
    """Antiholomorphic ``n``-th root (``n`` odd): ``c_{m,j} = 0`` whenever ``n`` does not divide ``m``."""
    if n < 3 or n % 2 == 0:
        raise ValueError("antiholomorphic roots of f have odd order n >= 3")
    bad = [(j, mm, c) for j, mm, c in m.nonzero() if mm % n]
    rep = DecisionReport("antiholo_root_f", not bad)
    if bad:
        j, mm, c = max(bad, key=lambda t: abs(t[2]))
        rep.witnesses = {"violating": {"j": j, "n": mm, "c": c}}
        rep.margin = abs(c)
    return rep


@dataclass
class CentralizerReport:
    kind: str
    case: str
    p: object
    divisors: list
    schwarz: bool
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"kind": self.kind, "case": self.case, "p": self.p, "divisors": self.divisors,
                "schwarz_reflection": self.schwarz, "details": _plain(self.details)}


def _harmonic_gcd(m: ModulusDescriptor) -> int:
    return _gcd_all(abs(n) for _, n, _ in m.full_table().nonzero())


def centralizer(m: ModulusDescriptor, kind: str | None = None, rtol: float = 1e-4) -> CentralizerReport:
    kind = kind or m.kind
    p = _harmonic_gcd(m)
    if p == 0:
        if kind == "f":
            return CentralizerReport("f", "embeddable: {h v^t h^-1, h sigma v^t h^-1 | t real}", "inf", [], True)
        return CentralizerReport("g", "embeddable: {g_t, h sigma v^t h^-1 | t complex}", "inf", [], True)
    divs = divisors(p)
    if kind == "f":
        schwarz = p % 2 == 0
        case = ("p even: hol. fractional iterates of f o f of order d | p, antihol. of odd order d | p, "
                "and a Schwarz reflection") if schwarz else \
            "p odd: hol. fractional iterates of f o f of order d | p, antihol. of odd order d | p"
        return CentralizerReport("f", case, p, divs, schwarz,
                                 {"antiholomorphic_orders": [d for d in divs if d % 2]})
    full = m.full_table()
    # conj(c_{n,j}) = e^{-i pi a n / r} e^{2 pi n y} c_{-n,-j}; (Sigma T_t)^2 = T_{a/r}
    # commutes with Psi_j since r | p, so one orientation of each pair suffices
    pairs = _sigma_pairs(full)
    admissible = []
    for r in divs:
        for a in range(2 * r):
            if math.gcd(a, r) != 1:
                continue
            ok, y, _, _ = _solve_scalar(pairs, full, lambda nu, a=a, r=r: cmath.exp(1j * math.pi * a * nu / r),
                                        lambda nu: -2 * math.pi * nu, rtol)
            if ok:
                admissible.append({"a": a, "r": r, "y": y})
    schwarz = any((p // c["r"]) % 2 == 0 or c["a"] % 2 == 0 for c in admissible)
    if schwarz:
        case = "iterates and antihol. fractional iterates of even order d | p, with a Schwarz reflection"
    elif admissible:
        case = "iterates and antihol. fractional iterates of even order d | 2p"
    else:
        case = "fractional iterates of order d | p only"
    return CentralizerReport("g", case, p, divs, schwarz, {"admissible": admissible})


# ----------------------------------------------------------------------
# end-to-end
# ----------------------------------------------------------------------

def conjugacy_check(f1, f2, controls: ExtractionControls | None = None, rtol: float = 1e-4) -> DecisionReport:
    """classify -> prenormalize -> modulus -> equivalence, for two germs."""
    def formal(f):
        g = f if isinstance(f, (Germ, ConjugatedGerm)) else Germ(f)
        return classify(g.jet(max(g.order, 32)))

    c1, c2 = formal(f1), formal(f2)
    if c1.k != c2.k or c1.degenerate != c2.degenerate or abs(complex(c1.b or 0) - complex(c2.b or 0)) > 1e-6:
        rep = DecisionReport("conjugacy_check", False)
        rep.notes.append(f"formal invariants differ: k={c1.k}, b={c1.b} vs k={c2.k}, b={c2.b}")
        rep.margin = abs(complex(c1.b or 0) - complex(c2.b or 0))
        return rep
    r1 = compute_modulus(f1, controls)
    r2 = compute_modulus(f2, controls)
    rep = moduli_equivalent(r1.descriptor, r2.descriptor, rtol=rtol)
    rep.name = "conjugacy_check"
    rep.notes.append("equivalent moduli mean conjugate germs; verified here at numerical precision only")
    rep.witnesses["moduli"] = [r1.descriptor, r2.descriptor]
    return rep


__all__ = ["CentralizerReport", "DecisionReport", "IndexPermutation", "centralizer", "conjugacy_check",
           "decide_antiholo_root_f", "decide_antiholo_root_g", "decide_embeddable", "decide_real_curve_f",
           "decide_real_curve_g", "dihedral_group", "dihedral_permute", "divisors", "invert_periodic",
           "moduli_equivalent", "modulus_of_inverse", "sector_index", "sector_position"]
