"""File formats: germ jets, modulus descriptors, reports and figures.

Germ file (JSON)::

    {"kind": "antiholomorphic", "order": 2, "coefficients": [[1, 0], [1, 0]]}

``coefficients[n-1]`` is ``[re, im]`` of the ``z^n`` (or ``zbar^n``) term for
``n = 1..order``; missing trailing terms are zero. An optional ``constant``
field must vanish (the fixed point is 0).
"""
from __future__ import annotations

import csv
import io as _stdio
import json
import math
from pathlib import Path

import numpy as np

from germforge.modulus import ModulusDescriptor, ModulusEntry
from germforge.sectors import OrbitPoint, is_attracting
from germforge.series import ANTIHOLOMORPHIC, HOLOMORPHIC, TruncatedSeries

KINDS = {"holomorphic": HOLOMORPHIC, "antiholomorphic": ANTIHOLOMORPHIC}
LINEAR_TOL = 1e-8


class FormatError(ValueError):
    """Malformed input file; the message names the offending field."""


def _load_json(path) -> dict:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise FormatError(f"{path}: top level must be an object")
    return data


def _number(x, where: str) -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        v = complex(x)
    elif isinstance(x, (list, tuple)) and len(x) == 2 and all(
            isinstance(t, (int, float)) and not isinstance(t, bool) for t in x):
        v = complex(x[0], x[1])
    else:
        raise FormatError(f"{where}: expected a number or [re, im], got {x!r}")
    if not (math.isfinite(v.real) and math.isfinite(v.imag)):
        raise FormatError(f"{where}: non-finite value")
    return v


def _pair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


# ----------------------------------------------------------------------
# germs
# ----------------------------------------------------------------------

def germ_to_dict(s: TruncatedSeries) -> dict:
    kind = "antiholomorphic" if s.is_antiholomorphic else "holomorphic"
    return {"kind": kind, "order": s.order, "coefficients": [_pair(c) for c in s.as_float().coeffs]}


def germ_from_dict(data: dict, where: str = "germ") -> TruncatedSeries:
    kind = data.get("kind")
    if kind not in KINDS:
        raise FormatError(f"{where}: field 'kind' must be one of {sorted(KINDS)}, got {kind!r}")
    if "constant" in data and _number(data["constant"], f"{where}: constant") != 0:
        raise FormatError(f"{where}: constant term {data['constant']!r} must vanish (the fixed point is 0)")
    raw = data.get("coefficients")
    if not isinstance(raw, list) or not raw:
        raise FormatError(f"{where}: field 'coefficients' must list the terms of degree 1..N")
    vals = [_number(c, f"{where}: coefficients[{n}] (degree {n + 1})") for n, c in enumerate(raw)]
    order = data.get("order", len(vals))
    if not isinstance(order, int) or isinstance(order, bool) or order < len(vals):
        raise FormatError(f"{where}: field 'order' must be an integer >= {len(vals)} (number of coefficients)")
    if abs(abs(vals[0]) - 1) > LINEAR_TOL:
        raise FormatError(f"{where}: |a_1| = {abs(vals[0]):.6g}; a parabolic germ needs |a_1| = 1")
    if KINDS[kind] == HOLOMORPHIC and abs(vals[0] - 1) > LINEAR_TOL:
        raise FormatError(f"{where}: a_1 = {vals[0]}; a holomorphic parabolic germ is tangent to the identity")
    coeffs = np.zeros(order, complex)
    coeffs[: len(vals)] = vals
    return TruncatedSeries(coeffs, KINDS[kind])


def parse_germ_file(path) -> TruncatedSeries:
    return germ_from_dict(_load_json(path), str(path))


def write_germ(s: TruncatedSeries, path) -> None:
    Path(path).write_text(dumps(germ_to_dict(s)))


# ----------------------------------------------------------------------
# moduli
# ----------------------------------------------------------------------

def modulus_to_dict(m: ModulusDescriptor) -> dict:
    entries = []
    for j in sorted(m.entries):
        e = m.entries[j]
        coeffs = [{"n": n, "c": _pair(c), "floor": float(e.floor(n, m.noise_floor))}
                  for n, c in sorted(e.coeffs.items())]
        entries.append({"j": j, "const": _pair(e.const), "coeffs": coeffs})
    return {"kind": m.kind, "k": m.k, "b": _pair(m.b), "noise_floor": float(m.noise_floor), "entries": entries}


def modulus_from_dict(data: dict, where: str = "modulus") -> ModulusDescriptor:
    kind = data.get("kind")
    if kind not in ("f", "g"):
        raise FormatError(f"{where}: field 'kind' must be 'f' or 'g', got {kind!r}")
    k = data.get("k")
    if not isinstance(k, int) or k < 1:
        raise FormatError(f"{where}: field 'k' must be a positive integer")
    b = _number(data.get("b", 0), f"{where}: b")
    floor = data.get("noise_floor", 1e-12)
    if not isinstance(floor, (int, float)) or floor < 0:
        raise FormatError(f"{where}: field 'noise_floor' must be a non-negative number")
    ents = {}
    for i, e in enumerate(data.get("entries", [])):
        loc = f"{where}: entries[{i}]"
        j = e.get("j")
        if not isinstance(j, int) or j == 0 or abs(j) > k:
            raise FormatError(f"{loc}: index j={j!r} outside +-1..+-{k}")
        ent = ModulusEntry(j, _number(e.get("const", 0), f"{loc}.const"))
        side = 1 if (j > 0) == bool(j % 2) else -1
        for t, c in enumerate(e.get("coeffs", [])):
            n = c.get("n")
            if not isinstance(n, int) or n == 0 or n * side < 0:
                raise FormatError(f"{loc}.coeffs[{t}]: harmonic n={n!r} has the wrong sign for Psi_{j}")
            ent.coeffs[n] = _number(c.get("c"), f"{loc}.coeffs[{t}].c")
            if "floor" in c:
                ent.floors[n] = float(c["floor"])
        ents[j] = ent
    need = range(1, k + 1) if kind == "f" else [j for j in range(-k, k + 1) if j]
    missing = [j for j in need if j not in ents]
    if missing:
        raise FormatError(f"{where}: missing entries for j = {missing}")
    if kind == "f":
        ents = {j: e for j, e in ents.items() if j > 0}
    try:
        return ModulusDescriptor(kind, k, b.real if kind == "f" else b, float(floor), ents)
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from None


def parse_modulus_file(path) -> ModulusDescriptor:
    return modulus_from_dict(_load_json(path), str(path))


def write_modulus(m: ModulusDescriptor, path) -> None:
    Path(path).write_text(dumps(modulus_to_dict(m)))


def load_input(path):
    """Germ or modulus, told apart by the presence of ``entries``."""
    data = _load_json(path)
    if "entries" in data:
        return modulus_from_dict(data, str(path))
    return germ_from_dict(data, str(path))


# ----------------------------------------------------------------------
# reports
# ----------------------------------------------------------------------

def jsonable(x):
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (complex, np.complexfloating)):
        return _pair(x)
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, ModulusDescriptor):
        return modulus_to_dict(x)
    if isinstance(x, TruncatedSeries):
        return germ_to_dict(x)
    return x


def non_finite_paths(x, prefix: str = "") -> list[str]:
    """Locations of NaN/inf values in a (jsonable) report."""
    if isinstance(x, dict):
        return [p for k, v in x.items() for p in non_finite_paths(v, f"{prefix}.{k}" if prefix else str(k))]
    if isinstance(x, list):
        return [p for i, v in enumerate(x) for p in non_finite_paths(v, f"{prefix}[{i}]")]
    if isinstance(x, float) and not math.isfinite(x):
        return [prefix]
    return []


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=True, allow_nan=True) + "\n"


def format_text(obj, indent: int = 0) -> str:
    """Indented ``key: value`` rendering with sorted keys."""
    obj = jsonable(obj)
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(format_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _flat(v):
                lines.append(f"{pad}-")
                lines.append(format_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {json.dumps(v)}")
    else:
        lines.append(f"{pad}{json.dumps(obj)}")
    return "\n".join(lines)


def _flat(v) -> bool:
    return isinstance(v, list) and all(isinstance(t, (int, float, str, bool)) or t is None for t in v)


# ----------------------------------------------------------------------
# figures
# ----------------------------------------------------------------------

SVG_SIZE = 480


def _fmt(x: float) -> str:
    return f"{x:.4f}"


def _num(x: float) -> str:
    return f"{x:.12g}"


def emit_figures(petals: dict[int, np.ndarray], orbit: list[OrbitPoint], path, view: float) -> tuple[Path, Path]:
    """Write ``<path>.svg`` and ``<path>.csv``.

    ``petals`` maps chart index to a closed polyline; ``view`` is the half-width
    of the square viewport centred at 0. Output depends only on the inputs.
    """
    base = Path(path)
    svg_path, csv_path = base.with_suffix(".svg"), base.with_suffix(".csv")
    scale = SVG_SIZE / (2 * view)

    def xy(z: complex) -> tuple[str, str]:
        return _fmt((z.real + view) * scale), _fmt((view - z.imag) * scale)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" '
             f'viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
             '<rect width="100%" height="100%" fill="white"/>']
    rows = [("kind", "index", "step", "re", "im", "chart", "re_Z", "im_Z")]
    for j in sorted(petals):
        cls = "attracting" if is_attracting(j) else "repelling"
        colour = "#1f77b4" if cls == "attracting" else "#d62728"
        pts = " ".join(",".join(xy(complex(z))) for z in petals[j])
        parts.append(f'<polyline class="petal {cls}" data-chart="{j}" points="{pts}" '
                     f'fill="none" stroke="{colour}" stroke-width="1"/>')
        rows += [("petal", j, i, _num(z.real), _num(z.imag), "", "", "") for i, z in enumerate(petals[j])]
    for pt in orbit:
        cx, cy = xy(pt.z)
        parts.append(f'<circle class="orbit" data-step="{pt.step}" cx="{cx}" cy="{cy}" r="2" fill="black"/>')
        t = pt.time
        rows.append(("orbit", pt.chart, pt.step, _num(pt.z.real), _num(pt.z.imag),
                     "" if t is None else t.chart, "" if t is None else _num(t.value.real),
                     "" if t is None else _num(t.value.imag)))
    parts.append("</svg>")
    svg_path.write_text("\n".join(parts) + "\n")
    buf = _stdio.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    csv_path.write_text(buf.getvalue())
    return svg_path, csv_path


__all__ = ["FormatError", "dumps", "emit_figures", "format_text", "germ_from_dict", "germ_to_dict", "jsonable",
           "load_input", "modulus_from_dict", "modulus_to_dict", "non_finite_paths", "parse_germ_file",
           "parse_modulus_file", "write_germ", "write_modulus"]
