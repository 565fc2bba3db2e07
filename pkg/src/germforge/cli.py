"""Command-line front end.

Exit status 0 whenever a result was computed (including false verdicts),
2 when any stage failed; the diagnostic names the stage.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from germforge import decisions as dec
from germforge.config import ConfigError, RunConfig, load_config
from germforge.fatou import FatouError
from germforge.formal import FormalError, classify, prenormalize
from germforge.io import (
    FormatError,
    dumps,
    emit_figures,
    format_text,
    germ_to_dict,
    jsonable,
    load_input,
    modulus_to_dict,
    non_finite_paths,
    parse_germ_file,
)
from germforge.maps import NewtonError
from germforge.modulus import ModulusDescriptor, ModulusError, compute_modulus, prepare
from germforge.sectors import ChartError, SectorSpec, orbit_trace, petal_boundary
from germforge.series import SeriesError

EXIT_OK, EXIT_FAIL = 0, 2

class StageError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(message)
        self.stage = stage

STAGES = [
    (FormatError, "input"), (ConfigError, "config"), (SeriesError, "series"), (FormalError, "formal"),
    (FatouError, "fatou"), (ModulusError, "modulus"), (NewtonError, "newton"), (ChartError, "sectors"),
]

def _stage_of(exc: Exception) -> str:
    if isinstance(exc, StageError):
        return exc.stage
    for cls, name in STAGES:
        if isinstance(exc, cls):
            return name
    return "decision" if isinstance(exc, ValueError) else "io"

# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------

def _jet(path: str, cfg: RunConfig):
    s = parse_germ_file(path)
    # germ files hold polynomials, so padding with zeros is exact
    return s.truncate(cfg.order or max(s.order, 32))

def _modulus(path: str, cfg: RunConfig, negatives: bool = False) -> tuple[ModulusDescriptor, dict]:
    obj = load_input(path)
    if isinstance(obj, ModulusDescriptor):
        return obj, {"source": "modulus file"}
    cls = classify(obj.truncate(max(obj.order, 32)))
    if cls.k is not None:
        cfg.check_order(cls.k)
    run = compute_modulus(obj, cfg.extraction(negatives))
    return run.descriptor, {"source": "germ", "stop_radius": run.system.radius,
                            "calibration": run.calibration,
                            "alternating_sum_residual": run.descriptor.diagnostics.get("alternating_sum_residual")}

def cmd_analyze(args, cfg):
    s = _jet(args.germ, cfg)
    c = classify(s)
    return {"k": c.k, "type": c.type_sign, "b": c.b, "degenerate": c.degenerate, "residue": c.residue,
            "notes": c.notes, "order": s.order}

def cmd_prenormalize(args, cfg):
    jet = _jet(args.germ, cfg)
    f_pre, params, h = prenormalize(jet)
    cfg.check_order(params.k)
    return {"k": params.k, "b": params.b, "prenormalized": germ_to_dict(f_pre), "conjugacy": germ_to_dict(h)}

def cmd_modulus(args, cfg):
    s = parse_germ_file(args.germ)
    run = compute_modulus(s, cfg.extraction(args.negatives))
    d = run.descriptor
    diag = {k: v for k, v in d.diagnostics.items() if k != "negative_direct"}
    if d.diagnostics.get("negative_direct"):
        diag["negative_direct"] = {j: {"const": e.const, "coeffs": {n: c for n, c in sorted(e.coeffs.items())}}
                                   for j, e in sorted(d.diagnostics["negative_direct"].items())}
    return {"modulus": modulus_to_dict(d), "diagnostics": diag, "calibration": run.calibration}

def cmd_decide(args, cfg):
    m, src = _modulus(args.input, cfg)
    if args.question == "embeddable":
        rep = dec.decide_embeddable(m)
    elif args.question == "real-curve":
        rep = dec.decide_real_curve_f(m) if m.kind == "f" else dec.decide_real_curve_g(m)
    elif args.question == "root":
        if args.n is None:
            raise StageError("config", "decide root needs --n")
        if args.n % 2:
            if m.kind != "f":
                raise StageError("decision", "odd-order antiholomorphic roots are defined for kind f moduli")
            rep = dec.decide_antiholo_root_f(m, args.n)
        else:
            rep = dec.decide_antiholo_root_g(m, args.n)
            if m.kind == "f":
                rep.notes.append("even n: roots of f o f, tested on the full 2k-table")
    else:
        return {"centralizer": dec.centralizer(m).as_dict(), "input": src}
    return {"decision": rep.as_dict(), "input": src}

def cmd_compare(args, cfg):
    a, b = parse_germ_file(args.germ1), parse_germ_file(args.germ2)
    rep = dec.conjugacy_check(a, b, cfg.extraction(), rtol=args.rtol)
    out = rep.as_dict()
    mods = rep.witnesses.get("moduli")
    out["witnesses"].pop("moduli", None)
    if mods:
        out["moduli"] = [modulus_to_dict(x) for x in mods]
    return {"decision": out}

def cmd_inverse(args, cfg):
    m, src = _modulus(args.input, cfg)
    return {"modulus": modulus_to_dict(dec.modulus_of_inverse(m, cfg.height, cfg.nmax)), "input": src}

def cmd_orbit(args, cfg):
    s = parse_germ_file(args.germ)
    germ, params = prepare(s, cfg.order)
    spec = SectorSpec(cfg.delta, params.k) if cfg.delta else SectorSpec.default(params)
    z0 = complex(args.z0.replace(" ", "").replace("i", "j"))
    pts = orbit_trace(germ, params, z0, args.steps)
    petals = {j: petal_boundary(params, j, spec.delta) for j in range(-params.k + 1, params.k + 1)}
    result = {"k": params.k, "b": params.b, "delta": spec.delta,
              "orbit": [{"step": p.step, "z": p.z, "chart": p.chart,
                         "time": None if p.time is None else {"chart": p.time.chart, "Z": p.time.value}}
                        for p in pts]}
    if args.figure:
        view = max([spec.delta * 1.25] + [abs(p.z) * 1.1 for p in pts])
        svg, csv_path = emit_figures(petals, pts, args.figure, view)
        result["figures"] = [str(svg), str(csv_path)]
    return result

# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run configuration (flags > --config file > defaults)")
    g.add_argument("--config", help="JSON file with RunConfig keys")
    g.add_argument("--order", type=int, help="truncation order N")
    g.add_argument("--tol", type=float, help="zero floor for Fourier coefficients")
    g.add_argument("--height", type=float, help="quadrature line |Im W| = Y")
    g.add_argument("--samples", type=int, help="quadrature points M")
    g.add_argument("--nmax", type=int, help="largest harmonic extracted")
    g.add_argument("--delta", type=float, help="petal radius")
    g.add_argument("--out", help="write the report here instead of stdout")
    g.add_argument("--format", choices=("text", "json"), help="report format")
    return p

def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="germforge", description="Analytic invariants of parabolic "
                                 "(anti)holomorphic germs.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="formal invariants (k, type, b)")
    p.add_argument("germ")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("prenormalize", parents=[common], help="prenormalized jet and conjugacy")
    p.add_argument("germ")
    p.set_defaults(func=cmd_prenormalize)

    p = sub.add_parser("modulus", parents=[common], help="normalized modulus of classification")
    p.add_argument("germ")
    p.add_argument("--negatives", action="store_true", help="also compute Psi_{-j} directly (kind f)")
    p.set_defaults(func=cmd_modulus)

    p = sub.add_parser("decide", parents=[common], help="coefficient-level decisions")
    p.add_argument("question", choices=("embeddable", "real-curve", "root", "centralizer"))
    p.add_argument("input", help="germ or modulus file")
    p.add_argument("--n", type=int, help="root order")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("compare", parents=[common], help="equivalence of the moduli of two germs")
    p.add_argument("germ1")
    p.add_argument("germ2")
    p.add_argument("--rtol", type=float, default=1e-4)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("inverse-modulus", parents=[common], help="modulus of the inverse germ")
    p.add_argument("input", help="germ or modulus file")
    p.set_defaults(func=cmd_inverse)

    p = sub.add_parser("orbit", parents=[common], help="orbit with petal/chart annotations (prenormalized coordinates)")
    p.add_argument("germ")
    p.add_argument("--z0", required=True, help="start point, e.g. 0.05+0.01j (use --z0=-0.05 for a leading minus)")
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--figure", help="path stem for the SVG and CSV figures")
    p.set_defaults(func=cmd_orbit)
    return ap

def run_command(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    overrides = {k: getattr(args, k) for k in ("order", "tol", "height", "samples", "nmax", "delta", "out", "format")}
    try:
        cfg = load_config(args.config, overrides)
        result = jsonable(args.func(args, cfg))
        bad = non_finite_paths(result)
        if bad:
            raise StageError("report", f"non-finite values at {', '.join(bad[:5])}")
    except Exception as exc:  # every failure becomes a stage diagnostic
        print(f"germforge: {_stage_of(exc)} stage failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    report = {"command": args.command, "config": cfg.as_dict(), "result": result}
    text = dumps(report) if cfg.format == "json" else format_text(report) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK

def main() -> None:
    sys.exit(run_command())

if __name__ == "__main__":
    main()
