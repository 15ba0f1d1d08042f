"""Command-line interface: ``wkspin analyze|verify|solve|trace|sasaki|repro``."""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict
from pathlib import Path

from . import geometry, moduli, wk_core
from .errors import DegenerateInput, DegenerateMetric, WKError, ZeroK
from .geometry import ModelParams
from .numerics import DEFAULT_TOLERANCES, ToleranceConfig

SCHEMA_VERSION = 1
EXIT_PASS, EXIT_FAIL, EXIT_INVALID = 0, 1, 2
SNAP_THRESHOLD = 1e-6


class InvalidInput(Exception):
    pass


# ---------------------------------------------------------------- serialization


def _dump(obj, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format(obj, ".17g") if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_dump(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + _dump(v, indent + 1) for v in obj) + "\n" + end + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return _dump(obj.item(), indent)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """JSON with floats at 17 significant digits; stable under parse and re-dump."""
    return _dump(obj) + "\n"


def run_report(args, result) -> dict:
    conv = wk_core.calibrate_conventions()
    rep = {
        "schema_version": SCHEMA_VERSION,
        "command": list(args.argv),
        "tolerances": args.tol.as_dict(),
        "conventions": asdict(conv),
        "result": result,
    }
    if args.timing:
        rep["duration_s"] = time.perf_counter() - args.t0
    return rep


# ---------------------------------------------------------------- helpers


def _params(values) -> ModelParams:
    try:
        p = ModelParams(*(float(v) for v in values))
    except ValueError as e:
        raise InvalidInput(str(e)) from None
    if not p.is_finite():
        raise InvalidInput(f"non-finite parameters {values}")
    return p


def _emit(args, result: dict, text: str, out=None) -> None:
    out = out or sys.stdout
    if args.json:
        out.write(dumps(run_report(args, result)))
    else:
        out.write(text if text.endswith("\n") else text + "\n")


def analyze_result(p: ModelParams) -> dict:
    cd = geometry.curvature(p)
    cls = geometry.classify(p)
    out = {
        "params": [p.K, p.L, p.M],
        "brackets": list(cd.brackets),
        "ricci": list(cd.ricci),
        "S": cd.S,
        "ricci_norm_sq": cd.ricci_norm_sq,
        "class": cls.kind.value,
        "scalar_sign": cls.scalar_sign,
        "variety_F": wk_core.variety_F(p),
    }
    try:
        m = geometry.standard_basis_metric(p)
        out["so3_metric"] = [m.m11, m.m22, m.m33]
    except DegenerateMetric as e:
        out["so3_metric"] = None
        out["so3_metric_note"] = f"DegenerateMetric: {e}"
    return out


def _fmt_report(r: dict) -> str:
    lines = [f"{'params':<25}{r['params']}"]
    for key in ("verdict", "variety_residual", "scalar_curvature", "lambda_theorem",
                "lambda_theorem_branch", "lambda_theorem_error", "lambda_solved",
                "theorem_lambda_mismatch", "integrability_defect", "spinor_space_dim",
                "einstein_dirac_residual", "ed_sign", "dirac_residual", "norm_drift",
                "holonomy_defect", "holonomy_order", "snapped_from"):
        if r.get(key) is not None:
            lines.append(f"{key:<25}{r[key]}")
    for reason in r.get("reasons", []):
        lines.append(f"{'reason':<25}{reason}")
    for note in r.get("notes", []):
        lines.append(f"{'note':<25}{note}")
    return "\n".join(lines)


def _snap(p: ModelParams, tol: ToleranceConfig):
    """Move L to the nearest root of F(K, ., M) when p is within rounding of the variety."""
    q = p.scaled(1.0 / p.norm())
    f = abs(wk_core.variety_F(q))
    if f <= tol.residual_tol or f > SNAP_THRESHOLD or (p.K == 0 and p.M == 0):
        return p, None
    roots = moduli.solve_for_L(p.K, p.M)
    if not roots:
        return p, None
    L = min(roots, key=lambda r: abs(r - p.L))
    return ModelParams(p.K, L, p.M), [p.K, p.L, p.M]


def verify_result(p: ModelParams, tol: ToleranceConfig, snap: bool = True) -> dict:
    snapped_from = None
    if snap:
        p, snapped_from = _snap(p, tol)
    rep = wk_core.verify(p, tol)
    d = rep.to_dict()
    d["snapped_from"] = snapped_from
    return d


# ---------------------------------------------------------------- commands


def cmd_analyze(args) -> int:
    p = _params((args.K, args.L, args.M))
    r = analyze_result(p)
    text = [f"params         K={p.K!r} L={p.L!r} M={p.M!r}",
            f"ricci          {r['ricci']}",
            f"S              {r['S']!r}",
            f"|Ric|^2        {r['ricci_norm_sq']!r}",
            f"class          {r['class']} (sign S = {r['scalar_sign']:+d})",
            f"F(K,L,M)       {r['variety_F']!r}"]
    if r["so3_metric"] is not None:
        text.append(f"so(3) metric   diag{tuple(r['so3_metric'])}")
    else:
        text.append(f"so(3) metric   {r['so3_metric_note']}")
    _emit(args, r, "\n".join(text))
    return EXIT_PASS


def cmd_verify(args) -> int:
    p = _params((args.K, args.L, args.M))
    if p.is_zero():
        raise InvalidInput("(0,0,0) is excluded")
    r = verify_result(p, args.tol, snap=not args.no_snap)
    _emit(args, r, _fmt_report(r))
    return EXIT_PASS if r["verdict"] == "Pass" else EXIT_FAIL


def cmd_solve(args) -> int:
    K, M = float(args.k), float(args.m)
    if not (math.isfinite(K) and math.isfinite(M)):
        raise InvalidInput("non-finite input")
    try:
        roots = moduli.solve_for_L(K, M)
    except DegenerateInput as e:
        raise InvalidInput(str(e)) from None
    rows = [{"L": L, "F": wk_core.variety_F((K, L, M))} for L in roots]
    text = [f"F(K={K!r}, L, M={M!r}) = 0: {len(roots)} real root(s)"]
    text += [f"  L = {row['L']:.17g}   F = {row['F']:.3e}" for row in rows]
    _emit(args, {"K": K, "M": M, "roots": rows}, "\n".join(text))
    return EXIT_PASS


def trace_result(t: moduli.Trace) -> dict:
    return {
        "resolution": t.resolution,
        "summary": t.summary(),
        "branches": [{"id": b.id, "endpoints": list(b.endpoints), "points": len(b.points)}
                     for b in t.branches],
        "corner_incidence": t.corner_incidence,
        "ambiguous_cells": t.ambiguous_cells,
        "closed_loops": t.closed_loops,
        "unpaired_paths": t.unpaired_paths,
        "lambda_pole_points": t.pole_points,
        "max_residual": t.max_residual,
        "max_arc_step": t.max_arc_step,
    }


def cmd_trace(args) -> int:
    if args.resolution < 64 or args.resolution % 2:
        raise InvalidInput("resolution must be an even integer >= 64")
    t = moduli.trace(args.resolution, args.tol)
    rows = None
    if args.csv:
        rows = moduli.write_csv(t.branches, args.csv)
    if args.svg:
        moduli.write_svg(t.branches, args.svg)
    if args.figure:
        from .plotting import save_moduli_figure

        save_moduli_figure(t.branches, args.figure, title=f"F = 0 in RP^2 (resolution {t.resolution})")
    r = trace_result(t)
    r["csv_rows"] = rows
    text = [t.summary()]
    text += [f"  branch {b.id}: {b.endpoints[0]} -> {b.endpoints[1]} ({len(b.points)} points)"
             for b in t.branches]
    text.append(f"  max |F| = {t.max_residual:.3e}, ambiguous cells = {t.ambiguous_cells}")
    _emit(args, r, "\n".join(text))
    ok = all(lab != moduli.OPEN for b in t.branches for lab in b.endpoints)
    ok = ok and t.max_residual < args.tol.trace_polish_tol
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_sasaki(args) -> int:
    K = float(args.k)
    if not math.isfinite(K):
        raise InvalidInput("non-finite K")
    try:
        Ls = moduli.km_locus(K)
    except ZeroK as e:
        raise InvalidInput(str(e)) from None
    reports = [verify_result(ModelParams(K, L, K), args.tol, snap=False) for L in Ls]
    text = []
    for r in reports:
        text.append(_fmt_report(r))
        text.append("")
    _emit(args, {"K": K, "reports": reports}, "\n".join(text))
    return EXIT_PASS if all(r["verdict"] == "Pass" for r in reports) else EXIT_FAIL


def cmd_repro(args) -> int:
    """Regenerate every acceptance artifact into ``--out``."""
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    s5 = math.sqrt(5.0)
    jobs = [
        ("analyze_sasaki_minus.json", ["analyze", "1", repr((1 + s5) / 4), "1"], EXIT_PASS),
        ("analyze_flat.json", ["analyze", "1", "0", "0"], EXIT_PASS),
        ("analyze_round.json", ["analyze", "1", "-1", "1"], EXIT_PASS),
        ("solve_k1_m1.json", ["solve", "--k", "1", "--m", "1"], EXIT_PASS),
        ("solve_k1_m2.json", ["solve", "--k", "1", "--m", "2"], EXIT_PASS),
        ("verify_sasaki_plus.json", ["verify", "1", repr((1 - s5) / 4), "1"], EXIT_PASS),
        ("verify_round_sphere.json", ["verify", "1", "-1", "1"], EXIT_FAIL),
        ("verify_flat_corner.json", ["verify", "1", "0", "0"], EXIT_FAIL),
        ("sasaki_k1.json", ["sasaki", "--k", "1"], EXIT_PASS),
        ("sasaki_k2.json", ["sasaki", "--k", "2"], EXIT_PASS),
        ("trace.json", ["trace", "--resolution", str(args.resolution),
                        "--csv", str(out / "moduli.csv"), "--svg", str(out / "moduli.svg"),
                        "--figure", str(out / "moduli.png")], EXIT_PASS),
    ]
    status = EXIT_PASS
    for name, argv, expected in jobs:
        with open(out / name, "w") as fh:
            code = main(argv + ["--json"], stdout=fh)
        mark = "ok" if code == expected else "UNEXPECTED"
        print(f"{name:<28} exit {code} ({mark})")
        if code != expected:
            status = EXIT_FAIL
    return status


# ---------------------------------------------------------------- parser


def _common_parser(defaults: bool) -> argparse.ArgumentParser:
    """Flags accepted before and after the subcommand.

    The subcommand copy suppresses defaults so it does not overwrite a flag given
    before the subcommand name.
    """
    p = argparse.ArgumentParser(add_help=False)
    off = {} if defaults else {"default": argparse.SUPPRESS}
    p.add_argument("--json", action="store_true", help="emit a JSON run report", **off)
    p.add_argument("--timing", action="store_true", help="add wall-clock duration to JSON", **off)
    g = p.add_argument_group("tolerances")
    for name in DEFAULT_TOLERANCES.as_dict():
        flag = "--tol-" + name.replace("_tol", "").replace("_", "-")
        g.add_argument(flag, dest=name, type=float, default=None if defaults else argparse.SUPPRESS,
                       help=f"override {name} (default {getattr(DEFAULT_TOLERANCES, name)})")
    return p


def _klm_args(p: argparse.ArgumentParser) -> None:
    # separate positionals: a tuple metavar breaks argparse's missing-argument message on 3.10
    for name in ("K", "L", "M"):
        p.add_argument(name)


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser(defaults=False)
    ap = argparse.ArgumentParser(prog="wkspin", description=__doc__,
                                 parents=[_common_parser(defaults=True)])
    ap.add_argument("--show-conventions", action="store_true",
                    help="print the calibrated spin conventions and exit")
    sub = ap.add_subparsers(dest="command")

    a = sub.add_parser("analyze", parents=[common], help="curvature of X^3(K,L,M)")
    _klm_args(a)
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", parents=[common], help="WK-spinor and Einstein-Dirac check")
    _klm_args(v)
    v.add_argument("--no-snap", action="store_true",
                   help="do not move L onto the variety when |F| is at rounding level")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("solve", parents=[common], help="roots L of F(K, L, M) = 0")
    s.add_argument("--k", required=True)
    s.add_argument("--m", required=True)
    s.set_defaults(func=cmd_solve)

    t = sub.add_parser("trace", parents=[common], help="trace the moduli curves")
    t.add_argument("--resolution", type=int, default=512)
    t.add_argument("--csv")
    t.add_argument("--svg")
    t.add_argument("--figure", help="matplotlib rendering (png/pdf/svg by suffix)")
    t.set_defaults(func=cmd_trace)

    k = sub.add_parser("sasaki", parents=[common], help="verify both K = M solutions")
    k.add_argument("--k", required=True)
    k.set_defaults(func=cmd_sasaki)

    r = sub.add_parser("repro", parents=[common], help="regenerate all acceptance artifacts")
    r.add_argument("--out", default="artifacts")
    r.add_argument("--resolution", type=int, default=512)
    r.set_defaults(func=cmd_repro)
    return ap


def main(argv=None, stdout=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INVALID if e.code else EXIT_PASS
    args.argv = argv
    args.t0 = time.perf_counter()
    try:
        args.tol = DEFAULT_TOLERANCES.with_overrides(
            **{k: getattr(args, k) for k in DEFAULT_TOLERANCES.as_dict()})
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    out = stdout or sys.stdout
    if args.show_conventions:
        out.write(dumps(asdict(wk_core.calibrate_conventions())))
        return EXIT_PASS
    if not getattr(args, "func", None):
        ap.print_help(out)
        return EXIT_INVALID
    old = sys.stdout
    sys.stdout = out
    try:
        return args.func(args)
    except (InvalidInput, ValueError, DegenerateInput) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    finally:
        sys.stdout = old


if __name__ == "__main__":
    sys.exit(main())
