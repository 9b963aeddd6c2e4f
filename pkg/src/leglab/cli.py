"""Command-line surface for the leglab toolkit.

Exit codes: 0 success, 2 validation error, 3 numerical failure,
64 usage error.  All JSON output is deterministic (sorted keys, fixed
separators, no timestamps).
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import gallery, svg
from .acceptance import run_acceptance
from .errors import NumericalError, ValidationError
from .forms import (BUILTIN_FORMS, Hamiltonian, flow as _flow_points,
                    form_from_json_dict, hamiltonian_field,
                    legendrian_residual, line_integral_beta)
from .geometry import (PlaneCurve, chord_arc_constant, curve_from_json_dict,
                       min_corner_angle)
from .invariants import linking_number, thurston_bennequin, writhe
from .lifting import lift, project
from .moves import (FLOW_STEP, bypass_isotopy, chart_from_json_dict,
                    corner_round, legendrian_isotopy_lift, solve_correction,
                    square_from_json_dict, trace_from_json_dict)

USAGE_EXIT = 64


class _Parser(argparse.ArgumentParser):
    """argparse with the BSD-style usage exit code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _read_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc


def _read_curve(path: str, check_embedded: bool = True):
    return curve_from_json_dict(_read_json(path), check_embedded=check_embedded)


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise ValidationError(f"cannot write {path}: {exc}") from exc


def _get_form(args):
    if getattr(args, "form_file", None):
        return form_from_json_dict(_read_json(args.form_file))
    name = getattr(args, "form", "xdy")
    if name not in BUILTIN_FORMS:
        raise ValidationError(f"unknown form {name!r}; "
                              f"choose from {sorted(BUILTIN_FORMS)}")
    return BUILTIN_FORMS[name]()


def _emit(args, payload: dict, human: str) -> None:
    if getattr(args, "json", False):
        print(_dump(payload))
    else:
        print(human)


# -- subcommand handlers -----------------------------------------------


_GALLERY_NAMES = ("cusp", "spiral-leaf", "lance-thomas-projection",
                  "lance-thomas-unknot", "one-crossing-unknot")


def _cmd_gallery(args) -> int:
    name = args.name
    if name == "cusp":
        curve = gallery.cusp_curve(args.t0, args.t1, args.samples)
    elif name == "spiral-leaf":
        curve = gallery.spiral_leaf(args.r0, args.r1, args.samples)
    elif name == "lance-thomas-projection":
        curve = gallery.lance_thomas_projection(args.level).curve
    elif name == "lance-thomas-unknot":
        curve = gallery.lance_thomas_unknot(args.level, args.K).curve
    elif name == "one-crossing-unknot":
        curve = gallery.one_crossing_unknot().curve
    else:
        raise ValidationError(f"unknown gallery item {name!r}; "
                              f"choose from {_GALLERY_NAMES}")
    if args.out:
        _write_text(args.out, curve.to_json() + "\n")
    if args.svg:
        _write_text(args.svg, svg.curves_to_svg([curve]))
    _emit(args, {"name": name, "vertices": len(curve.vertices),
                 "closed": curve.closed},
          f"{name}: {len(curve.vertices)} vertices, closed={curve.closed}")
    return 0


def _cmd_lift(args) -> int:
    form = _get_form(args)
    plane = _read_curve(args.infile, check_embedded=False)
    if plane.DIM != 2:
        raise ValidationError("lift expects a plane curve")
    res = lift(form, plane, args.z0, subdivision=args.subdivision)
    if args.out:
        _write_text(args.out, res.curve.to_json() + "\n")
    _emit(args, {"closure_defect": res.closure_defect,
                 "closed": res.curve.closed, "subdivision": res.subdivision},
          f"closure defect {res.closure_defect:.3e}, closed={res.curve.closed}")
    return 0


def _cmd_verify(args) -> int:
    form = _get_form(args)
    curve = _read_curve(args.infile)
    if curve.DIM != 3:
        raise ValidationError("verify expects a space curve")
    v = legendrian_residual(form, curve)
    _emit(args, {"residual": v.residual,
                 "relative_residual": v.relative_residual,
                 "accepted": v.accepted},
          f"residual {v.residual:.3e} (relative {v.relative_residual:.3e}), "
          f"accepted={v.accepted}")
    return 0


def _cmd_chordarc(args) -> int:
    curve = _read_curve(args.infile)
    rep = chord_arc_constant(curve)
    angle, vtx = min_corner_angle(curve)
    _emit(args, {"constant": rep.constant, "length": rep.length,
                 "witness": list(rep.witness), "min_corner_angle": angle,
                 "min_corner_vertex": vtx},
          f"chord-arc constant {rep.constant:.6f} "
          f"(witness vertices {rep.witness}, min corner angle {angle:.4f})")
    return 0


def _cmd_bypass(args) -> int:
    curve = _read_curve(args.infile, check_embedded=False)
    chart = chart_from_json_dict(_read_json(args.chart))
    times = tuple(float(t) for t in args.times.split(","))
    form = _get_form(args) if (args.form or args.form_file) else None
    trace = bypass_isotopy(chart, curve, tuple(args.attach), times, form)
    if args.out:
        _write_text(args.out, trace.to_json() + "\n")
    if args.svg:
        _write_text(args.svg, svg.trace_to_svg(trace))
    _emit(args, {"frames": len(trace.frames), "reports": list(trace.reports)},
          f"{len(trace.frames)} frames written")
    return 0


def _cmd_smooth(args) -> int:
    curve = _read_curve(args.infile, check_embedded=False)
    out = corner_round(curve, args.vertex, args.delta, args.samples,
                       check_embedded=False)
    if args.out:
        _write_text(args.out, out.to_json() + "\n")
    angle, vtx = min_corner_angle(out)
    _emit(args, {"vertices": len(out.vertices), "min_corner_angle": angle,
                 "min_corner_vertex": vtx},
          f"rounded: {len(out.vertices)} vertices, "
          f"min corner angle {angle:.4f}")
    return 0


def _cmd_correct(args) -> int:
    form = _get_form(args)
    square = square_from_json_dict(_read_json(args.square))
    moved = _read_curve(args.infile, check_embedded=False)
    closing = _read_curve(args.closing, check_embedded=False) \
        if args.closing else moved
    t, arc, sign = solve_correction(square, form, moved, closing, args.target)
    if args.out:
        _write_text(args.out, arc.to_json() + "\n")
    achieved = line_integral_beta(form, arc)[0]
    _emit(args, {"time": t, "sign": sign, "achieved": achieved},
          f"flow time {t:.6g}, sign {sign:+d}, achieved {achieved:.12g}")
    return 0


def _cmd_tb(args) -> int:
    form = _get_form(args)
    curve = _read_curve(args.infile)
    tol = None if args.residual_tol in (None, "none") else float(args.residual_tol)
    tb = thurston_bennequin(form, curve, residual_tol=tol,
                            cross_check=not args.no_cross_check)
    _emit(args, {"tb": tb}, str(tb))
    return 0


def _cmd_link(args) -> int:
    a = _read_curve(args.a)
    b = _read_curve(args.b)
    lk = linking_number(a, b)
    _emit(args, {"linking": lk}, str(lk))
    return 0


def _cmd_writhe(args) -> int:
    curve = _read_curve(args.infile)
    _emit(args, {"writhe": writhe(curve)}, str(writhe(curve)))
    return 0


def _cmd_apply_map(args) -> int:
    curve = _read_curve(args.infile)
    if curve.DIM != 3:
        raise ValidationError("apply-map expects a space curve")
    from .geometry import SpaceCurve
    if args.map == "log-spiral":
        pts = gallery.log_spiral_contactomorphism(curve.vertices)
    elif args.map == "log-spiral-inverse":
        pts = gallery.log_spiral_contactomorphism_inverse(curve.vertices)
    elif args.map == "cylinder-isotopy":
        pts = gallery.cylinder_contact_isotopy(curve.vertices, args.t)
    else:
        raise ValidationError(f"unknown map {args.map!r}")
    out = SpaceCurve(pts, closed=curve.closed, check_embedded=False)
    if args.out:
        _write_text(args.out, out.to_json() + "\n")
    _emit(args, {"map": args.map, "vertices": len(out.vertices)},
          f"{args.map}: mapped {len(out.vertices)} vertices")
    return 0


def _cmd_flow(args) -> int:
    form = _get_form(args)
    curve = _read_curve(args.infile)
    if curve.DIM != 3:
        raise ValidationError("flow expects a space curve")
    if args.hamiltonian == "constant":
        ham = Hamiltonian.constant(args.value)
    elif args.hamiltonian == "y":
        ham = Hamiltonian.coordinate_y()
    else:
        raise ValidationError(f"unknown hamiltonian {args.hamiltonian!r}")
    field = hamiltonian_field(form, ham)
    pts = _flow_points(field, curve.vertices, args.time, args.step)
    from .geometry import SpaceCurve
    out = SpaceCurve(pts, closed=curve.closed, check_embedded=False)
    if args.out:
        _write_text(args.out, out.to_json() + "\n")
    _emit(args, {"time": args.time, "vertices": len(out.vertices)},
          f"flowed {len(out.vertices)} vertices for time {args.time}")
    return 0


def _cmd_suite(args) -> int:
    if args.which != "acceptance":
        raise ValidationError("the only suite is 'acceptance'")
    results = run_acceptance()
    checks = sorted((c for r in results for c in r["checks"]),
                    key=lambda c: c["check"])
    if args.json:
        print(_dump(checks))
    else:
        width = max(len(c["check"]) for c in checks)
        for c in checks:
            flag = "PASS" if c["pass"] else "FAIL"
            print(f"{c['check']:<{width}}  {flag}  "
                  f"value={c['value']:.6g}  bound={c['bound']:.6g}")
        n_fail = sum(not c["pass"] for c in checks)
        print(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    return 0 if all(c["pass"] for c in checks) else 3


# -- parser -------------------------------------------------------------


def _add_form_flags(p):
    p.add_argument("--form", default=None,
                   help="builtin contact form name (xdy, minus_ydx, rot)")
    p.add_argument("--form-file", default=None,
                   help="JSON file describing a contact form")


def _add_json_flag(p):
    p.add_argument("--json", action="store_true",
                   help="machine-readable JSON report on stdout")


def build_parser() -> _Parser:
    parser = _Parser(prog="leglab",
                     description="piecewise-linear Legendrian curve toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gallery", help="emit an example curve")
    p.add_argument("name", choices=_GALLERY_NAMES)
    p.add_argument("--level", type=int, default=2)
    p.add_argument("--K", type=float, default=1.0)
    p.add_argument("--t0", type=float, default=-1.0)
    p.add_argument("--t1", type=float, default=1.0)
    p.add_argument("--r0", type=float, default=1.0)
    p.add_argument("--r1", type=float, default=2.0)
    p.add_argument("--samples", type=int, default=257)
    p.add_argument("--out", default=None)
    p.add_argument("--svg", default=None)
    _add_json_flag(p)
    p.set_defaults(fn=_cmd_gallery)

    p = sub.add_parser("lift", help="Legendrian-lift a plane curve")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--z0", type=float, default=0.0)
    p.add_argument("--subdivision", type=int, default=8)
    p.add_argument("--out", default=None)
    _add_form_flags(p)
    _add_json_flag(p)
    p.set_defaults(fn=_cmd_lift)

    p = sub.add_parser("verify", help="Legendrian residual of a space curve")
    p.add_argument("--in", dest="infile", required=True)
    _add_form_flags(p)
    _add_json_flag(p)
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("chordarc", help="chord-arc constant of a curve")
    p.add_argument("--in", dest="infile", required=True)
    _add_json_flag(p)
    p.set_defaults(fn=_cmd_chordarc)

    p = sub.add_parser("bypass", help="run a model bypass isotopy")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--chart", required=True)
    p.add_argument("--attach", type=int, nargs=2, required=True,
                   metavar=("I0", "I1"))
    p.add_argument("--times", default="0,0.25,0.5,0.75,1")
    p.add_argument("--out", default=None)
    p.add_argument("--svg", default=None)
    _add_form_flags(p)
    _add_json_flag(p)
    p.set_defaults(fn=_cmd_bypass)

    p = sub.add_parser("smooth", help="round one corner with a tangent arc")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--vertex", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--samples", type=int, default=16)
    p.add_argument("--out", default=None)
    _add_json_flag(p)
    p.set_defaults(fn=_cmd_smooth)

    p = sub.add_parser("correct", help="integral-correction flow to a target")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--closing", default=None)
    p.add_argument("--square", required=True)
    p.add_argument("--target", type=float, required=True)
    p.add_argument("--out", default=None)
    _add_form_flags(p)
    _add_json_flag(p)
    p.set_defaults(fn=_cmd_correct)

    p = sub.add_parser("tb", help="Thurston-Bennequin number")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--no-cross-check", action="store_true")
    p.add_argument("--residual-tol", default="none",
                   help="gate on the Legendrian residual first "
                        "('none' to skip, or a relative tolerance)")
    _add_form_flags(p)
    _add_json_flag(p)
    p.set_defaults(fn=_cmd_tb)

    p = sub.add_parser("link", help="linking number of two closed curves")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    _add_json_flag(p)
    p.set_defaults(fn=_cmd_link)

    p = sub.add_parser("writhe", help="writhe of a closed space curve")
    p.add_argument("--in", dest="infile", required=True)
    _add_json_flag(p)
    p.set_defaults(fn=_cmd_writhe)

    p = sub.add_parser("apply-map", help="apply a built-in contactomorphism")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--map", required=True,
                   choices=("log-spiral", "log-spiral-inverse",
                            "cylinder-isotopy"))
    p.add_argument("--t", type=float, default=0.5)
    p.add_argument("--out", default=None)
    _add_json_flag(p)
    p.set_defaults(fn=_cmd_apply_map)

    p = sub.add_parser("flow", help="contact Hamiltonian flow of a curve")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--hamiltonian", default="constant", choices=("constant", "y"))
    p.add_argument("--value", type=float, default=1.0)
    p.add_argument("--time", type=float, default=1.0)
    p.add_argument("--step", type=float, default=FLOW_STEP)
    p.add_argument("--out", default=None)
    _add_form_flags(p)
    _add_json_flag(p)
    p.set_defaults(fn=_cmd_flow)

    p = sub.add_parser("suite", help="run a named check suite")
    p.add_argument("which", nargs="?", default="acceptance")
    _add_json_flag(p)
    p.set_defaults(fn=_cmd_suite)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    try:
        return args.fn(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
