"""Command-line front end.

Subcommands map one-to-one onto library entry points:

    spectrum   sigma_min heatmap scan, CSV output
    bisect     bisectoriality certificate for a candidate angle
    calc       f(T) by contour quadrature (two-step for bounded f)
    frame      frame operator bounds for T and T*
    verify     the full inequality suite, JSON report

Exit codes: 0 all checks pass, 1 at least one inequality fails,
2 precondition or parse failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from .calculus import ContourConfig, hinf_calculus, omega_calculus
from .errors import CliffSpecError
from .functions import certify_bounded, resolve_function
from .quadratic import frame_bounds, default_quad_grid
from .serialization import (
    dumps_report,
    frame_report_dict,
    load_function_spec,
    operator_to_dict,
    parse_operator_file,
    scan_to_csv,
    write_json,
)
from .spectrum import GridSpec, check_bisectorial, scan_spectrum_slice
from .suite import SuiteConfig, run_theorem_suite

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_ERROR = 2


def _parse_grid(text) -> GridSpec:
    parts = text.split(",")
    if len(parts) != 6:
        raise CliffSpecError(
            "grid must be 'x_min,x_max,y_min,y_max,nx,ny'"
        )
    x0, x1, y0, y1 = (float(p) for p in parts[:4])
    nx, ny = int(parts[4]), int(parts[5])
    return GridSpec(x0, x1, y0, y1, nx, ny)


def _default_jobs():
    env = os.environ.get("CLIFFSPEC_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cliffspec",
        description="Spectral computations for Clifford-module operators",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--operator", required=True, help="operator JSON file")
    common.add_argument("--out", required=True, help="output file")

    p = sub.add_parser("spectrum", parents=[common],
                       help="sigma_min heatmap over a half-plane grid")
    p.add_argument("--grid", default=None,
                   help="x_min,x_max,y_min,y_max,nx,ny (default derived from ||T||)")

    p = sub.add_parser("bisect", parents=[common],
                       help="certify or refute bisectoriality at --omega")
    p.add_argument("--omega", type=float, required=True)

    p = sub.add_parser("calc", parents=[common], help="evaluate f(T)")
    p.add_argument("--function", required=True, help="function registry JSON file")
    p.add_argument("--omega", type=float, default=math.pi / 12)
    p.add_argument("--theta", type=float, default=math.pi / 4)
    p.add_argument("--phi", type=float, default=None)
    p.add_argument("--nodes", type=int, default=2000)

    p = sub.add_parser("frame", parents=[common],
                       help="frame bounds of (g, T) and (g, T*)")
    p.add_argument("--g", required=True, help="function registry JSON file")
    p.add_argument("--omega", type=float, default=math.pi / 12)
    p.add_argument("--theta", type=float, default=math.pi / 4)
    p.add_argument("--nodes", type=int, default=2000)

    p = sub.add_parser("verify", parents=[common], help="full inequality suite")
    p.add_argument("--g", action="append", default=None,
                   help="decay-class function file (repeatable)")
    p.add_argument("--function", action="append", default=None,
                   help="bounded function file (repeatable)")
    p.add_argument("--omega", type=float, default=math.pi / 12)
    p.add_argument("--theta", type=float, default=math.pi / 4)
    p.add_argument("--phi", type=float, default=None)
    p.add_argument("--nodes", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=_default_jobs())
    return parser


def cmd_spectrum(args):
    T = parse_operator_file(args.operator)
    if args.grid:
        grid = _parse_grid(args.grid)
    else:
        from .spectrum import default_scan_grid
        grid = default_scan_grid(T)
    scan = scan_spectrum_slice(T, grid)
    scan_to_csv(scan, args.out)
    return EXIT_PASS


def cmd_bisect(args):
    T = parse_operator_file(args.operator)
    report = check_bisectorial(T, args.omega)
    payload = {
        "operator": operator_to_dict(T),
        "omega": report.omega,
        "injective": report.injective,
        "spectrum_in_sector": report.spectrum_in_sector,
        "certified": report.certified,
        "c_phi_table": [[p, c if math.isfinite(c) else None]
                        for p, c in report.c_phi_table],
        "detections": [{"x": d.x, "y": d.y, "kind": d.kind}
                       for d in report.detections],
    }
    write_json(payload, args.out)
    return EXIT_PASS if report.certified else EXIT_FAIL


def cmd_calc(args):
    T = parse_operator_file(args.operator)
    f = resolve_function(load_function_spec(args.function), theta=args.theta)
    report = check_bisectorial(T, args.omega)
    cfg = ContourConfig(phi=args.phi, nodes=args.nodes)
    if f.decay is not None:
        result = omega_calculus(f, T, report, cfg)
    else:
        if f.bounded is None:
            f = f.with_bounded(certify_bounded(f))
        result = hinf_calculus(f, T, report, cfg)
    payload = operator_to_dict(result.op)
    payload["trunc_err"] = result.truncation_error
    payload["disc_err"] = result.discretization_error
    write_json(payload, args.out)
    return EXIT_PASS


def cmd_frame(args):
    T = parse_operator_file(args.operator)
    g = resolve_function(load_function_spec(args.g), theta=args.theta)
    report = check_bisectorial(T, args.omega)
    cfg = ContourConfig(nodes=args.nodes)
    qcfg = default_quad_grid(T)
    fb = frame_bounds(g, T, qcfg, cfg, report)
    from .quadratic import adjoint_frame_bounds
    fb_star = adjoint_frame_bounds(g, T, qcfg, cfg, report)
    grid_echo = {"t_min": qcfg.t_min, "t_max": qcfg.t_max, "nodes": qcfg.nodes}
    payload = {
        "T": frame_report_dict(fb),
        "Tstar": frame_report_dict(fb_star),
        "grid": grid_echo,
    }
    write_json(payload, args.out)
    return EXIT_PASS


def cmd_verify(args):
    T = parse_operator_file(args.operator)
    g_specs = None
    if args.g:
        g_specs = [load_function_spec(p) for p in args.g]
    f_specs = None
    if args.function:
        f_specs = [load_function_spec(p) for p in args.function]
    config = SuiteConfig(
        omega=args.omega, theta=args.theta, phi=args.phi,
        contour_nodes=args.nodes, seed=args.seed, jobs=args.jobs,
    )
    report = run_theorem_suite(T, g_specs, f_specs, config)
    with open(args.out, "w") as fh:
        fh.write(dumps_report(report))
    return EXIT_PASS if report["passed"] else EXIT_FAIL


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "spectrum": cmd_spectrum,
        "bisect": cmd_bisect,
        "calc": cmd_calc,
        "frame": cmd_frame,
        "verify": cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except CliffSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
