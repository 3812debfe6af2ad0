"""Command line front end.

Exit codes: 0 success, 2 input error, 3 negative verdict, 4 unsupported regime.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .admissibility import admissibility_report
from .frames import analyze, validate_family
from .oracle import OracleConfig, cross_check
from .schema import InputError, ProblemSpec, dumps, load_problem, load_windows, windows_to_json
from .synthesis import NotAdmissible, UnsupportedChannelCount, plan, verify_synthesis, windows_from_plan
from .zak import SupportError, ThetaGrid, z_matrix_scalar

EXIT_OK, EXIT_INPUT, EXIT_NEGATIVE, EXIT_UNSUPPORTED = 0, 2, 3, 4


def _problem(args) -> ProblemSpec:
    prob = load_problem(args.problem)
    if getattr(args, "grid_T", None) is not None:
        if args.grid_T < 1:
            raise InputError("--grid-T must be positive")
        prob.grid = ThetaGrid(args.grid_T)
    if getattr(args, "tol", None) is not None:
        prob.tolerances = replace(prob.tolerances, equal_tol=args.tol)
    if getattr(args, "seed", None) is not None:
        prob.seed = args.seed
    return prob


def _windows(args, prob: ProblemSpec):
    windows = load_windows(args.windows)
    try:
        validate_family(windows, prob.support, prob.geometry)
    except (SupportError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    return windows


def _emit(obj, out: str | None = None) -> None:
    text = dumps(obj)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_check(args) -> int:
    prob = _problem(args)
    g = prob.geometry
    report = admissibility_report(prob.support, g.L, g.M, g.N, g.R)
    _emit(report.to_json(), args.out)
    return EXIT_OK if report.frame_admissible else EXIT_NEGATIVE


def cmd_analyze(args) -> int:
    prob = _problem(args)
    windows = _windows(args, prob)
    report = analyze(windows, prob.support, prob.geometry, prob.grid, prob.tolerances)
    _emit(report.to_json(), args.out)
    return EXIT_OK if report.is_frame else EXIT_NEGATIVE


def cmd_synthesize(args) -> int:
    prob = _problem(args)
    try:
        p = plan(prob.support, prob.geometry, allow_wide=args.allow_wide)
    except NotAdmissible as exc:
        print(f"NotAdmissible: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except UnsupportedChannelCount as exc:
        print(f"UnsupportedChannelCount: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    windows = windows_from_plan(p, normalize=args.normalize)
    check = verify_synthesis(windows, prob.support, prob.geometry, normalized=args.normalize)
    if args.out:
        _emit(windows_to_json(windows), args.out)
        plan_out = args.plan_out or str(Path(args.out).with_suffix(".plan.json"))
        _emit(p.to_json(), plan_out)
    summary = {
        "verified": check.ok,
        "failures": check.failures,
        "A": check.A,
        "B": check.B,
        "expected_bound": check.expected_bound,
        "normalized": args.normalize,
    }
    if not args.out:
        summary.update(windows_to_json(windows))
        summary["plan"] = p.to_json()
    _emit(summary)
    return EXIT_OK if check.ok else EXIT_NEGATIVE


def zak_dump(windows, geo, j: int, T: int) -> list[dict]:
    """One stanza per node; ``blocks`` lists ``Z_{g_{l,r}}(j, theta_t)`` as ``[re, im]`` pairs, row-major."""
    grid = ThetaGrid(T)
    stanzas = []
    for t, theta in enumerate(grid.nodes):
        blocks = []
        for l, w in enumerate(windows):
            for r in range(geo.R):
                Z = z_matrix_scalar(w, geo, j, theta, channel=r)
                blocks.append({"l": l, "r": r, "matrix": [[[z.real, z.imag] for z in row] for row in Z]})
        stanzas.append({"t": t, "theta": float(theta), "blocks": blocks})
    return stanzas


def cmd_zak(args) -> int:
    prob = _problem(args)
    windows = _windows(args, prob)
    T = args.grid_T if args.grid_T is not None else 1
    stanzas = zak_dump(windows, prob.geometry, args.j, T)
    if args.format == "json":
        _emit({"j": args.j, "T": T, "stanzas": stanzas}, args.out)
        return EXIT_OK
    lines = ["t,theta,l,r,row,col,re,im"]
    for st in stanzas:
        for b in st["blocks"]:
            for row, vals in enumerate(b["matrix"]):
                for col, (re, im) in enumerate(vals):
                    lines.append(f"{st['t']},{st['theta']:.17g},{b['l']},{b['r']},{row},{col},{re:.17g},{im:.17g}")
    text = "\n".join(lines)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_oracle(args) -> int:
    prob = _problem(args)
    windows = _windows(args, prob)
    report = analyze(windows, prob.support, prob.geometry, prob.grid, prob.tolerances)
    config = OracleConfig(trials=args.trials, seed=prob.seed)
    summary = cross_check(windows, prob.support, prob.geometry, report.lower_bound, report.upper_bound, config)
    _emit(summary, args.out)
    return EXIT_OK if summary["ok"] else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gaborlat", description="Multi-window vector-valued Gabor frames on periodic sets.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, windows=False):
        p.add_argument("--problem", required=True, help="problem JSON file")
        if windows:
            p.add_argument("--windows", required=True, help="window family JSON file")
        p.add_argument("--grid-T", dest="grid_T", type=int, default=None, help="theta grid size")
        p.add_argument("--tol", type=float, default=None, help="tolerance for tight/Parseval comparisons")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None, help="write output here instead of stdout")
        return p

    common(sub.add_parser("check", help="admissibility of the parameters")).set_defaults(func=cmd_check)
    common(sub.add_parser("analyze", help="frame report for a window family"), True).set_defaults(func=cmd_analyze)

    p = common(sub.add_parser("synthesize", help="build a tight frame of indicator windows"))
    p.add_argument("--normalize", action="store_true", help="scale to a Parseval frame")
    p.add_argument("--plan-out", default=None, help="plan JSON path (default: <out>.plan.json)")
    p.add_argument("--allow-wide", action="store_true", help="permit R > q")
    p.set_defaults(func=cmd_synthesize)

    p = common(sub.add_parser("zak", help="dump Zak matrices at one j"), True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_zak)

    p = common(sub.add_parser("oracle", help="cross-check Zak verdicts against direct sums"), True)
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
