"""Command-line interface.

Subcommands: classify, simulate, reach, plan, verify.  All reports are
deterministic JSON (sorted keys, 17-significant-digit floats); trajectories
and reach sets are CSV.  Exit codes: 0 success, 2 invalid input, 3 case
mismatch (command does not apply to the system's classification case),
4 verification failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .flow import PiecewiseControl, flow_concat, flow_se2, rk4_oracle
from .group import GroupElement, angle_dist
from .planner import plan_periodic
from .reachability import default_grid_config, estimate_control_set, lift_to_se2
from .specfile import (
    SpecFileError,
    dump_json,
    format_float,
    load_control,
    load_system_spec,
    write_cells_csv,
    write_trajectory_csv,
)
from .system import (
    CASE_CLOSED,
    CASE_OPEN,
    CASE_TRACE_ZERO,
    classify,
    reduce_system,
)
from .verification import SUITE_NAMES, run_verification

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_CASE_MISMATCH = 3
EXIT_VERIFICATION_FAILED = 4


class CaseMismatch(Exception):
    """Command applied to a system outside its classification case."""


def _parse_floats(text: str, n: int, what: str) -> list:
    parts = text.split(",")
    if len(parts) != n:
        raise SpecFileError(f"{what}: expected {n} comma-separated numbers")
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise SpecFileError(f"{what}: {exc}") from exc


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w"), True


def _emit_json(payload: dict, path) -> None:
    stream, close = _open_out(path)
    try:
        dump_json(payload, stream)
    finally:
        if close:
            stream.close()


def cmd_classify(args) -> int:
    spec = load_system_spec(args.spec)
    report = classify(spec)
    _emit_json(report.to_dict(), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    spec = load_system_spec(args.spec)
    if args.control is not None:
        control = load_control(args.control)
    elif args.horizon is not None:
        control = PiecewiseControl([(float(args.horizon), float(args.u))])
    else:
        raise SpecFileError("simulate needs --control FILE or --horizon (with --u)")
    if not control.within(spec.omega):
        raise SpecFileError(
            f"control values must lie within omega = [{spec.omega[0]}, {spec.omega[1]}]"
        )
    vals = _parse_floats(args.x0, 3, "--x0") if args.x0.count(",") == 2 else (
        [0.0] + _parse_floats(args.x0, 2, "--x0")
    )
    g0 = GroupElement(vals[0], np.array(vals[1:]))
    traj = flow_concat(spec, control, g0, samples_per_segment=args.samples_per_segment)

    stream, close = _open_out(args.out)
    try:
        write_trajectory_csv(traj, stream)
        if args.verify:
            dev = _simulate_rk4_deviation(spec, control, g0)
            stream.write(f"# rk4_max_deviation,{format_float(dev)}\n")
    finally:
        if close:
            stream.close()
    return EXIT_OK


def _simulate_rk4_deviation(spec, control: PiecewiseControl, g0: GroupElement) -> float:
    """Max deviation between closed-form and RK4 states at segment boundaries."""
    exact = g0
    approx = g0.as_array()
    dev = 0.0
    for dur, u in control.segments:
        exact = flow_se2(spec, dur, exact, u)
        approx = rk4_oracle(spec, dur, approx, u)
        dev = max(
            dev,
            angle_dist(exact.t, approx[0]) + float(np.linalg.norm(exact.v - approx[1:])),
        )
    return dev


def _grid_from_args(rs, args):
    overrides = {}
    if args.resolution is not None:
        overrides["resolution"] = args.resolution
    if args.control_grid is not None:
        overrides["n_controls"] = args.control_grid
    if args.time_step is not None:
        overrides["time_step"] = args.time_step
    if args.bounds is not None:
        overrides["bounds"] = tuple(_parse_floats(args.bounds, 4, "--bounds"))
    if args.max_cells is not None:
        overrides["max_cells"] = args.max_cells
    return default_grid_config(rs, **overrides)


def cmd_reach(args) -> int:
    spec = load_system_spec(args.spec)
    report = classify(spec)
    if report.case not in (CASE_TRACE_ZERO, CASE_CLOSED, CASE_OPEN):
        raise CaseMismatch(
            f"reach applies to the planar reduced cases; this system is {report.case}"
        )
    rs = reduce_system(spec)
    cfg = _grid_from_args(rs, args)
    est = estimate_control_set(
        rs,
        cfg,
        seed_control=args.seed_control,
        backend=args.backend,
    )
    payload = est.to_dict()
    payload["generator_u"] = payload.get("seed_control")
    payload["lifted"] = lift_to_se2(est).to_dict()
    payload["classification"] = report.to_dict()
    _emit_json(payload, args.out)
    if args.cells_csv is not None and est.region is not None:
        with open(args.cells_csv, "w") as fh:
            write_cells_csv(est.region, fh)
    return EXIT_OK


def cmd_plan(args) -> int:
    spec = load_system_spec(args.spec)
    report = classify(spec)
    if report.case != CASE_TRACE_ZERO:
        raise CaseMismatch(
            "plan requires the rotation-only case (trace A = 0, det A != 0); "
            f"this system is {report.case}"
        )
    rs = reduce_system(spec)
    if rs.mu == 0.0:
        raise CaseMismatch("plan requires mu != 0 (nonvanishing rotation rate)")
    v0 = np.array(_parse_floats(args.v0, 2, "--v0"))
    plan = plan_periodic(rs, v0, tol=args.tol, rho=args.rho)
    _emit_json(plan.to_dict(), args.out)
    if args.traj_csv is not None:
        with open(args.traj_csv, "w") as fh:
            write_trajectory_csv(plan.trajectory, fh)
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = load_system_spec(args.spec)
    report = run_verification(
        spec,
        seed=args.seed,
        suites=args.suite or None,
        n_samples=args.samples,
    )
    _emit_json(report.to_dict(), args.out)
    return EXIT_OK if report.passed else EXIT_VERIFICATION_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="se2control",
        description="Analysis of linear control systems on the planar motion group.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("classify", help="classification report for a system spec")
    pc.add_argument("spec", help="path to a system spec JSON file")
    pc.add_argument("--out", default=None, help="output path (default stdout)")
    pc.set_defaults(func=cmd_classify)

    ps = sub.add_parser("simulate", help="closed-form trajectory CSV")
    ps.add_argument("spec")
    ps.add_argument("--control", default=None, help="piecewise control JSON file")
    ps.add_argument("--u", type=float, default=0.0, help="constant control value")
    ps.add_argument("--horizon", type=float, default=None, help="duration for --u")
    ps.add_argument("--x0", default="0,0,0", help="initial state t,vx,vy (or vx,vy)")
    ps.add_argument("--samples-per-segment", type=int, default=64)
    ps.add_argument(
        "--verify",
        action="store_true",
        help="append closed-form vs RK4 max deviation as a trailing comment row",
    )
    ps.add_argument("--out", default=None)
    ps.set_defaults(func=cmd_simulate)

    pr = sub.add_parser("reach", help="grid reach set and control-set estimate")
    pr.add_argument("spec")
    pr.add_argument("--resolution", type=float, default=None)
    pr.add_argument("--bounds", default=None, help="xmin,xmax,ymin,ymax")
    pr.add_argument("--control-grid", type=int, default=None, help="number of controls")
    pr.add_argument("--time-step", type=float, default=None)
    pr.add_argument("--max-cells", type=int, default=None)
    pr.add_argument("--seed-control", type=float, default=None)
    pr.add_argument("--backend", choices=("numba", "numpy"), default=None)
    pr.add_argument("--cells-csv", default=None, help="write occupied cell centers CSV")
    pr.add_argument("--out", default=None)
    pr.set_defaults(func=cmd_reach)

    pp = sub.add_parser("plan", help="periodic plan through v0 and the origin")
    pp.add_argument("spec")
    pp.add_argument("--v0", required=True, help="start point vx,vy in the reduced plane")
    pp.add_argument("--tol", type=float, default=1e-8)
    pp.add_argument("--rho", type=float, default=None)
    pp.add_argument("--traj-csv", default=None)
    pp.add_argument("--out", default=None)
    pp.set_defaults(func=cmd_plan)

    pv = sub.add_parser("verify", help="run numerical verification suites")
    pv.add_argument("spec")
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--samples", type=int, default=2000)
    pv.add_argument(
        "--suite",
        action="append",
        choices=SUITE_NAMES,
        help="run only this suite (repeatable)",
    )
    pv.add_argument("--out", default=None)
    pv.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SpecFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except CaseMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CASE_MISMATCH
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
