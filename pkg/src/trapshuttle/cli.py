"""Command-line front end: synthesize plans, dump plot-ready data, verify.

Subcommands
    synthesize   optimal plan as JSON (stdout, optionally a file)
    trajectory   sampled trajectory as CSV, for the phase-plane figures
    sweep        minimum-time table over a gamma range, plus the
                 many-switching limit table
    verify       run the oracle suite; nonzero exit on any breach
    quantum      transported-eigenstate fidelity report as JSON

Exit codes: 0 success, 1 verification failure, 2 usage or parameter error.
Plots are intentionally not rendered here; the emitted CSV files carry
full-precision doubles so figures are reproducible downstream.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import verification
from .model import (InvalidParameterError, PhysicalParams, Schedule, gamma as
                    gamma_of, propagate_schedule, lemma_endpoint,
                    sample_trajectory, schedule_from_json_dict,
                    schedule_to_json_dict, write_trajectory_csv)
from .quantum import GridSpec, WaveState, transport_check, write_density_csv
from .synthesis import (BANG_EPS, NotExtremalError, build_schedule,
                        fit_switching_function, limit_curve, minimum_time,
                        sweep)

DEFAULT_SUITE = (0.5 * math.pi, math.pi, 2.4 * math.pi)


def _add_input_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--gamma", type=float, default=None,
                        help="dimensionless displacement (may be negative)")
    parser.add_argument("--omega", type=float, default=None,
                        help="trap angular frequency [rad/s]")
    parser.add_argument("--distance", type=float, default=None,
                        help="displacement [m] (may be negative)")
    parser.add_argument("--vmax", type=float, default=None,
                        help="maximum trap speed [m/s]")


def _resolve_gamma(args) -> tuple[float, PhysicalParams | None]:
    physical = [args.omega, args.distance, args.vmax]
    has_physical = any(v is not None for v in physical)
    if (args.gamma is None) == (not has_physical):
        raise ValueError("give either --gamma or all of --omega/--distance/--vmax")
    if args.gamma is not None:
        if not math.isfinite(args.gamma):
            raise ValueError(f"gamma must be finite, got {args.gamma!r}")
        return args.gamma, None
    if any(v is None for v in physical):
        raise ValueError("physical input needs all of --omega, --distance, --vmax")
    sign = 1.0
    distance = args.distance
    if distance < 0:
        sign = -1.0
        distance = -distance
    params = PhysicalParams(omega=args.omega, mass=1.0, hbar=1.0,
                            distance=distance, vmax=args.vmax)
    return sign * gamma_of(params), params


def _synthesize_signed(gamma_value: float, eps: float):
    """Plan for a signed displacement: mirror the positive-gamma plan."""
    result = build_schedule(abs(gamma_value), eps)
    schedule = result.schedule if gamma_value > 0 else result.schedule.negated()
    return result, schedule


def _out_dir(args) -> Path | None:
    if args.out is None:
        return None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_synthesize(args) -> int:
    gamma_value, params = _resolve_gamma(args)
    if gamma_value == 0.0:
        payload = {
            "warning": "zero displacement: nothing to do",
            "gamma": 0.0,
            "rho": 0,
            "tau": 0.0,
            "initial_sign": 1,
            "durations": [],
            "total_time": 0.0,
            "switch_times": [],
        }
    else:
        result, schedule = _synthesize_signed(gamma_value, args.eps_bang)
        payload = result.to_json_dict()
        payload["gamma"] = gamma_value
        payload["initial_sign"] = schedule.initial_sign
        if params is not None:
            x3 = 0.0
            waypoints = []
            for u, d in zip(schedule.controls(), schedule.durations):
                x3 += u * d
                waypoints.append(params.vmax / params.omega * x3)
            payload["physical"] = {
                "omega": params.omega,
                "distance": math.copysign(params.distance, gamma_value),
                "vmax": params.vmax,
                "total_time_seconds": result.total_time / params.omega,
                "switch_times_seconds": [t / params.omega
                                         for t in schedule.switch_times()],
                "waypoints_m": waypoints[:-1],
            }
    text = json.dumps(payload, indent=2)
    print(text)
    out = _out_dir(args)
    if out is not None:
        (out / "synthesis.json").write_text(text + "\n")
    return 0


def cmd_trajectory(args) -> int:
    if args.schedule_json is not None:
        data = json.loads(Path(args.schedule_json).read_text())
        schedule = schedule_from_json_dict(data)
    else:
        gamma_value, _ = _resolve_gamma(args)
        if gamma_value == 0.0:
            raise ValueError("zero displacement has an empty trajectory")
        _, schedule = _synthesize_signed(gamma_value, args.eps_bang)
    samples = sample_trajectory(schedule, args.sample_step)
    out = _out_dir(args)
    if args.json:
        rows = [{"t": s.t, "x1": s.state.x1, "x2": s.state.x2,
                 "x3": s.state.x3, "u": s.u} for s in samples]
        print(json.dumps(rows))
    if out is not None:
        with open(out / "trajectory.csv", "w") as fp:
            write_trajectory_csv(samples, fp)
    elif not args.json:
        write_trajectory_csv(samples, sys.stdout)
    return 0


def cmd_sweep(args) -> int:
    results = sweep(args.gamma_min, args.gamma_max, args.count, args.eps_bang)
    out = _out_dir(args) or Path(".")
    with open(out / "sweep.csv", "w") as fp:
        fp.write("gamma,rho,tau,total_time\n")
        for r in results:
            fp.write(f"{r.gamma!r},{r.rho},{r.tau!r},{r.total_time!r}\n")
    with open(out / "limit.csv", "w") as fp:
        fp.write("gamma_bar,t_rho1,t_limit\n")
        for i in range(args.count):
            gbar = 2.0 * math.pi * i / (args.count - 1)
            t_one = 0.0 if gbar == 0.0 else minimum_time(gbar, args.eps_bang)
            fp.write(f"{gbar!r},{t_one!r},{limit_curve(gbar)!r}\n")
    print(f"wrote {out / 'sweep.csv'} and {out / 'limit.csv'}")
    return 0


def _check(report: list, name: str, ok: bool, detail: str) -> bool:
    report.append({"name": name, "status": "pass" if ok else "fail",
                   "detail": detail})
    return ok


def _verify_schedule_file(args, checks: list) -> None:
    data = json.loads(Path(args.schedule_json).read_text())
    schedule = schedule_from_json_dict(data)
    gamma_value = args.gamma if args.gamma is not None else float(data["gamma"])
    r_complex, r_x3 = verification.endpoint_residual(schedule, gamma_value)
    _check(checks, "schedule-endpoint-residual",
           r_complex <= args.tol and r_x3 <= args.tol,
           f"r_complex={r_complex:.3e} r_x3={r_x3:.3e} tol={args.tol:.1e}")
    closed = propagate_schedule(schedule)
    integrated = verification.integrate_ode(schedule)
    gap = max(abs(a - b) for a, b in zip(closed.astuple(), integrated.astuple()))
    _check(checks, "schedule-ode-agreement", gap <= 1e-6, f"max gap {gap:.3e}")
    if schedule.n_switchings >= 2:
        try:
            fit = fit_switching_function(schedule)
            _check(checks, "schedule-switching-law", True,
                   f"residual {fit.residual:.3e}")
        except NotExtremalError as exc:
            _check(checks, "schedule-switching-law", False, str(exc))


def _verify_suite(args, checks: list) -> None:
    gammas = [args.gamma] if args.gamma is not None else list(DEFAULT_SUITE)
    rng = np.random.default_rng(0)
    worst_pair = 0.0
    worst_ode = 0.0
    for _ in range(args.random_schedules):
        n = int(rng.integers(1, 10))
        durations = tuple(rng.uniform(0.05, 2.0 * math.pi - 0.05, n))
        sched = Schedule(1 if rng.random() < 0.5 else -1, durations)
        closed = propagate_schedule(sched)
        explicit = lemma_endpoint(sched)
        worst_pair = max(worst_pair, max(
            abs(a - b) for a, b in zip(closed.astuple(), explicit.astuple())))
        integrated = verification.integrate_ode(sched)
        worst_ode = max(worst_ode, max(
            abs(a - b) for a, b in zip(closed.astuple(), integrated.astuple())))
    _check(checks, "closed-form-vs-explicit-sums", worst_pair <= 1e-10,
           f"worst gap {worst_pair:.3e} over {args.random_schedules} schedules")
    _check(checks, "closed-form-vs-rk4", worst_ode <= 1e-6,
           f"worst gap {worst_ode:.3e} over {args.random_schedules} schedules")

    for g in gammas:
        tag = f"gamma={g:.6g}"
        result = build_schedule(g, args.eps_bang)
        end = propagate_schedule(result.schedule)
        err = max(abs(end.x1 - g), abs(end.x2), abs(end.x3 - g))
        _check(checks, f"endpoint[{tag}]", err <= 1e-8, f"error {err:.3e}")
        r_complex, r_x3 = verification.endpoint_residual(result.schedule, g)
        _check(checks, f"terminal-residual[{tag}]",
               r_complex <= 1e-9 and r_x3 <= 1e-9,
               f"r_complex={r_complex:.3e} r_x3={r_x3:.3e}")
        if result.schedule.n_switchings >= 2:
            try:
                fit = fit_switching_function(result.schedule)
                _check(checks, f"switching-law[{tag}]", True,
                       f"residual {fit.residual:.3e}")
            except NotExtremalError as exc:
                _check(checks, f"switching-law[{tag}]", False, str(exc))
        if not args.skip_brute_force and g <= 4.0 * math.pi:
            rho = result.rho
            report = verification.brute_force_min_time(
                g, 2 * rho, args.coarse_step, budget=args.budget)
            gap = report.best_time - result.total_time
            _check(checks, f"brute-force[{tag}]", abs(gap) <= 1e-3,
                   f"best {report.best_time:.9f} vs {result.total_time:.9f}")


def cmd_verify(args) -> int:
    checks: list[dict] = []
    if args.schedule_json is not None:
        _verify_schedule_file(args, checks)
    else:
        _verify_suite(args, checks)
    failed = [c["name"] for c in checks if c["status"] == "fail"]
    payload = {"status": "fail" if failed else "pass", "checks": checks,
               "failed": failed}
    print(json.dumps(payload, indent=2))
    return 1 if failed else 0


def cmd_quantum(args) -> int:
    gamma_value, _ = _resolve_gamma(args)
    if gamma_value <= 0:
        raise ValueError("quantum checks require a positive displacement")
    d = gamma_value * args.vquantum
    grid = GridSpec(-args.margin, d + args.margin, args.grid_points, args.dt)

    observer = None
    captured: dict[float, tuple[float, np.ndarray]] = {}
    if args.snapshots:
        wanted = sorted(float(s) for s in args.snapshots.split(","))

        def observer(t, samples):
            for t_req in wanted:
                held = captured.get(t_req)
                if held is None or abs(t - t_req) < abs(held[0] - t_req):
                    captured[t_req] = (t, samples.copy())

    report = transport_check(args.level, gamma_value, args.vquantum, grid,
                             observer=observer)
    text = json.dumps(report.to_json_dict(), indent=2)
    print(text)
    out = _out_dir(args)
    if out is not None:
        (out / "quantum.json").write_text(text + "\n")
    if captured:
        target = out or Path(".")
        target.mkdir(parents=True, exist_ok=True)
        for t_req, (t, samples) in sorted(captured.items()):
            with open(target / f"density_t{t_req:g}.csv", "w") as fp:
                write_density_csv(WaveState(samples, grid, t), fp)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trapshuttle",
        description="Minimum-time bang-bang shuttling of a trapped oscillator "
                    "with a speed-limited trap",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_syn = sub.add_parser("synthesize", help="optimal plan as JSON")
    _add_input_flags(p_syn)
    p_syn.add_argument("--out", default=None, help="output directory")
    p_syn.add_argument("--eps-bang", type=float, default=BANG_EPS)
    p_syn.set_defaults(func=cmd_synthesize)

    p_traj = sub.add_parser("trajectory", help="sampled trajectory as CSV")
    _add_input_flags(p_traj)
    p_traj.add_argument("--schedule-json", default=None,
                        help="verify this schedule file instead of synthesizing")
    p_traj.add_argument("--out", default=None)
    p_traj.add_argument("--sample-step", type=float, default=0.01)
    p_traj.add_argument("--eps-bang", type=float, default=BANG_EPS)
    p_traj.add_argument("--json", action="store_true",
                        help="print samples as JSON instead of CSV")
    p_traj.set_defaults(func=cmd_trajectory)

    p_sweep = sub.add_parser("sweep", help="minimum-time table over gamma")
    p_sweep.add_argument("--gamma-min", type=float, required=True)
    p_sweep.add_argument("--gamma-max", type=float, required=True)
    p_sweep.add_argument("--count", type=int, required=True)
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--eps-bang", type=float, default=BANG_EPS)
    p_sweep.set_defaults(func=cmd_sweep)

    p_ver = sub.add_parser("verify", help="run the oracle suite")
    p_ver.add_argument("--gamma", type=float, default=None,
                       help="verify a single displacement instead of the suite")
    p_ver.add_argument("--schedule-json", default=None,
                       help="verify this schedule file against --gamma")
    p_ver.add_argument("--tol", type=float, default=1e-6)
    p_ver.add_argument("--eps-bang", type=float, default=BANG_EPS)
    p_ver.add_argument("--random-schedules", type=int, default=200)
    p_ver.add_argument("--coarse-step", type=float, default=0.02)
    p_ver.add_argument("--budget", type=int, default=1_500_000)
    p_ver.add_argument("--skip-brute-force", action="store_true")
    p_ver.set_defaults(func=cmd_verify)

    p_q = sub.add_parser("quantum", help="transported-eigenstate fidelity")
    _add_input_flags(p_q)
    p_q.add_argument("--level", type=int, default=0)
    p_q.add_argument("--grid-points", type=int, default=2048)
    p_q.add_argument("--dt", type=float, default=1e-3)
    p_q.add_argument("--vquantum", type=float, default=1.0)
    p_q.add_argument("--margin", type=float, default=10.0,
                     help="grid padding in oscillator lengths")
    p_q.add_argument("--snapshots", default=None,
                     help="comma-separated times; dump |psi|^2 CSV per time")
    p_q.add_argument("--out", default=None)
    p_q.set_defaults(func=cmd_quantum)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, InvalidParameterError, OSError,
            verification.InfeasibleAtResolutionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
