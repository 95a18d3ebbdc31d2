"""Command line interface.

Subcommands: analyze (analytical curve), simulate (Monte Carlo vs analytical),
optimize-detection (budgeted detection maximization), optimize-losses
(budgeted loss minimization), altitude (link-budget coverage design), sweep
(parameter sweeps of scalar metrics).

Every command writes its outputs atomically and drops a JSON manifest next to
the primary output recording the exact command, resolved scenario, seeds,
backend, output hashes and duration; re-running an analytical command from
the same manifest reproduces the outputs byte for byte.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 infeasible design problem.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import math
import sys
import time

import numpy as np

from . import __version__
from .detection import QuadratureSpec
from .dtmc import CURVE_CSV_HEADER, CURVE_CSV_SCHEMA, detection_curve
from .errors import InfeasibleError, NumericalError, ScenarioError
from .kernels import resolve_backend, resolve_threads
from .link_budget import coverage_radius_at_height, optimize_altitude
from .montecarlo import TrialConfig, run_trials
from .output import RunManifest, write_csv, write_json
from .planner import PlanGrid, default_budget_grid, expected_losses, solve_p1, solve_p2
from .scenario import ChannelParams, ScenarioParams, load_scenario

_INT_FIELDS = {"num_uavs", "flag_threshold"}


def _load_params(args) -> ScenarioParams:
    if getattr(args, "config", None):
        return load_scenario(args.config)
    return ScenarioParams()


def _parse_values(spec: str) -> list[float]:
    """Value list: 'a,b,c', arithmetic 'start:stop:step', or 'log:start:stop:count'."""
    spec = spec.strip()
    if not spec:
        raise ScenarioError("empty value specification")
    if spec.startswith("log:"):
        parts = spec.split(":")
        if len(parts) != 4:
            raise ScenarioError(f"log spec must be log:start:stop:count, got {spec!r}")
        try:
            start, stop, count = float(parts[1]), float(parts[2]), int(parts[3])
        except ValueError as exc:
            raise ScenarioError(f"bad log spec {spec!r}: {exc}") from exc
        if start <= 0 or stop <= 0 or count < 1:
            raise ScenarioError(f"log spec needs positive bounds and count, got {spec!r}")
        return list(np.logspace(math.log10(start), math.log10(stop), count))
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ScenarioError(f"range spec must be start:stop:step, got {spec!r}")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError as exc:
            raise ScenarioError(f"bad range spec {spec!r}: {exc}") from exc
        if step <= 0:
            raise ScenarioError(f"range step must be positive, got {spec!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        if count < 1:
            raise ScenarioError(f"range {spec!r} is empty")
        return [start + i * step for i in range(count)]
    try:
        return [float(tok) for tok in spec.split(",") if tok.strip()]
    except ValueError as exc:
        raise ScenarioError(f"bad value list {spec!r}: {exc}") from exc


def _quad(args) -> QuadratureSpec:
    return QuadratureSpec(points=args.quad_points)


def _manifest(args, params: ScenarioParams, parameters: dict, started: float) -> RunManifest:
    return RunManifest(
        command=[str(a) for a in (args._argv or [])],
        version=__version__,
        backend=resolve_backend(getattr(args, "backend", None)),
        threads=resolve_threads(),
        scenario=params.to_dict(),
        parameters=parameters,
        duration_s=round(time.monotonic() - started, 6),
    )


def _finish(manifest: RunManifest, outputs, manifest_path) -> None:
    for path in outputs:
        manifest.add_output(path)
    manifest.write(manifest_path)


def cmd_analyze(args) -> int:
    started = time.monotonic()
    params = _load_params(args)
    quad = _quad(args)
    curve = detection_curve(params, quad=quad, n_steps=args.steps, backend=args.backend)
    curve.to_csv(args.out)
    summary = {
        "n_collect": params.n_collect,
        "t_step_min": params.t_step_min,
        "n_steps": len(curve),
        "pi_D_final": float(curve.pi_detected[-1]),
        "p_d_max": float(np.max(curve.p_detect)),
        "p_fa_step1": float(curve.p_false_alarm[0]),
        "renormalizations": curve.renormalizations,
        "quad_points": quad.points,
    }
    if args.validate:
        fine = detection_curve(
            params, quad=QuadratureSpec(points=2 * quad.points), n_steps=args.steps,
            backend=args.backend,
        )
        summary["validate"] = {
            "quad_points_refined": 2 * quad.points,
            "max_abs_dp_d": float(np.max(np.abs(fine.p_detect - curve.p_detect))),
            "max_abs_dpi_D": float(np.max(np.abs(fine.pi_detected - curve.pi_detected))),
        }
        print(
            "resolution check: |dp_d| <= {max_abs_dp_d:.3e}, |dpi_D| <= {max_abs_dpi_D:.3e}".format(
                **summary["validate"]
            )
        )
    summary_path = f"{args.out}.summary.json"
    write_json(summary_path, summary)
    manifest = _manifest(args, params, {"quad_points": quad.points, "steps": args.steps}, started)
    _finish(manifest, [args.out, summary_path], f"{args.out}.manifest.json")
    print(f"wrote {args.out} ({len(curve)} steps, final pi_D = {summary['pi_D_final']:.6f})")
    return 0


def cmd_simulate(args) -> int:
    started = time.monotonic()
    params = _load_params(args)
    quad = _quad(args)
    cfg = TrialConfig(
        scenario=params, trials=args.trials, seed=args.seed, boundary_mode=args.boundary_mode
    )
    curve = detection_curve(params, quad=quad, backend=args.backend)
    mc = run_trials(cfg, backend=args.backend)
    header = CURVE_CSV_HEADER + ("pi_D_mc", "ci_halfwidth", "trials")
    rows = [
        row + (float(mc.pi_detected_mc[i]), float(mc.ci_halfwidth[i]), mc.trials)
        for i, row in enumerate(curve.rows())
    ]
    write_csv(args.out, f"{CURVE_CSV_SCHEMA}+mc", header, rows)
    gap = float(np.max(np.abs(mc.pi_detected_mc - curve.pi_detected)))
    manifest = _manifest(
        args,
        params,
        {
            "trials": args.trials,
            "seed": args.seed,
            "boundary_mode": args.boundary_mode,
            "quad_points": quad.points,
        },
        started,
    )
    _finish(manifest, [args.out], f"{args.out}.manifest.json")
    print(
        f"wrote {args.out}: analytical pi_D = {float(curve.pi_detected[-1]):.4f}, "
        f"empirical {float(mc.pi_detected_mc[-1]):.4f} "
        f"(+/- {float(mc.ci_halfwidth[-1]):.4f}), max |gap| = {gap:.4f}"
    )
    return 0


def _grid_from_args(args) -> PlanGrid:
    kwargs = {}
    if args.densities:
        kwargs["densities"] = tuple(_parse_values(args.densities))
    if args.thresholds:
        vals = _parse_values(args.thresholds)
        thr = []
        for v in vals:
            if v != int(v):
                raise ScenarioError(f"thresholds must be integers, got {v}")
            thr.append(int(v))
        kwargs["thresholds"] = tuple(thr)
    return PlanGrid(**kwargs)


def cmd_optimize_detection(args) -> int:
    started = time.monotonic()
    params = _load_params(args)
    quad = _quad(args)
    grid = _grid_from_args(args)
    plan = solve_p1(params, budget=args.budget, grid=grid, quad=quad, backend=args.backend)
    sweep_path = args.out
    result_path = f"{args.out}.result.json"
    write_csv(
        sweep_path,
        "pyrewatch.p1sweep.v1",
        ("budget", "lambda_s", "M", "N_u", "pi_D"),
        (
            (c.budget, c.density, c.threshold, c.num_uavs, c.objective)
            for c in plan.cells
        ),
    )
    write_json(result_path, {"budget": plan.budget, "best": dataclasses.asdict(plan.best)})
    manifest = _manifest(args, params, {"budget": plan.budget, "quad_points": quad.points}, started)
    _finish(manifest, [sweep_path, result_path], f"{args.out}.manifest.json")
    b = plan.best
    print(
        f"best: density {b.density:g}/km^2, {b.num_uavs} UAVs, threshold {b.threshold} "
        f"-> pi_D = {b.objective:.6f} (spend {b.spend:g} of {plan.budget:g})"
    )
    return 0


def cmd_optimize_losses(args) -> int:
    started = time.monotonic()
    params = _load_params(args)
    quad = _quad(args)
    grid = _grid_from_args(args)
    budgets = _parse_values(args.budgets) if args.budgets else default_budget_grid()
    (plan,) = solve_p2(params, budgets=budgets, grid=grid, quad=quad, backend=args.backend)
    sweep_path = args.out
    result_path = f"{args.out}.result.json"
    write_csv(
        sweep_path,
        "pyrewatch.p2sweep.v1",
        ("budget", "lambda_s", "M", "N_u", "expected_loss"),
        (
            (c.budget, c.density, c.threshold, c.num_uavs, c.objective)
            for c in plan.cells
        ),
    )
    write_json(
        result_path,
        {
            "damage_coeff": plan.damage_coeff,
            "best": dataclasses.asdict(plan.best),
            "by_budget": [dataclasses.asdict(b) for b in plan.by_budget],
            "no_system_loss": params.damage_coeff * params.fallback_time_min**2,
        },
    )
    manifest = _manifest(
        args, params, {"budgets": [float(b) for b in budgets], "quad_points": quad.points}, started
    )
    _finish(manifest, [sweep_path, result_path], f"{args.out}.manifest.json")
    b = plan.best
    print(
        f"best: budget {b.budget:g}, density {b.density:g}/km^2, {b.num_uavs} UAVs, "
        f"threshold {b.threshold} -> expected loss {b.objective:.6g}"
    )
    return 0


def cmd_altitude(args) -> int:
    started = time.monotonic()
    params = _load_params(args)
    channel = params.channel or ChannelParams()
    targets = _parse_values(args.snr_db) if args.snr_db else [channel.target_snr_db]
    rows = []
    sweep_rows = []
    heights = np.logspace(0.0, 4.0, args.h_points)
    for target in targets:
        try:
            design = optimize_altitude(channel, target_snr_db=target)
            rows.append((target, design.height_m, design.radius_m, "ok"))
            print(
                f"target {target:g} dB: h* = {design.height_m:.1f} m, "
                f"R* = {design.radius_m:.1f} m"
            )
        except InfeasibleError:
            rows.append((target, float("nan"), float("nan"), "infeasible"))
            print(f"target {target:g} dB: infeasible")
        for h in heights:
            r = coverage_radius_at_height(channel, float(h), target)
            sweep_rows.append((target, float(h), r if r >= 0.0 else float("nan")))
    write_csv(
        args.out,
        "pyrewatch.altitude.v1",
        ("target_snr_db", "h_opt_m", "r_max_m", "status"),
        rows,
    )
    hsweep_path = f"{args.out}.hsweep.csv"
    write_csv(
        hsweep_path,
        "pyrewatch.altitude-sweep.v1",
        ("target_snr_db", "h_m", "r_max_m"),
        sweep_rows,
    )
    manifest = _manifest(
        args, params, {"targets_snr_db": list(targets), "h_points": args.h_points}, started
    )
    _finish(manifest, [args.out, hsweep_path], f"{args.out}.manifest.json")
    return 0


def _metric_value(name: str, params: ScenarioParams, quad: QuadratureSpec, backend) -> float:
    if name == "pi_D_K":
        return float(detection_curve(params, quad=quad, backend=backend).pi_detected[-1])
    if name == "expected_loss":
        curve = detection_curve(
            params, quad=quad, n_steps=params.n_steps_fallback, backend=backend
        )
        return expected_losses(params, curve)
    if name == "n_steps":
        return float(params.n_steps_critical)
    if name == "t_step_min":
        return params.t_step_min
    raise ScenarioError(
        f"unknown metric {name!r}; available: pi_D_K, expected_loss, n_steps, t_step_min"
    )


def cmd_sweep(args) -> int:
    started = time.monotonic()
    params = _load_params(args)
    quad = _quad(args)
    metrics = args.metric or ["pi_D_K"]
    if not args.vary:
        raise ScenarioError("sweep requires at least one --vary key=values")
    base = params.to_dict()
    keys = []
    value_lists = []
    sweepable = sorted(set(base) - {"channel"})
    for spec in args.vary:
        if "=" not in spec:
            raise ScenarioError(f"--vary expects key=values, got {spec!r}")
        key, _, val_spec = spec.partition("=")
        key = key.strip()
        if key not in sweepable:
            raise ScenarioError(
                f"cannot sweep {key!r}; sweepable fields: {', '.join(sweepable)}"
            )
        values = _parse_values(val_spec)
        if key in _INT_FIELDS:
            cast = []
            for v in values:
                if v != int(v):
                    raise ScenarioError(f"{key} must take integer values, got {v}")
                cast.append(int(v))
            values = cast
        keys.append(key)
        value_lists.append(values)

    rows = []
    from itertools import product

    from .scenario import scenario_from_dict

    for combo in product(*value_lists):
        cfg = dict(base)
        cfg.update(dict(zip(keys, combo)))
        point = scenario_from_dict(cfg)
        for metric in metrics:
            rows.append(tuple(combo) + (metric, _metric_value(metric, point, quad, args.backend)))
    write_csv(
        args.out,
        "pyrewatch.sweep.v1",
        tuple(keys) + ("metric", "value"),
        rows,
    )
    manifest = _manifest(
        args,
        params,
        {"vary": list(args.vary), "metrics": list(metrics), "quad_points": quad.points},
        started,
    )
    _finish(manifest, [args.out], f"{args.out}.manifest.json")
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def _add_common(sub, out_help: str) -> None:
    sub.add_argument("--config", help="scenario JSON file (defaults when omitted)")
    sub.add_argument("--out", required=True, help=out_help)
    sub.add_argument("--quad-points", type=int, default=200, help="radial quadrature points")
    sub.add_argument("--backend", choices=("numba", "numpy"), help="kernel backend override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pyrewatch",
        description="UAV-assisted IoT wildfire detection: curves, simulation, design",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("analyze", help="analytical detection curve")
    _add_common(p, "curve CSV path")
    p.add_argument("--steps", type=int, default=None, help="horizon override in steps")
    p.add_argument("--validate", action="store_true", help="re-run at doubled resolution")
    p.set_defaults(func=cmd_analyze)

    p = subs.add_parser("simulate", help="Monte Carlo validation curve")
    _add_common(p, "combined CSV path")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--boundary-mode",
        choices=("interior-ignition", "torus"),
        default="interior-ignition",
    )
    p.set_defaults(func=cmd_simulate)

    p = subs.add_parser("optimize-detection", help="budgeted detection maximization")
    _add_common(p, "design-sweep CSV path")
    p.add_argument("--budget", type=float, default=None, help="defaults to the scenario budget")
    p.add_argument("--densities", help="density grid (list/range spec)")
    p.add_argument("--thresholds", help="threshold grid (list/range spec)")
    p.set_defaults(func=cmd_optimize_detection)

    p = subs.add_parser("optimize-losses", help="budgeted expected-loss minimization")
    _add_common(p, "design-sweep CSV path")
    p.add_argument("--budgets", help="budget grid (list, range, or log:start:stop:count)")
    p.add_argument("--densities", help="density grid (list/range spec)")
    p.add_argument("--thresholds", help="threshold grid (list/range spec)")
    p.set_defaults(func=cmd_optimize_losses)

    p = subs.add_parser("altitude", help="coverage-maximizing hover altitude")
    p.add_argument("--config", help="scenario JSON file (channel block used)")
    p.add_argument("--out", required=True, help="results CSV path")
    p.add_argument("--snr-db", help="target SNR values in dB (list spec)")
    p.add_argument("--h-points", type=int, default=60, help="altitude sweep resolution")
    p.set_defaults(func=cmd_altitude)

    p = subs.add_parser("sweep", help="scalar metric over a parameter grid")
    _add_common(p, "sweep CSV path")
    p.add_argument(
        "--vary",
        action="append",
        help="field=values (list, start:stop:step, or log:start:stop:count); repeatable",
    )
    p.add_argument(
        "--metric",
        action="append",
        help="pi_D_K (default), expected_loss, n_steps, t_step_min; repeatable",
    )
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args._argv = ["pyrewatch"] + argv
    try:
        return int(args.func(args) or 0)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
