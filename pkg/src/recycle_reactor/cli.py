"""Command-line frontend.

Subcommands: simulate, lyapunov, bursts, poincare, sweep, classify, bracket.
Exit codes: 0 success, 1 usage error, 2 domain/numeric failure.  Every run
writes a .manifest sidecar whose `argv` line re-creates the outputs
byte-identically.
"""

from __future__ import annotations

import argparse
import os
import re
import shlex
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io as rio
from .analysis import (
    burst_delay_map,
    classify_regime,
    delay_map,
    detect_bursts,
    lyapunov_benettin,
    lyapunov_variational,
)
from .dynamics import simulate_orbit
from .errors import ReactorError
from .integrator import IntegratorConfig
from .model import InletState, ReactorParams
from .sweep import (
    SweepPlan,
    bracket_regime_boundary,
    lambda_positive_predicate,
    periodic_predicate,
    run_sweep,
)

USAGE_EXIT = 1
DOMAIN_EXIT = 2


class _Parser(argparse.ArgumentParser):
    """argparse with the documented usage exit code (1, not argparse's 2).

    The negative-number matcher is widened so grid/value tokens such as
    `-0.0340:-0.0320:801` parse as values rather than option names.
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._negative_number_matcher = re.compile(r"^-\d")

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _add_param_flags(sp):
    g = sp.add_argument_group("model parameters")
    g.add_argument("--config", help="flat key=value parameter file")
    g.add_argument("--da", type=float)
    g.add_argument("--n", type=float)
    g.add_argument("--beta", type=float)
    g.add_argument("--gamma", type=float)
    g.add_argument("--delta", type=float)
    g.add_argument("--f", type=float)
    g.add_argument("--theta-h", type=float, dest="theta_h")
    g.add_argument("--kinetics-form", choices=("standard", "as_printed"), dest="kinetics_form")


def _add_integrator_flags(sp, method_flag="--method"):
    g = sp.add_argument_group("integrator")
    g.add_argument(method_flag, choices=("euler", "rk4", "rk38"), dest="integrator",
                   default="rk4", help="integration scheme (default rk4)")
    g.add_argument("--steps", type=int, default=1000, help="steps per pass (default 1000)")


def _add_ic_flags(sp):
    sp.add_argument("--alpha0", type=float, default=0.0)
    sp.add_argument("--theta0", type=float, default=0.0)


def build_parser() -> _Parser:
    parser = _Parser(prog="reactor", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="write an orbit time series CSV")
    _add_param_flags(sp)
    _add_integrator_flags(sp)
    _add_ic_flags(sp)
    sp.add_argument("--passes", type=int, required=True)
    sp.add_argument("--transient", type=int, default=0)
    sp.add_argument("--out", default="orbit.csv")

    sp = sub.add_parser("lyapunov", help="largest Lyapunov exponent")
    _add_param_flags(sp)
    # on this command, --method selects the estimator; --integrator the scheme
    sp.add_argument("--method", choices=("variational", "benettin"), default="variational")
    sp.add_argument("--integrator", choices=("euler", "rk4", "rk38"), default="rk4")
    sp.add_argument("--steps", type=int, default=1000)
    _add_ic_flags(sp)
    sp.add_argument("--passes", type=int, default=20000)
    sp.add_argument("--transient", type=int, default=2000)
    sp.add_argument("--d0", type=float, default=1e-9)
    sp.add_argument("--out", default="lyapunov.csv")

    sp = sub.add_parser("bursts", help="burst events and interval statistics")
    _add_param_flags(sp)
    _add_integrator_flags(sp)
    _add_ic_flags(sp)
    sp.add_argument("--passes", type=int)
    sp.add_argument("--transient", type=int, default=0)
    sp.add_argument("--from-csv", dest="from_csv", help="analyze an existing orbit CSV")
    sp.add_argument("--threshold", type=float)
    sp.add_argument("--out", default="bursts.csv")

    sp = sub.add_parser("poincare", help="delay map of burst peaks (or all samples)")
    _add_param_flags(sp)
    _add_integrator_flags(sp)
    _add_ic_flags(sp)
    sp.add_argument("--passes", type=int)
    sp.add_argument("--transient", type=int, default=0)
    sp.add_argument("--from-csv", dest="from_csv")
    sp.add_argument("--threshold", type=float)
    sp.add_argument("--full", action="store_true", help="all-sample delay map")
    sp.add_argument("--out", default="poincare.csv")

    sp = sub.add_parser("sweep", help="parameter sweep: attractor samples per grid value")
    _add_param_flags(sp)
    _add_integrator_flags(sp)
    _add_ic_flags(sp)
    sp.add_argument("--plan", help="key=value plan file (grid = lo:hi:count)")
    sp.add_argument("--param", default=None, help="parameter to sweep (default theta_h)")
    sp.add_argument("--grid", default=None, help="lo:hi:count")
    sp.add_argument("--values", default=None, help="comma-separated explicit values")
    sp.add_argument("--record", type=int, default=None, help="attractor samples per point")
    sp.add_argument("--transient", type=int, default=None)
    sp.add_argument("--with-lambda", dest="with_lambda", type=int, default=None,
                    metavar="PASSES", help="also estimate lambda per point")
    sp.add_argument("--cold", action="store_true", help="disable warm-start continuation")
    sp.add_argument("--chunk", type=int, default=None)
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("--out", default="sweep.csv")

    sp = sub.add_parser("classify", help="regime label for one orbit")
    _add_param_flags(sp)
    _add_integrator_flags(sp)
    _add_ic_flags(sp)
    sp.add_argument("--passes", type=int, default=10000, help="orbit budget (default 10000)")
    sp.add_argument("--out", default="report.csv")

    sp = sub.add_parser("bracket", help="bisect a regime boundary in one parameter")
    _add_param_flags(sp)
    _add_integrator_flags(sp)
    _add_ic_flags(sp)
    sp.add_argument("--param", default="theta_h")
    sp.add_argument("--lo", type=float, required=True)
    sp.add_argument("--hi", type=float, required=True)
    sp.add_argument("--predicate", choices=("lambda-positive", "periodic"),
                    default="lambda-positive")
    sp.add_argument("--lambda-tol", dest="lambda_tol", type=float, default=1e-3)
    sp.add_argument("--pred-passes", dest="pred_passes", type=int, default=10000)
    sp.add_argument("--pred-transient", dest="pred_transient", type=int, default=2000)
    sp.add_argument("--max-period", dest="max_period", type=int, default=64)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--out", default="bracket.csv")

    return parser


def _resolve_params(args, parser) -> ReactorParams:
    p = ReactorParams()
    if args.config:
        p = rio.params_from_kv(rio.load_kv_file(args.config), base=p)
    overrides = {}
    for key in ("da", "n", "beta", "gamma", "delta", "f", "theta_h", "kinetics_form"):
        v = getattr(args, key, None)
        if v is not None:
            overrides[key] = v
    try:
        return replace(p, **overrides)
    except ValueError as exc:
        parser.error(str(exc))


def _resolve_cfg(args) -> IntegratorConfig:
    return IntegratorConfig(method=args.integrator, steps_per_pass=args.steps)


def _param_argv(p: ReactorParams) -> list:
    return [
        "--da", rio.fmt(p.da), "--n", rio.fmt(p.n), "--beta", rio.fmt(p.beta),
        "--gamma", rio.fmt(p.gamma), "--delta", rio.fmt(p.delta), "--f", rio.fmt(p.f),
        "--theta-h", rio.fmt(p.theta_h), "--kinetics-form", p.kinetics_form,
    ]


def _ic_argv(args) -> list:
    return ["--alpha0", rio.fmt(args.alpha0), "--theta0", rio.fmt(args.theta0)]


def _threads(args):
    if getattr(args, "threads", None) is not None:
        return args.threads
    env = os.environ.get("REACTOR_THREADS")
    return int(env) if env else None


def _run_simulate(args, parser, outputs):
    if args.theta_h is None and not (
        args.config and "theta_h" in rio.load_kv_file(args.config)
    ):
        parser.error("--theta-h is required")
    p = _resolve_params(args, parser)
    cfg = _resolve_cfg(args)
    series = simulate_orbit(
        InletState(args.alpha0, args.theta0), p, cfg,
        n_passes=args.passes, n_transient=args.transient,
    )
    out = Path(args.out)
    meta = rio.write_orbit_csv(out, series)
    outputs += [out, meta]
    print(f"wrote {args.passes} passes to {out}")
    argv = (
        ["simulate"] + _param_argv(p)
        + ["--method", cfg.method, "--steps", str(cfg.steps_per_pass)]
        + _ic_argv(args)
        + ["--passes", str(args.passes), "--transient", str(args.transient), "--out", str(out)]
    )
    return argv


def _run_lyapunov(args, parser, outputs):
    p = _resolve_params(args, parser)
    cfg = IntegratorConfig(method=args.integrator, steps_per_pass=args.steps)
    inlet0 = InletState(args.alpha0, args.theta0)
    if args.method == "variational":
        est = lyapunov_variational(p, cfg, inlet0, args.transient, args.passes)
    else:
        est = lyapunov_benettin(p, cfg, inlet0, args.transient, args.passes, d0=args.d0)
    out = Path(args.out)
    rio.write_lyapunov_csv(out, est)
    outputs.append(out)
    print(f"lambda = {est.lam:.6f} +/- {est.stderr:.2e} "
          f"(method={est.method}, passes={est.n_passes_used})")
    argv = (
        ["lyapunov"] + _param_argv(p)
        + ["--method", args.method, "--integrator", cfg.method, "--steps", str(cfg.steps_per_pass)]
        + _ic_argv(args)
        + ["--passes", str(args.passes), "--transient", str(args.transient),
           "--d0", rio.fmt(args.d0), "--out", str(out)]
    )
    return argv


def _series_for_analysis(args, parser):
    if args.from_csv:
        return rio.read_orbit_csv(args.from_csv), None, None
    if args.passes is None:
        parser.error("--passes is required unless --from-csv is given")
    p = _resolve_params(args, parser)
    cfg = _resolve_cfg(args)
    series = simulate_orbit(
        InletState(args.alpha0, args.theta0), p, cfg,
        n_passes=args.passes, n_transient=args.transient,
    )
    return series, p, cfg


def _run_bursts(args, parser, outputs):
    series, p, cfg = _series_for_analysis(args, parser)
    events = detect_bursts(series, threshold=args.threshold)
    out = Path(args.out)
    rio.write_bursts_csv(out, events)
    outputs.append(out)
    iv = events.intervals
    mean_iv = float(iv.mean()) if len(iv) else float("nan")
    print(f"n_bursts = {len(events)}")
    print(f"mean_interval = {mean_iv:.6g}")
    print(f"cv = {events.cv:.6g}")
    print(f"threshold = {events.threshold_used:.6g}")
    argv = ["bursts"]
    if args.from_csv:
        argv += ["--from-csv", args.from_csv]
    else:
        argv += (
            _param_argv(p) + ["--method", cfg.method, "--steps", str(cfg.steps_per_pass)]
            + _ic_argv(args)
            + ["--passes", str(args.passes), "--transient", str(args.transient)]
        )
    if args.threshold is not None:
        argv += ["--threshold", rio.fmt(args.threshold)]
    return argv + ["--out", str(out)]


def _run_poincare(args, parser, outputs):
    series, p, cfg = _series_for_analysis(args, parser)
    if args.full:
        pairs = delay_map(series)
    else:
        pairs = burst_delay_map(detect_bursts(series, threshold=args.threshold))
    out = Path(args.out)
    rio.write_delay_csv(out, pairs)
    outputs.append(out)
    print(f"wrote {len(pairs)} delay pairs to {out}")
    argv = ["poincare"]
    if args.from_csv:
        argv += ["--from-csv", args.from_csv]
    else:
        argv += (
            _param_argv(p) + ["--method", cfg.method, "--steps", str(cfg.steps_per_pass)]
            + _ic_argv(args)
            + ["--passes", str(args.passes), "--transient", str(args.transient)]
        )
    if args.threshold is not None:
        argv += ["--threshold", rio.fmt(args.threshold)]
    if args.full:
        argv += ["--full"]
    return argv + ["--out", str(out)]


def _build_plan(args, parser) -> SweepPlan:
    kv = rio.load_kv_file(args.plan) if args.plan else {}
    param = args.param or kv.get("param", "theta_h")
    grid = args.grid or kv.get("grid")
    values = args.values or kv.get("values")
    if args.cold:
        continuation = False
    else:
        continuation = str(kv.get("continuation", "true")).lower() != "false"
    kwargs = dict(
        n_transient=args.transient if args.transient is not None
        else int(kv.get("transient", 3000)),
        n_record=args.record if args.record is not None else int(kv.get("record", 200)),
        continuation=continuation,
        chunk_size=args.chunk if args.chunk is not None else int(kv.get("chunk", 50)),
        lyapunov_passes=args.with_lambda if args.with_lambda is not None
        else int(kv.get("lyapunov_passes", 0)),
    )
    if values:
        vals = [float(v) for v in str(values).split(",")]
        return SweepPlan(param=param, values=np.asarray(vals), **kwargs)
    if not grid:
        parser.error("sweep needs --grid lo:hi:count, --values, or a --plan file")
    parts = str(grid).split(":")
    if len(parts) != 3:
        parser.error(f"bad --grid {grid!r}, expected lo:hi:count")
    lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    return SweepPlan.from_grid(param, lo, hi, count, **kwargs)


def _run_sweep(args, parser, outputs):
    p = _resolve_params(args, parser)
    cfg = _resolve_cfg(args)
    plan = _build_plan(args, parser)
    inlet0 = InletState(args.alpha0, args.theta0)
    result = run_sweep(plan, p, cfg, inlet0=inlet0, threads=_threads(args))
    out = Path(args.out)
    rio.write_sweep_csv(out, result)
    outputs.append(out)
    if plan.lyapunov_passes > 0:
        lam_out = out.with_name(out.stem + "_lambda.csv")
        rio.write_lambda_sweep_csv(lam_out, result)
        outputs.append(lam_out)
    n_err = sum(1 for pt in result.points if pt.error is not None)
    print(f"swept {len(result.points)} points ({n_err} failed) -> {out}")
    argv = (
        ["sweep"] + _param_argv(p)
        + ["--method", cfg.method, "--steps", str(cfg.steps_per_pass)]
        + _ic_argv(args)
        + ["--param", plan.param,
           "--values", ",".join(rio.fmt(v) for v in plan.values),
           "--record", str(plan.n_record), "--transient", str(plan.n_transient),
           "--chunk", str(plan.chunk_size)]
    )
    if plan.lyapunov_passes:
        argv += ["--with-lambda", str(plan.lyapunov_passes)]
    if not plan.continuation:
        argv += ["--cold"]
    return argv + ["--out", str(out)]


def _run_classify(args, parser, outputs):
    p = _resolve_params(args, parser)
    cfg = _resolve_cfg(args)
    report = classify_regime(p, cfg, InletState(args.alpha0, args.theta0), args.passes)
    sys.stdout.write(rio.report_text(report))
    out = Path(args.out)
    out.write_text(rio.report_csv(report))
    outputs.append(out)
    argv = (
        ["classify"] + _param_argv(p)
        + ["--method", cfg.method, "--steps", str(cfg.steps_per_pass)]
        + _ic_argv(args)
        + ["--passes", str(args.passes), "--out", str(out)]
    )
    return argv


def _run_bracket(args, parser, outputs):
    p = _resolve_params(args, parser)
    cfg = _resolve_cfg(args)
    inlet0 = InletState(args.alpha0, args.theta0)
    if args.predicate == "lambda-positive":
        pred = lambda_positive_predicate(
            cfg, inlet0, args.pred_transient, args.pred_passes, args.lambda_tol
        )
    else:
        pred = periodic_predicate(cfg, inlet0, args.pred_transient, args.max_period)
    result = bracket_regime_boundary(p, cfg, args.param, args.lo, args.hi, pred, tol=args.tol)
    out = Path(args.out)
    with open(out, "w") as fh:
        fh.write("param_value,predicate\n")
        for mid, val in result.history:
            fh.write(f"{rio.fmt(mid)},{int(val)}\n")
    outputs.append(out)
    print(f"boundary bracket: [{rio.fmt(result.lo)}, {rio.fmt(result.hi)}]")
    print(f"predicate: {result.predicate_lo} -> {result.predicate_hi} "
          f"({len(result.history)} bisection steps)")
    argv = (
        ["bracket"] + _param_argv(p)
        + ["--method", cfg.method, "--steps", str(cfg.steps_per_pass)]
        + _ic_argv(args)
        + ["--param", args.param, "--lo", rio.fmt(args.lo), "--hi", rio.fmt(args.hi),
           "--predicate", args.predicate, "--lambda-tol", rio.fmt(args.lambda_tol),
           "--pred-passes", str(args.pred_passes), "--pred-transient", str(args.pred_transient),
           "--max-period", str(args.max_period), "--tol", rio.fmt(args.tol),
           "--out", str(out)]
    )
    return argv


_HANDLERS = {
    "simulate": _run_simulate,
    "lyapunov": _run_lyapunov,
    "bursts": _run_bursts,
    "poincare": _run_poincare,
    "sweep": _run_sweep,
    "classify": _run_classify,
    "bracket": _run_bracket,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = _HANDLERS[args.command]
    outputs = []
    t0 = time.perf_counter()
    manifest_path = Path(getattr(args, "out", f"{args.command}.csv")).with_suffix(".manifest")
    try:
        resolved = handler(args, parser, outputs)
    except ReactorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        rio.RunManifest(
            command=args.command,
            argv=[args.command],
            outputs=outputs,
            duration_s=time.perf_counter() - t0,
            error=str(exc),
        ).write(manifest_path)
        return DOMAIN_EXIT
    manifest = rio.RunManifest(
        command=args.command,
        argv=resolved,
        outputs=outputs + [manifest_path],
        duration_s=time.perf_counter() - t0,
    )
    manifest.write(manifest_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
