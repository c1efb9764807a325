"""Flat key=value config handling and CSV emission.

All numeric output uses 17 significant digits so every float64 round-trips
exactly; plotting is left to external tools and the scripts in scripts/.
"""

from __future__ import annotations

import shlex
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .analysis import BurstEventSet, LyapunovEstimate, RegimeReport
from .dynamics import OrbitSeries
from .integrator import IntegratorConfig
from .model import InletState, ReactorParams
from .sweep import SweepResult

__version__ = "0.1.0"

PARAM_KEYS = ("da", "n", "beta", "gamma", "delta", "f", "theta_h", "kinetics_form")


def fmt(x: float) -> str:
    """Round-trip decimal rendering of a float64."""
    return f"{x:.17g}"


def tool_version() -> str:
    return f"recycle-reactor-{__version__}"


# -- flat key=value files ----------------------------------------------------


def parse_kv_text(text: str) -> dict:
    """Parse `key = value` lines; '#' starts a comment, blank lines ignored."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip().lower()] = value.strip()
    return out


def load_kv_file(path) -> dict:
    return parse_kv_text(Path(path).read_text())


def params_from_kv(kv: dict, base: Optional[ReactorParams] = None) -> ReactorParams:
    """Build ReactorParams from a key=value dict, over a base parameter set."""
    base = base or ReactorParams()
    kwargs = {}
    for key in PARAM_KEYS:
        if key not in kv:
            continue
        kwargs[key] = kv[key] if key == "kinetics_form" else float(kv[key])
    unknown = set(kv) - set(PARAM_KEYS)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return ReactorParams(**{**_params_dict(base), **kwargs})


def _params_dict(p: ReactorParams) -> dict:
    return {f.name: getattr(p, f.name) for f in fields(ReactorParams)}


def params_to_kv_lines(p: ReactorParams) -> list[str]:
    lines = []
    for key in PARAM_KEYS:
        v = getattr(p, key)
        lines.append(f"{key} = {v if isinstance(v, str) else fmt(v)}")
    return lines


# -- CSV writers -------------------------------------------------------------


def write_profile_csv(path, profile: np.ndarray) -> None:
    """Spatial profile rows: zeta,alpha,theta."""
    with open(path, "w") as fh:
        fh.write("zeta,alpha,theta\n")
        for z, a, t in profile:
            fh.write(f"{fmt(z)},{fmt(a)},{fmt(t)}\n")


def write_orbit_csv(path, series: OrbitSeries) -> Path:
    """Orbit rows k,alpha_out,theta_out plus a .meta sidecar."""
    path = Path(path)
    with open(path, "w") as fh:
        fh.write("k,alpha_out,theta_out\n")
        for k, a, t in zip(series.k, series.alpha_out, series.theta_out):
            fh.write(f"{k},{fmt(a)},{fmt(t)}\n")
    meta = path.with_suffix(".meta")
    with open(meta, "w") as fh:
        for line in params_to_kv_lines(series.params):
            fh.write(line + "\n")
        fh.write(f"method = {series.cfg.method}\n")
        fh.write(f"steps_per_pass = {series.cfg.steps_per_pass}\n")
        fh.write(f"alpha0 = {fmt(series.inlet0.alpha)}\n")
        fh.write(f"theta0 = {fmt(series.inlet0.theta)}\n")
        fh.write(f"transient_discarded = {series.transient_discarded}\n")
        fh.write(f"version = {tool_version()}\n")
    return meta


def read_orbit_csv(path) -> OrbitSeries:
    """Rebuild an orbit series from CSV.

    Only k / alpha_out / theta_out are recovered; params, cfg and inlet are
    placeholders (analysis of re-read series uses the samples alone).
    """
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 3:
        raise ValueError(f"expected 3 columns in orbit CSV, got {data.shape[1]}")
    k = data[:, 0].astype(np.int64)
    return OrbitSeries(
        params=ReactorParams(),
        cfg=IntegratorConfig(),
        inlet0=InletState(0.0, 0.0),
        k=k,
        alpha_out=data[:, 1],
        theta_out=data[:, 2],
        transient_discarded=max(0, int(k[0]) - 1),
        final_inlet=InletState(0.0, 0.0),
    )


def write_bursts_csv(path, events: BurstEventSet) -> None:
    """Burst rows k_peak,peak_theta,width,interval_to_next (nan on the last)."""
    with open(path, "w") as fh:
        fh.write("k_peak,peak_theta,width,interval_to_next\n")
        n = len(events)
        for i in range(n):
            interval = fmt(float(events.intervals[i])) if i < n - 1 else "nan"
            fh.write(
                f"{events.k_peak[i]},{fmt(events.peak_theta[i])},"
                f"{events.width[i]},{interval}\n"
            )


def write_lyapunov_csv(path, est: LyapunovEstimate) -> None:
    """Convergence rows n,running_lambda."""
    with open(path, "w") as fh:
        fh.write("n,running_lambda\n")
        for i, lam in enumerate(est.convergence_trace, start=1):
            fh.write(f"{i},{fmt(lam)}\n")


def write_delay_csv(path, pairs: np.ndarray) -> None:
    with open(path, "w") as fh:
        fh.write("theta_k,theta_k1\n")
        for x, y in pairs:
            fh.write(f"{fmt(x)},{fmt(y)}\n")


def write_sweep_csv(path, result: SweepResult) -> None:
    """Long-format attractor samples; failed points appear as sentinel rows
    param_value,-1,nan."""
    with open(path, "w") as fh:
        fh.write("param_value,sample_index,theta_out\n")
        for pt in result.points:
            if pt.error is not None or pt.theta_samples is None:
                fh.write(f"{fmt(pt.value)},-1,nan\n")
                continue
            for i, t in enumerate(pt.theta_samples):
                fh.write(f"{fmt(pt.value)},{i},{fmt(t)}\n")


def write_lambda_sweep_csv(path, result: SweepResult) -> None:
    with open(path, "w") as fh:
        fh.write("param_value,lambda,n_passes\n")
        n = result.plan.lyapunov_passes
        for pt in result.points:
            lam = fmt(pt.lam) if pt.lam is not None else "nan"
            fh.write(f"{fmt(pt.value)},{lam},{n}\n")


# -- regime report -----------------------------------------------------------


def report_text(report: RegimeReport) -> str:
    lines = [
        f"label = {report.label}",
        f"period = {report.period if report.period is not None else ''}",
        f"lambda = {fmt(report.lambda_full.lam)}",
        f"lambda_stderr = {fmt(report.lambda_full.stderr)}",
        f"lambda_pos_tol = {fmt(report.lambda_pos_tol)}",
        f"n_windows = {len(report.lambda_windows)}",
        f"transition_pass = {report.transition_pass if report.transition_pass is not None else ''}",
        f"n_bursts = {len(report.bursts)}",
        f"burst_threshold = {fmt(report.bursts.threshold_used)}",
    ]
    iv = report.bursts.intervals
    lines.append(f"burst_mean_interval = {fmt(float(iv.mean())) if len(iv) else 'nan'}")
    lines.append(f"burst_cv = {fmt(report.bursts.cv)}")
    return "\n".join(lines) + "\n"


def report_csv(report: RegimeReport) -> str:
    iv = report.bursts.intervals
    header = (
        "label,period,lambda,lambda_stderr,lambda_pos_tol,"
        "transition_pass,n_bursts,burst_mean_interval,burst_cv,burst_threshold"
    )
    row = ",".join(
        [
            report.label,
            str(report.period) if report.period is not None else "",
            fmt(report.lambda_full.lam),
            fmt(report.lambda_full.stderr),
            fmt(report.lambda_pos_tol),
            str(report.transition_pass) if report.transition_pass is not None else "",
            str(len(report.bursts)),
            fmt(float(iv.mean())) if len(iv) else "nan",
            fmt(report.bursts.cv),
            fmt(report.bursts.threshold_used),
        ]
    )
    return header + "\n" + row + "\n"


# -- run manifest ------------------------------------------------------------


@dataclass
class RunManifest:
    """Record of one CLI invocation, sufficient to reproduce its outputs."""

    command: str
    argv: list
    outputs: list
    duration_s: float
    error: Optional[str] = None

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(f"command = {self.command}\n")
            fh.write(f"argv = {shlex.join(self.argv)}\n")
            fh.write(f"outputs = {','.join(str(o) for o in self.outputs)}\n")
            fh.write(f"version = {tool_version()}\n")
            fh.write(f"duration_s = {self.duration_s:.3f}\n")
            if self.error is not None:
                fh.write(f"error = {self.error}\n")


def read_manifest(path) -> dict:
    return load_kv_file(path)
