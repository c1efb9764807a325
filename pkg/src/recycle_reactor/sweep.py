"""Parameter sweeps: bifurcation-diagram data, lambda curves, boundary bracketing.

Sweeps run over contiguous chunks of the grid.  Warm-start continuation
applies inside a chunk; every chunk starts cold from the sweep's initial
condition.  Chunk layout depends only on the plan (never on the thread
count), so the assembled output is bit-identical for any parallelism.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace
from typing import Callable, Optional

import numpy as np

from .analysis import classify_regime, lyapunov_variational
from .dynamics import detect_period, simulate_orbit
from .errors import ReactorError, SamePredicateError
from .integrator import IntegratorConfig
from .model import InletState, ReactorParams

_SWEEPABLE = tuple(
    f.name for f in fields(ReactorParams) if f.name != "kinetics_form"
)


@dataclass(frozen=True)
class SweepPlan:
    """What to compute at each grid value of one reactor parameter."""

    param: str
    values: np.ndarray
    n_transient: int = 3000
    n_record: int = 200
    continuation: bool = True
    chunk_size: int = 50
    lyapunov_passes: int = 0
    lyapunov_transient: int = 2000
    classify_budget: int = 0

    def __post_init__(self):
        if self.param not in _SWEEPABLE:
            raise ValueError(f"param must be one of {_SWEEPABLE}, got {self.param!r}")
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1 or len(vals) < 1:
            raise ValueError("values must be a non-empty 1-D sequence")
        if len(vals) >= 2:
            d = np.diff(vals)
            if not ((d > 0).all() or (d < 0).all()):
                raise ValueError("values must be strictly monotone")
        if self.n_record < 1 or self.n_transient < 0:
            raise ValueError("n_record must be >= 1 and n_transient >= 0")
        if self.chunk_size < 1:
            raise ValueError(f"chunk_size must be >= 1, got {self.chunk_size}")

    @classmethod
    def from_grid(cls, param: str, lo: float, hi: float, count: int, **kw) -> "SweepPlan":
        if count < 2:
            raise ValueError(f"grid count must be >= 2, got {count}")
        return cls(param=param, values=np.linspace(lo, hi, count), **kw)


@dataclass(frozen=True)
class SweepPoint:
    value: float
    theta_samples: Optional[np.ndarray]
    lam: Optional[float]
    regime: Optional[str]
    error: Optional[str]


@dataclass(frozen=True)
class SweepResult:
    plan: SweepPlan
    base_params: ReactorParams
    cfg: IntegratorConfig
    inlet0: InletState
    points: list


def _run_chunk(plan, p_base, cfg, inlet0, chunk_values):
    points = []
    state = inlet0
    for v in chunk_values:
        p = replace(p_base, **{plan.param: float(v)})
        start = state if plan.continuation else inlet0
        try:
            series = simulate_orbit(
                start, p, cfg, n_passes=plan.n_record, n_transient=plan.n_transient
            )
            if plan.continuation:
                state = series.final_inlet
            lam = None
            if plan.lyapunov_passes > 0:
                lam = lyapunov_variational(
                    p, cfg, inlet0, plan.lyapunov_transient, plan.lyapunov_passes
                ).lam
            regime = None
            if plan.classify_budget > 0:
                regime = classify_regime(p, cfg, inlet0, plan.classify_budget).label
            points.append(
                SweepPoint(value=float(v), theta_samples=series.theta_out,
                           lam=lam, regime=regime, error=None)
            )
        except ReactorError as exc:
            points.append(
                SweepPoint(value=float(v), theta_samples=None, lam=None,
                           regime=None, error=str(exc))
            )
            if plan.continuation:
                state = inlet0
    return points


def run_sweep(
    plan: SweepPlan,
    p_base: ReactorParams,
    cfg: IntegratorConfig,
    inlet0: InletState = InletState(0.0, 0.0),
    threads: Optional[int] = None,
) -> SweepResult:
    """Execute the plan; per-point failures become error rows, not aborts."""
    values = plan.values
    chunks = [values[i: i + plan.chunk_size] for i in range(0, len(values), plan.chunk_size)]
    if threads is None:
        threads = os.cpu_count() or 1
    threads = max(1, min(threads, len(chunks)))
    if threads == 1:
        chunk_results = [_run_chunk(plan, p_base, cfg, inlet0, c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunk_results = list(
                pool.map(lambda c: _run_chunk(plan, p_base, cfg, inlet0, c), chunks)
            )
    points = [pt for chunk in chunk_results for pt in chunk]
    return SweepResult(plan=plan, base_params=p_base, cfg=cfg, inlet0=inlet0, points=points)


@dataclass(frozen=True)
class BracketResult:
    """Bisection bracket around a regime boundary in one parameter."""

    lo: float
    hi: float
    predicate_lo: bool
    predicate_hi: bool
    history: list


def bracket_regime_boundary(
    p_base: ReactorParams,
    cfg: IntegratorConfig,
    param: str,
    lo: float,
    hi: float,
    predicate: Callable[[ReactorParams], bool],
    tol: float = 1e-8,
) -> BracketResult:
    """Bisect [lo, hi] down to `tol` width on a boolean regime predicate."""
    if param not in _SWEEPABLE:
        raise ValueError(f"param must be one of {_SWEEPABLE}, got {param!r}")
    if not lo < hi:
        raise ValueError(f"need lo < hi, got {lo} >= {hi}")
    plo = bool(predicate(replace(p_base, **{param: lo})))
    phi = bool(predicate(replace(p_base, **{param: hi})))
    if plo == phi:
        raise SamePredicateError(
            f"predicate is {plo} at both endpoints {lo} and {hi}"
        )
    history = []
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # float exhaustion
            break
        pm = bool(predicate(replace(p_base, **{param: mid})))
        history.append((mid, pm))
        if pm == plo:
            lo = mid
        else:
            hi = mid
    return BracketResult(lo=lo, hi=hi, predicate_lo=plo, predicate_hi=phi, history=history)


def lambda_positive_predicate(
    cfg: IntegratorConfig,
    inlet0: InletState = InletState(0.0, 0.0),
    n_transient: int = 2000,
    n_passes: int = 10_000,
    tol: float = 1e-3,
) -> Callable[[ReactorParams], bool]:
    """Predicate factory: largest Lyapunov exponent exceeds tol."""

    def pred(p: ReactorParams) -> bool:
        return lyapunov_variational(p, cfg, inlet0, n_transient, n_passes).lam > tol

    return pred


def periodic_predicate(
    cfg: IntegratorConfig,
    inlet0: InletState = InletState(0.0, 0.0),
    n_transient: int = 20_000,
    max_period: int = 64,
    tol: float = 1e-9,
) -> Callable[[ReactorParams], bool]:
    """Predicate factory: the settled orbit repeats with period <= max_period."""

    def pred(p: ReactorParams) -> bool:
        series = simulate_orbit(inlet0, p, cfg, n_passes=3 * max_period, n_transient=n_transient)
        return detect_period(series, max_period=max_period, tol=tol) is not None

    return pred
