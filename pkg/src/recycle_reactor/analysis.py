"""Chaos diagnostics: Lyapunov exponents, bursts, delay maps, regime labels."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from ._kernels import METHOD_IDS, model_args, raise_for_status
from .dynamics import OrbitSeries, detect_period, simulate_orbit
from .errors import InsufficientDataError
from .integrator import IntegratorConfig
from .model import InletState, ReactorParams

# Interval regularity cutoff: bursts with cv below this count as
# "(practically) regular" intermittency.
CV_REGULAR = 0.1

# Windowed-Lyapunov defaults matched to the transient-chaos time scale.
DEFAULT_WINDOW = 500
DEFAULT_STRIDE = 500

# Minimum number of burst events before an orbit is called intermittent.
MIN_BURSTS_FOR_INTERMITTENCY = 5


@dataclass(frozen=True)
class LyapunovEstimate:
    """Largest Lyapunov exponent of the 2-D recycle map, per unit time.

    One pass equals one dimensionless time unit, so per-pass and per-time
    rates coincide.  convergence_trace[k] is the running estimate after
    k+1 accumulation passes; lam is its final entry.  stderr is the
    standard error of the per-pass log-growth over the trace tail.
    """

    lam: float
    n_passes_used: int
    method: str
    convergence_trace: np.ndarray
    stderr: float


def _estimate_from_log_growth(u: np.ndarray, method: str) -> LyapunovEstimate:
    trace = np.cumsum(u) / np.arange(1, len(u) + 1)
    tail = u[len(u) // 2:]
    stderr = float(tail.std() / np.sqrt(len(tail))) if len(tail) else float("nan")
    return LyapunovEstimate(
        lam=float(trace[-1]),
        n_passes_used=len(u),
        method=method,
        convergence_trace=trace,
        stderr=stderr,
    )


def _log_growth_variational(p, cfg, inlet0, n_transient, n_passes, v0):
    u = np.empty(n_passes)
    a, t, v1, v2, status, pass_idx, step_idx = _kernels.lyap_variational(
        inlet0.alpha,
        inlet0.theta,
        p.f,
        *model_args(p),
        METHOD_IDS[cfg.method],
        cfg.steps_per_pass,
        n_transient,
        n_passes,
        v0[0],
        v0[1],
        u,
    )
    raise_for_status(status, pass_index=pass_idx, step_index=step_idx)
    return u


def lyapunov_variational(
    p: ReactorParams,
    cfg: IntegratorConfig,
    inlet0: InletState,
    n_transient: int,
    n_passes: int,
) -> LyapunovEstimate:
    """Largest exponent from the per-pass tangent map J_k = f * J_pass.

    The tangent vector starts at (1,1)/sqrt(2) and is advanced through the
    transient (renormalized, not accumulated) so it aligns with the dominant
    direction before averaging begins.
    """
    if n_passes < 100:
        raise ValueError(f"n_passes must be >= 100, got {n_passes}")
    sq = np.sqrt(0.5)
    u = _log_growth_variational(p, cfg, inlet0, n_transient, n_passes, (sq, sq))
    return _estimate_from_log_growth(u, "variational")


def lyapunov_benettin(
    p: ReactorParams,
    cfg: IntegratorConfig,
    inlet0: InletState,
    n_transient: int,
    n_passes: int,
    d0: float = 1e-9,
) -> LyapunovEstimate:
    """Two-trajectory estimate: shadow orbit renormalized to separation d0
    along the current offset direction after every pass."""
    if n_passes < 100:
        raise ValueError(f"n_passes must be >= 100, got {n_passes}")
    if not 1e-12 <= d0 <= 1e-6:
        raise ValueError(f"d0 must lie in [1e-12, 1e-6], got {d0}")
    u = np.empty(n_passes)
    a, t, status, pass_idx, step_idx = _kernels.lyap_benettin(
        inlet0.alpha,
        inlet0.theta,
        p.f,
        *model_args(p),
        METHOD_IDS[cfg.method],
        cfg.steps_per_pass,
        n_transient,
        n_passes,
        d0,
        u,
    )
    raise_for_status(status, pass_index=pass_idx, step_index=step_idx)
    return _estimate_from_log_growth(u, "benettin")


def divergence_curve(
    p: ReactorParams,
    cfg: IntegratorConfig,
    inlet0: InletState,
    epsilon: float,
    n_passes: int,
) -> np.ndarray:
    """ln separation of two orbits started epsilon apart in theta.

    Returns an (m, 2) array of (pass index, ln sup-norm distance), truncated
    at saturation (distance > 0.1).
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    out = np.empty(n_passes)
    m, status, pass_idx, step_idx = _kernels.divergence(
        inlet0.alpha,
        inlet0.theta,
        p.f,
        *model_args(p),
        METHOD_IDS[cfg.method],
        cfg.steps_per_pass,
        epsilon,
        n_passes,
        out,
    )
    raise_for_status(status, pass_index=pass_idx, step_index=step_idx)
    return np.column_stack((np.arange(1, m + 1, dtype=float), out[:m]))


@dataclass(frozen=True)
class BurstEventSet:
    """Bursts of an orbit: maximal runs of samples above a threshold.

    Runs separated by fewer than 5 passes are merged; each event is reported
    at its peak.  intervals are the gaps between consecutive peaks and cv is
    their coefficient of variation (NaN with fewer than two intervals).
    """

    threshold_used: float
    k_peak: np.ndarray
    peak_theta: np.ndarray
    width: np.ndarray
    intervals: np.ndarray
    cv: float

    def __len__(self) -> int:
        return len(self.k_peak)


def detect_bursts(series: OrbitSeries, threshold: Optional[float] = None) -> BurstEventSet:
    """Find bursts of the outlet-temperature series.

    Without an explicit threshold, median + 6*MAD of the whole series is
    used (MAD = median absolute deviation, unscaled).
    """
    n = len(series)
    if n < 1000:
        raise InsufficientDataError(f"need >= 1000 samples for burst detection, have {n}")
    theta = series.theta_out
    if threshold is None:
        med = float(np.median(theta))
        mad = float(np.median(np.abs(theta - med)))
        threshold = med + 6.0 * mad
    idx = np.flatnonzero(theta > threshold)
    if len(idx) == 0:
        empty_i = np.empty(0, dtype=np.int64)
        return BurstEventSet(
            threshold_used=float(threshold),
            k_peak=empty_i,
            peak_theta=np.empty(0),
            width=empty_i,
            intervals=empty_i,
            cv=float("nan"),
        )
    # merge runs separated by < 5 passes
    groups = np.split(idx, np.flatnonzero(np.diff(idx) >= 5) + 1)
    peak_pos = np.array([g[np.argmax(theta[g])] for g in groups])
    widths = np.array([len(g) for g in groups])
    k_peak = series.k[peak_pos]
    intervals = np.diff(k_peak)
    cv = float(intervals.std() / intervals.mean()) if len(intervals) >= 2 else float("nan")
    return BurstEventSet(
        threshold_used=float(threshold),
        k_peak=k_peak,
        peak_theta=theta[peak_pos],
        width=widths,
        intervals=intervals,
        cv=cv,
    )


def burst_delay_map(events: BurstEventSet) -> np.ndarray:
    """Consecutive-peak pairs (peak_theta_k, peak_theta_{k+1}) for plotting."""
    if len(events) < 2:
        raise InsufficientDataError(f"need >= 2 burst events, have {len(events)}")
    return np.column_stack((events.peak_theta[:-1], events.peak_theta[1:]))


def delay_map(series: OrbitSeries) -> np.ndarray:
    """General delay map (theta_k, theta_{k+1}) over all outlet samples."""
    t = series.theta_out
    if len(t) < 2:
        raise InsufficientDataError("need >= 2 samples for a delay map")
    return np.column_stack((t[:-1], t[1:]))


def windowed_lyapunov(
    p: ReactorParams,
    cfg: IntegratorConfig,
    inlet0: InletState,
    window: int,
    stride: int,
    n_passes: int,
) -> np.ndarray:
    """Finite-time exponents on windows of one orbit.

    A single tangent evolution runs along the whole orbit (renormalized each
    pass); each window's exponent averages only its own per-pass log-growth
    factors, so the accumulation restarts per window while the direction
    carries over.  Returns an (m, 2) array of (window start pass, lambda).
    """
    if window < 500:
        raise ValueError(f"window must be >= 500, got {window}")
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    if n_passes < window:
        raise InsufficientDataError(f"n_passes={n_passes} shorter than window={window}")
    u = _log_growth_variational(p, cfg, inlet0, 0, n_passes, (1.0, 0.0))
    return _windows_from_log_growth(u, window, stride)


def _windows_from_log_growth(u: np.ndarray, window: int, stride: int) -> np.ndarray:
    starts = np.arange(0, len(u) - window + 1, stride)
    lams = np.array([u[s: s + window].mean() for s in starts])
    return np.column_stack((starts.astype(float), lams))


def detect_transition(lambda_windows: np.ndarray) -> Optional[int]:
    """Earliest window boundary with all later window-lambdas <= 0 and at
    least 75% of earlier ones > 0; None if no such split exists."""
    if len(lambda_windows) < 4:
        raise InsufficientDataError(
            f"need >= 4 windows, have {len(lambda_windows)}"
        )
    starts = lambda_windows[:, 0]
    lams = lambda_windows[:, 1]
    pos = lams > 0
    for b in range(1, len(lams)):
        if not pos[b:].any() and pos[:b].mean() >= 0.75:
            return int(starts[b])
    return None


@dataclass(frozen=True)
class RegimeReport:
    """Regime classification of one orbit.

    label is one of: steady, periodic, chaotic, intermittent_regular,
    intermittent_irregular, transient_chaotic, inconclusive.  period is set
    for periodic labels; transition_pass for transient_chaotic.
    """

    label: str
    period: Optional[int]
    lambda_full: LyapunovEstimate
    lambda_windows: np.ndarray
    transition_pass: Optional[int]
    bursts: BurstEventSet
    lambda_pos_tol: float


def classify_regime(
    p: ReactorParams,
    cfg: IntegratorConfig,
    inlet0: InletState,
    budget: int,
) -> RegimeReport:
    """Label the orbit started at inlet0 using `budget` passes.

    Decision order: a windowed-lambda sign split with a periodic tail means
    transient chaos; otherwise a detected period means periodic (steady for
    period 1); otherwise lambda above the noise tolerance means chaos,
    refined to regular/irregular intermittency when bursts are present.
    """
    if budget < 10_000:
        raise ValueError(f"budget must be >= 1e4 passes, got {budget}")
    series = simulate_orbit(inlet0, p, cfg, n_passes=budget, n_transient=0)
    u = _log_growth_variational(p, cfg, inlet0, 0, budget, (1.0, 0.0))
    lam_full = _estimate_from_log_growth(u, "variational")
    windows = _windows_from_log_growth(u, DEFAULT_WINDOW, DEFAULT_STRIDE)
    transition = detect_transition(windows) if len(windows) >= 4 else None
    period = detect_period(series, max_period=min(2048, budget // 3))
    bursts = detect_bursts(series)
    tol = 3.0 * lam_full.stderr

    if transition is not None and transition >= 2 * DEFAULT_WINDOW and period is not None:
        label = "transient_chaotic"
    elif period is not None:
        label = "steady" if period == 1 else "periodic"
        transition = None
    elif lam_full.lam > tol:
        if len(bursts) >= MIN_BURSTS_FOR_INTERMITTENCY:
            label = (
                "intermittent_regular" if bursts.cv < CV_REGULAR else "intermittent_irregular"
            )
        else:
            label = "chaotic"
        transition = None
    else:
        label = "inconclusive"
        transition = None

    return RegimeReport(
        label=label,
        period=period,
        lambda_full=lam_full,
        lambda_windows=windows,
        transition_pass=transition,
        bursts=bursts,
        lambda_pos_tol=tol,
    )
