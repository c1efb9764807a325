"""The discrete-time recycle map and orbit-level operations.

One application of the map is: integrate one residence time, then mix the
outlet back into the inlet through the recycle boundary condition
(alpha, theta) -> f * (alpha, theta).  Sampling at integer tau makes the
reactor an exact two-dimensional discrete dynamical system.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from ._kernels import METHOD_IDS, model_args, raise_for_status
from .errors import InsufficientDataError, NoConvergenceError
from .integrator import IntegratorConfig, integrate_pass, integrate_pass_with_tangent
from .model import InletState, ReactorParams


@dataclass(frozen=True)
class OrbitSeries:
    """Outlet samples of consecutive passes.

    k[i] is the 1-based pass count since inlet0, so theta_out[i] is the
    outlet temperature at dimensionless time tau = k[i].  final_inlet is the
    state the next pass would start from (used for warm-started sweeps).
    """

    params: ReactorParams
    cfg: IntegratorConfig
    inlet0: InletState
    k: np.ndarray
    alpha_out: np.ndarray
    theta_out: np.ndarray
    transient_discarded: int
    final_inlet: InletState

    def __len__(self) -> int:
        return len(self.k)


def apply_recycle(outlet: InletState, p: ReactorParams) -> InletState:
    """Recycle boundary condition: the next inlet is f times the outlet."""
    return InletState(p.f * outlet.alpha, p.f * outlet.theta)


def recycle_step(
    inlet: InletState, p: ReactorParams, cfg: IntegratorConfig
) -> tuple[InletState, InletState]:
    """One application of the discrete map; returns (next_inlet, outlet)."""
    outlet = integrate_pass(inlet, p, cfg).outlet
    return apply_recycle(outlet, p), outlet


def simulate_orbit(
    inlet0: InletState,
    p: ReactorParams,
    cfg: IntegratorConfig,
    n_passes: int,
    n_transient: int = 0,
) -> OrbitSeries:
    """Run n_transient + n_passes recycle steps, keeping the last n_passes."""
    if n_passes < 1:
        raise ValueError(f"n_passes must be >= 1, got {n_passes}")
    if n_transient < 0:
        raise ValueError(f"n_transient must be >= 0, got {n_transient}")
    out_a = np.empty(n_passes)
    out_t = np.empty(n_passes)
    a, t, status, pass_idx, step_idx = _kernels.orbit(
        inlet0.alpha,
        inlet0.theta,
        p.f,
        *model_args(p),
        METHOD_IDS[cfg.method],
        cfg.steps_per_pass,
        n_transient + n_passes,
        n_passes,
        out_a,
        out_t,
    )
    raise_for_status(status, pass_index=pass_idx, step_index=step_idx)
    k = np.arange(n_transient + 1, n_transient + n_passes + 1)
    return OrbitSeries(
        params=p,
        cfg=cfg,
        inlet0=inlet0,
        k=k,
        alpha_out=out_a,
        theta_out=out_t,
        transient_discarded=n_transient,
        final_inlet=InletState(a, t),
    )


def detect_period(
    series: OrbitSeries, max_period: int = 2048, tol: float = 1e-9
) -> Optional[int]:
    """Smallest q <= max_period with ||x[k+q] - x[k]||_inf < tol over the
    last 2q samples; None if no q qualifies."""
    n = len(series)
    if n < 3 * max_period:
        raise InsufficientDataError(
            f"need >= {3 * max_period} samples for max_period={max_period}, have {n}"
        )
    a = series.alpha_out
    t = series.theta_out
    for q in range(1, max_period + 1):
        da = np.abs(a[n - q:] - a[n - 2 * q: n - q]).max()
        dt = np.abs(t[n - q:] - t[n - 2 * q: n - q]).max()
        if max(da, dt) < tol:
            return q
    return None


@dataclass(frozen=True)
class FixedPoint:
    state: InletState
    stable: bool
    spectral_radius: float
    iterations: int


def find_fixed_point(
    p: ReactorParams,
    cfg: IntegratorConfig,
    guess: InletState,
    tol: float = 1e-12,
    max_iter: int = 100,
) -> FixedPoint:
    """Damped Newton on the map residual g(s) = f*Phi(s) - s.

    The stability flag is spectral_radius(f * J_pass) < 1 at the root.
    """
    a, t = guess.alpha, guess.theta
    f = p.f

    def residual(a, t):
        res = integrate_pass_with_tangent(InletState(a, t), p, cfg)
        ga = f * res.outlet.alpha - a
        gt = f * res.outlet.theta - t
        return ga, gt, res.tangent

    ga, gt, tangent = residual(a, t)
    for it in range(1, max_iter + 1):
        if max(abs(ga), abs(gt)) < tol:
            jmap = f * tangent
            eigs = np.linalg.eigvals(jmap)
            rho = float(np.max(np.abs(eigs)))
            return FixedPoint(InletState(a, t), rho < 1.0, rho, it - 1)
        # Newton direction for (f*J_pass - I) d = -g
        j = f * tangent - np.eye(2)
        try:
            d = np.linalg.solve(j, -np.array([ga, gt]))
        except np.linalg.LinAlgError as exc:
            raise NoConvergenceError(f"singular Newton system: {exc}") from exc
        norm_old = max(abs(ga), abs(gt))
        lam = 1.0
        for _ in range(25):
            a_new = a + lam * d[0]
            t_new = t + lam * d[1]
            try:
                ga_new, gt_new, tan_new = residual(a_new, t_new)
            except Exception:
                lam *= 0.5
                continue
            if max(abs(ga_new), abs(gt_new)) < norm_old or lam < 1e-6:
                break
            lam *= 0.5
        else:
            raise NoConvergenceError("damped Newton could not reduce the residual")
        a, t, ga, gt, tangent = a_new, t_new, ga_new, gt_new, tan_new
    raise NoConvergenceError(f"no fixed point within {max_iter} iterations")
