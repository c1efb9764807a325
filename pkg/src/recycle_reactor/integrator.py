"""Fixed-step integration of one pass through the tube (tau in [0, 1])."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from ._kernels import METHOD_IDS, model_args, raise_for_status
from .model import InletState, ReactorParams


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step scheme selection.

    method: "euler", "rk4" (classic), or "rk38" (the 3/8-rule fourth-order
    Runge-Kutta, whose quadrature is Simpson's 3/8 rule).
    """

    method: str = "rk4"
    steps_per_pass: int = 1000
    record_profile: bool = False

    def __post_init__(self):
        if self.method not in METHOD_IDS:
            raise ValueError(f"method must be one of {tuple(METHOD_IDS)}, got {self.method!r}")
        if self.steps_per_pass < 1:
            raise ValueError(f"steps_per_pass must be >= 1, got {self.steps_per_pass}")


@dataclass(frozen=True)
class PassResult:
    """Outcome of integrating one residence time.

    profile, when recorded, is an (steps+1, 3) array of (zeta, alpha, theta)
    rows; tangent, when computed, is the 2x2 Jacobian of the outlet with
    respect to the inlet.
    """

    outlet: InletState
    profile: Optional[np.ndarray] = None
    tangent: Optional[np.ndarray] = None


def integrate_pass(inlet: InletState, p: ReactorParams, cfg: IntegratorConfig) -> PassResult:
    """Flow the inlet state over one residence time."""
    args = model_args(p)
    mid = METHOD_IDS[cfg.method]
    steps = cfg.steps_per_pass
    if cfg.record_profile:
        prof_a = np.empty(steps + 1)
        prof_t = np.empty(steps + 1)
        a, t, status, step = _kernels.pass_profile(
            inlet.alpha, inlet.theta, *args, mid, steps, prof_a, prof_t
        )
        raise_for_status(status, step_index=step)
        profile = np.column_stack((np.linspace(0.0, 1.0, steps + 1), prof_a, prof_t))
        return PassResult(outlet=InletState(a, t), profile=profile)
    a, t, status, step = _kernels.pass_state(inlet.alpha, inlet.theta, *args, mid, steps)
    raise_for_status(status, step_index=step)
    return PassResult(outlet=InletState(a, t))


def integrate_pass_with_tangent(
    inlet: InletState, p: ReactorParams, cfg: IntegratorConfig
) -> PassResult:
    """Flow the state and the 2x2 variational system (started at identity).

    The returned tangent J satisfies d(outlet) = J d(inlet) to the order of
    the scheme; the recycle map's per-pass Jacobian is f * J.
    """
    args = model_args(p)
    mid = METHOD_IDS[cfg.method]
    a, t, v11, v21, v12, v22, status, step = _kernels.pass_tangent(
        inlet.alpha, inlet.theta, 1.0, 0.0, 0.0, 1.0, *args, mid, cfg.steps_per_pass
    )
    raise_for_status(status, step_index=step)
    tangent = np.array([[v11, v12], [v21, v22]])
    return PassResult(outlet=InletState(a, t), tangent=tangent)
