"""Discrete-time dynamics of a tubular reactor with mass recycle.

The reactor is solved along characteristics over one residence time and
closed through the recycle boundary condition, giving an exact 2-D map on
inlet states.  The package provides orbit simulation, Lyapunov exponents,
burst/intermittency statistics, regime classification, and parameter sweeps.
"""

from .analysis import (
    BurstEventSet,
    LyapunovEstimate,
    RegimeReport,
    burst_delay_map,
    classify_regime,
    delay_map,
    detect_bursts,
    detect_transition,
    divergence_curve,
    lyapunov_benettin,
    lyapunov_variational,
    windowed_lyapunov,
)
from .dynamics import (
    FixedPoint,
    OrbitSeries,
    apply_recycle,
    detect_period,
    find_fixed_point,
    recycle_step,
    simulate_orbit,
)
from .errors import (
    DegenerateTangentError,
    DomainError,
    InsufficientDataError,
    NoConvergenceError,
    ReactorError,
    SamePredicateError,
    SingularityError,
)
from .integrator import IntegratorConfig, PassResult, integrate_pass, integrate_pass_with_tangent
from .model import InletState, ReactorParams, kinetic_jacobian, kinetic_rate, rhs
from .sweep import (
    BracketResult,
    SweepPlan,
    SweepResult,
    bracket_regime_boundary,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "BracketResult",
    "BurstEventSet",
    "DegenerateTangentError",
    "DomainError",
    "FixedPoint",
    "InletState",
    "InsufficientDataError",
    "IntegratorConfig",
    "LyapunovEstimate",
    "NoConvergenceError",
    "OrbitSeries",
    "PassResult",
    "ReactorError",
    "ReactorParams",
    "RegimeReport",
    "SamePredicateError",
    "SingularityError",
    "SweepPlan",
    "SweepResult",
    "apply_recycle",
    "burst_delay_map",
    "bracket_regime_boundary",
    "classify_regime",
    "delay_map",
    "detect_bursts",
    "detect_period",
    "detect_transition",
    "divergence_curve",
    "find_fixed_point",
    "integrate_pass",
    "integrate_pass_with_tangent",
    "kinetic_jacobian",
    "kinetic_rate",
    "lyapunov_benettin",
    "lyapunov_variational",
    "recycle_step",
    "rhs",
    "run_sweep",
    "simulate_orbit",
    "windowed_lyapunov",
]
