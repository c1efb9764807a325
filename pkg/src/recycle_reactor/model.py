"""Dimensionless model of a non-adiabatic tubular reactor with mass recycle.

State is the pair (alpha, theta): conversion degree and dimensionless
temperature at the tube inlet.  One residence time corresponds to one unit
of dimensionless time, which turns the reactor-with-recycle into a
discrete-time map on inlet states (see `dynamics`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, SingularityError

KINETICS_FORMS = ("standard", "as_printed")

# alpha may stray past [0, 1] by integrator roundoff; overshoots up to this
# size are clamped to the boundary before rate evaluation.
ALPHA_ROUNDOFF = 1e-12


@dataclass(frozen=True)
class ReactorParams:
    """Dimensionless model constants.

    da       : Damkohler number (>= 0; 0 switches the reaction off)
    n        : reaction order (>= 0)
    beta     : dimensionless adiabatic temperature rise
    gamma    : dimensionless activation energy
    delta    : dimensionless heat-exchange coefficient (>= 0)
    f        : recycle coefficient, fraction of outlet returned (0 <= f < 1)
    theta_h  : dimensionless coolant temperature
    kinetics_form : "standard" uses (1-alpha)^n; "as_printed" keeps one
        extra (1-alpha) factor, i.e. effective exponent n+1.
    """

    da: float = 0.15
    n: float = 1.5
    beta: float = 2.0
    gamma: float = 15.0
    delta: float = 3.0
    f: float = 0.5
    theta_h: float = 0.0
    kinetics_form: str = "standard"

    def __post_init__(self):
        for name in ("da", "n", "beta", "gamma", "delta", "f", "theta_h"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        if self.da < 0:
            raise ValueError(f"da must be >= 0, got {self.da}")
        if self.n < 0:
            raise ValueError(f"n must be >= 0, got {self.n}")
        if self.delta < 0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")
        if not 0.0 <= self.f < 1.0:
            raise ValueError(f"f must satisfy 0 <= f < 1, got {self.f}")
        if self.kinetics_form not in KINETICS_FORMS:
            raise ValueError(
                f"kinetics_form must be one of {KINETICS_FORMS}, got {self.kinetics_form!r}"
            )

    @property
    def rate_exponent(self) -> float:
        """Effective exponent on (1 - alpha) in the rate law."""
        return self.n if self.kinetics_form == "standard" else self.n + 1.0

    @property
    def rate_prefactor(self) -> float:
        """(1 - f) * Da, the constant factor of the rate law."""
        return (1.0 - self.f) * self.da

    @property
    def cooling_rate(self) -> float:
        """(1 - f) * delta, coefficient of the heat-exchange term."""
        return (1.0 - self.f) * self.delta


@dataclass(frozen=True)
class InletState:
    """Conversion and dimensionless temperature at the tube inlet (zeta=0)."""

    alpha: float
    theta: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.theta)):
            raise ValueError(f"state must be finite, got ({self.alpha!r}, {self.theta!r})")

    def as_tuple(self) -> tuple[float, float]:
        return (self.alpha, self.theta)


def _clamped_alpha(alpha: float, frac_exponent: bool) -> float:
    """Clamp roundoff-level overshoot of [0, 1]; reject larger overshoot past 1
    when the rate exponent is non-integer."""
    if alpha > 1.0:
        if alpha - 1.0 <= ALPHA_ROUNDOFF:
            return 1.0
        if frac_exponent:
            raise DomainError(
                f"(1 - alpha) < 0 with non-integer rate exponent (alpha={alpha!r})"
            )
    elif alpha < 0.0 and alpha >= -ALPHA_ROUNDOFF:
        return 0.0
    return alpha


def kinetic_rate(state: InletState, p: ReactorParams) -> float:
    """Reaction rate phi(alpha, theta).

    phi = (1-f) * Da * (1-alpha)^n_eff * exp(gamma*beta*theta / (1+beta*theta))
    where n_eff is n ("standard") or n+1 ("as_printed").
    """
    ne = p.rate_exponent
    frac = not float(ne).is_integer()
    alpha = _clamped_alpha(state.alpha, frac)
    denom = 1.0 + p.beta * state.theta
    if denom <= 0.0:
        raise DomainError(f"1 + beta*theta must be > 0, got {denom!r}")
    return p.rate_prefactor * (1.0 - alpha) ** ne * math.exp(
        p.gamma * p.beta * state.theta / denom
    )


def kinetic_jacobian(state: InletState, p: ReactorParams) -> tuple[float, float]:
    """Partial derivatives (d(phi)/d(alpha), d(phi)/d(theta)).

    d(phi)/d(alpha) = -n_eff * prefactor * (1-alpha)^(n_eff-1) * exp(...)
    d(phi)/d(theta) =  phi * gamma*beta / (1+beta*theta)^2
    """
    ne = p.rate_exponent
    frac = not float(ne).is_integer()
    alpha = _clamped_alpha(state.alpha, frac)
    denom = 1.0 + p.beta * state.theta
    if denom <= 0.0:
        raise DomainError(f"1 + beta*theta must be > 0, got {denom!r}")
    one_m_a = 1.0 - alpha
    if one_m_a == 0.0 and ne < 1.0:
        raise SingularityError(
            "d(phi)/d(alpha) singular at alpha=1 with rate exponent < 1"
        )
    expo = math.exp(p.gamma * p.beta * state.theta / denom)
    phi = p.rate_prefactor * one_m_a**ne * expo
    if ne == 0.0:
        dphi_da = 0.0
    else:
        dphi_da = -ne * p.rate_prefactor * one_m_a ** (ne - 1.0) * expo
    dphi_dt = phi * p.gamma * p.beta / (denom * denom)
    return dphi_da, dphi_dt


def rhs(zeta: float, state: InletState, p: ReactorParams) -> tuple[float, float]:
    """Right-hand side of the characteristic ODE system.

    d(alpha)/d(tau) = phi
    d(theta)/d(tau) = phi + (1-f)*delta*(theta_h - theta)

    The system is autonomous; `zeta` exists only for integrator-interface
    uniformity.
    """
    phi = kinetic_rate(state, p)
    return phi, phi + p.cooling_rate * (p.theta_h - state.theta)
