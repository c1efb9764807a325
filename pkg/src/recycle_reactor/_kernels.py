"""Numba kernels: fixed-step integration of the characteristic ODE system.

Everything here works on plain float64 scalars and preallocated arrays so
the per-pass loops compile to tight machine code.  Error conditions are
returned as status codes (raising from jitted code would lose the pass /
step location); `raise_for_status` converts them to the package exceptions.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .errors import DegenerateTangentError, DomainError, SingularityError

OK = 0
ERR_TEMP_DOMAIN = 1
ERR_ALPHA_DOMAIN = 2
ERR_SINGULAR = 3
ERR_DEGENERATE = 4

EULER = 0
RK4 = 1
RK38 = 2
METHOD_IDS = {"euler": EULER, "rk4": RK4, "rk38": RK38}

_EPS_ALPHA = 1e-12  # roundoff clamp width at the alpha in {0, 1} boundaries


def model_args(p):
    """Flatten ReactorParams into the scalar tuple the kernels take."""
    ne = p.rate_exponent
    return (
        p.rate_prefactor,
        ne,
        p.beta,
        p.gamma,
        p.cooling_rate,
        p.theta_h,
        not float(ne).is_integer(),
    )


def raise_for_status(status, pass_index=None, step_index=None):
    if status == OK:
        return
    loc = ""
    if pass_index is not None:
        loc = f" at pass {pass_index}"
    if step_index is not None:
        loc += f", step {step_index}"
    if status == ERR_TEMP_DOMAIN:
        raise DomainError(f"1 + beta*theta <= 0{loc}")
    if status == ERR_ALPHA_DOMAIN:
        raise DomainError(f"(1 - alpha) < 0 with non-integer rate exponent{loc}")
    if status == ERR_SINGULAR:
        raise SingularityError(f"rate derivative singular at alpha=1{loc}")
    if status == ERR_DEGENERATE:
        raise DegenerateTangentError(f"tangent vector collapsed to zero norm{loc}")
    raise RuntimeError(f"unknown kernel status {status}{loc}")


@njit(inline="always")
def _pow_ne(om, ne):
    """om**ne with fast paths for the common half-integer orders."""
    if ne == 1.5:
        return om * np.sqrt(om)
    if ne == 2.5:
        return om * om * np.sqrt(om)
    if ne == 0.5:
        return np.sqrt(om)
    if ne == 1.0:
        return om
    return om**ne


@njit(inline="always")
def _rate(a, t, pref, ne, beta, gamma, frac):
    """Rate phi with boundary clamping; returns (phi, status)."""
    if a > 1.0:
        if a - 1.0 <= _EPS_ALPHA:
            a = 1.0
        elif frac:
            return 0.0, ERR_ALPHA_DOMAIN
    elif a < 0.0 and a >= -_EPS_ALPHA:
        a = 0.0
    den = 1.0 + beta * t
    if den <= 0.0:
        return 0.0, ERR_TEMP_DOMAIN
    if pref == 0.0:
        return 0.0, OK
    phi = pref * _pow_ne(1.0 - a, ne) * np.exp(gamma * beta * t / den)
    return phi, OK


@njit(inline="always")
def _rate_jac(a, t, pref, ne, beta, gamma, frac):
    """Rate and its partials; returns (phi, dphi_da, dphi_dt, status)."""
    if a > 1.0:
        if a - 1.0 <= _EPS_ALPHA:
            a = 1.0
        elif frac:
            return 0.0, 0.0, 0.0, ERR_ALPHA_DOMAIN
    elif a < 0.0 and a >= -_EPS_ALPHA:
        a = 0.0
    den = 1.0 + beta * t
    if den <= 0.0:
        return 0.0, 0.0, 0.0, ERR_TEMP_DOMAIN
    om = 1.0 - a
    if om == 0.0 and ne < 1.0:
        return 0.0, 0.0, 0.0, ERR_SINGULAR
    if pref == 0.0:
        return 0.0, 0.0, 0.0, OK
    expo = np.exp(gamma * beta * t / den)
    phi = pref * _pow_ne(om, ne) * expo
    if ne == 0.0:
        dphi_da = 0.0
    else:
        dphi_da = -ne * pref * _pow_ne(om, ne - 1.0) * expo
    dphi_dt = phi * gamma * beta / (den * den)
    return phi, dphi_da, dphi_dt, OK


@njit(inline="always")
def _step_state(a, t, h, pref, ne, beta, gamma, cool, th, frac, method):
    """One fixed step of the (alpha, theta) system; returns (a, t, status)."""
    p1, s = _rate(a, t, pref, ne, beta, gamma, frac)
    if s != OK:
        return a, t, s
    ka1 = p1
    kt1 = p1 + cool * (th - t)
    if method == EULER:
        return a + h * ka1, t + h * kt1, OK
    if method == RK4:
        p2, s = _rate(a + 0.5 * h * ka1, t + 0.5 * h * kt1, pref, ne, beta, gamma, frac)
        if s != OK:
            return a, t, s
        t2 = t + 0.5 * h * kt1
        ka2 = p2
        kt2 = p2 + cool * (th - t2)
        p3, s = _rate(a + 0.5 * h * ka2, t + 0.5 * h * kt2, pref, ne, beta, gamma, frac)
        if s != OK:
            return a, t, s
        t3 = t + 0.5 * h * kt2
        ka3 = p3
        kt3 = p3 + cool * (th - t3)
        p4, s = _rate(a + h * ka3, t + h * kt3, pref, ne, beta, gamma, frac)
        if s != OK:
            return a, t, s
        t4 = t + h * kt3
        ka4 = p4
        kt4 = p4 + cool * (th - t4)
        a_new = a + h / 6.0 * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4)
        t_new = t + h / 6.0 * (kt1 + 2.0 * kt2 + 2.0 * kt3 + kt4)
        return a_new, t_new, OK
    # RK38: the 3/8-rule fourth-order scheme
    p2, s = _rate(a + h / 3.0 * ka1, t + h / 3.0 * kt1, pref, ne, beta, gamma, frac)
    if s != OK:
        return a, t, s
    t2 = t + h / 3.0 * kt1
    ka2 = p2
    kt2 = p2 + cool * (th - t2)
    p3, s = _rate(
        a + h * (-ka1 / 3.0 + ka2), t + h * (-kt1 / 3.0 + kt2), pref, ne, beta, gamma, frac
    )
    if s != OK:
        return a, t, s
    t3 = t + h * (-kt1 / 3.0 + kt2)
    ka3 = p3
    kt3 = p3 + cool * (th - t3)
    p4, s = _rate(
        a + h * (ka1 - ka2 + ka3), t + h * (kt1 - kt2 + kt3), pref, ne, beta, gamma, frac
    )
    if s != OK:
        return a, t, s
    t4 = t + h * (kt1 - kt2 + kt3)
    ka4 = p4
    kt4 = p4 + cool * (th - t4)
    a_new = a + h / 8.0 * (ka1 + 3.0 * ka2 + 3.0 * ka3 + ka4)
    t_new = t + h / 8.0 * (kt1 + 3.0 * kt2 + 3.0 * kt3 + kt4)
    return a_new, t_new, OK


@njit(cache=True, nogil=True)
def pass_state(a, t, pref, ne, beta, gamma, cool, th, frac, method, steps):
    """Integrate one residence time; returns (a, t, status, step_index)."""
    h = 1.0 / steps
    for i in range(steps):
        a, t, s = _step_state(a, t, h, pref, ne, beta, gamma, cool, th, frac, method)
        if s != OK:
            return a, t, s, i
    return a, t, OK, steps


@njit(cache=True, nogil=True)
def pass_profile(a, t, pref, ne, beta, gamma, cool, th, frac, method, steps, out_a, out_t):
    """Like pass_state but records the state after every step (and at entry)."""
    out_a[0] = a
    out_t[0] = t
    h = 1.0 / steps
    for i in range(steps):
        a, t, s = _step_state(a, t, h, pref, ne, beta, gamma, cool, th, frac, method)
        if s != OK:
            return a, t, s, i
        out_a[i + 1] = a
        out_t[i + 1] = t
    return a, t, OK, steps


@njit(inline="always")
def _aug_rhs(y, out, pref, ne, beta, gamma, cool, th, frac):
    """RHS of state + 2x2 tangent system; y = (a, t, v11, v21, v12, v22)."""
    phi, pa, pt, s = _rate_jac(y[0], y[1], pref, ne, beta, gamma, frac)
    if s != OK:
        return s
    out[0] = phi
    out[1] = phi + cool * (th - y[1])
    out[2] = pa * y[2] + pt * y[3]
    out[3] = pa * y[2] + (pt - cool) * y[3]
    out[4] = pa * y[4] + pt * y[5]
    out[5] = pa * y[4] + (pt - cool) * y[5]
    return OK


@njit(cache=True, nogil=True)
def pass_tangent(a, t, v11, v21, v12, v22, pref, ne, beta, gamma, cool, th, frac, method, steps):
    """Integrate state and tangent columns over one residence time.

    Returns (a, t, v11, v21, v12, v22, status, step_index); the tangent is
    advanced with the same scheme as the state.
    """
    y = np.empty(6)
    y[0] = a
    y[1] = t
    y[2] = v11
    y[3] = v21
    y[4] = v12
    y[5] = v22
    k1 = np.empty(6)
    k2 = np.empty(6)
    k3 = np.empty(6)
    k4 = np.empty(6)
    ytmp = np.empty(6)
    h = 1.0 / steps
    for i in range(steps):
        s = _aug_rhs(y, k1, pref, ne, beta, gamma, cool, th, frac)
        if s != OK:
            return y[0], y[1], y[2], y[3], y[4], y[5], s, i
        if method == EULER:
            for j in range(6):
                y[j] += h * k1[j]
            continue
        if method == RK4:
            for j in range(6):
                ytmp[j] = y[j] + 0.5 * h * k1[j]
            s = _aug_rhs(ytmp, k2, pref, ne, beta, gamma, cool, th, frac)
            if s != OK:
                return y[0], y[1], y[2], y[3], y[4], y[5], s, i
            for j in range(6):
                ytmp[j] = y[j] + 0.5 * h * k2[j]
            s = _aug_rhs(ytmp, k3, pref, ne, beta, gamma, cool, th, frac)
            if s != OK:
                return y[0], y[1], y[2], y[3], y[4], y[5], s, i
            for j in range(6):
                ytmp[j] = y[j] + h * k3[j]
            s = _aug_rhs(ytmp, k4, pref, ne, beta, gamma, cool, th, frac)
            if s != OK:
                return y[0], y[1], y[2], y[3], y[4], y[5], s, i
            for j in range(6):
                y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
            continue
        # RK38
        for j in range(6):
            ytmp[j] = y[j] + h / 3.0 * k1[j]
        s = _aug_rhs(ytmp, k2, pref, ne, beta, gamma, cool, th, frac)
        if s != OK:
            return y[0], y[1], y[2], y[3], y[4], y[5], s, i
        for j in range(6):
            ytmp[j] = y[j] + h * (-k1[j] / 3.0 + k2[j])
        s = _aug_rhs(ytmp, k3, pref, ne, beta, gamma, cool, th, frac)
        if s != OK:
            return y[0], y[1], y[2], y[3], y[4], y[5], s, i
        for j in range(6):
            ytmp[j] = y[j] + h * (k1[j] - k2[j] + k3[j])
        s = _aug_rhs(ytmp, k4, pref, ne, beta, gamma, cool, th, frac)
        if s != OK:
            return y[0], y[1], y[2], y[3], y[4], y[5], s, i
        for j in range(6):
            y[j] += h / 8.0 * (k1[j] + 3.0 * k2[j] + 3.0 * k3[j] + k4[j])
    return y[0], y[1], y[2], y[3], y[4], y[5], OK, steps


@njit(cache=True, nogil=True)
def orbit(a, t, f, pref, ne, beta, gamma, cool, th, frac, method, steps, n_total, keep, out_a, out_t):
    """Iterate the recycle map n_total times, keeping the last `keep` outlets.

    Returns (a_inlet, t_inlet, status, pass_index, step_index) where the
    inlet is the state the *next* pass would start from.
    """
    k0 = n_total - keep
    for k in range(n_total):
        a, t, s, i = pass_state(a, t, pref, ne, beta, gamma, cool, th, frac, method, steps)
        if s != OK:
            return a, t, s, k, i
        if k >= k0:
            out_a[k - k0] = a
            out_t[k - k0] = t
        a *= f
        t *= f
    return a, t, OK, n_total, steps


@njit(cache=True, nogil=True)
def lyap_variational(a, t, f, pref, ne, beta, gamma, cool, th, frac, method, steps,
                     n_transient, n_passes, v1, v2, u_out):
    """Per-pass log growth of a tangent vector under the recycle map.

    The vector is advanced (and renormalized) through the transient as well,
    so it is aligned with the dominant direction before accumulation starts.
    u_out[k] = ln ||J_k v_k|| for the n_passes accumulation passes.
    Returns (a, t, v1, v2, status, pass_index, step_index).
    """
    for k in range(n_transient + n_passes):
        a, t, w1, w2, z1, z2, s, i = pass_tangent(
            a, t, v1, v2, 0.0, 0.0, pref, ne, beta, gamma, cool, th, frac, method, steps
        )
        if s != OK:
            return a, t, v1, v2, s, k, i
        a *= f
        t *= f
        w1 *= f
        w2 *= f
        g = np.sqrt(w1 * w1 + w2 * w2)
        if g == 0.0:
            return a, t, v1, v2, ERR_DEGENERATE, k, steps
        v1 = w1 / g
        v2 = w2 / g
        # flush a geometrically dying component before it reaches denormal
        # range, where the hardware slows down by orders of magnitude
        if -1e-280 < v1 < 1e-280:
            v1 = 0.0
        if -1e-280 < v2 < 1e-280:
            v2 = 0.0
        if k >= n_transient:
            u_out[k - n_transient] = np.log(g)
    return a, t, v1, v2, OK, n_transient + n_passes, steps


@njit(cache=True, nogil=True)
def lyap_benettin(a, t, f, pref, ne, beta, gamma, cool, th, frac, method, steps,
                  n_transient, n_passes, d0, u_out):
    """Two-trajectory log growth: shadow orbit renormalized to d0 each pass.

    u_out[k] = ln(d_k / d0) with d_k the euclidean inlet-state separation
    after pass k.  Returns (a, t, status, pass_index, step_index).
    """
    sq = np.sqrt(0.5)
    b1 = a + d0 * sq
    b2 = t + d0 * sq
    for k in range(n_transient + n_passes):
        a, t, s, i = pass_state(a, t, pref, ne, beta, gamma, cool, th, frac, method, steps)
        if s != OK:
            return a, t, s, k, i
        b1, b2, s, i = pass_state(b1, b2, pref, ne, beta, gamma, cool, th, frac, method, steps)
        if s != OK:
            return a, t, s, k, i
        a *= f
        t *= f
        b1 *= f
        b2 *= f
        dx = b1 - a
        dy = b2 - t
        d = np.sqrt(dx * dx + dy * dy)
        if d == 0.0:
            return a, t, ERR_DEGENERATE, k, steps
        if k >= n_transient:
            u_out[k - n_transient] = np.log(d / d0)
        scale = d0 / d
        nx = dx * scale
        ny = dy * scale
        # flush dying offset components before they reach denormal range
        if -1e-280 < nx < 1e-280:
            nx = 0.0
        if -1e-280 < ny < 1e-280:
            ny = 0.0
        b1 = a + nx
        b2 = t + ny
    return a, t, OK, n_transient + n_passes, steps


@njit(cache=True, nogil=True)
def divergence(a, t, f, pref, ne, beta, gamma, cool, th, frac, method, steps,
               eps, n_passes, out_lnd):
    """ln sup-norm separation of two orbits started eps apart in theta.

    Fills out_lnd until separation exceeds 0.1 (saturation) or n_passes;
    returns (n_filled, status, pass_index, step_index).
    """
    b1 = a
    b2 = t + eps
    m = 0
    for k in range(n_passes):
        a, t, s, i = pass_state(a, t, pref, ne, beta, gamma, cool, th, frac, method, steps)
        if s != OK:
            return m, s, k, i
        b1, b2, s, i = pass_state(b1, b2, pref, ne, beta, gamma, cool, th, frac, method, steps)
        if s != OK:
            return m, s, k, i
        a *= f
        t *= f
        b1 *= f
        b2 *= f
        d = max(abs(b1 - a), abs(b2 - t))
        if d < 1e-250:  # orbits have effectively merged in float64
            break
        out_lnd[m] = np.log(d)
        m += 1
        if d > 0.1:
            break
    return m, OK, n_passes, steps
