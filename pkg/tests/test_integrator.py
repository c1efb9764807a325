import numpy as np
import pytest

from recycle_reactor import (
    DomainError,
    InletState,
    IntegratorConfig,
    ReactorParams,
    integrate_pass,
    integrate_pass_with_tangent,
    kinetic_rate,
)

from conftest import paper_params, rk4_reference

DA0 = paper_params(-0.0335, da=0.0)  # reaction off: theta relaxes to theta_h exponentially


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(method="rk5")
    with pytest.raises(ValueError):
        IntegratorConfig(steps_per_pass=0)


def test_closed_form_relaxation_rk4():
    # with Da=0 the heat balance is linear: theta(1) = th + (t0-th)*exp(-(1-f)*delta)
    res = integrate_pass(InletState(0.2, 0.0), DA0, IntegratorConfig())
    exact = -0.0335 * (1.0 - np.exp(-1.5))
    assert res.outlet.alpha == 0.2
    assert abs(res.outlet.theta - exact) < 1e-10


def test_closed_form_relaxation_euler_fine():
    res = integrate_pass(
        InletState(0.2, 0.0), DA0, IntegratorConfig(method="euler", steps_per_pass=10**6)
    )
    exact = -0.0335 * (1.0 - np.exp(-1.5))
    assert abs(res.outlet.theta - exact) < 1e-6


def test_zero_rhs_identity():
    p = paper_params(-0.0335, da=0.0, delta=0.0)
    for method in ("euler", "rk4", "rk38"):
        res = integrate_pass(InletState(0.37, -0.02), p, IntegratorConfig(method=method))
        assert res.outlet.alpha == 0.37
        assert res.outlet.theta == -0.02


def test_cross_method_agreement():
    p = paper_params(-0.0335)
    inlet = InletState(0.0, 0.0)
    rk4 = integrate_pass(inlet, p, IntegratorConfig())
    euler = integrate_pass(inlet, p, IntegratorConfig(method="euler", steps_per_pass=10**6))
    assert abs(rk4.outlet.theta - euler.outlet.theta) < 1e-5
    rk38 = integrate_pass(inlet, p, IntegratorConfig(method="rk38"))
    assert abs(rk4.outlet.theta - rk38.outlet.theta) < 1e-9
    assert abs(rk4.outlet.alpha - rk38.outlet.alpha) < 1e-9


def test_matches_independent_python_rk4():
    p = paper_params(-0.0335)

    def f(y):
        phi = kinetic_rate(InletState(min(y[0], 1.0), y[1]), p)
        return np.array([phi, phi + p.cooling_rate * (p.theta_h - y[1])])

    ref = rk4_reference(f, [0.0, 0.0], 1000)
    res = integrate_pass(InletState(0.0, 0.0), p, IntegratorConfig())
    assert res.outlet.alpha == pytest.approx(ref[0], abs=1e-14)
    assert res.outlet.theta == pytest.approx(ref[1], abs=1e-14)


def test_determinism_bitwise():
    p = paper_params(-0.03299)
    inlet = InletState(0.1, 0.02)
    a = integrate_pass(inlet, p, IntegratorConfig())
    b = integrate_pass(inlet, p, IntegratorConfig())
    assert a.outlet.alpha == b.outlet.alpha
    assert a.outlet.theta == b.outlet.theta


def test_profile_endpoints_exact():
    p = paper_params(-0.0335)
    cfg = IntegratorConfig(record_profile=True, steps_per_pass=500)
    inlet = InletState(0.1, 0.01)
    res = integrate_pass(inlet, p, cfg)
    prof = res.profile
    assert prof.shape == (501, 3)
    assert prof[0, 1] == inlet.alpha and prof[0, 2] == inlet.theta
    assert prof[-1, 1] == res.outlet.alpha and prof[-1, 2] == res.outlet.theta
    assert prof[0, 0] == 0.0 and prof[-1, 0] == 1.0
    # profile recording must not change the arithmetic
    plain = integrate_pass(inlet, p, IntegratorConfig(steps_per_pass=500))
    assert plain.outlet.alpha == res.outlet.alpha
    assert plain.outlet.theta == res.outlet.theta


def test_profile_monotone_alpha():
    p = paper_params(-0.0335)
    res = integrate_pass(InletState(0.0, 0.0), p, IntegratorConfig(record_profile=True))
    alpha = res.profile[:, 1]
    assert (np.diff(alpha) >= 0).all()
    assert alpha[-1] <= 1.0


@pytest.mark.parametrize("a0", [0.0, 0.3, 0.9, 1.0])
def test_monotone_physics_outlet_alpha(a0):
    p = paper_params(-0.03299)
    res = integrate_pass(InletState(a0, 0.05), p, IntegratorConfig())
    assert a0 <= res.outlet.alpha <= 1.0


def test_order_of_accuracy():
    p = paper_params(-0.0335)
    inlet = InletState(0.0, 0.0)
    ref = integrate_pass(inlet, p, IntegratorConfig(method="rk4", steps_per_pass=10**6)).outlet
    steps = np.array([100, 200, 400, 800])
    for method, nominal in (("euler", 1.0), ("rk4", 4.0), ("rk38", 4.0)):
        errs = []
        for n in steps:
            out = integrate_pass(inlet, p, IntegratorConfig(method=method, steps_per_pass=int(n))).outlet
            errs.append(max(abs(out.alpha - ref.alpha), abs(out.theta - ref.theta)))
        slope = -np.polyfit(np.log(steps), np.log(errs), 1)[0]
        assert abs(slope - nominal) < 0.3, (method, slope, errs)


def test_tangent_constant_coefficient_oracle():
    res = integrate_pass_with_tangent(InletState(0.2, 0.0), DA0, IntegratorConfig())
    expected = np.array([[1.0, 0.0], [0.0, np.exp(-1.5)]])
    assert np.abs(res.tangent - expected).max() < 1e-10


def test_tangent_identity_with_zero_rhs():
    p = paper_params(-0.0335, da=0.0, delta=0.0)
    res = integrate_pass_with_tangent(InletState(0.2, 0.1), p, IntegratorConfig())
    assert np.array_equal(res.tangent, np.eye(2))


def test_tangent_matches_finite_difference():
    p = paper_params(-0.0335)
    cfg = IntegratorConfig()
    inlet = InletState(0.1, 0.01)
    res = integrate_pass_with_tangent(inlet, p, cfg)
    h = 1e-7
    fd = np.empty((2, 2))
    for j, (da, dt) in enumerate([(h, 0.0), (0.0, h)]):
        up = integrate_pass(InletState(inlet.alpha + da, inlet.theta + dt), p, cfg).outlet
        dn = integrate_pass(InletState(inlet.alpha - da, inlet.theta - dt), p, cfg).outlet
        fd[0, j] = (up.alpha - dn.alpha) / (2 * h)
        fd[1, j] = (up.theta - dn.theta) / (2 * h)
    rel = np.abs(res.tangent - fd) / np.maximum(np.abs(fd), 1e-3)
    assert rel.max() < 1e-4


def test_tangent_positive_determinant():
    p = paper_params(-0.03299)
    for inlet in [InletState(0.0, 0.0), InletState(0.2, 0.05), InletState(0.5, -0.01)]:
        res = integrate_pass_with_tangent(inlet, p, IntegratorConfig())
        assert np.isfinite(res.tangent).all()
        assert np.linalg.det(res.tangent) > 0


def test_domain_error_reports_step_index():
    # strong cooling toward theta_h < -1/beta drives theta through the pole
    p = ReactorParams(da=0.0, delta=40.0, f=0.0, theta_h=-0.8, beta=2.0, gamma=15.0, n=1.5)
    with pytest.raises(DomainError, match="step"):
        integrate_pass(InletState(0.0, -0.2), p, IntegratorConfig())
