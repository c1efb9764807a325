import numpy as np
import pytest

from recycle_reactor import (
    InletState,
    InsufficientDataError,
    IntegratorConfig,
    burst_delay_map,
    classify_regime,
    delay_map,
    detect_bursts,
    detect_transition,
    divergence_curve,
    lyapunov_benettin,
    lyapunov_variational,
    simulate_orbit,
    windowed_lyapunov,
)

from conftest import paper_params
from test_dynamics import make_series

DA0 = paper_params(-0.0335, da=0.0)
IC = InletState(0.0, 0.0)
LN_F = np.log(0.5)


@pytest.fixture(scope="module")
def cfg():
    return IntegratorConfig()


# -- Lyapunov ------------------------------------------------------------------


def test_variational_affine_oracle(cfg):
    est = lyapunov_variational(DA0, cfg, IC, n_transient=200, n_passes=10_000)
    assert est.lam == pytest.approx(LN_F, abs=1e-6)
    assert est.method == "variational"
    assert est.n_passes_used == 10_000
    assert est.convergence_trace[-1] == est.lam
    assert est.stderr < 1e-6


def test_variational_affine_oracle_insensitive_to_knobs(cfg):
    # the affine map's largest multiplier is f regardless of theta_h, delta, IC
    for p, ic in [
        (paper_params(-0.2, da=0.0, delta=1.0), InletState(0.3, 0.1)),
        (paper_params(0.1, da=0.0, delta=5.0), InletState(0.0, -0.02)),
    ]:
        est = lyapunov_variational(p, cfg, ic, n_transient=200, n_passes=5_000)
        assert est.lam == pytest.approx(LN_F, abs=1e-6)


def test_benettin_affine_oracle(cfg):
    est = lyapunov_benettin(DA0, cfg, IC, n_transient=200, n_passes=10_000, d0=1e-9)
    assert est.lam == pytest.approx(LN_F, abs=1e-6)
    assert est.method == "benettin"


def test_benettin_d0_validation(cfg):
    with pytest.raises(ValueError):
        lyapunov_benettin(DA0, cfg, IC, 100, 1000, d0=1e-3)
    with pytest.raises(ValueError):
        lyapunov_benettin(DA0, cfg, IC, 100, 1000, d0=1e-13)
    with pytest.raises(ValueError):
        lyapunov_variational(DA0, cfg, IC, 100, 50)


def test_lyapunov_sign_split_between_regimes(cfg):
    neg = lyapunov_variational(paper_params(-0.0335), cfg, IC, 2000, 5000)
    pos = lyapunov_variational(paper_params(-0.03299), cfg, IC, 2000, 5000)
    assert neg.lam < 0 < pos.lam


@pytest.mark.slow
def test_methods_agree_across_regimes(cfg):
    # both estimators converge to the same exponent on orbits of either sign
    for th in (-0.0335, -0.03299):
        p = paper_params(th)
        var = lyapunov_variational(p, cfg, IC, 2000, 20_000)
        ben = lyapunov_benettin(p, cfg, IC, 2000, 20_000, d0=1e-9)
        assert abs(var.lam - ben.lam) < 0.005, th


@pytest.mark.slow
def test_benettin_robust_to_d0(cfg):
    p = paper_params(-0.03299)
    a = lyapunov_benettin(p, cfg, IC, 2000, 20_000, d0=1e-7)
    b = lyapunov_benettin(p, cfg, IC, 2000, 20_000, d0=1e-10)
    assert abs(a.lam - b.lam) < 0.005


# -- divergence curve ----------------------------------------------------------


def test_divergence_affine_slope(cfg):
    # theta offsets contract by exactly f*exp(-(1-f)*delta) per pass; only the
    # early passes are checked because the separation soon reaches the ulp of
    # the state values and quantizes
    curve = divergence_curve(DA0, cfg, IC, epsilon=1e-6, n_passes=40)
    slopes = np.diff(curve[:6, 1])
    assert np.allclose(slopes, LN_F - 1.5, atol=1e-4)


def test_divergence_periodic_regime_contracts(cfg):
    curve = divergence_curve(paper_params(-0.0335), cfg, IC, epsilon=1e-8, n_passes=3000)
    # insensitivity to initial conditions: the separation collapses
    assert curve[-1, 1] < np.log(1e-11) or len(curve) < 3000


def test_divergence_chaotic_slope_matches_lyapunov(cfg):
    # a single pre-saturation window gives a finite-time exponent with large
    # scatter; pooling per-pass growth increments over many on-attractor
    # launches recovers the exponent
    p = paper_params(-0.03299)
    est = lyapunov_variational(p, cfg, IC, 2000, 20_000)
    start = simulate_orbit(IC, p, cfg, n_passes=1, n_transient=2000).final_inlet
    incs = []
    for _ in range(30):
        curve = divergence_curve(p, cfg, start, epsilon=1e-8, n_passes=4000)
        lnd = curve[:, 1]
        sel = (lnd > np.log(3e-8)) & (lnd < np.log(1e-3))
        incs.extend(np.diff(lnd[sel]))
        start = simulate_orbit(start, p, cfg, n_passes=1, n_transient=499).final_inlet
    assert len(incs) > 500
    assert np.mean(incs) == pytest.approx(est.lam, rel=0.3)


def test_divergence_requires_positive_epsilon(cfg):
    with pytest.raises(ValueError):
        divergence_curve(DA0, cfg, IC, epsilon=0.0, n_passes=10)


# -- burst detection -----------------------------------------------------------


def test_bursts_synthetic_spike_train():
    theta = np.zeros(1000)
    theta[[100, 300, 500]] = 1.0
    events = detect_bursts(make_series(theta, k0=1))
    assert list(events.k_peak) == [101, 301, 501]
    assert list(events.intervals) == [200, 200]
    assert events.cv == 0.0
    assert list(events.width) == [1, 1, 1]
    assert (events.peak_theta == 1.0).all()


def test_bursts_merge_nearby_runs():
    theta = np.zeros(1000)
    theta[100:103] = [1.0, 0.8, 0.9]
    theta[105] = 0.7  # gap of 2 below threshold: merges
    theta[400] = 1.0
    events = detect_bursts(make_series(theta, k0=1), threshold=0.5)
    assert len(events) == 2
    assert list(events.k_peak) == [101, 401]
    assert list(events.width) == [4, 1]


def test_bursts_gap_of_five_separates():
    theta = np.zeros(1000)
    theta[100] = 1.0
    theta[105] = 1.0  # separation 5: distinct events
    events = detect_bursts(make_series(theta, k0=1), threshold=0.5)
    assert len(events) == 2


def test_bursts_empty_result_is_not_an_error():
    events = detect_bursts(make_series(np.zeros(1000)), threshold=1.0)
    assert len(events) == 0
    assert np.isnan(events.cv)


def test_bursts_require_min_length():
    with pytest.raises(InsufficientDataError):
        detect_bursts(make_series(np.zeros(999)))


def test_bursts_precision_recall_on_noisy_spikes():
    rng = np.random.default_rng(7)
    n = 5000
    theta = rng.normal(0.0, 0.03, n)
    truth = np.arange(200, n - 100, 137)  # spacing >> 10
    theta[truth] += 1.0  # SNR >> 10
    events = detect_bursts(make_series(theta, k0=1))
    detected = set(int(k) - 1 for k in events.k_peak)
    assert detected == set(int(i) for i in truth)  # recall = precision = 1


def test_burst_auto_threshold_is_median_plus_6mad():
    rng = np.random.default_rng(3)
    theta = rng.normal(0.2, 0.05, 2000)
    events = detect_bursts(make_series(theta))
    med = np.median(theta)
    mad = np.median(np.abs(theta - med))
    assert events.threshold_used == pytest.approx(med + 6 * mad, rel=1e-12)


# -- delay maps ------------------------------------------------------------------


def test_burst_delay_map_pairs():
    theta = np.zeros(1000)
    theta[100] = 0.5
    theta[300] = 0.7
    theta[500] = 0.6
    events = detect_bursts(make_series(theta), threshold=0.25)
    pairs = burst_delay_map(events)
    assert pairs.tolist() == [[0.5, 0.7], [0.7, 0.6]]


def test_burst_delay_map_needs_two_events():
    theta = np.zeros(1000)
    theta[100] = 1.0
    events = detect_bursts(make_series(theta), threshold=0.5)
    with pytest.raises(InsufficientDataError):
        burst_delay_map(events)


def test_delay_map_periodic_collapses_to_q_points(cfg):
    series = simulate_orbit(IC, paper_params(-0.0335), cfg, n_passes=400, n_transient=5000)
    pairs = delay_map(series)
    distinct = np.unique(np.round(pairs, 6), axis=0)
    assert len(distinct) <= 8


# -- windowed lyapunov / transition ---------------------------------------------


def test_windowed_affine_every_window_ln_f(cfg):
    rows = windowed_lyapunov(DA0, cfg, IC, window=500, stride=500, n_passes=4000)
    assert rows.shape == (8, 2)
    assert list(rows[:, 0]) == [0, 500, 1000, 1500, 2000, 2500, 3000, 3500]
    assert np.abs(rows[:, 1] - LN_F).max() < 1e-6


def test_windowed_periodic_regime_nonpositive(cfg):
    rows = windowed_lyapunov(paper_params(-0.0335), cfg, IC, 500, 500, 6000)
    assert (rows[:, 1] <= 0).all()


def test_windowed_validation(cfg):
    with pytest.raises(ValueError):
        windowed_lyapunov(DA0, cfg, IC, window=100, stride=100, n_passes=1000)
    with pytest.raises(InsufficientDataError):
        windowed_lyapunov(DA0, cfg, IC, window=500, stride=500, n_passes=400)


def test_detect_transition_all_positive_is_none():
    rows = np.column_stack((np.arange(6) * 500.0, np.full(6, 0.1)))
    assert detect_transition(rows) is None


def test_detect_transition_synthetic_split():
    lams = np.array([0.05, 0.06, 0.04, -0.01, -0.02, -0.005])
    rows = np.column_stack((np.arange(6) * 1000.0, lams))
    assert detect_transition(rows) == 3000


def test_detect_transition_needs_four_windows():
    with pytest.raises(InsufficientDataError):
        detect_transition(np.column_stack((np.arange(3) * 500.0, np.zeros(3))))


def test_detect_transition_mostly_positive_head_accepted():
    lams = np.array([0.05, -0.01, 0.04, 0.03, -0.02, -0.005])  # 75% of head positive
    rows = np.column_stack((np.arange(6) * 500.0, lams))
    assert detect_transition(rows) == 2000


def test_detect_transition_scattered_positives_rejected():
    lams = np.array([0.05, -0.01, 0.04, -0.03, -0.02, 0.005, -1.0, -1.0])
    rows = np.column_stack((np.arange(8) * 500.0, lams))
    assert detect_transition(rows) is None


def test_detect_transition_invariant_to_appended_tail():
    lams = np.array([0.05, 0.06, 0.04, -0.01, -0.02, -0.005])
    rows = np.column_stack((np.arange(6) * 1000.0, lams))
    t0 = detect_transition(rows)
    longer = np.column_stack((np.arange(10) * 1000.0, np.concatenate([lams, [-0.01] * 4])))
    assert detect_transition(longer) == t0


# -- classification --------------------------------------------------------------


def test_classify_affine_is_steady(cfg):
    report = classify_regime(DA0, cfg, IC, budget=10_000)
    assert report.label == "steady"
    assert report.period == 1
    assert report.lambda_full.lam == pytest.approx(LN_F, abs=1e-3)


def test_classify_periodic_window(cfg):
    report = classify_regime(paper_params(-0.0335), cfg, IC, budget=10_000)
    assert report.label == "periodic"
    assert report.period == 8
    assert report.lambda_full.lam < 0
    assert report.transition_pass is None


def test_classify_chaotic_intermittent(cfg):
    report = classify_regime(paper_params(-0.03299), cfg, IC, budget=12_000)
    assert report.label == "intermittent_irregular"
    assert report.lambda_full.lam > report.lambda_pos_tol
    assert report.period is None
    assert len(report.bursts) >= 5
    assert report.bursts.cv >= 0.1


def test_classify_budget_validation(cfg):
    with pytest.raises(ValueError):
        classify_regime(DA0, cfg, IC, budget=5000)


@pytest.mark.slow
def test_classify_periodic_basin_never_chaotic(cfg):
    rng = np.random.default_rng(11)
    p = paper_params(-0.0335)
    for _ in range(20):
        ic = InletState(rng.uniform(0.0, 0.5), rng.uniform(-0.02, 0.08))
        report = classify_regime(p, cfg, ic, budget=10_000)
        assert report.label == "periodic", (ic, report.label)
