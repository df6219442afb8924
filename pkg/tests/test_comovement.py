
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from marketmode.comovement import (
    PER_DAY,
    SLIDING,
    EigenSolverError,
    WindowScheme,
    acf,
    ccf,
    correlation_matrix,
    market_mode,
    market_mode_series,
    max_eigenpair,
    normalize_window,
    power_iteration,
    rolling_eigenvalues,
    snapshot,
)

from conftest import make_returns


def window_of(rows):
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    return normalize_window(make_returns(rows[:, None, :]), slice(None))


def test_normalize_hand_example():
    win = window_of([[1.0, 2.0, 3.0]])
    np.testing.assert_allclose(win.G, [[-1.0, 0.0, 1.0]], atol=1e-15)
    assert win.sigma[0] == pytest.approx(1.0)


def test_normalize_is_idempotent(rng):
    x = rng.standard_normal((4, 50))
    once = window_of(x).G
    np.testing.assert_allclose(window_of(once).G, once, atol=1e-12)
    np.testing.assert_allclose(once.mean(axis=1), 0, atol=1e-10)
    np.testing.assert_allclose(once.std(axis=1, ddof=1), 1, atol=1e-10)


def test_constant_row_is_dropped(rng):
    x = rng.standard_normal((3, 20))
    x[1] = 0.5
    with pytest.warns(RuntimeWarning, match="dropped 1"):
        win = window_of(x)
    assert win.G.shape == (2, 20)
    assert win.dropped == ["S1"]


def test_window_needs_two_columns():
    with pytest.raises(ValueError):
        window_of([[1.0]])


def test_correlation_identical_rows_and_pair(rng):
    r = rng.standard_normal(30)
    np.testing.assert_allclose(correlation_matrix(window_of([r, r, r])), np.ones((3, 3)), atol=1e-12)
    a, b = rng.standard_normal((2, 200))
    C = correlation_matrix(window_of([a, b]))
    assert C[0, 1] == pytest.approx(np.corrcoef(a, b)[0, 1], abs=1e-12)
    np.testing.assert_allclose(np.diag(C), 1.0, atol=1e-10)
    assert np.array_equal(C, C.T)


def test_noise_correlations_have_1_over_sqrt_T_spread(rng):
    N, T = 213, 242
    C = correlation_matrix(window_of(rng.standard_normal((N, T))))
    off = C[np.triu_indices(N, 1)]
    # exact sd of a null sample correlation is 1/sqrt(T - 1)
    assert np.std(off) == pytest.approx(1 / np.sqrt(T - 1), rel=0.05)


def test_max_eigenpair_analytic_cases():
    lam, v = max_eigenpair(np.eye(5))
    assert lam == pytest.approx(1.0)
    assert np.linalg.norm(np.eye(5) @ v - v) < 1e-12
    N = 7
    lam, v = max_eigenpair(np.ones((N, N)))
    assert lam == pytest.approx(N, abs=1e-10)
    np.testing.assert_allclose(v, 1 / np.sqrt(N), atol=1e-10)
    rho = 0.3
    lam, _ = max_eigenpair(np.array([[1, rho], [rho, 1]]))
    assert lam == pytest.approx(1 + rho, abs=1e-12)
    lam, v = max_eigenpair(np.array([[1, -rho], [-rho, 1]]))
    # zero mean weight: largest-magnitude weight made positive
    assert v[np.argmax(np.abs(v))] > 0


def test_power_iteration_matches_dense(rng):
    G = rng.standard_normal((40, 300)) + 0.5 * rng.standard_normal(300)
    C = correlation_matrix(window_of(G))
    lam_d, v_d = max_eigenpair(C, method="dense")
    lam_p, v_p = max_eigenpair(C, method="power")
    assert lam_p == pytest.approx(lam_d, rel=1e-12)
    np.testing.assert_allclose(v_p, v_d, atol=1e-8)
    assert np.linalg.norm(C @ v_p - lam_p * v_p) <= 1e-10 * np.linalg.norm(C)


def test_power_iteration_reports_residual_on_failure(rng):
    C = correlation_matrix(window_of(rng.standard_normal((10, 30))))
    with pytest.raises(EigenSolverError) as exc:
        power_iteration(C, max_iter=1)
    assert exc.value.residual > 0
    with pytest.raises(ValueError):
        max_eigenpair(C, method="lanczos")


# ---------------------------------------------------------------------------
# PCA invariants


@st.composite
def return_windows(draw):
    N = draw(st.integers(2, 12))
    T = draw(st.integers(3, 60))
    seed = draw(st.integers(0, 2**32 - 1))
    common = draw(st.floats(0, 3))
    r = np.random.default_rng(seed)
    return r.standard_normal((N, T)) + common * r.standard_normal(T)


@settings(max_examples=60, deadline=None)
@given(return_windows())
def test_snapshot_invariants(x):
    win = window_of(x)
    snap = snapshot(win)
    N = win.G.shape[0]
    assert 1 - 1e-9 <= snap.max_eigenvalue <= N + 1e-9
    assert abs(snap.eigenvalues.sum() - N) <= 1e-6 * N
    assert snap.eigenvalues.min() >= -1e-8
    assert snap.residual <= 1e-8 * np.linalg.norm(correlation_matrix(win), 2)
    assert np.linalg.norm(snap.market_mode_weights) == pytest.approx(1.0)
    assert snap.market_mode_weights.mean() >= 0


@settings(max_examples=40, deadline=None)
@given(return_windows(), st.lists(st.floats(0.01, 100), min_size=12, max_size=12))
def test_scale_invariance(x, scales):
    scaled = x * np.array(scales[: len(x)])[:, None]
    a, b = snapshot(window_of(x)), snapshot(window_of(scaled))
    np.testing.assert_allclose(correlation_matrix(window_of(scaled)), correlation_matrix(window_of(x)), atol=1e-10)
    assert b.max_eigenvalue == pytest.approx(a.max_eigenvalue, abs=1e-10)
    gap = a.eigenvalues[0] - a.eigenvalues[1]
    # the sign convention is ambiguous when the mean weight vanishes
    if gap > 1e-3 and abs(a.market_mode_weights.mean()) > 1e-6:
        np.testing.assert_allclose(b.market_mode_weights, a.market_mode_weights, atol=1e-10 / gap + 1e-12)


@settings(max_examples=40, deadline=None)
@given(return_windows(), st.randoms(use_true_random=False))
def test_permutation_equivariance(x, rnd):
    perm = list(range(len(x)))
    rnd.shuffle(perm)
    a, b = snapshot(window_of(x)), snapshot(window_of(x[perm]))
    assert b.max_eigenvalue == pytest.approx(a.max_eigenvalue, abs=1e-10)
    if a.eigenvalues[0] - a.eigenvalues[1] > 1e-3 and abs(a.market_mode_weights.mean()) > 1e-6:
        np.testing.assert_allclose(b.market_mode_weights, a.market_mode_weights[perm], atol=1e-8)


# ---------------------------------------------------------------------------
# rolling windows and the market mode


def test_window_counts(rng):
    one_day = make_returns(rng.standard_normal((3, 1, 50)))
    assert len(rolling_eigenvalues(one_day, PER_DAY)) == 1
    ten_days = make_returns(rng.standard_normal((3, 10, 48)), delta_t=5)
    snaps = rolling_eigenvalues(ten_days, SLIDING)
    assert len(snaps) == 6
    assert snaps[1].window_start.startswith(str(ten_days.days[1]))
    with pytest.raises(ValueError):
        rolling_eigenvalues(one_day, SLIDING)


def test_loading_shift_raises_max_eigenvalue(rng):
    N, days, slots = 30, 20, 100
    f = rng.standard_normal((days, slots))
    load = np.where(np.arange(days) < days // 2, 0.4, 0.8)[:, None]
    x = load * f + rng.standard_normal((N, days, slots))
    lam = np.array([s.max_eigenvalue for s in rolling_eigenvalues(make_returns(x), PER_DAY)])
    before, after = lam[: days // 2], lam[days // 2:]
    assert after.min() > before.max()
    # population values: 1 + N b^2 / (1 + b^2) with b = 0.4, 0.8
    assert np.mean(before) == pytest.approx(1 + N * 0.16 / 1.16, rel=0.15)
    assert np.mean(after) == pytest.approx(1 + N * 0.64 / 1.64, rel=0.15)


def test_rolling_is_thread_count_independent(rng):
    ret = make_returns(rng.standard_normal((8, 12, 40)))
    a = rolling_eigenvalues(ret, SLIDING, threads=1)
    b = rolling_eigenvalues(ret, SLIDING, threads=4)
    assert [s.max_eigenvalue for s in a] == [s.max_eigenvalue for s in b]
    assert all(np.array_equal(s.market_mode_weights, t.market_mode_weights) for s, t in zip(a, b))


def test_market_mode_series_algebra(rng):
    G = rng.standard_normal((4, 25))
    win = window_of(G)
    e1 = np.eye(4)[0]
    np.testing.assert_allclose(market_mode_series(win, e1).values, win.G[0])
    r = rng.standard_normal(25)
    same = window_of([r] * 4)
    mm = market_mode_series(same, np.full(4, 0.5))
    np.testing.assert_allclose(mm.values, 2 * same.G[0], atol=1e-12)
    with pytest.raises(ValueError):
        market_mode_series(win, np.ones(3))


def test_market_mode_tracks_single_factor(rng):
    N, T = 100, 5000
    f = rng.standard_normal(T)
    x = rng.uniform(0.5, 1.5, (N, 1)) * f + rng.standard_normal((N, T))
    win = window_of(x)
    _, w = max_eigenpair(correlation_matrix(win))
    mm = market_mode_series(win, w)
    assert np.corrcoef(mm.values, f)[0, 1] > 0.99


def test_market_mode_concatenates_blocks(rng):
    ret = make_returns(rng.standard_normal((6, 7, 30)) + rng.standard_normal((7, 30)))
    mm = market_mode(ret, block_days=3)
    assert len(mm) == ret.values.shape[1]
    assert mm.timestamps == ret.timestamps
    g = market_mode(ret, block_days=3, global_weights=True)
    assert len(g) == len(mm)
    assert not np.allclose(g.values, mm.values)


def test_window_scheme_validation():
    with pytest.raises(ValueError):
        WindowScheme(0, 1)


# ---------------------------------------------------------------------------
# correlograms


def test_acf_lag_zero_and_statistics(rng):
    r = acf(rng.standard_normal(1000), 40)
    assert r.values[0] == 1.0
    assert r.band == pytest.approx(1.96 / np.sqrt(1000))
    assert np.mean(np.abs(r.values[1:]) <= r.band) >= 0.95


def test_acf_matches_direct_sum(rng):
    x = rng.standard_normal(300).cumsum()
    r = acf(x, 10)
    d = x - x.mean()
    direct = [np.sum(d[: len(x) - k] * d[k:]) / np.sum(d * d) for k in range(11)]
    np.testing.assert_allclose(r.values, direct, rtol=1e-12)


def test_acf_ar1(rng):
    phi, n = 0.9, 20_000
    e = rng.standard_normal(n + 500)
    x = np.empty_like(e)
    x[0] = e[0]
    for t in range(1, len(e)):
        x[t] = phi * x[t - 1] + e[t]
    x = x[500:]
    r = acf(x, 10)
    for k in range(1, 11):
        # Bartlett variance for an AR(1)
        var = ((1 + phi**2) * (1 - phi ** (2 * k)) / (1 - phi**2) - 2 * k * phi ** (2 * k)) / n
        assert abs(r.values[k] - phi**k) < 3 * np.sqrt(var)


def test_acf_preconditions():
    with pytest.raises(ValueError):
        acf(np.arange(5.0), 3)
    with pytest.raises(ValueError):
        acf(np.array([1.0, np.nan, 2, 3, 4, 5]), 1)


def test_ccf_self_shift_and_noise(rng):
    a = rng.standard_normal(2000)
    r = ccf(a, a, 5)
    assert r.values[list(r.lags).index(0)] == pytest.approx(1.0)
    k = 3
    b = np.roll(a, k)
    r = ccf(a, b, 8)
    assert r.lags[np.argmax(r.values)] == k
    assert r.values[np.argmax(r.values)] == pytest.approx(1.0, abs=0.01)
    c = rng.standard_normal(2000)
    r = ccf(a, c, 20)
    assert np.all(np.abs(r.values) < 3 / np.sqrt(2000))


def test_ccf_preconditions():
    with pytest.raises(ValueError):
        ccf(np.ones(10), np.ones(9), 2)
    with pytest.raises(ValueError):
        ccf(np.arange(6.0), np.arange(6.0), 3)
