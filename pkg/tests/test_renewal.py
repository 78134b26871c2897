import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, stats

from renewsim.dist import Deterministic, Discrete, Exponential, Gamma, Mixture, Uniform
from renewsim.errors import (BudgetExceeded, InfiniteSecondMoment, LatticeCycle,
                             LatticeWarning, OutOfRange)
from renewsim.renewal import (RenewalTrajectory, key_renewal_convergence,
                              key_renewal_integral, key_renewal_limit, observe_over_under,
                              overjump_mean_exact, overjump_survival_exact, renewal_function,
                              sample_over_under, simulate_renewal, stationary_overjump_mean,
                              stationary_overjump_survival)

EXP1 = Exponential(1.0)
UNIF = Uniform(0.0, 1.0)


@pytest.fixture(scope="module")
def exp_table():
    return renewal_function(EXP1, 25.0, 0.001)


@pytest.fixture(scope="module")
def unif_table():
    return renewal_function(UNIF, 12.0, 0.001)


def zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def one(x):
    return np.ones_like(np.asarray(x, dtype=float))


def _traj(times, horizon=10.0):
    return RenewalTrajectory(np.asarray(times, dtype=float), horizon, Deterministic(1.0))


# simulation

def test_simulate_deterministic():
    tr = simulate_renewal(None, Deterministic(1.0), 5.5, np.random.default_rng(0))
    assert tr.jump_times.tolist() == [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]


def test_simulate_delayed_deterministic():
    tr = simulate_renewal(Deterministic(0.5), Deterministic(1.0), 3.0, np.random.default_rng(0))
    assert tr.jump_times.tolist() == [0.5, 1.5, 2.5, 3.5]


def test_simulate_poisson_count():
    tr = simulate_renewal(None, Exponential(2.0), 1000.0, np.random.default_rng(1))
    count = int(np.sum(tr.jump_times <= 1000.0))
    assert abs(count - 2000) <= 3 * math.sqrt(2000)
    assert np.all(np.diff(tr.jump_times) > 0)
    assert tr.jump_times[-1] > 1000.0 and tr.jump_times[-2] <= 1000.0


def test_trajectory_csv(tmp_path):
    tr = simulate_renewal(None, Deterministic(1.0), 2.5, 0)
    tr.to_csv(tmp_path / "j.csv")
    assert (tmp_path / "j.csv").read_text().splitlines() == ["index,t", "1,1.0", "2,2.0", "3,3.0"]


# observation

def test_observe_examples():
    tr = _traj([1.0, 2.0, 3.0], horizon=2.9)
    assert observe_over_under(tr, 1.25) == pytest.approx((0.25, 0.75))
    assert observe_over_under(tr, 0.5) == pytest.approx((0.5, 0.5))


def test_observe_tie_counts_as_after_jump():
    tr = _traj([1.0, 2.0, 3.0], horizon=2.9)
    assert observe_over_under(tr, 1.0) == pytest.approx((0.0, 1.0))
    assert observe_over_under(tr, 2.0 - 1e-13) == pytest.approx((0.0, 1.0), abs=1e-12)


@given(st.integers(0, 8), st.floats(0.01, 0.99))
def test_observe_lattice_closed_form(k, u):
    tr = simulate_renewal(None, Deterministic(1.0), 10.0, 0)
    x, xs = observe_over_under(tr, k + u)
    assert x == pytest.approx(u, abs=1e-12) and xs == pytest.approx(1 - u, abs=1e-12)


# renewal function

def test_renewal_function_poisson(exp_table):
    sel = exp_table.times <= 10.0
    assert np.max(np.abs(exp_table.values[sel] - exp_table.times[sel])) <= 0.01


def test_renewal_function_uniform_closed_form(unif_table):
    # H(t) = e^t - 1 on [0, 1] for Uniform(0,1) cycles
    sel = unif_table.times <= 1.0
    err = np.max(np.abs(unif_table.values[sel] - np.expm1(unif_table.times[sel])))
    assert err <= unif_table.error_bound
    # second piece: H(t) = e^t - 1 - (t - 1) e^{t-1} on [1, 2]
    t = np.linspace(1.0, 2.0, 11)
    want = np.expm1(t) - (t - 1) * np.exp(t - 1)
    assert np.max(np.abs(unif_table(t) - want)) <= unif_table.error_bound


def test_renewal_function_deterministic_floor():
    tab = renewal_function(Deterministic(1.0), 3.5, 0.001)
    for t in (0.3, 0.999 - 0.002, 1.2, 2.5, 3.4):
        assert tab(t) == pytest.approx(math.floor(t), abs=1e-12)


def test_renewal_function_first_cell():
    h = 0.01
    for law in (EXP1, UNIF, Gamma(2.0, 1.0)):
        tab = renewal_function(law, h, h)
        F = float(law.cdf(h))
        assert abs(tab.values[1] - F) <= 2 * F**2 + 1e-15
        assert tab.values[0] == 0.0


def test_renewal_function_budget():
    with pytest.raises(BudgetExceeded):
        renewal_function(UNIF, 10.0, 0.01, m_max=3)


def test_renewal_table_exports(tmp_path, unif_table):
    small = renewal_function(UNIF, 0.003, 0.001)
    small.to_csv(tmp_path / "H.csv")
    lines = (tmp_path / "H.csv").read_text().splitlines()
    assert lines[0] == "t,H" and len(lines) == 5
    import json
    data = json.loads(small.to_json())
    assert data["step"] == 0.001 and len(data["H"]) == 4


laws_nonlattice = st.one_of(
    st.floats(0.3, 3.0).map(Exponential),
    st.tuples(st.floats(0.0, 1.0), st.floats(0.2, 2.0)).map(lambda p: Uniform(p[0], p[0] + p[1])),
    st.tuples(st.floats(0.7, 4.0), st.floats(0.3, 1.5)).map(lambda p: Gamma(*p)),
)


@settings(max_examples=15)
@given(laws_nonlattice)
def test_renewal_equation_within_declared_bound(law):
    tab = renewal_function(law, 8 * law.mean, law.mean / 200)
    assert tab.renewal_residual() <= 5 * tab.error_bound
    assert np.all(np.diff(tab.values) >= 0) and tab.values[0] == 0.0


# key renewal theorem

def test_key_renewal_integral_examples(exp_table):
    assert key_renewal_integral(EXP1.survival, exp_table, 20.0) == pytest.approx(
        1 - math.exp(-20), abs=0.01)
    assert key_renewal_integral(zero, exp_table, 7.3) == 0.0
    for t in (0.5, 3.0, 12.345):
        assert key_renewal_integral(one, exp_table, t) == pytest.approx(exp_table(t), abs=1e-12)


def test_key_renewal_integral_out_of_range(exp_table):
    with pytest.raises(OutOfRange):
        key_renewal_integral(one, exp_table, 30.0)


def test_key_renewal_limit_examples():
    assert key_renewal_limit(EXP1.survival, EXP1) == pytest.approx(1.0, abs=1e-12)
    assert key_renewal_limit(UNIF.survival, UNIF) == pytest.approx(1.0, abs=1e-12)
    assert key_renewal_limit(zero, Gamma(2.0, 1.0)) == 0.0
    with pytest.raises(LatticeCycle):
        key_renewal_limit(one, Deterministic(1.0))


def test_key_renewal_convergence_gap():
    rows = key_renewal_convergence(UNIF.survival, UNIF, h=0.001)
    t, val, lim, gap = rows[-1]
    assert t == pytest.approx(64 * 0.5)
    assert gap < 0.02
    assert [r[0] for r in rows] == sorted(r[0] for r in rows)


# overjump laws

def test_overjump_exponential_memoryless(exp_table):
    for s in (0.0, 0.3, 1.0, 2.5):
        for t in (0.0, 0.7, 5.0, 20.0):
            assert overjump_survival_exact(EXP1, exp_table, s, t) == pytest.approx(
                math.exp(-s), abs=0.01)


def test_overjump_s_zero_is_one(unif_table):
    for t in (0.0, 0.37, 4.0, 11.0):
        assert overjump_survival_exact(UNIF, unif_table, 0.0, t) == pytest.approx(1.0, abs=1e-9)


def test_overjump_uniform_large_t(unif_table):
    assert overjump_survival_exact(UNIF, unif_table, 0.5, 10.0) == pytest.approx(0.25, abs=0.02)


def _uniform_R_small_t(s, t):
    # H(u) = e^u - 1 on [0, 1], so dH = e^u du
    val, _ = integrate.quad(lambda u: float(UNIF.survival(t - u + s)) * math.exp(u), 0.0, t)
    return float(UNIF.survival(t + s)) + val


@pytest.mark.parametrize("s,t", [(0.5, 0.2), (0.1, 0.9), (0.3, 0.5)])
def test_overjump_uniform_small_t_quadrature(unif_table, s, t):
    want = _uniform_R_small_t(s, t)
    assert overjump_survival_exact(UNIF, unif_table, s, t) == pytest.approx(want, abs=2e-3)


def test_overjump_uniform_frozen_value(unif_table):
    # quadrature oracle: 0.3 + 0.7 - 0.5 e^0.2
    assert overjump_survival_exact(UNIF, unif_table, 0.5, 0.2) == pytest.approx(
        0.389298621, abs=2e-3)


def test_overjump_mean_exact_uniform(unif_table):
    assert overjump_mean_exact(UNIF, unif_table, 0.1) == pytest.approx(0.45260, abs=2e-3)
    assert overjump_mean_exact(UNIF, unif_table, 10.0) == pytest.approx(1 / 3, abs=2e-3)


def test_overjump_monte_carlo_matches_exact(unif_table):
    s_probes = (0.1, 0.5, 0.8)
    z = stats.norm.isf((1 - 0.999) / (2 * 2 * len(s_probes)))
    for i, t in enumerate((0.7, 3.0)):
        _, xs = sample_over_under(UNIF, t, 100_000, 1000 + i)
        for s in s_probes:
            ex = overjump_survival_exact(UNIF, unif_table, s, t)
            hw = z * math.sqrt(ex * (1 - ex) / xs.size) + unif_table.error_bound
            assert abs(np.mean(xs > s) - ex) <= hw


def test_stationary_overjump_examples():
    for a in (0.0, 0.4, 2.0):
        assert stationary_overjump_survival(EXP1, a) == pytest.approx(math.exp(-a), rel=1e-12)
    assert stationary_overjump_survival(UNIF, 0.5) == pytest.approx(0.25, abs=1e-14)
    assert stationary_overjump_survival(Gamma(3.0, 1.0), 0.0) == 1.0
    assert stationary_overjump_mean(EXP1) == pytest.approx(1.0)
    assert stationary_overjump_mean(UNIF) == pytest.approx(1 / 3, abs=1e-15)


def test_stationary_lattice_warns_but_evaluates():
    with pytest.warns(LatticeWarning):
        assert stationary_overjump_mean(Deterministic(3.0)) == pytest.approx(1.5)
    with pytest.warns(LatticeWarning):
        stationary_overjump_survival(Discrete(((1.0, 0.5), (2.0, 0.5))), 0.5)


def test_stationary_mean_infinite_second_moment():
    class Heavy(Exponential):
        @property
        def second_moment(self):
            return math.inf
    with pytest.raises(InfiniteSecondMoment):
        stationary_overjump_mean(Heavy(1.0))


def test_under_and_overjump_share_stationary_law():
    g = Gamma(2.0, 1.0)
    x, xs = sample_over_under(g, 64 * g.mean, 100_000, 77)
    assert stats.ks_2samp(x, xs).statistic < 0.02
    grid = np.linspace(0.0, 6.0, 13)
    want = np.array([stationary_overjump_survival(g, a) for a in grid])
    z = stats.norm.isf(0.001 / (2 * 2 * grid.size))
    for sample in (x, xs):
        got = np.array([np.mean(sample > a) for a in grid])
        assert np.all(np.abs(got - want) <= z * np.sqrt(want * (1 - want) / sample.size) + 1e-12)


def test_sampling_independent_of_workers():
    a = sample_over_under(UNIF, 5.0, 40_000, 9, workers=1)
    b = sample_over_under(UNIF, 5.0, 40_000, 9, workers=3)
    assert all(np.array_equal(u, v) for u, v in zip(a, b))


def test_delayed_sampling_uses_first_delay():
    x, xs = sample_over_under(Deterministic(1.0), 0.25, 100, 0, first_delay=Deterministic(0.5))
    assert np.allclose(x, 0.25) and np.allclose(xs, 0.25)


# monotonicity in t

def test_uniform_overjump_not_monotone_in_t(unif_table):
    """Uniform cycles: P{x*_t > 0.5} drops from 0.389 at t=0.2 towards 0.25."""
    assert overjump_survival_exact(UNIF, unif_table, 0.5, 5.2) < overjump_survival_exact(
        UNIF, unif_table, 0.5, 0.2) - 0.1


hyperexp = st.tuples(st.floats(0.1, 0.9), st.floats(0.3, 1.0), st.floats(2.0, 6.0)).map(
    lambda p: Mixture((p[0], 1 - p[0]), (Exponential(p[1]), Exponential(p[2]))))


@settings(max_examples=10)
@given(hyperexp, st.floats(0.0, 2.0), st.floats(0.0, 3.0), st.floats(0.1, 3.0))
def test_overjump_monotone_for_decreasing_failure_rate(law, s, t, delta):
    tab = renewal_function(law, 6.0 + 1e-9, 0.002)
    r1 = overjump_survival_exact(law, tab, s, t)
    r2 = overjump_survival_exact(law, tab, s, t + delta)
    assert r2 >= r1 - 2 * tab.error_bound
