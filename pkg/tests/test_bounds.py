import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from renewsim.bounds import (BoundReport, conditional_bound_check, exp_moment_bound,
                             monotonicity_gap, overjump_mean_curve, power_moment_bound,
                             stationary_exp_moment, verify_exp_moment_bound,
                             verify_power_moment_bound)
from renewsim.dist import Deterministic, Exponential, Gamma, Mixture, Uniform
from renewsim.errors import (DivergentExponentialMoment, InfiniteMoment,
                             InfiniteSecondMoment, NoSamples)
from renewsim.linearwise import EmbeddedChain, LinearwiseProcess
from renewsim.renewal import overjump_mean_exact, renewal_function

EXP1 = Exponential(1.0)
UNIF = Uniform(0.0, 1.0)
ALT = EmbeddedChain((0, 1), [[0.0, 1.0], [1.0, 0.0]])


@pytest.fixture(scope="module")
def unif_table():
    return renewal_function(UNIF, 6.0, 0.001)


# report

def test_bound_report_semantics(tmp_path):
    rep = BoundReport("demo", 1.0, [(1.0, 0.98, 0.03), (2.0, 1.01, 0.02)])
    assert rep.satisfied
    assert rep.slack == pytest.approx(1.0 - 1.03)
    bad = BoundReport("demo", 1.0, [(1.0, 1.1, 0.05)])
    assert not bad.satisfied
    data = json.loads(rep.to_json())
    assert data["bound_value"] == 1.0 and data["observed_values"][1] == [2.0, 1.01, 0.02]
    rep.to_csv(tmp_path / "r.csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "probe,estimate,half_width,bound" and len(lines) == 3


# mean curves

def test_curve_exponential_flat():
    curve = overjump_mean_curve(EXP1, [0.1, 1.0, 10.0], 100_000, 3)
    assert curve.monotone and curve.below_limit
    assert all(abs(e - 1.0) <= h for _, e, h in curve.rows)


def test_curve_uniform_matches_exact_and_decreases(unif_table):
    times = [0.1, 0.5, 2.0, 10.0]
    curve = overjump_mean_curve(UNIF, times, 100_000, 4)
    for t, e, h in curve.rows[:3]:
        assert abs(e - overjump_mean_exact(UNIF, unif_table, t)) <= h + 2e-3
    assert abs(curve.rows[-1][1] - 1 / 3) <= curve.rows[-1][2]
    # E x*_0 = E zeta = 1/2 lies above the limit 1/3, so the curve starts high
    assert (0.1, 0.5) in curve.decreases
    assert 0.1 in curve.exceed


def test_curve_deterministic_exact():
    curve = overjump_mean_curve(Deterministic(1.0), [0.25], 1000, 0)
    assert curve.rows[0][1] == pytest.approx(0.75, abs=1e-14)


def test_curve_underjump_uniform_oscillates():
    curve = overjump_mean_curve(UNIF, [0.5, 1.0, 1.5], 100_000, 6, underjump=True)
    assert curve.decreases == [(0.5, 1.0)]


def test_curve_requires_second_moment():
    class Heavy(Exponential):
        @property
        def second_moment(self):
            return math.inf
    with pytest.raises(InfiniteSecondMoment):
        overjump_mean_curve(Heavy(1.0), [1.0], 10, 0)


def test_curve_increases_for_hyperexponential():
    law = Mixture((0.5, 0.5), (Exponential(0.5), Exponential(4.0)))
    curve = overjump_mean_curve(law, [0.05, 0.5, 2.0, 20.0], 100_000, 12)
    assert curve.monotone and curve.below_limit
    assert curve.rows[0][1] < curve.rows[-1][1]


# monotonicity gap

def test_monotonicity_gap_examples(unif_table):
    tab = renewal_function(EXP1, 4.0, 0.001)
    assert abs(monotonicity_gap(EXP1, tab, 1.0, 2.0, 1.0)) <= 2 * tab.error_bound
    assert monotonicity_gap(UNIF, unif_table, 0.0, 0.3, 2.0) == pytest.approx(0.0, abs=1e-9)
    # exact small-t value 0.7 - 0.5 e^0.2 + 0.3 against the limit 0.25
    want = 0.25 - (1.0 - 0.5 * math.exp(0.2))
    assert monotonicity_gap(UNIF, unif_table, 0.5, 0.2, 5.0) == pytest.approx(want, abs=3e-3)


def test_monotonicity_gap_range(unif_table):
    from renewsim.errors import OutOfRange
    with pytest.raises(OutOfRange):
        monotonicity_gap(UNIF, unif_table, 0.5, 3.0, 5.0)


# moment bounds

def test_power_moment_bound_examples():
    assert power_moment_bound(EXP1, 3) == pytest.approx(2.0)
    assert power_moment_bound(UNIF, 3) == pytest.approx(1 / 6)
    assert power_moment_bound(Deterministic(1.0), 4) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        power_moment_bound(EXP1, 2)


def test_power_moment_bound_diverges():
    class Heavy(Exponential):
        def moment(self, k):
            return math.inf
    with pytest.raises(InfiniteMoment):
        power_moment_bound(Heavy(1.0), 3)


def test_power_bound_is_stationary_moment():
    # int_0^inf a^(k-1) dP{x* <= a} with density S(a)/E zeta
    for law in (UNIF, Gamma(2.0, 1.0)):
        for k in (3, 4):
            val, _ = integrate.quad(lambda a: a ** (k - 1) * float(law.survival(a)) / law.mean,
                                    0, np.inf)
            assert power_moment_bound(law, k) == pytest.approx(val, rel=1e-8)


def test_exp_moment_bound_examples():
    assert exp_moment_bound(EXP1, 0.5) == pytest.approx(3.0)
    assert stationary_exp_moment(EXP1, 0.5) == pytest.approx(2.0)
    assert exp_moment_bound(Deterministic(1.0), 1.0) == pytest.approx(math.e - 1)
    with pytest.raises(DivergentExponentialMoment):
        exp_moment_bound(EXP1, 1.0)


def test_exp_moment_bound_excess_over_stationary_value():
    for law, alpha in ((EXP1, 0.5), (UNIF, 0.3), (Gamma(2.0, 1.0), 0.2)):
        excess = exp_moment_bound(law, alpha) - stationary_exp_moment(law, alpha)
        assert excess == pytest.approx(1 / (alpha * law.mean) - 1, rel=1e-10)


def test_stationary_exp_moment_taylor_and_quadrature():
    alpha = 1e-4
    first_order = 1 + alpha * UNIF.second_moment / (2 * UNIF.mean)
    assert stationary_exp_moment(UNIF, alpha) - first_order == pytest.approx(0.0, abs=1e-8)
    val, _ = integrate.quad(lambda a: math.exp(0.3 * a) * float(UNIF.survival(a)) / UNIF.mean,
                            0, 1)
    assert stationary_exp_moment(UNIF, 0.3) == pytest.approx(val, rel=1e-10)


def test_verify_power_moment_exponential_sharp():
    rep = verify_power_moment_bound(EXP1, 3, [64.0], 100_000, 8)
    (_, est, hw), = rep.observed_values
    assert rep.satisfied and abs(est - 2.0) <= hw


def test_verify_power_moment_k4_sharp():
    rep = verify_power_moment_bound(EXP1, 4, [64.0], 100_000, 9)
    (_, est, hw), = rep.observed_values
    assert rep.bound_value == pytest.approx(6.0) and abs(est - 6.0) <= hw


def test_verify_exp_moment_exponential():
    rep = verify_exp_moment_bound(EXP1, 0.5, [64.0], 100_000, 10)
    (_, est, hw), = rep.observed_values
    assert rep.satisfied and est + hw <= 3.0
    assert abs(est - 2.0) <= hw
    assert rep.extras["stationary_value"] == pytest.approx(2.0)


# conditional bounds

def test_conditional_alternating():
    proc = LinearwiseProcess(ALT, {0: EXP1, 1: Uniform(0.0, 2.0)})
    rep = conditional_bound_check(proc, 1, 64.0, 100_000, 13)
    assert rep.bound_value == pytest.approx(2 / 3)
    assert rep.satisfied
    assert abs(rep.extras["samples"] - 50_000) < 1_000


def test_conditional_single_state_exponential_equality():
    proc = LinearwiseProcess(EmbeddedChain((0,), [[1.0]]), {0: EXP1})
    rep = conditional_bound_check(proc, 0, 30.0, 50_000, 14)
    assert rep.bound_value == pytest.approx(1.0)
    _, est, hw = rep.observed_values[1]
    assert abs(est - 1.0) <= hw


def test_conditional_deterministic_level_half():
    proc = LinearwiseProcess(ALT, {0: EXP1, 1: Deterministic(1.0)})
    rep = conditional_bound_check(proc, 1, 64.0, 100_000, 15)
    assert rep.bound_value == pytest.approx(0.5)
    for _, est, hw in rep.observed_values:
        assert abs(est - 0.5) <= hw


def test_conditional_no_samples():
    proc = LinearwiseProcess(ALT, {0: Deterministic(5.0), 1: EXP1})
    with pytest.raises(NoSamples):
        conditional_bound_check(proc, 1, 1.0, 1000, 0)


@settings(max_examples=8)
@given(st.floats(0.1, 0.9), st.floats(0.3, 1.0), st.floats(2.0, 5.0))
def test_mean_below_limit_for_hyperexponential(w, r1, r2):
    law = Mixture((w, 1 - w), (Exponential(r1), Exponential(r2)))
    curve = overjump_mean_curve(law, [0.5, 4.0], 20_000, 1)
    assert curve.below_limit
