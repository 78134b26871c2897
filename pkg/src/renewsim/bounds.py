"""Moment bounds on overjump and underjump times, checked by Monte Carlo.

The analytic side gives the stationary overjump mean
``E zeta^2 / (2 E zeta)``, the power bound ``E zeta^k / (k E zeta)`` on
``E (x*_t)^(k-1)`` and an exponential bound on ``E exp(alpha x*_t)``.  The
simulation side estimates the same quantities at finite ``t`` with
``sigmas``-standard-error bands and reports whether any estimate
significantly violates the bound.
"""
from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from renewsim.dist import Distribution
from renewsim.errors import (DivergentExponentialMoment, InfiniteMoment,
                             InfiniteSecondMoment, NoSamples, OutOfRange)
from renewsim.linearwise import LinearwiseProcess, sample_states
from renewsim.montecarlo import SeedLike, as_seed_sequence, mean_band
from renewsim.renewal import (RenewalFunctionTable, overjump_survival_exact,
                              sample_over_under, stationary_overjump_mean)


@dataclass
class BoundReport:
    """Monte Carlo estimates against one analytic bound.

    ``satisfied`` holds when no estimate exceeds the bound by more than its
    own band, so a bound met with equality still passes.  ``slack`` is the
    bound minus the largest upper band and goes negative in that case.
    """

    label: str
    bound_value: float
    observed_values: list[tuple[Any, float, float]]
    satisfied: bool = field(init=False)
    slack: float = field(init=False)
    extras: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.satisfied = all(est - hw <= self.bound_value for _, est, hw in self.observed_values)
        self.slack = self.bound_value - max(est + hw for _, est, hw in self.observed_values)

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "bound_value": self.bound_value,
            "observed_values": [[p, e, h] for p, e, h in self.observed_values],
            "satisfied": self.satisfied,
            "slack": self.slack,
            "extras": self.extras,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["probe", "estimate", "half_width", "bound"])
            for p, e, h in self.observed_values:
                w.writerow([p, repr(e), repr(h), repr(self.bound_value)])


@dataclass
class MeanCurve:
    """Estimates of ``E x*_t`` (or ``E x_t``) over sorted probe times."""

    rows: list[tuple[float, float, float]]
    limit: float
    decreases: list[tuple[float, float]]
    exceed: list[float]
    sigmas: float

    @property
    def monotone(self) -> bool:
        return not self.decreases

    @property
    def below_limit(self) -> bool:
        return not self.exceed


def _second_moment_guard(cycle: Distribution) -> float:
    if not math.isfinite(cycle.second_moment):
        raise InfiniteSecondMoment(f"{cycle!r} has infinite second moment")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return stationary_overjump_mean(cycle)


def overjump_mean_curve(cycle: Distribution, times: Sequence[float], replicas: int,
                        seed: SeedLike, workers: int = 1, sigmas: float = 3.0,
                        underjump: bool = False) -> MeanCurve:
    """Monte Carlo ``E x*_t`` at each of ``times``, flagging decreases and excesses.

    A decrease between consecutive times is flagged when it exceeds
    ``sigmas`` combined standard errors; an excess when the lower band lies
    above ``E zeta^2 / (2 E zeta)``.  With ``underjump=True`` the elapsed
    time ``x_t`` is used instead.
    """
    limit = _second_moment_guard(cycle)
    times = [float(t) for t in times]
    if any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("times must be sorted ascending")
    seqs = as_seed_sequence(seed).spawn(len(times))
    rows = []
    for t, seq in zip(times, seqs):
        x, xs = sample_over_under(cycle, t, replicas, seq, workers)
        est, hw = mean_band(x if underjump else xs, sigmas)
        rows.append((t, est, hw))
    decreases = []
    for (t1, e1, h1), (t2, e2, h2) in zip(rows, rows[1:]):
        if e1 - e2 > math.hypot(h1, h2):
            decreases.append((t1, t2))
    exceed = [t for t, e, h in rows if e - h > limit]
    return MeanCurve(rows, limit, decreases, exceed, sigmas)


def monotonicity_gap(cycle: Distribution, table: RenewalFunctionTable, s: float, t: float,
                     delta: float) -> float:
    """``P{x*_{t+delta} > s} - P{x*_t > s}`` from the finite-time overjump law."""
    if t + delta > table.t_max + 1e-9:
        raise OutOfRange(f"t + delta = {t + delta} beyond table range {table.t_max}")
    return (overjump_survival_exact(cycle, table, s, t + delta)
            - overjump_survival_exact(cycle, table, s, t))


def power_moment_bound(cycle: Distribution, k: int) -> float:
    """``E zeta^k / (k E zeta)``, the stationary value of ``E (x*)^(k-1)``."""
    if int(k) != k or k < 3:
        raise ValueError("k must be an integer >= 3")
    mk = cycle.moment(int(k))
    if not math.isfinite(mk):
        raise InfiniteMoment(f"E zeta^{k} diverges for {cycle!r}")
    return mk / (k * cycle.mean)


def exp_moment_bound(cycle: Distribution, alpha: float) -> float:
    """``E exp(alpha zeta) / (alpha E zeta) - 1``.

    This lies above the stationary value :func:`stationary_exp_moment` by
    ``1 / (alpha E zeta) - 1``, so it is only an upper bound when
    ``alpha * E zeta <= 1``.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    m = cycle.exp_moment(alpha)
    if not math.isfinite(m):
        raise DivergentExponentialMoment(f"E exp({alpha} zeta) diverges for {cycle!r}")
    return m / (alpha * cycle.mean) - 1.0


def stationary_exp_moment(cycle: Distribution, alpha: float) -> float:
    """``(E exp(alpha zeta) - 1) / (alpha E zeta)``: ``E exp(alpha x*)`` at stationarity."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    m = cycle.exp_moment(alpha)
    if not math.isfinite(m):
        raise DivergentExponentialMoment(f"E exp({alpha} zeta) diverges for {cycle!r}")
    return math.expm1(math.log(m)) / (alpha * cycle.mean)


def _overjump_samples(cycle, times, replicas, seed, workers):
    seqs = as_seed_sequence(seed).spawn(len(times))
    for t, seq in zip(times, seqs):
        yield float(t), sample_over_under(cycle, t, replicas, seq, workers)[1]


def verify_power_moment_bound(cycle: Distribution, k: int, times: Sequence[float],
                              replicas: int, seed: SeedLike, workers: int = 1,
                              sigmas: float = 3.0) -> BoundReport:
    bound = power_moment_bound(cycle, k)
    rows = []
    for t, xs in _overjump_samples(cycle, times, replicas, seed, workers):
        est, hw = mean_band(xs ** (k - 1), sigmas)
        rows.append((t, est, hw))
    return BoundReport(f"power_moment_bound[k={k}]", bound, rows)


def verify_exp_moment_bound(cycle: Distribution, alpha: float, times: Sequence[float],
                            replicas: int, seed: SeedLike, workers: int = 1,
                            sigmas: float = 3.0) -> BoundReport:
    bound = exp_moment_bound(cycle, alpha)
    rows = []
    for t, xs in _overjump_samples(cycle, times, replicas, seed, workers):
        est, hw = mean_band(np.exp(alpha * xs), sigmas)
        rows.append((t, est, hw))
    return BoundReport(f"exp_moment_bound[alpha={alpha}]", bound, rows,
                       extras={"stationary_value": stationary_exp_moment(cycle, alpha)})


def conditional_bound_check(proc: LinearwiseProcess, k: int, tau: float, replicas: int,
                            seed: SeedLike, workers: int = 1,
                            sigmas: float = 3.0) -> BoundReport:
    """``E(x_tau | n_tau = k)`` and ``E(x*_tau | n_tau = k)`` against ``E zeta_k^2 / (2 E zeta_k)``.

    Only replicas that entered ``(k, 0)`` strictly before ``tau`` count.

    Raises
    ------
    NoSamples
        if no replica satisfies the conditioning event.
    """
    law = proc.level_laws[int(k)]
    bound = _second_moment_guard(law)
    n, x, xs, hit = sample_states(proc, tau, replicas, seed, workers, hit_state=int(k))
    sel = (n == k) & (hit < tau)
    m = int(sel.sum())
    if m < 2:
        raise NoSamples(f"{m} replicas in level {k} after a regeneration before tau={tau}")
    rows = [("x", *mean_band(x[sel], sigmas)), ("x_star", *mean_band(xs[sel], sigmas))]
    return BoundReport(f"conditional_mean_bound[k={k}]", bound, rows,
                       extras={"samples": m, "tau": float(tau)})
