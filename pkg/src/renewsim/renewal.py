"""Renewal processes: simulation, the renewal function and overjump laws.

The renewal function ``H(t) = sum_m F^{m*}(t)`` of a zero-delay process is
tabulated on a uniform grid.  Each cell's probability mass is placed at the
cell midpoint, so the ``m``-fold convolution lives on a grid shifted by
``m/2`` cells; powers are summed until the next one is negligible on the
whole table.  Stieltjes integrals against ``dH`` use the same midpoint rule.
"""
from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import fft, integrate

from renewsim.dist import (Distribution, Instant, evaluate, lattice_span,
                           tail_integral)
from renewsim.errors import (AtomAtZero, BudgetExceeded, InfiniteMean,
                             InfiniteSecondMoment, LatticeCycle, LatticeWarning,
                             OutOfRange)
from renewsim.montecarlo import SeedLike, as_generator, concat, run_chunked

TIE_TOL = 1e-12
POWER_TOL = 1e-12
MAX_POWERS = 10**6


@dataclass(frozen=True, eq=False)
class RenewalTrajectory:
    """Jump times ``t_1 < t_2 < ...`` up to and including the first past ``horizon``."""

    jump_times: np.ndarray
    horizon: float
    cycle_law: Distribution
    first_delay_law: Optional[Distribution] = None

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "t"])
            for i, t in enumerate(self.jump_times, start=1):
                w.writerow([i, repr(float(t))])


def _check_cycle(cycle: Distribution):
    if isinstance(cycle, Instant):
        raise AtomAtZero("cycle law is a point mass at zero")


def simulate_renewal(first_delay: Optional[Distribution], cycle: Distribution,
                     horizon: float, rng: SeedLike) -> RenewalTrajectory:
    """Jump times of a (possibly delayed) renewal process past ``horizon``."""
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    _check_cycle(cycle)
    rng = as_generator(rng)
    first = first_delay if first_delay is not None else cycle
    t = float(first.sample(rng))
    times = [t]
    batch = max(16, int(horizon / cycle.mean) + 16) if math.isfinite(cycle.mean) else 64
    while t <= horizon:
        steps = t + np.cumsum(np.atleast_1d(cycle.sample(rng, batch)))
        past = np.nonzero(steps > horizon)[0]
        if past.size:
            times.extend(steps[:past[0] + 1].tolist())
            break
        times.extend(steps.tolist())
        t = float(steps[-1])
    return RenewalTrajectory(np.asarray(times), float(horizon), cycle, first_delay)


def observe_over_under(traj: RenewalTrajectory, t: float) -> tuple[float, float]:
    """Underjump ``x = t - t_n`` and overjump ``x* = t_{n+1} - t`` with ``t_0 = 0``.

    A ``t`` within ``1e-12`` of a jump time counts as just after that jump.
    """
    if t < 0 or t > traj.horizon:
        raise OutOfRange(f"t={t} outside [0, {traj.horizon}]")
    times = traj.jump_times
    n = int(np.searchsorted(times, t + TIE_TOL, side="right"))
    last = times[n - 1] if n > 0 else 0.0
    return max(t - float(last), 0.0), float(times[n]) - t


def _over_under_chunk(size: int, rng: np.random.Generator, cycle: Distribution,
                      t: float, first_delay: Optional[Distribution]):
    first = first_delay if first_delay is not None else cycle
    last = np.zeros(size)
    nxt = np.asarray(first.sample(rng, size), dtype=float)
    active = np.nonzero(nxt <= t)[0]
    while active.size:
        last[active] = nxt[active]
        nxt[active] += cycle.sample(rng, active.size)
        active = active[nxt[active] <= t]
    return t - last, nxt - t


def sample_over_under(cycle: Distribution, t: float, replicas: int, seed: SeedLike,
                      workers: int = 1, first_delay: Optional[Distribution] = None
                      ) -> tuple[np.ndarray, np.ndarray]:
    """Independent draws of ``(x_t, x*_t)`` over ``replicas`` renewal paths."""
    _check_cycle(cycle)
    chunks = run_chunked(_over_under_chunk, replicas, seed, workers,
                         cycle=cycle, t=float(t), first_delay=first_delay)
    return concat(chunks)


@dataclass(frozen=True, eq=False)
class RenewalFunctionTable:
    """Grid values ``values[j] ~ H(j * step)`` of a zero-delay renewal function."""

    step: float
    values: np.ndarray
    cycle_law: Distribution
    truncation_m: int
    error_bound: float = field(default=0.0)

    @property
    def t_max(self) -> float:
        return self.step * (len(self.values) - 1)

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.values)) * self.step

    def __call__(self, t):
        """Piecewise-linear interpolation of ``H``."""
        return np.interp(t, self.times, self.values)

    def renewal_residual(self) -> float:
        """``max_j |H - F - F*H|`` on the grid, ``F*H`` by the midpoint rule."""
        h = self.values
        n = len(h)
        F = np.asarray(self.cycle_law.cdf(self.times), dtype=float)
        f = np.diff(F, prepend=0.0)
        conv = _fft_convolve(f, h, n)
        return float(np.max(np.abs(h - F - conv)))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "H"])
            for t, v in zip(self.times, self.values):
                w.writerow([repr(float(t)), repr(float(v))])

    def to_json(self) -> str:
        return json.dumps({"step": self.step, "t_max": self.t_max,
                           "truncation_m": self.truncation_m,
                           "error_bound": self.error_bound,
                           "cycle": self.cycle_law.to_config(),
                           "H": [float(v) for v in self.values]}, sort_keys=True)


def _fft_convolve(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    size = fft.next_fast_len(len(a) + len(b) - 1, real=True)
    out = fft.irfft(fft.rfft(a, size) * fft.rfft(b, size), size)[:n]
    return out


def renewal_function(cycle: Distribution, t_max: float, h: Optional[float] = None,
                     m_max: int = MAX_POWERS) -> RenewalFunctionTable:
    """Tabulate ``H(t) = sum_m F^{m*}(t)`` on ``[0, t_max]`` with step ``h``.

    ``h`` defaults to a thousandth of the mean cycle.  The declared error
    bound is the largest one-cell increment of ``H``, the resolution of the
    grid.

    Raises
    ------
    BudgetExceeded
        if ``m_max`` powers are summed before the next one drops below
        ``1e-12`` at ``t_max``.
    """
    _check_cycle(cycle)
    if not math.isfinite(cycle.mean):
        raise InfiniteMean("renewal function needs a finite mean")
    if h is None:
        h = cycle.mean / 1000.0
    if not (h > 0 and t_max >= h):
        raise ValueError("need h > 0 and t_max >= h")
    n = int(math.ceil(t_max / h - 1e-9))
    grid = np.arange(n + 1) * h
    F = np.asarray(cycle.cdf(grid), dtype=float)
    f = np.diff(F, prepend=0.0)  # f[j]: mass of cell ((j-1)h, jh], placed at (j-1/2)h

    # power m: conv[J] is the mass at (J - m/2) h; keep J <= n + m//2
    size = fft.next_fast_len(2 * (n + 1) + n // 2 + 2, real=True)
    f_hat = fft.rfft(f, size)
    H = np.zeros(n + 1)
    conv = f.copy()
    m = 1
    while True:
        cum = np.cumsum(conv)
        off = m // 2
        power = cum[off:off + n + 1]
        if power.size < n + 1:
            power = np.concatenate((power, np.full(n + 1 - power.size, cum[-1])))
        H += power
        if power[-1] < POWER_TOL:
            break
        if m >= m_max:
            raise BudgetExceeded(f"{m} convolution powers summed before decay at t={t_max}")
        keep = n + 1 + (m + 1) // 2
        if keep + n + 1 > size:
            size = fft.next_fast_len(2 * (keep + n + 1), real=True)
            f_hat = fft.rfft(f, size)
        conv = fft.irfft(fft.rfft(conv, size) * f_hat, size)[:keep]
        np.maximum(conv, 0.0, out=conv)
        m += 1
    H[0] = 0.0  # no atom at zero, so H(0) = 0; drop FFT round-off
    H = np.maximum.accumulate(H)
    bound = float(np.max(np.diff(H))) if n > 0 else float(H[-1])
    return RenewalFunctionTable(float(h), H, cycle, m, bound)


def _stieltjes(b: Callable, table: RenewalFunctionTable, t: float) -> float:
    if t < 0 or t > table.t_max * (1 + 1e-12) + 1e-12:
        raise OutOfRange(f"t={t} outside table range [0, {table.t_max}]")
    h = table.step
    H = table.values
    n_full = min(int(math.floor(t / h + 1e-9)), len(H) - 1)
    dH = np.diff(H[:n_full + 1])
    mids = (np.arange(n_full) + 0.5) * h
    total = float(np.dot(evaluate(b, t - mids), dH)) if n_full else 0.0
    rest = t - n_full * h
    if rest > 1e-9 * h and n_full < len(H) - 1:
        inc = float(table(t)) - H[n_full]
        total += float(evaluate(b, np.array([rest / 2.0]))[0]) * inc
    return total


def key_renewal_integral(b: Callable, table: RenewalFunctionTable, t: float) -> float:
    """Midpoint Stieltjes sum for ``int_0^t b(t - s) dH(s)``."""
    return _stieltjes(b, table, float(t))


def _integral_of(b: Callable) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(lambda u: float(evaluate(b, np.array([u]))[0]),
                                    0.0, math.inf, limit=400)
        except integrate.IntegrationWarning as exc:
            raise ValueError(f"integral of b did not converge: {exc}") from None
    if not math.isfinite(val):
        raise ValueError("integral of b is not finite")
    return float(val)


def key_renewal_limit(b: Callable, cycle: Distribution) -> float:
    """``int_0^inf b(s) ds / E zeta``, the large-``t`` limit of the key renewal integral.

    Raises
    ------
    LatticeCycle
        if the cycle law is lattice.
    InfiniteMean
        if the cycle mean diverges.
    """
    if lattice_span(cycle.support()) is not None:
        raise LatticeCycle(f"{cycle!r} is lattice")
    if not math.isfinite(cycle.mean):
        raise InfiniteMean(f"{cycle!r} has infinite mean")
    return _integral_of(b) / cycle.mean


def key_renewal_convergence(b: Callable, cycle: Distribution,
                            times: Optional[Sequence[float]] = None,
                            h: Optional[float] = None,
                            table: Optional[RenewalFunctionTable] = None):
    """Key renewal integral at growing ``t`` against its limit.

    ``times`` defaults to ``T, 2T, 4T, ..., 64T`` with ``T`` the mean cycle.
    Returns rows ``(t, integral, limit, |integral - limit|)``.
    """
    limit = key_renewal_limit(b, cycle)
    if times is None:
        times = [cycle.mean * 2**j for j in range(7)]
    times = sorted(float(t) for t in times)
    if table is None or table.t_max < times[-1]:
        table = renewal_function(cycle, times[-1], h)
    rows = []
    for t in times:
        val = key_renewal_integral(b, table, t)
        rows.append((t, val, limit, abs(val - limit)))
    return rows


def overjump_survival_exact(cycle: Distribution, table: RenewalFunctionTable,
                            s: float, t: float) -> float:
    """``P{x*_t > s} = S(t+s) + int_0^t S(t-u+s) dH(u)`` for a zero-delay process."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    val = float(cycle.survival(t + s)) + _stieltjes(
        lambda v: cycle.survival(v + s), table, float(t))
    return min(max(val, 0.0), 1.0)


def overjump_mean_exact(cycle: Distribution, table: RenewalFunctionTable, t: float) -> float:
    """``E x*_t``, the finite-time overjump survival integrated over ``s``."""
    tail = np.vectorize(lambda v: cycle.tail_integral(max(float(v), 0.0)), otypes=[float])
    return float(cycle.tail_integral(t)) + _stieltjes(tail, table, float(t))


def _warn_lattice(cycle: Distribution):
    if lattice_span(cycle.support()) is not None:
        warnings.warn(f"{cycle!r} is lattice; the stationary formula is outside its "
                      "hypotheses", LatticeWarning, stacklevel=3)


def stationary_overjump_survival(cycle: Distribution, a: float) -> float:
    """Limit of ``P{x*_t > a}`` (and of ``P{x_t > a}``): ``int_a^inf S / int_0^inf S``."""
    if a < 0:
        raise ValueError("a must be nonnegative")
    _warn_lattice(cycle)
    return tail_integral(cycle, a) / tail_integral(cycle, 0.0)


def stationary_overjump_mean(cycle: Distribution) -> float:
    """``E zeta^2 / (2 E zeta)``."""
    m2 = cycle.second_moment
    if not math.isfinite(m2):
        raise InfiniteSecondMoment(f"{cycle!r} has infinite second moment")
    _warn_lattice(cycle)
    return m2 / (2.0 * cycle.mean)
