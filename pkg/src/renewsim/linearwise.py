"""Linearwise Markov processes ``X_t = (n_t, x_t)``.

A finite embedded chain chooses the next level at every jump, and the
stay in level ``k`` has law ``Phi_k``.  The process starts in level
``n0`` with elapsed time ``x0``, so the first stay is drawn from the
residual law of ``Phi_{n0}`` at ``x0``.

The stationary law of ``(n, x, x*)`` is

    P{n = i, x > a, x* > b} = p_i / T * int_{a+b}^inf (1 - Phi_i(u)) du,

where ``p`` are the long-run visit frequencies of the chain and
``T = sum_i p_i E zeta_i``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy.sparse import csgraph

from renewsim.dist import Distribution, Instant, common_support_nonlattice, tail_integral
from renewsim.errors import (AtomAtZero, InfiniteMean, InvalidChain, LatticeSupport,
                             MultipleClosedClasses, NoHit, TransientState, UnknownState)
from renewsim.montecarlo import (SeedLike, as_generator, binomial_half_width, concat,
                                 run_chunked, z_value)

ROW_TOL = 1e-12
TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class EmbeddedChain:
    """Finite row-stochastic matrix over integer-labelled states."""

    states: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        states = tuple(int(s) for s in self.states)
        P = np.array(self.matrix, dtype=float)
        if len(set(states)) != len(states):
            raise InvalidChain("state labels must be distinct")
        if P.ndim != 2 or P.shape != (len(states), len(states)):
            raise InvalidChain(f"matrix shape {P.shape} does not match {len(states)} states")
        if not np.all(np.isfinite(P)) or P.min() < 0 or P.max() > 1:
            raise InvalidChain("matrix entries must lie in [0, 1]")
        for r, total in enumerate(P.sum(axis=1)):
            if abs(total - 1.0) > ROW_TOL:
                raise InvalidChain(f"row {r} sums to {total:.12g}")
        P.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "matrix", P)
        closed = self._closed_classes()
        if len(closed) != 1:
            raise MultipleClosedClasses(
                f"{len(closed)} closed classes: "
                + "; ".join(str([states[i] for i in c]) for c in closed))
        object.__setattr__(self, "_closed", tuple(closed[0]))

    def _closed_classes(self) -> list[list[int]]:
        n_comp, labels = csgraph.connected_components(self.matrix > 0, directed=True,
                                                      connection="strong")
        closed = []
        for c in range(n_comp):
            members = np.nonzero(labels == c)[0]
            outside = np.ones(len(self.states), bool)
            outside[members] = False
            if not np.any(self.matrix[np.ix_(members, outside)] > 0):
                closed.append(members.tolist())
        return closed

    @property
    def essential_states(self) -> tuple[int, ...]:
        return tuple(self.states[i] for i in self._closed)

    def index(self, state: int) -> int:
        try:
            return self.states.index(int(state))
        except ValueError:
            raise UnknownState(state) from None


def chain_frequencies(chain: EmbeddedChain) -> dict[int, float]:
    """Long-run visit frequencies: the stationary vector of the closed class."""
    idx = list(chain._closed)
    P = chain.matrix[np.ix_(idx, idx)]
    k = len(idx)
    A = P.T - np.eye(k)
    A[-1, :] = 1.0
    rhs = np.zeros(k)
    rhs[-1] = 1.0
    pi = np.linalg.solve(A, rhs)
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    out = {s: 0.0 for s in chain.states}
    for i, p in zip(idx, pi):
        out[chain.states[i]] = float(p)
    return out


@dataclass(frozen=True, eq=False)
class LinearwiseProcess:
    chain: EmbeddedChain
    level_laws: Mapping[int, Distribution]
    initial: tuple[int, float] = (0, 0.0)

    def __post_init__(self):
        laws = {int(k): v for k, v in dict(self.level_laws).items()}
        missing = [s for s in self.chain.states if s not in laws]
        if missing:
            raise ValueError(f"no level law for state(s) {missing}")
        for k, law in laws.items():
            if isinstance(law, Instant):
                raise AtomAtZero(f"level {k} law is a point mass at zero")
        n0, x0 = int(self.initial[0]), float(self.initial[1])
        self.chain.index(n0)
        if not x0 >= 0:
            raise ValueError("initial elapsed time must be nonnegative")
        object.__setattr__(self, "level_laws", MappingProxyType(laws))
        object.__setattr__(self, "initial", (n0, x0))

    def __reduce__(self):
        # the read-only law mapping does not pickle; rebuild from a plain dict
        return (LinearwiseProcess, (self.chain, dict(self.level_laws), self.initial))

    def with_initial(self, n0: int, x0: float = 0.0) -> LinearwiseProcess:
        return LinearwiseProcess(self.chain, self.level_laws, (n0, x0))

    @property
    def _cum_rows(self) -> np.ndarray:
        cum = np.cumsum(self.chain.matrix, axis=1)
        cum[:, -1] = 1.0
        return cum


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Jump skeleton: ``levels[j]`` holds on ``[jump_times[j], jump_times[j+1])``.

    ``jump_times[0] = 0`` carries the initial level; the last stored jump is
    the first one past ``horizon``.
    """

    jump_times: np.ndarray
    levels: np.ndarray
    initial: tuple[int, float]
    horizon: float

    @property
    def levels_after(self) -> np.ndarray:
        return self.levels


def _next_level(cum: np.ndarray, i: int, rng: np.random.Generator) -> int:
    return int(np.searchsorted(cum[i], rng.random(), side="right"))


def simulate(proc: LinearwiseProcess, horizon: float, rng: SeedLike) -> Trajectory:
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    rng = as_generator(rng)
    chain = proc.chain
    cum = proc._cum_rows
    laws = [proc.level_laws[s] for s in chain.states]
    n0, x0 = proc.initial
    cur = chain.index(n0)
    times = [0.0]
    levels = [cur]
    t = float(laws[cur].residual(x0).sample(rng))
    while True:
        cur = _next_level(cum, cur, rng)
        times.append(t)
        levels.append(cur)
        if t > horizon:
            break
        t += float(laws[cur].sample(rng))
    labels = np.asarray(chain.states)[levels]
    return Trajectory(np.asarray(times), labels, proc.initial, float(horizon))


def observe_state(traj: Trajectory, t: float) -> tuple[int, float, float]:
    """Level, elapsed time and residual time at ``t``.

    Before the first jump the elapsed time includes the initial ``x0``.
    A ``t`` within ``1e-12`` of a jump counts as just after it.
    """
    if t < 0 or t > traj.horizon:
        raise ValueError(f"t={t} outside [0, {traj.horizon}]")
    j = int(np.searchsorted(traj.jump_times, t + TIE_TOL, side="right")) - 1
    j = max(j, 0)
    x = t - float(traj.jump_times[j])
    x = traj.initial[1] + t if j == 0 else max(x, 0.0)
    return int(traj.levels[j]), x, float(traj.jump_times[j + 1]) - t


# ---------------------------------------------------------------------------
# analytic stationary law


@dataclass(frozen=True, eq=False)
class StationaryLaw:
    frequencies: Mapping[int, float]
    level_laws: Mapping[int, Distribution]
    T: float

    def __reduce__(self):
        return (StationaryLaw, (dict(self.frequencies), dict(self.level_laws), self.T))

    def query(self, i: int, a: float = 0.0, b: float = 0.0) -> float:
        """``P{n = i, x > a, x* > b}`` under the stationary law."""
        if i not in self.frequencies:
            raise UnknownState(i)
        if a < 0 or b < 0:
            raise ValueError("a and b must be nonnegative")
        p = self.frequencies[i]
        if p == 0:
            return 0.0
        return p / self.T * tail_integral(self.level_laws[i], a + b)

    def level_probability(self, k: int) -> float:
        if k not in self.frequencies:
            raise UnknownState(k)
        return self.frequencies[k] * self.level_laws[k].mean / self.T

    def mean_cycle_length(self, k: int) -> float:
        """Mean time between consecutive entries into ``(k, 0)``."""
        if k not in self.frequencies:
            raise UnknownState(k)
        p = self.frequencies[k]
        if p == 0:
            raise TransientState(f"state {k} is transient")
        return self.T / p


def stationary_law(chain: EmbeddedChain, level_laws: Mapping[int, Distribution]
                   ) -> StationaryLaw:
    """Analytic stationary law of a linearwise process.

    Raises
    ------
    InfiniteMean
        if some level has an infinite mean stay.
    LatticeSupport
        if the supports of the essential levels share a lattice.
    """
    laws = {int(k): v for k, v in level_laws.items()}
    p = chain_frequencies(chain)
    for s in chain.states:
        if not math.isfinite(laws[s].mean):
            raise InfiniteMean(f"level {s} has infinite mean stay")
    essential = [laws[s] for s in chain.essential_states]
    if not common_support_nonlattice(essential):
        raise LatticeSupport("supports of the essential levels lie on a common lattice")
    T = sum(p[s] * laws[s].mean for s in chain.states)
    return StationaryLaw(MappingProxyType(p), MappingProxyType(laws), float(T))


def level_probability(law: StationaryLaw, k: int) -> float:
    return law.level_probability(k)


def mean_cycle_length(law: StationaryLaw, k: int) -> float:
    return law.mean_cycle_length(k)


# ---------------------------------------------------------------------------
# Monte Carlo


def _state_chunk(size: int, rng: np.random.Generator, proc: LinearwiseProcess,
                 t: float, hit_state: Optional[int]):
    chain = proc.chain
    cum = proc._cum_rows
    laws = [proc.level_laws[s] for s in chain.states]
    n0, x0 = proc.initial
    i0 = chain.index(n0)
    k = chain.index(hit_state) if hit_state is not None else -1

    lvl = np.full(size, i0, dtype=np.intp)
    start = np.full(size, -x0)
    end = np.asarray(laws[i0].residual(x0).sample(rng, size), dtype=float)
    hit = np.full(size, np.inf)
    if i0 == k and x0 == 0:
        hit[:] = 0.0

    active = np.nonzero(end <= t)[0]
    while active.size:
        u = rng.random(active.size)
        cur = lvl[active]
        new = np.empty_like(cur)
        for i in np.unique(cur):
            sel = cur == i
            new[sel] = np.searchsorted(cum[i], u[sel], side="right")
        lvl[active] = new
        start[active] = end[active]
        if k >= 0:
            first = active[(new == k) & np.isinf(hit[active])]
            hit[first] = start[first]
        soj = np.empty(active.size)
        for j in np.unique(new):
            sel = new == j
            soj[sel] = laws[j].sample(rng, int(sel.sum()))
        end[active] = start[active] + soj
        active = active[end[active] <= t]
    states = np.asarray(chain.states)[lvl]
    return states, t - start, end - t, hit


def sample_states(proc: LinearwiseProcess, t: float, replicas: int, seed: SeedLike,
                  workers: int = 1, hit_state: Optional[int] = None):
    """Draws of ``(n_t, x_t, x*_t, first entry time into (hit_state, 0))``.

    The last array is ``inf`` where the entry did not happen by ``t`` or no
    ``hit_state`` was requested.
    """
    chunks = run_chunked(_state_chunk, replicas, seed, workers, proc=proc, t=float(t),
                         hit_state=hit_state)
    return concat(chunks)


@dataclass(frozen=True)
class ProbeRow:
    i: int
    a: float
    b: float
    estimate: float
    half_width: float
    analytic: float
    inside: bool


@dataclass(frozen=True, eq=False)
class EmpiricalLaw:
    """Replica-wise observations of ``(n, x, x*)`` at time ``t_obs``."""

    n: np.ndarray
    x: np.ndarray
    x_star: np.ndarray
    t_obs: float

    @property
    def replicas(self) -> int:
        return int(self.n.size)

    def estimate(self, i: int, a: float = 0.0, b: float = 0.0,
                 confidence: float = 0.999) -> tuple[float, float]:
        """Frequency of ``{n = i, x > a, x* > b}`` and its binomial half-width."""
        p = float(np.mean((self.n == i) & (self.x > a) & (self.x_star > b)))
        return p, binomial_half_width(p, self.replicas, z_value(confidence))

    def compare(self, law: StationaryLaw, probes: Sequence[tuple[int, float, float]],
                confidence: float = 0.999) -> list[ProbeRow]:
        """Check every probe against a simultaneous band around the analytic value.

        The band at each probe is ``z * sqrt(p0 (1 - p0) / N)`` with ``z``
        Bonferroni-split across the probes.
        """
        z = z_value(confidence, len(probes))
        rows = []
        for i, a, b in probes:
            p_hat, _ = self.estimate(i, a, b)
            p0 = law.query(i, a, b)
            hw = binomial_half_width(p0, self.replicas, z)
            rows.append(ProbeRow(int(i), float(a), float(b), p_hat, hw, p0,
                                 abs(p_hat - p0) <= hw + 1e-15))
        return rows


def estimate_law(proc: LinearwiseProcess, t_obs: float, replicas: int, seed: SeedLike,
                 workers: int = 1) -> EmpiricalLaw:
    n, x, xs, _ = sample_states(proc, t_obs, replicas, seed, workers)
    return EmpiricalLaw(n, x, xs, float(t_obs))


def compare_laws(first: EmpiricalLaw, second: EmpiricalLaw,
                 probes: Sequence[tuple[int, float, float]], confidence: float = 0.999):
    """Two-sample agreement per probe: ``|p1 - p2| <= z sqrt(se1^2 + se2^2)``."""
    z = z_value(confidence, len(probes))
    rows = []
    for i, a, b in probes:
        p1, _ = first.estimate(i, a, b)
        p2, _ = second.estimate(i, a, b)
        pooled = (p1 * first.replicas + p2 * second.replicas) / (first.replicas + second.replicas)
        se = math.sqrt(pooled * (1 - pooled) * (1 / first.replicas + 1 / second.replicas))
        rows.append((int(i), float(a), float(b), p1, p2, z * se, abs(p1 - p2) <= z * se + 1e-15))
    return rows


def write_probe_rows(rows: Iterable[ProbeRow], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["i", "a", "b", "estimate", "half_width", "analytic"])
        for r in rows:
            w.writerow([r.i, repr(r.a), repr(r.b), repr(r.estimate), repr(r.half_width),
                        repr(r.analytic)])


def first_hit_time(proc: LinearwiseProcess, k: int, rng: SeedLike,
                   max_jumps: int = 10**6) -> float:
    """First time ``t > 0`` the process enters ``(k, 0)``.

    Raises
    ------
    TransientState
        if ``k`` is not in the closed class.
    NoHit
        if ``max_jumps`` jumps pass without an entry.
    """
    chain = proc.chain
    if int(k) not in chain.essential_states:
        raise TransientState(f"state {k} is not essential")
    rng = as_generator(rng)
    cum = proc._cum_rows
    laws = [proc.level_laws[s] for s in chain.states]
    target = chain.index(k)
    n0, x0 = proc.initial
    cur = chain.index(n0)
    t = float(laws[cur].residual(x0).sample(rng))
    for _ in range(max_jumps):
        cur = _next_level(cum, cur, rng)
        if cur == target:
            return t
        t += float(laws[cur].sample(rng))
    raise NoHit(f"no entry into ({k}, 0) within {max_jumps} jumps")


def regeneration_cycles(proc: LinearwiseProcess, k: int, count: int, rng: SeedLike,
                        max_jumps: int = 10**8) -> np.ndarray:
    """Lengths of ``count`` successive cycles between entries into ``(k, 0)``.

    The path starts from the process's initial state; the stretch before the
    first entry is discarded.
    """
    chain = proc.chain
    if int(k) not in chain.essential_states:
        raise TransientState(f"state {k} is not essential")
    rng = as_generator(rng)
    cum = proc._cum_rows
    laws = [proc.level_laws[s] for s in chain.states]
    target = chain.index(k)
    n0, x0 = proc.initial
    cur = chain.index(n0)
    t = float(laws[cur].residual(x0).sample(rng))
    entries: list[float] = []
    for _ in range(max_jumps):
        cur = _next_level(cum, cur, rng)
        if cur == target:
            entries.append(t)
            if len(entries) > count:
                return np.diff(entries)
        t += float(laws[cur].sample(rng))
    raise NoHit(f"fewer than {count} cycles within {max_jumps} jumps")
