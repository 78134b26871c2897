"""Lifetime distributions on [0, inf).

Every law exposes its CDF, survival function, tail integrals
``int_a^inf (1 - F(u)) du``, raw and exponential moments, a vectorised
sampler, its residual-life law and a description of its support.  The
closed forms are used wherever they exist; the base class falls back on
adaptive quadrature.

Laws are immutable.  A law with positive mass at zero is rejected with
:class:`~renewsim.errors.AtomAtZero`; the only exception is
:class:`Instant`, the point mass at zero that stands for an exhausted
residual stay.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Any, Callable, ClassVar, Mapping, Sequence

import numpy as np
from scipy import integrate, special

from renewsim.errors import AtomAtZero, InfiniteMean, NonFinite

#: Tolerance used to decide whether atoms sit on a common lattice.
LATTICE_TOL = 1e-9
#: Lattice spans below this value are treated as numerical noise.
MIN_LATTICE_SPAN = 1e-6

QUAD_EPSREL = 1e-10
QUAD_EPSABS = 1e-14


@dataclass(frozen=True)
class SupportDescriptor:
    """Atoms and continuous intervals that make up the support of a law."""

    atoms: tuple[float, ...] = ()
    intervals: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        atoms = tuple(sorted({float(a) for a in self.atoms}))
        if any(a < 0 for a in atoms):
            raise ValueError("support atoms must be nonnegative")
        ivs = sorted((float(lo), float(hi)) for lo, hi in self.intervals if hi > lo)
        merged: list[tuple[float, float]] = []
        for lo, hi in ivs:
            if lo < 0:
                raise ValueError("support intervals must be nonnegative")
            if merged and lo <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
            else:
                merged.append((lo, hi))
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "intervals", tuple(merged))

    def merge(self, other: SupportDescriptor) -> SupportDescriptor:
        return SupportDescriptor(self.atoms + other.atoms,
                                 self.intervals + other.intervals)

    def shifted(self, a: float) -> SupportDescriptor:
        """Support of ``X - a`` given ``X > a``."""
        atoms = tuple(x - a for x in self.atoms if x > a)
        ivs = tuple((max(lo, a) - a, hi - a) for lo, hi in self.intervals if hi > a)
        return SupportDescriptor(atoms, ivs)

    @property
    def is_empty(self) -> bool:
        return not self.atoms and not self.intervals


class Distribution:
    """Base class for lifetime laws.

    Subclasses implement :meth:`cdf`, :meth:`sample` and :meth:`support`;
    everything else has a generic quadrature fallback that closed forms
    override.
    """

    kind: ClassVar[str] = "abstract"

    # -- pointwise ---------------------------------------------------------
    def cdf(self, s):
        raise NotImplementedError

    def survival(self, s):
        """``1 - F(s)``; equal to 1 for negative ``s``."""
        return 1.0 - self.cdf(s)

    # -- integrals -----------------------------------------------------------
    def tail_integral(self, a: float) -> float:
        """``int_a^inf (1 - F(u)) du`` for ``a >= 0``."""
        val, _ = _quad(self.survival, a, math.inf)
        return val

    def moment(self, k: int) -> float:
        """k-th raw moment, ``k * int_0^inf s^(k-1) (1 - F(s)) ds``."""
        val, ok = _quad(lambda s: k * s ** (k - 1) * self.survival(s), 0.0, math.inf)
        return val if ok else math.inf

    def exp_moment(self, alpha: float) -> float:
        """``E exp(alpha * X)``, ``inf`` when the integral diverges."""
        val, ok = _quad(lambda s: alpha * math.exp(alpha * s) * self.survival(s),
                        0.0, math.inf)
        return 1.0 + val if ok else math.inf

    @cached_property
    def mean(self) -> float:
        return float(self.moment(1))

    @cached_property
    def second_moment(self) -> float:
        return float(self.moment(2))

    # -- transforms ----------------------------------------------------------
    def residual(self, a: float) -> Distribution:
        """Law of ``X - a`` given ``X > a``."""
        if a == 0:
            return self
        if self.survival(a) <= 0.0:
            return Instant()
        return Residual(self, float(a))

    def isf(self, q):
        """Inverse survival function; only needed for residual sampling."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int | None = None):
        raise NotImplementedError

    def support(self) -> SupportDescriptor:
        raise NotImplementedError

    def to_config(self) -> dict[str, Any]:
        raise NotImplementedError


def _quad(f: Callable[[float], float], lo: float, hi: float) -> tuple[float, bool]:
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(lambda u: float(f(u)), lo, hi,
                                    epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=400)
        except (integrate.IntegrationWarning, OverflowError):
            return math.inf, False
    if not math.isfinite(val):
        return math.inf, False
    return val, True


def _check_positive(name: str, value: float):
    if not (math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True, eq=True)
class Exponential(Distribution):
    rate: float
    kind: ClassVar[str] = "exponential"

    def __post_init__(self):
        _check_positive("rate", self.rate)

    def cdf(self, s):
        s = np.asarray(s, dtype=float)
        return np.where(s > 0, -np.expm1(-self.rate * np.maximum(s, 0.0)), 0.0)

    def survival(self, s):
        s = np.asarray(s, dtype=float)
        return np.exp(-self.rate * np.maximum(s, 0.0))

    def tail_integral(self, a):
        return math.exp(-self.rate * a) / self.rate

    def moment(self, k):
        return math.factorial(k) / self.rate ** k

    def exp_moment(self, alpha):
        return self.rate / (self.rate - alpha) if alpha < self.rate else math.inf

    def residual(self, a):
        return self

    def isf(self, q):
        return -np.log(q) / self.rate

    def sample(self, rng, size=None):
        return rng.exponential(1.0 / self.rate, size)

    def support(self):
        return SupportDescriptor(intervals=((0.0, math.inf),))

    def to_config(self):
        return {"kind": self.kind, "rate": self.rate}


@dataclass(frozen=True)
class Uniform(Distribution):
    lo: float
    hi: float
    kind: ClassVar[str] = "uniform"

    def __post_init__(self):
        if not (0 <= self.lo < self.hi < math.inf):
            raise ValueError(f"uniform needs 0 <= lo < hi, got ({self.lo}, {self.hi})")

    def cdf(self, s):
        s = np.asarray(s, dtype=float)
        return np.clip((s - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def tail_integral(self, a):
        lo, hi = self.lo, self.hi
        if a <= lo:
            return (lo - a) + (hi - lo) / 2.0
        if a >= hi:
            return 0.0
        return (hi - a) ** 2 / (2.0 * (hi - lo))

    def moment(self, k):
        lo, hi = self.lo, self.hi
        return (hi ** (k + 1) - lo ** (k + 1)) / ((k + 1) * (hi - lo))

    def exp_moment(self, alpha):
        w = self.hi - self.lo
        try:
            return math.exp(alpha * self.lo) * math.expm1(alpha * w) / (alpha * w)
        except OverflowError:
            return math.inf

    def residual(self, a):
        if a == 0:
            return self
        if a < self.lo:
            return Uniform(self.lo - a, self.hi - a)
        if a < self.hi:
            return Uniform(0.0, self.hi - a)
        return Instant()

    def isf(self, q):
        return self.hi - np.asarray(q) * (self.hi - self.lo)

    def sample(self, rng, size=None):
        return rng.uniform(self.lo, self.hi, size)

    def support(self):
        return SupportDescriptor(intervals=((self.lo, self.hi),))

    def to_config(self):
        return {"kind": self.kind, "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class Gamma(Distribution):
    shape: float
    scale: float
    kind: ClassVar[str] = "gamma"

    def __post_init__(self):
        _check_positive("shape", self.shape)
        _check_positive("scale", self.scale)

    def cdf(self, s):
        s = np.asarray(s, dtype=float)
        return special.gammainc(self.shape, np.maximum(s, 0.0) / self.scale)

    def survival(self, s):
        s = np.asarray(s, dtype=float)
        return special.gammaincc(self.shape, np.maximum(s, 0.0) / self.scale)

    def tail_integral(self, a):
        # E (X - a)^+ through regularised upper incomplete gamma functions
        k, th = self.shape, self.scale
        z = a / th
        return float(k * th * special.gammaincc(k + 1, z) - a * special.gammaincc(k, z))

    def moment(self, k):
        return float(self.scale ** k * math.exp(special.gammaln(self.shape + k)
                                                - special.gammaln(self.shape)))

    def exp_moment(self, alpha):
        if alpha * self.scale >= 1:
            return math.inf
        return (1.0 - alpha * self.scale) ** (-self.shape)

    def isf(self, q):
        return self.scale * special.gammainccinv(self.shape, q)

    def sample(self, rng, size=None):
        return rng.gamma(self.shape, self.scale, size)

    def support(self):
        return SupportDescriptor(intervals=((0.0, math.inf),))

    def to_config(self):
        return {"kind": self.kind, "shape": self.shape, "scale": self.scale}


@dataclass(frozen=True)
class Deterministic(Distribution):
    value: float
    kind: ClassVar[str] = "deterministic"

    def __post_init__(self):
        if self.value == 0:
            raise AtomAtZero("deterministic law at 0 has an atom at zero")
        _check_positive("value", self.value)

    def cdf(self, s):
        return np.where(np.asarray(s, dtype=float) >= self.value, 1.0, 0.0)

    def tail_integral(self, a):
        return max(self.value - a, 0.0)

    def moment(self, k):
        return self.value ** k

    def exp_moment(self, alpha):
        try:
            return math.exp(alpha * self.value)
        except OverflowError:
            return math.inf

    def residual(self, a):
        if a == 0:
            return self
        return Deterministic(self.value - a) if a < self.value else Instant()

    def sample(self, rng, size=None):
        if size is None:
            return self.value
        return np.full(size, self.value)

    def support(self):
        return SupportDescriptor(atoms=(self.value,))

    def to_config(self):
        return {"kind": self.kind, "value": self.value}


class _AtomicLaw(Distribution):
    """Shared machinery for finitely supported laws."""

    _values: np.ndarray
    _probs: np.ndarray

    @cached_property
    def _cum(self):
        return np.cumsum(self._probs)

    def cdf(self, s):
        s = np.asarray(s, dtype=float)
        idx = np.searchsorted(self._values, s, side="right")
        cum = np.concatenate(([0.0], self._cum))
        return np.minimum(cum[idx], 1.0)

    def survival(self, s):
        s = np.asarray(s, dtype=float)
        idx = np.searchsorted(self._values, s, side="right")
        tail = np.concatenate((np.cumsum(self._probs[::-1])[::-1], [0.0]))
        return tail[idx]

    def tail_integral(self, a):
        return float(np.sum(self._probs * np.maximum(self._values - a, 0.0)))

    def moment(self, k):
        return float(np.sum(self._probs * self._values ** k))

    def exp_moment(self, alpha):
        with np.errstate(over="ignore"):
            return float(np.sum(self._probs * np.exp(alpha * self._values)))

    def support(self):
        return SupportDescriptor(atoms=tuple(self._values[self._probs > 0]))


@dataclass(frozen=True)
class Discrete(_AtomicLaw):
    """Finitely many atoms ``points = ((value, prob), ...)``."""

    points: tuple[tuple[float, float], ...]
    kind: ClassVar[str] = "discrete"

    def __post_init__(self):
        if not self.points:
            raise ValueError("discrete law needs at least one point")
        acc: dict[float, float] = {}
        for v, p in self.points:
            v, p = float(v), float(p)
            if v < 0 or not math.isfinite(v):
                raise ValueError(f"discrete value must be nonnegative, got {v}")
            if p < 0:
                raise ValueError(f"discrete probability must be nonnegative, got {p}")
            acc[v] = acc.get(v, 0.0) + p
        total = sum(acc.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"discrete probabilities sum to {total}, not 1")
        if acc.get(0.0, 0.0) > 0:
            raise AtomAtZero("discrete law has positive mass at zero")
        pts = tuple(sorted((v, p / total) for v, p in acc.items() if p > 0))
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_values", np.array([v for v, _ in pts]))
        object.__setattr__(self, "_probs", np.array([p for _, p in pts]))

    def residual(self, a):
        if a == 0:
            return self
        keep = [(v - a, p) for v, p in self.points if v > a]
        if not keep:
            return Instant()
        total = sum(p for _, p in keep)
        return Discrete(tuple((v, p / total) for v, p in keep))

    def sample(self, rng, size=None):
        return rng.choice(self._values, size=size, p=self._probs)

    def to_config(self):
        return {"kind": self.kind, "points": [list(p) for p in self.points]}


@dataclass(frozen=True)
class Empirical(_AtomicLaw):
    """Equal-weight law on a recorded sample."""

    samples: tuple[float, ...]
    kind: ClassVar[str] = "empirical"

    def __post_init__(self):
        xs = np.sort(np.asarray(self.samples, dtype=float))
        if xs.size == 0:
            raise ValueError("empirical law needs at least one sample")
        if not np.all(np.isfinite(xs)) or xs[0] < 0:
            raise ValueError("empirical samples must be finite and nonnegative")
        if xs[0] == 0:
            raise AtomAtZero("empirical sample contains zero")
        values, counts = np.unique(xs, return_counts=True)
        object.__setattr__(self, "samples", tuple(xs.tolist()))
        object.__setattr__(self, "_values", values)
        object.__setattr__(self, "_probs", counts / xs.size)

    def residual(self, a):
        if a == 0:
            return self
        keep = tuple(x - a for x in self.samples if x > a)
        return Empirical(keep) if keep else Instant()

    def sample(self, rng, size=None):
        return rng.choice(np.asarray(self.samples), size=size)

    def to_config(self):
        return {"kind": self.kind, "samples": list(self.samples)}


@dataclass(frozen=True)
class Mixture(Distribution):
    weights: tuple[float, ...]
    components: tuple[Distribution, ...]
    kind: ClassVar[str] = "mixture"

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        comps = tuple(self.components)
        if len(w) != len(comps) or not comps:
            raise ValueError("mixture needs one weight per component")
        if any(x < 0 for x in w) or abs(sum(w) - 1.0) > 1e-9:
            raise ValueError(f"mixture weights must be nonnegative and sum to 1, got {w}")
        for c in comps:
            if isinstance(c, Instant):
                raise AtomAtZero("mixture component is a point mass at zero")
        s = sum(w)
        object.__setattr__(self, "weights", tuple(x / s for x in w))
        object.__setattr__(self, "components", comps)

    def cdf(self, s):
        return sum(w * c.cdf(s) for w, c in zip(self.weights, self.components))

    def survival(self, s):
        return sum(w * c.survival(s) for w, c in zip(self.weights, self.components))

    def tail_integral(self, a):
        return sum(w * c.tail_integral(a) for w, c in zip(self.weights, self.components))

    def moment(self, k):
        return sum(w * c.moment(k) for w, c in zip(self.weights, self.components) if w > 0)

    def exp_moment(self, alpha):
        return sum(w * c.exp_moment(alpha)
                   for w, c in zip(self.weights, self.components) if w > 0)

    def residual(self, a):
        if a == 0:
            return self
        surv = [float(c.survival(a)) for c in self.components]
        mass = [w * s for w, s in zip(self.weights, surv)]
        total = sum(mass)
        if total <= 0:
            return Instant()
        keep = [(m / total, c.residual(a)) for m, c in zip(mass, self.components) if m > 0]
        if len(keep) == 1:
            return keep[0][1]
        return Mixture(tuple(m for m, _ in keep), tuple(c for _, c in keep))

    def sample(self, rng, size=None):
        n = 1 if size is None else int(np.prod(size))
        which = rng.choice(len(self.components), size=n, p=self.weights)
        out = np.empty(n)
        for j, comp in enumerate(self.components):
            sel = which == j
            if sel.any():
                out[sel] = comp.sample(rng, int(sel.sum()))
        return out[0] if size is None else out.reshape(size)

    def support(self):
        return reduce(SupportDescriptor.merge,
                      (c.support() for w, c in zip(self.weights, self.components) if w > 0))

    def to_config(self):
        return {"kind": self.kind, "weights": list(self.weights),
                "components": [c.to_config() for c in self.components]}


@dataclass(frozen=True)
class Residual(Distribution):
    """Law of ``base - offset`` conditioned on ``base > offset``."""

    base: Distribution
    offset: float
    kind: ClassVar[str] = "residual"

    def __post_init__(self):
        if isinstance(self.base, Residual):
            object.__setattr__(self, "offset", self.base.offset + self.offset)
            object.__setattr__(self, "base", self.base.base)

    @cached_property
    def _norm(self) -> float:
        return float(self.base.survival(self.offset))

    def cdf(self, s):
        return 1.0 - self.survival(s)

    def survival(self, s):
        s = np.asarray(s, dtype=float)
        return np.where(s < 0, 1.0, self.base.survival(np.maximum(s, 0.0) + self.offset)
                        / self._norm)

    def tail_integral(self, a):
        return self.base.tail_integral(a + self.offset) / self._norm

    def exp_moment(self, alpha):
        if not math.isfinite(self.base.exp_moment(alpha)):
            return math.inf
        return super().exp_moment(alpha)

    def residual(self, a):
        if a == 0:
            return self
        return self.base.residual(self.offset + a)

    def sample(self, rng, size=None):
        u = rng.random(size)
        try:
            return self.base.isf(u * self._norm) - self.offset
        except NotImplementedError:
            return self._rejection(rng, size)

    def _rejection(self, rng, size):
        n = 1 if size is None else int(np.prod(size))
        out = np.empty(0)
        while out.size < n:
            draw = np.atleast_1d(self.base.sample(rng, 4 * n))
            out = np.concatenate((out, draw[draw > self.offset] - self.offset))
        out = out[:n]
        return out[0] if size is None else out.reshape(size)

    def support(self):
        return self.base.support().shifted(self.offset)

    def to_config(self):
        return {"kind": self.kind, "base": self.base.to_config(), "offset": self.offset}


@dataclass(frozen=True)
class Instant(Distribution):
    """Point mass at zero: the residual of a stay that is already over."""

    kind: ClassVar[str] = "instant"

    def cdf(self, s):
        return np.where(np.asarray(s, dtype=float) >= 0, 1.0, 0.0)

    def tail_integral(self, a):
        return 0.0

    def moment(self, k):
        return 0.0

    def exp_moment(self, alpha):
        return 1.0

    def residual(self, a):
        return self

    def sample(self, rng, size=None):
        return 0.0 if size is None else np.zeros(size)

    def support(self):
        return SupportDescriptor(atoms=(0.0,))

    def to_config(self):
        return {"kind": self.kind}


# ---------------------------------------------------------------------------
# functional interface


def survival(d: Distribution, s: float) -> float:
    return float(d.survival(s))


def tail_integral(d: Distribution, a: float) -> float:
    """``int_a^inf (1 - F(u)) du``.

    Raises
    ------
    InfiniteMean
        if the first moment of ``d`` diverges.
    """
    if not math.isfinite(d.mean):
        raise InfiniteMean(f"{d!r} has infinite mean")
    if a < 0:
        return -a + float(d.tail_integral(0.0))
    return float(d.tail_integral(a))


def residual_distribution(d: Distribution, a: float) -> Distribution:
    if a < 0:
        raise ValueError("residual offset must be nonnegative")
    return d.residual(float(a))


def moment(d: Distribution, k: int) -> float:
    if int(k) != k or k < 1:
        raise ValueError(f"moment order must be a positive integer, got {k}")
    return float(d.moment(int(k)))


def exp_moment(d: Distribution, alpha: float) -> float:
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return float(d.exp_moment(alpha))


def sample(d: Distribution, rng: np.random.Generator, size: int | None = None):
    return d.sample(rng, size)


def _real_gcd(a: float, b: float, tol: float) -> float:
    a, b = max(a, b), min(a, b)
    while b > tol:
        r = math.fmod(a, b)
        if b - r <= tol:
            r = 0.0
        a, b = b, r
    return a


def lattice_span(s: SupportDescriptor, tol: float = LATTICE_TOL) -> tuple[float, float] | None:
    """Largest span ``b`` with every atom in ``b * Z``, or ``None``.

    Any continuous interval makes the support non-lattice.  Spans are
    found by a tolerant Euclidean algorithm on the atom locations; spans
    shorter than :data:`MIN_LATTICE_SPAN` are reported as non-lattice.
    The returned offset is the smallest nonnegative ``a`` with all atoms
    in ``a + b * Z``, which is 0 for an arithmetic support.
    """
    if s.is_empty:
        raise ValueError("empty support")
    if s.intervals:
        return None
    atoms = [x for x in s.atoms if x > tol]
    if not atoms:
        return None
    g = reduce(lambda x, y: _real_gcd(x, y, tol), atoms)
    if g < MIN_LATTICE_SPAN:
        return None
    for x in atoms:
        if abs(x - round(x / g) * g) > tol * max(1.0, x):
            return None
    a = math.fmod(min(atoms), g)
    if a <= tol or g - a <= tol:
        a = 0.0
    return a, g


def common_support_nonlattice(ds: Sequence[Distribution]) -> bool:
    if not ds:
        raise ValueError("need at least one distribution")
    merged = reduce(SupportDescriptor.merge, (d.support() for d in ds))
    return lattice_span(merged) is None


def evaluate(f: Callable, x: np.ndarray) -> np.ndarray:
    """Apply ``f`` to an array, vectorising scalar-only callables."""
    x = np.asarray(x, dtype=float)
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape == x.shape:
            return y
        if y.ndim == 0:
            return np.full(x.shape, float(y))
    except (TypeError, ValueError):
        pass
    return np.vectorize(lambda u: float(f(u)), otypes=[float])(x)


def dri_gap(f: Callable, delta: float, t_max: float, points_per_cell: int = 32) -> float:
    """Upper-minus-lower Darboux sum of ``f`` at mesh ``delta`` on ``[0, t_max]``.

    Sup and inf over each closed cell are estimated from
    ``points_per_cell`` equispaced samples including both endpoints.
    """
    if not (delta > 0 and t_max > 0):
        raise ValueError("delta and t_max must be positive")
    n = int(math.ceil(t_max / delta - 1e-9))
    edges = np.arange(n + 1) * delta
    grid = np.linspace(edges[:-1], edges[1:], points_per_cell, axis=1)
    vals = evaluate(f, grid)
    if not np.all(np.isfinite(vals)) or np.any(vals < 0):
        raise NonFinite("function must be finite and nonnegative on the grid")
    return float(delta * np.sum(vals.max(axis=1) - vals.min(axis=1)))


# ---------------------------------------------------------------------------
# declarative config

KINDS: dict[str, type[Distribution]] = {
    cls.kind: cls
    for cls in (Exponential, Uniform, Gamma, Deterministic, Discrete, Empirical, Mixture)
}


def from_config(cfg: Mapping[str, Any]) -> Distribution:
    """Build a law from ``{kind: ..., <params>}``.

    Raises ``KeyError`` for unknown kinds or missing fields and
    ``ValueError`` (including :class:`AtomAtZero`) for invalid parameters.
    """
    cfg = dict(cfg)
    kind = cfg.pop("kind", None)
    if kind not in KINDS:
        raise KeyError(f"unknown distribution kind {kind!r}; supported kinds: "
                       + ", ".join(sorted(KINDS)))
    cls = KINDS[kind]
    fields_ = {
        "exponential": ("rate",),
        "uniform": ("lo", "hi"),
        "gamma": ("shape", "scale"),
        "deterministic": ("value",),
        "discrete": ("points",),
        "empirical": ("samples",),
        "mixture": ("weights", "components"),
    }[kind]
    missing = [f for f in fields_ if f not in cfg]
    extra = sorted(set(cfg) - set(fields_))
    if missing:
        raise KeyError(f"{kind} law is missing field(s): {', '.join(missing)}")
    if extra:
        raise KeyError(f"{kind} law has unknown field(s): {', '.join(extra)}")
    if kind == "discrete":
        return Discrete(tuple((float(v), float(p)) for v, p in cfg["points"]))
    if kind == "empirical":
        return Empirical(tuple(float(x) for x in cfg["samples"]))
    if kind == "mixture":
        return Mixture(tuple(float(w) for w in cfg["weights"]),
                       tuple(from_config(c) for c in cfg["components"]))
    return cls(**{k: float(cfg[k]) for k in fields_})
