"""Scenario files: a YAML description of one verification run.

A scenario names a mode (``renewal``, ``linearwise``, ``bounds`` or
``key-renewal``), the model to build, run parameters and a mapping of
checks.  Distributions use the ``{kind: ..., <params>}`` records of
:func:`renewsim.dist.from_config`.  See ``docs/scenarios.md`` for the full
schema.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Mapping, Optional

import numpy as np
import yaml

from renewsim.dist import Distribution, from_config
from renewsim.errors import RenewsimError
from renewsim.linearwise import EmbeddedChain, LinearwiseProcess

MODES = ("renewal", "linearwise", "bounds", "key-renewal")
DEFAULT_REPLICAS = 100_000

MODE_CHECKS: dict[str, tuple[str, ...]] = {
    "renewal": ("h_reference", "h_points", "mc_vs_exact", "stationary_vs_exact",
                "stationary_value", "mc_vs_stationary", "underjump_vs_stationary",
                "stationary_mean", "mc_overjump_mean"),
    "key-renewal": ("limit_value", "gap_at"),
    "linearwise": ("normalization", "query", "level_probability", "mc_band", "start_independence",
                   "regeneration", "first_hit", "degeneration"),
    "bounds": ("overjump_curve", "monotonicity_probes", "power_moment", "exp_moment",
               "conditional"),
}

TOP_KEYS = {"name", "mode", "description", "criteria", "seed", "replicas", "workers",
            "grid_step", "model", "run", "checks"}


class ParseError(RenewsimError, ValueError):
    """A scenario file is not valid YAML or does not follow the schema."""


class ValidationError(RenewsimError, ValueError):
    """A scenario parses but violates a model invariant."""


@dataclass
class Scenario:
    name: str
    mode: str
    seed: int
    replicas: int = DEFAULT_REPLICAS
    workers: int = 1
    grid_step: Optional[float] = None
    criteria: tuple[str, ...] = ()
    description: str = ""
    cycle: Optional[Distribution] = None
    first_delay: Optional[Distribution] = None
    process: Optional[LinearwiseProcess] = None
    b: Optional[Callable] = None
    b_config: Optional[dict] = None
    run: dict[str, Any] = field(default_factory=dict)
    checks: dict[str, Any] = field(default_factory=dict)
    path: Optional[Path] = None

    @property
    def step(self) -> Optional[float]:
        """Grid step, defaulting to a thousandth of the mean cycle."""
        if self.grid_step is not None:
            return self.grid_step
        if self.cycle is not None:
            return self.cycle.mean / 1000.0
        return None

    def with_overrides(self, seed=None, workers=None, replicas=None,
                       grid_step=None) -> Scenario:
        changes = {k: v for k, v in dict(seed=seed, workers=workers, replicas=replicas,
                                         grid_step=grid_step).items() if v is not None}
        return replace(self, **changes)


def _line_index(text: str) -> dict[tuple, int]:
    """Map key paths to 1-based line numbers using the YAML node tree."""
    index: dict[tuple, int] = {}
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError:
        return index

    def walk(node, path):
        index[path] = node.start_mark.line + 1
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                walk(v, path + (k.value,))
                index[path + (k.value,)] = k.start_mark.line + 1
        elif isinstance(node, yaml.SequenceNode):
            for i, v in enumerate(node.value):
                walk(v, path + (i,))

    if root is not None:
        walk(root, ())
    return index


class _Ctx:
    def __init__(self, path: Optional[Path], lines: dict[tuple, int]):
        self.path = path
        self.lines = lines

    def where(self, keypath: tuple) -> str:
        name = str(self.path) if self.path else "<scenario>"
        probe = keypath
        while probe and probe not in self.lines:
            probe = probe[:-1]
        line = self.lines.get(probe)
        dotted = ".".join(str(k) for k in keypath)
        return f"{name}:{line}: field '{dotted}'" if line else f"{name}: field '{dotted}'"

    def parse_error(self, keypath: tuple, msg: str) -> ParseError:
        return ParseError(f"{self.where(keypath)}: {msg}")

    def validation_error(self, keypath: tuple, exc: Exception) -> ValidationError:
        return ValidationError(f"{self.where(keypath)}: {exc} ({type(exc).__name__})")


def _number(ctx: _Ctx, raw: Mapping, key: str, path: tuple, default=None, kind=float):
    if key not in raw or raw[key] is None:
        if default is None:
            raise ctx.parse_error(path + (key,), "required field is missing")
        return default
    val = raw[key]
    if isinstance(val, bool):
        raise ctx.parse_error(path + (key,), f"expected a number, got {val!r}")
    try:
        out = kind(val)
    except (TypeError, ValueError):
        raise ctx.parse_error(path + (key,), f"expected a number, got {val!r}") from None
    if kind is int and out != val:
        raise ctx.parse_error(path + (key,), f"expected an integer, got {val!r}")
    if kind is float and not math.isfinite(out):
        raise ctx.parse_error(path + (key,), f"expected a finite number, got {val!r}")
    return out


def _distribution(ctx: _Ctx, raw: Any, path: tuple) -> Distribution:
    if not isinstance(raw, Mapping):
        raise ctx.parse_error(path, "expected a distribution record {kind: ..., ...}")
    try:
        return from_config(raw)
    except KeyError as exc:
        raise ctx.parse_error(path, exc.args[0]) from None
    except (TypeError,) as exc:
        raise ctx.parse_error(path, str(exc)) from None
    except ValueError as exc:
        raise ctx.validation_error(path, exc) from None


def _process(ctx: _Ctx, raw: Any, path: tuple) -> LinearwiseProcess:
    if not isinstance(raw, Mapping):
        raise ctx.parse_error(path, "expected a mapping with states, matrix, level_laws")
    for key in ("states", "matrix", "level_laws"):
        if key not in raw:
            raise ctx.parse_error(path + (key,), "required field is missing")
    states = raw["states"]
    if not isinstance(states, list) or not all(isinstance(s, int) and not isinstance(s, bool)
                                               for s in states):
        raise ctx.parse_error(path + ("states",), "expected a list of integers")
    matrix = raw["matrix"]
    try:
        P = np.array(matrix, dtype=float)
    except (TypeError, ValueError):
        raise ctx.parse_error(path + ("matrix",), "expected a list of numeric rows") from None
    try:
        chain = EmbeddedChain(tuple(states), P)
    except ValueError as exc:
        raise ctx.validation_error(path + ("matrix",), exc) from None
    laws_raw = raw["level_laws"]
    if not isinstance(laws_raw, Mapping):
        raise ctx.parse_error(path + ("level_laws",), "expected a mapping state -> distribution")
    laws = {}
    for k, v in laws_raw.items():
        try:
            key = int(k)
        except (TypeError, ValueError):
            raise ctx.parse_error(path + ("level_laws", k), "state keys must be integers") from None
        laws[key] = _distribution(ctx, v, path + ("level_laws", k))
    initial = raw.get("initial", [states[0], 0.0])
    if not (isinstance(initial, list) and len(initial) == 2):
        raise ctx.parse_error(path + ("initial",), "expected [n0, x0]")
    try:
        return LinearwiseProcess(chain, laws, (int(initial[0]), float(initial[1])))
    except (ValueError, KeyError) as exc:
        raise ctx.validation_error(path, exc) from None


def _b_function(ctx: _Ctx, raw: Any, path: tuple) -> Callable:
    if not isinstance(raw, Mapping) or "kind" not in raw:
        raise ctx.parse_error(path, "expected {kind: survival|zero|one, ...}")
    kind = raw["kind"]
    if kind == "survival":
        law = _distribution(ctx, raw.get("law"), path + ("law",))
        return law.survival
    if kind == "zero":
        return _zero
    if kind == "one":
        return _one
    raise ctx.parse_error(path + ("kind",), f"unknown b kind {kind!r}; supported: one, survival, zero")


def _zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def _one(x):
    return np.ones_like(np.asarray(x, dtype=float))


def parse_scenario(data: Any, path: Optional[Path] = None, text: str = "") -> Scenario:
    ctx = _Ctx(path, _line_index(text) if text else {})
    if not isinstance(data, Mapping):
        raise ctx.parse_error((), "scenario must be a mapping")
    unknown = sorted(set(data) - TOP_KEYS)
    if unknown:
        raise ctx.parse_error((unknown[0],), "unknown top-level field; allowed: "
                              + ", ".join(sorted(TOP_KEYS)))
    name = data.get("name")
    if not isinstance(name, str) or not name:
        raise ctx.parse_error(("name",), "required non-empty string")
    mode = data.get("mode")
    if mode not in MODES:
        raise ctx.parse_error(("mode",), f"unknown mode {mode!r}; supported: {', '.join(MODES)}")
    seed = _number(ctx, data, "seed", (), kind=int)
    replicas = _number(ctx, data, "replicas", (), default=DEFAULT_REPLICAS, kind=int)
    workers = _number(ctx, data, "workers", (), default=1, kind=int)
    grid_step = data.get("grid_step")
    if grid_step is not None:
        grid_step = _number(ctx, data, "grid_step", ())
        if grid_step <= 0:
            raise ctx.parse_error(("grid_step",), "must be positive")
    if replicas < 1 or workers < 1:
        raise ctx.parse_error(("replicas",), "replicas and workers must be positive")
    criteria = data.get("criteria", [])
    if not isinstance(criteria, list):
        raise ctx.parse_error(("criteria",), "expected a list of identifiers")

    model = data.get("model") or {}
    if not isinstance(model, Mapping):
        raise ctx.parse_error(("model",), "expected a mapping")
    sc = Scenario(name=name, mode=mode, seed=seed, replicas=replicas, workers=workers,
                  grid_step=grid_step, criteria=tuple(str(c) for c in criteria),
                  description=str(data.get("description", "")), path=path)

    if mode in ("renewal", "key-renewal") or "cycle" in model:
        sc.cycle = _distribution(ctx, model.get("cycle"), ("model", "cycle"))
    if model.get("first_delay") is not None:
        sc.first_delay = _distribution(ctx, model["first_delay"], ("model", "first_delay"))
    if mode == "linearwise":
        sc.process = _process(ctx, model, ("model",))
    elif "linearwise" in model:
        sc.process = _process(ctx, model["linearwise"], ("model", "linearwise"))
    if mode == "key-renewal":
        sc.b_config = dict(model.get("b") or {})
        sc.b = _b_function(ctx, model.get("b"), ("model", "b"))

    run = data.get("run") or {}
    if not isinstance(run, Mapping):
        raise ctx.parse_error(("run",), "expected a mapping")
    sc.run = dict(run)
    checks = data.get("checks") or {}
    if not isinstance(checks, Mapping):
        raise ctx.parse_error(("checks",), "expected a mapping of check name -> parameters")
    for cname in checks:
        if cname not in MODE_CHECKS[mode]:
            raise ctx.parse_error(("checks", cname), f"unknown check for mode {mode}; "
                                  f"supported: {', '.join(MODE_CHECKS[mode])}")
    sc.checks = {k: (v if v is not None else {}) for k, v in checks.items()}
    return sc


def load_scenario(path) -> Scenario:
    """Read, parse and validate a scenario file.

    Raises
    ------
    ParseError
        for malformed YAML or schema violations, naming line and field.
    ValidationError
        when a distribution or chain invariant fails.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: cannot read scenario: {exc.strerror}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{path}:{mark.line + 1}:{mark.column + 1}" if mark else str(path)
        problem = getattr(exc, "problem", None) or str(exc)
        raise ParseError(f"{where}: {problem}") from None
    return parse_scenario(data, path, text)


def bundled_dir() -> Path:
    return Path(__file__).with_name("scenarios")


def bundled_scenarios() -> list[Path]:
    return sorted(bundled_dir().glob("*.yaml"))
