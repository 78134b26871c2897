"""Execute scenarios and write their reports.

Every check produces a :class:`CheckResult` whose ``formula`` field names
the analytic quantity it compares against.  Reports go to
``<out_dir>/<scenario name>/``: a ``summary.json`` with stable key order
plus CSV detail files, each written to a temporary file and renamed into
place.
"""
from __future__ import annotations

import contextlib
import csv
import json
import math
import os
import tempfile
import warnings
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator, Optional, Sequence

import numpy as np
from scipy import stats

from renewsim import bounds as bnd
from renewsim.errors import RenewsimError
from renewsim.linearwise import (compare_laws, estimate_law, first_hit_time,
                                 regeneration_cycles, sample_states, stationary_law)
from renewsim.montecarlo import as_generator, binomial_half_width, mean_band, z_value
from renewsim.renewal import (key_renewal_convergence, overjump_survival_exact,
                              renewal_function, sample_over_under,
                              stationary_overjump_mean, stationary_overjump_survival)
from renewsim.scenario import (ParseError, Scenario, ValidationError, bundled_scenarios,
                               load_scenario)

FORMULAS = {
    "renewal_function": "H(t) = sum_m F^{m*}(t)",
    "renewal_equation": "H = F + F * H",
    "key_renewal_limit": "int_0^t b(t-s) dH(s) -> int b / E zeta",
    "finite_time_overjump_law": "P{x*_t > s} = S(t+s) + int_0^t S(t-u+s) dH(u)",
    "stationary_overjump_law": "P{x* > a} = int_a^inf S / E zeta",
    "stationary_overjump_mean": "E x* = E zeta^2 / (2 E zeta)",
    "linearwise_stationary_law": "P{n=i, x>a, x*>b} = p_i / T int_{a+b}^inf S_i",
    "stationary_level_occupancy": "P{n=k} = p_k T_k / T",
    "regeneration_cycle_mean": "E cycle_k = T / p_k",
    "overjump_mean_monotone_bound": "E x*_t nondecreasing in t and <= E zeta^2 / (2 E zeta)",
    "overjump_survival_monotone": "P{x*_t > s} nondecreasing in t",
    "power_moment_bound": "E (x*_t)^(k-1) <= E zeta^k / (k E zeta)",
    "exp_moment_bound": "E exp(alpha x*_t) <= E exp(alpha zeta) / (alpha E zeta) - 1",
    "conditional_mean_bound": "E(x_t | n_t = k), E(x*_t | n_t = k) <= E zeta_k^2 / (2 E zeta_k)",
    "single_level_degeneration": "one-level linearwise process = renewal process",
    "model": "model construction",
}

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class CheckResult:
    name: str
    formula: str
    passed: bool
    detail: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "formula": self.formula,
                "formula_text": FORMULAS.get(self.formula, ""),
                "passed": self.passed, "detail": _plain(self.detail)}


@dataclass
class RunResult:
    scenario: str
    mode: str
    criteria: tuple[str, ...]
    checks: list[CheckResult]
    files: list[str] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed for c in self.checks)

    @property
    def failed_checks(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def to_dict(self) -> dict[str, Any]:
        return {"scenario": self.scenario, "mode": self.mode, "criteria": list(self.criteria),
                "passed": self.passed, "error": self.error, "files": sorted(self.files),
                "checks": [c.to_dict() for c in self.checks]}


def _plain(obj):
    """Convert numpy scalars and tuples for JSON output."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    return obj


@contextlib.contextmanager
def atomic_path(path: Path) -> Iterator[Path]:
    """Yield a temporary sibling of ``path`` that is renamed onto it on success."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    os.close(fd)
    try:
        yield Path(tmp)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def write_csv(path: Path, header: Sequence[str], rows) -> None:
    with atomic_path(path) as tmp, open(tmp, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v
                        for v in row])


def write_json(path: Path, data) -> None:
    with atomic_path(path) as tmp:
        tmp.write_text(json.dumps(_plain(data), sort_keys=True, indent=2) + "\n")


class _Run:
    """Per-scenario state: output directory, seeds and cached samples."""

    def __init__(self, sc: Scenario, out_dir: Optional[Path]):
        self.sc = sc
        self.out = Path(out_dir) / sc.name if out_dir is not None else None
        self.files: list[str] = []
        self.results: list[CheckResult] = []
        self._over: dict[float, tuple[np.ndarray, np.ndarray]] = {}

    def seed(self, tag: str) -> np.random.SeedSequence:
        return np.random.SeedSequence(self.sc.seed, spawn_key=(zlib.crc32(tag.encode()),))

    def csv(self, name: str, header, rows):
        if self.out is not None:
            write_csv(self.out / name, header, rows)
            self.files.append(name)

    def record(self, name: str, formula: str, passed: bool, **detail) -> CheckResult:
        res = CheckResult(name, formula, bool(passed), detail)
        self.results.append(res)
        return res

    def over_under(self, t: float):
        """``(x_t, x*_t)`` samples of the scenario renewal process, cached per ``t``."""
        t = float(t)
        if t not in self._over:
            self._over[t] = sample_over_under(self.sc.cycle, t, self.sc.replicas,
                                              self.seed(f"over_under@{t!r}"),
                                              self.sc.workers, self.sc.first_delay)
        return self._over[t]


def _floats(values) -> list[float]:
    return [float(v) for v in values]


# renewal mode

def _run_renewal(r: _Run):
    sc = r.sc
    cycle = sc.cycle
    run = sc.run
    t_max = float(run.get("t_max", 64 * cycle.mean))
    s_probes = _floats(run.get("s", [0.5 * cycle.mean, cycle.mean]))
    t_probes = _floats(run.get("t", [t_max]))
    table = renewal_function(cycle, t_max, sc.step)
    r.csv("H.csv", ["t", "H"], zip(table.times, table.values))
    if r.out is not None:
        with atomic_path(r.out / "H.json") as tmp:
            tmp.write_text(table.to_json() + "\n")
        r.files.append("H.json")
    resid = table.renewal_residual()
    r.record("renewal_equation", "renewal_equation", resid <= 5 * table.error_bound + 1e-9,
             residual=resid, grid_error=table.error_bound, truncation_m=table.truncation_m,
             step=table.step)

    exact = {(s, t): overjump_survival_exact(cycle, table, s, t)
             for t in t_probes if t <= table.t_max for s in s_probes}
    r.csv("R_grid.csv", ["s", "t", "exact", "formula"],
          [(s, t, v, "finite_time_overjump_law") for (s, t), v in exact.items()])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        stationary = {s: stationary_overjump_survival(cycle, s) for s in s_probes}

    checks = sc.checks
    if "h_reference" in checks:
        p = checks["h_reference"]
        up_to = float(p.get("up_to", t_max))
        sel = table.times <= up_to + 1e-12
        ref = float(p.get("slope", 1.0)) * table.times[sel] + float(p.get("intercept", 0.0))
        err = float(np.max(np.abs(table.values[sel] - ref)))
        r.record("h_reference", "renewal_function", err <= float(p["tol"]),
                 max_abs_error=err, tol=float(p["tol"]), up_to=up_to)
    if "h_points" in checks:
        rows, ok = [], True
        for t, want, tol in checks["h_points"]:
            got = float(table(float(t)))
            good = abs(got - float(want)) <= float(tol)
            ok &= good
            rows.append({"t": float(t), "H": got, "expected": float(want), "passed": good})
        r.record("h_points", "renewal_function", ok, rows=rows)
    if "stationary_value" in checks:
        rows, ok = [], True
        for s, want, tol in checks["stationary_value"]:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                got = stationary_overjump_survival(cycle, float(s))
            good = abs(got - float(want)) <= float(tol)
            ok &= good
            rows.append({"s": float(s), "value": got, "expected": float(want), "passed": good})
        r.record("stationary_value", "stationary_overjump_law", ok, rows=rows)
    if "stationary_vs_exact" in checks:
        p = checks["stationary_vs_exact"]
        t = float(p.get("t", t_max))
        tol = float(p["tol"])
        rows = []
        for s in s_probes:
            ex = overjump_survival_exact(cycle, table, s, t)
            rows.append({"s": s, "t": t, "exact": ex, "stationary": stationary[s],
                         "gap": abs(ex - stationary[s])})
        r.record("stationary_vs_exact", "stationary_overjump_law",
                 all(row["gap"] <= tol for row in rows), rows=rows, tol=tol)
    if "mc_vs_exact" in checks:
        conf = float(checks["mc_vs_exact"].get("confidence", 0.999))
        z = z_value(conf, len(exact))
        rows = []
        for (s, t), ex in exact.items():
            p_hat = float(np.mean(r.over_under(t)[1] > s))
            hw = binomial_half_width(ex, sc.replicas, z) + table.error_bound
            rows.append((s, t, p_hat, hw, ex, stationary[s], abs(p_hat - ex) <= hw))
        r.csv("empirical_vs_exact.csv",
              ["s", "t", "empirical", "half_width", "exact", "stationary", "inside"], rows)
        r.record("mc_vs_exact", "finite_time_overjump_law", all(row[-1] for row in rows),
                 probes=len(rows), confidence=conf)
    for name, idx in (("mc_vs_stationary", 1), ("underjump_vs_stationary", 0)):
        if name not in checks:
            continue
        p = checks[name]
        t = float(p.get("t", t_max))
        conf = float(p.get("confidence", 0.999))
        z = z_value(conf, len(s_probes))
        sample = r.over_under(t)[idx]
        rows = []
        for s in s_probes:
            p_hat = float(np.mean(sample > s))
            hw = binomial_half_width(stationary[s], sc.replicas, z)
            rows.append((s, t, p_hat, hw, stationary[s], abs(p_hat - stationary[s]) <= hw))
        r.csv(f"{name}.csv", ["s", "t", "empirical", "half_width", "stationary", "inside"], rows)
        r.record(name, "stationary_overjump_law", all(row[-1] for row in rows),
                 rows=[dict(zip(("s", "t", "empirical", "half_width", "stationary", "inside"),
                                row)) for row in rows], confidence=conf)
    if "stationary_mean" in checks:
        p = checks["stationary_mean"]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            got = stationary_overjump_mean(cycle)
        r.record("stationary_mean", "stationary_overjump_mean",
                 abs(got - float(p["value"])) <= float(p.get("tol", 1e-12)),
                 value=got, expected=float(p["value"]))
    if "mc_overjump_mean" in checks:
        p = checks["mc_overjump_mean"]
        t = float(p.get("t", t_max))
        sigmas = float(p.get("sigmas", 3.0))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            target = stationary_overjump_mean(cycle)
        est, hw = mean_band(r.over_under(t)[1], sigmas)
        r.record("mc_overjump_mean", "stationary_overjump_mean", abs(est - target) <= hw,
                 t=t, estimate=est, half_width=hw, stationary=target, sigmas=sigmas)


# key-renewal mode

def _run_key_renewal(r: _Run):
    sc = r.sc
    times = _floats(sc.run.get("times", [sc.cycle.mean * 2**j for j in range(7)]))
    for name in ("gap_at",):
        if name in sc.checks:
            times = sorted(set(times) | {float(sc.checks[name]["t"])})
    rows = key_renewal_convergence(sc.b, sc.cycle, times, sc.step)
    r.csv("convergence.csv", ["t", "integral", "limit", "gap"], rows)
    limit = rows[0][2]
    by_t = {t: (val, gap) for t, val, _, gap in rows}
    if "limit_value" in sc.checks:
        p = sc.checks["limit_value"]
        r.record("limit_value", "key_renewal_limit",
                 abs(limit - float(p["value"])) <= float(p.get("tol", 1e-12)),
                 limit=limit, expected=float(p["value"]))
    if "gap_at" in sc.checks:
        p = sc.checks["gap_at"]
        val, gap = by_t[float(p["t"])]
        r.record("gap_at", "key_renewal_limit", gap <= float(p["tol"]),
                 t=float(p["t"]), integral=val, limit=limit, gap=gap, tol=float(p["tol"]))


# linearwise mode

def _default_probes(sc: Scenario):
    law_means = [sc.process.level_laws[s].mean for s in sc.process.chain.states]
    scale = float(np.mean(law_means))
    return [(i, a * scale, b * scale) for i in sc.process.chain.states
            for a in (0.0, 0.25, 0.5) for b in (0.0, 0.25, 0.5, 1.0)]


def _probes(sc: Scenario):
    raw = sc.run.get("probes")
    if raw is None:
        return _default_probes(sc)
    if isinstance(raw, dict):
        return [(int(i), float(a), float(b)) for i in raw["states"] for a in raw["a"]
                for b in raw["b"]]
    return [(int(i), float(a), float(b)) for i, a, b in raw]


def _run_linearwise(r: _Run):
    sc = r.sc
    proc = sc.process
    law = stationary_law(proc.chain, proc.level_laws)
    probes = _probes(sc)
    t_obs = float(sc.run.get("t_obs", 64 * law.T))
    r.csv("analytic_law.csv", ["i", "a", "b", "analytic", "formula"],
          [(i, a, b, law.query(i, a, b), "linearwise_stationary_law") for i, a, b in probes])
    total = sum(law.query(i, 0.0, 0.0) for i in proc.chain.states)
    tol = float(sc.checks.get("normalization", {}).get("tol", 1e-10))
    r.record("normalization", "linearwise_stationary_law", abs(total - 1.0) <= tol,
             total=total, tol=tol)
    r.csv("level_probabilities.csv", ["state", "frequency", "mean_sojourn", "probability",
                                      "formula"],
          [(k, law.frequencies[k], law.level_laws[k].mean, law.level_probability(k),
            "stationary_level_occupancy") for k in proc.chain.states])
    checks = sc.checks
    if "query" in checks:
        rows, ok = [], True
        for i, a, b, want, tol_q in checks["query"]:
            got = law.query(int(i), float(a), float(b))
            good = abs(got - float(want)) <= float(tol_q)
            ok &= good
            rows.append({"i": int(i), "a": float(a), "b": float(b), "analytic": got,
                         "expected": float(want), "passed": good})
        r.record("query", "linearwise_stationary_law", ok, rows=rows)
    if "level_probability" in checks:
        rows, ok = [], True
        for k, want, tol_k in checks["level_probability"]:
            got = law.level_probability(int(k))
            good = abs(got - float(want)) <= float(tol_k)
            ok &= good
            rows.append({"k": int(k), "probability": got, "expected": float(want),
                         "passed": good})
        r.record("level_probability", "stationary_level_occupancy", ok, rows=rows)
    emp = None
    if "mc_band" in checks or "start_independence" in checks:
        emp = estimate_law(proc, t_obs, sc.replicas, r.seed("law"), sc.workers)
    if "mc_band" in checks:
        conf = float(checks["mc_band"].get("confidence", 0.999))
        rows = emp.compare(law, probes, conf)
        r.csv("empirical_law.csv", ["i", "a", "b", "estimate", "half_width", "analytic",
                                    "inside"],
              [(p.i, p.a, p.b, p.estimate, p.half_width, p.analytic, p.inside) for p in rows])
        r.csv("discrepancy.csv", ["i", "a", "b", "discrepancy", "half_width"],
              [(p.i, p.a, p.b, p.estimate - p.analytic, p.half_width) for p in rows])
        r.record("mc_band", "linearwise_stationary_law", all(p.inside for p in rows),
                 probes=len(rows), confidence=conf, t_obs=t_obs,
                 worst=max(abs(p.estimate - p.analytic) / p.half_width if p.half_width else 0.0
                           for p in rows))
    if "start_independence" in checks:
        p = checks["start_independence"]
        n0, x0 = p["initial"]
        conf = float(p.get("confidence", 0.999))
        other = estimate_law(proc.with_initial(int(n0), float(x0)), t_obs, sc.replicas,
                             r.seed("law-alt"), sc.workers)
        rows = compare_laws(emp, other, probes, conf)
        r.csv("start_independence.csv", ["i", "a", "b", "first", "second", "half_width",
                                         "inside"], rows)
        r.record("start_independence", "linearwise_stationary_law",
                 all(row[-1] for row in rows), initial=[list(proc.initial), [int(n0), float(x0)]],
                 probes=len(rows), confidence=conf)
    if "regeneration" in checks:
        p = checks["regeneration"]
        k = int(p["state"])
        count = int(p.get("cycles", 10_000))
        sigmas = float(p.get("sigmas", 3.0))
        lengths = regeneration_cycles(proc, k, count, r.seed("regeneration"))
        est, hw = mean_band(lengths, sigmas)
        target = law.mean_cycle_length(k)
        r.csv("regeneration_cycles.csv", ["cycle", "length"], enumerate(lengths))
        r.record("regeneration", "regeneration_cycle_mean", abs(est - target) <= hw,
                 state=k, cycles=count, estimate=est, half_width=hw, analytic=target)
    if "first_hit" in checks:
        p = checks["first_hit"]
        k = int(p["state"])
        runs = int(p.get("runs", 10_000))
        sigmas = float(p.get("sigmas", 3.0))
        start = proc.with_initial(k, 0.0)
        rng = as_generator(r.seed("first-hit"))
        times = np.array([first_hit_time(start, k, rng) for _ in range(runs)])
        est, hw = mean_band(times, sigmas)
        target = law.mean_cycle_length(k)
        r.record("first_hit", "regeneration_cycle_mean", abs(est - target) <= hw,
                 state=k, runs=runs, estimate=est, half_width=hw, analytic=target)
    if "degeneration" in checks:
        p = checks["degeneration"]
        if len(proc.chain.states) != 1:
            raise ValidationError("degeneration check needs a single-state chain")
        state = proc.chain.states[0]
        t = float(p.get("t", t_obs))
        tol_d = float(p.get("sup_tol", 0.02))
        _, _, xs_lin, _ = sample_states(proc.with_initial(state, 0.0), t, sc.replicas,
                                        r.seed("degeneration-linearwise"), sc.workers)
        _, xs_ren = sample_over_under(proc.level_laws[state], t, sc.replicas,
                                      r.seed("degeneration-renewal"), sc.workers)
        dist = float(stats.ks_2samp(xs_lin, xs_ren).statistic)
        grid = np.linspace(0.0, float(np.quantile(xs_ren, 0.999)), 41)
        r.csv("degeneration.csv", ["s", "linearwise", "renewal"],
              [(s, float(np.mean(xs_lin > s)), float(np.mean(xs_ren > s))) for s in grid])
        r.record("degeneration", "single_level_degeneration", dist < tol_d,
                 sup_distance=dist, tol=tol_d, t=t)


# bounds mode

def _report_rows(report: bnd.BoundReport):
    return [(p, e, h, report.bound_value) for p, e, h in report.observed_values]


def _run_bounds(r: _Run):
    sc = r.sc
    checks = sc.checks
    if "overjump_curve" in checks:
        p = checks["overjump_curve"]
        sigmas = float(p.get("sigmas", 3.0))
        curve = bnd.overjump_mean_curve(sc.cycle, _floats(p["times"]), sc.replicas,
                                        r.seed("overjump-curve"), sc.workers, sigmas,
                                        bool(p.get("underjump", False)))
        r.csv("overjump_mean_curve.csv", ["t", "estimate", "half_width", "limit"],
              [(t, e, h, curve.limit) for t, e, h in curve.rows])
        r.record("overjump_curve", "overjump_mean_monotone_bound",
                 curve.monotone and curve.below_limit, limit=curve.limit,
                 rows=[list(row) for row in curve.rows],
                 decreases=[list(d) for d in curve.decreases], exceed=curve.exceed,
                 sigmas=sigmas)
    if "monotonicity_probes" in checks:
        p = checks["monotonicity_probes"]
        count = int(p.get("count", 100))
        t_hi = float(p.get("t_max", 10 * sc.cycle.mean))
        s_hi = float(p.get("s_max", 2 * sc.cycle.mean))
        d_hi = float(p.get("delta_max", 10 * sc.cycle.mean))
        rng = as_generator(r.seed("monotonicity"))
        draws = rng.uniform(size=(count, 3)) * np.array([s_hi, t_hi, d_hi])
        table = renewal_function(sc.cycle, t_hi + d_hi, sc.step)
        allowed = -2.0 * table.error_bound
        rows = []
        for s, t, d in draws:
            gap = bnd.monotonicity_gap(sc.cycle, table, float(s), float(t), float(d))
            rows.append((float(s), float(t), float(d), gap, gap >= allowed))
        r.csv("monotonicity_probes.csv", ["s", "t", "delta", "gap", "passed"], rows)
        worst = min(rows, key=lambda row: row[3])
        r.record("monotonicity_probes", "overjump_survival_monotone",
                 all(row[-1] for row in rows), probes=count, allowed=allowed,
                 violations=sum(not row[-1] for row in rows),
                 worst={"s": worst[0], "t": worst[1], "delta": worst[2], "gap": worst[3]})
    if "power_moment" in checks:
        p = checks["power_moment"]
        k = int(p["k"])
        sigmas = float(p.get("sigmas", 3.0))
        rep = bnd.verify_power_moment_bound(sc.cycle, k, _floats(p["times"]), sc.replicas,
                                            r.seed(f"power-{k}"), sc.workers, sigmas)
        r.csv(f"power_moment_k{k}.csv", ["probe", "estimate", "half_width", "bound"],
              _report_rows(rep))
        ok = rep.satisfied
        if p.get("sharp", False):
            ok = ok and all(abs(e - rep.bound_value) <= h for _, e, h in rep.observed_values)
        r.record("power_moment", "power_moment_bound", ok, **rep.to_dict(),
                 sharp=bool(p.get("sharp", False)))
    if "exp_moment" in checks:
        p = checks["exp_moment"]
        alpha = float(p["alpha"])
        sigmas = float(p.get("sigmas", 3.0))
        rep = bnd.verify_exp_moment_bound(sc.cycle, alpha, _floats(p["times"]), sc.replicas,
                                          r.seed(f"exp-{alpha!r}"), sc.workers, sigmas)
        r.csv("exp_moment.csv", ["probe", "estimate", "half_width", "bound"], _report_rows(rep))
        ok = rep.satisfied
        near = p.get("near")
        if near is not None:
            ok = ok and all(abs(e - float(near)) <= max(h, float(p.get("near_tol", 0.0)))
                            for _, e, h in rep.observed_values)
        r.record("exp_moment", "exp_moment_bound", ok, **rep.to_dict(), near=near)
    if "conditional" in checks:
        p = checks["conditional"]
        if sc.process is None:
            raise ValidationError("conditional check needs model.linearwise")
        k = int(p["k"])
        rep = bnd.conditional_bound_check(sc.process, k, float(p["tau"]), sc.replicas,
                                          r.seed(f"conditional-{k}"), sc.workers,
                                          float(p.get("sigmas", 3.0)))
        r.csv(f"conditional_k{k}.csv", ["probe", "estimate", "half_width", "bound"],
              _report_rows(rep))
        r.record("conditional", "conditional_mean_bound", rep.satisfied, **rep.to_dict())


RUNNERS = {"renewal": _run_renewal, "key-renewal": _run_key_renewal,
           "linearwise": _run_linearwise, "bounds": _run_bounds}


def run(sc: Scenario, out_dir=None) -> RunResult:
    """Run every check of ``sc``; write reports under ``out_dir`` if given.

    Model errors raised during the run (a lattice level law, say) end the
    run with a failing ``model`` check that names the exception.
    """
    r = _Run(sc, out_dir)
    error = None
    try:
        RUNNERS[sc.mode](r)
    except (RenewsimError, ValueError, KeyError) as exc:
        error = f"{type(exc).__name__}: {exc}"
        r.record("model", "model", False, error=error)
    result = RunResult(sc.name, sc.mode, sc.criteria, r.results, list(r.files), error)
    if r.out is not None:
        result.files.append("summary.json")
        write_json(r.out / "summary.json", {
            **result.to_dict(), "seed": sc.seed, "replicas": sc.replicas,
            "workers": sc.workers, "grid_step": sc.step})
    return result


@dataclass
class MatrixRow:
    scenario: str
    criteria: tuple[str, ...]
    passed: bool
    detail: str


@dataclass
class VerifySummary:
    rows: list[MatrixRow]

    @property
    def criteria(self) -> dict[str, bool]:
        out: dict[str, bool] = {}
        for row in self.rows:
            for c in row.criteria:
                out[c] = out.get(c, True) and row.passed
        return dict(sorted(out.items(), key=lambda kv: _criterion_key(kv[0])))

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def format(self) -> str:
        lines = [f"{'criterion':<10} {'verdict':<7} scenarios"]
        for c, ok in self.criteria.items():
            names = ", ".join(row.scenario for row in self.rows if c in row.criteria)
            lines.append(f"{c:<10} {'PASS' if ok else 'FAIL':<7} {names}")
        unkeyed = [row for row in self.rows if not row.criteria]
        for row in unkeyed:
            lines.append(f"{'-':<10} {'PASS' if row.passed else 'FAIL':<7} {row.scenario}")
        for row in self.rows:
            if not row.passed:
                lines.append(f"  {row.scenario}: {row.detail}")
        return "\n".join(lines)


def _criterion_key(c: str):
    digits = "".join(ch for ch in c if ch.isdigit())
    return (c.rstrip("0123456789"), int(digits) if digits else 0)


def verify_all(paths: Optional[Sequence[Path]] = None, out_dir=None, seed=None, workers=None,
               replicas=None, grid_step=None) -> VerifySummary:
    """Run each scenario in isolation and collect a verdict per scenario.

    A scenario that fails to load or crashes marks only its own row failed.
    """
    rows = []
    for path in paths if paths is not None else bundled_scenarios():
        path = Path(path)
        try:
            sc = load_scenario(path).with_overrides(seed, workers, replicas, grid_step)
        except (ParseError, ValidationError) as exc:
            rows.append(MatrixRow(path.stem, _criteria_hint(path), False,
                                  f"{type(exc).__name__}: {exc}"))
            continue
        try:
            res = run(sc, out_dir)
        except Exception as exc:  # isolation: one scenario never stops the others
            rows.append(MatrixRow(sc.name, sc.criteria, False, f"{type(exc).__name__}: {exc}"))
            continue
        detail = res.error or ("failed: " + ", ".join(res.failed_checks)
                               if res.failed_checks else "ok")
        rows.append(MatrixRow(sc.name, sc.criteria, res.passed, detail))
    return VerifySummary(rows)


def _criteria_hint(path: Path) -> tuple[str, ...]:
    """Best-effort criteria tags from a file that failed to parse."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError:
        return ()
    for line in text.splitlines():
        if line.strip().startswith("criteria:"):
            inner = line.split(":", 1)[1].strip().strip("[]")
            return tuple(c.strip() for c in inner.split(",") if c.strip())
    return ()


def reproducibility_matrix(seeds=(1, 2, 3), worker_counts=(1, 8), paths=None,
                           replicas=None) -> dict[tuple[int, int], dict[str, bool]]:
    """Verdict matrices of :func:`verify_all` for every (seed, workers) pair."""
    return {(s, w): verify_all(paths, seed=s, workers=w, replicas=replicas).criteria
            for s in seeds for w in worker_counts}
