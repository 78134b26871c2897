import json
import shutil
from pathlib import Path

import pytest

from renewsim import cli
from renewsim.runner import run, verify_all
from renewsim.scenario import (ParseError, ValidationError, bundled_scenarios,
                               load_scenario)


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


MINIMAL = """\
name: minimal
mode: renewal
seed: 5
model:
  cycle: {kind: uniform, lo: 0.0, hi: 2.0}
run:
  t_max: 4.0
"""

LATTICE = """\
name: lattice-levels
mode: linearwise
seed: 1
model:
  states: [0, 1]
  matrix: [[0.0, 1.0], [1.0, 0.0]]
  level_laws:
    0: {kind: deterministic, value: 1.0}
    1: {kind: discrete, points: [[1.0, 0.5], [2.0, 0.5]]}
"""


# loading

def test_minimal_scenario_defaults(tmp_path):
    sc = load_scenario(write(tmp_path, "m.yaml", MINIMAL))
    assert sc.replicas == 100_000
    assert sc.step == pytest.approx(1.0 / 1000)
    assert sc.workers == 1 and sc.mode == "renewal"


def test_row_sum_error(tmp_path):
    text = LATTICE.replace("[1.0, 0.0]]", "[0.9, 0.0]]")
    with pytest.raises(ValidationError, match="row 1 sums to 0.9"):
        load_scenario(write(tmp_path, "r.yaml", text))


def test_unknown_kind_lists_supported(tmp_path):
    text = MINIMAL.replace("{kind: uniform, lo: 0.0, hi: 2.0}", "{kind: weibull, shape: 2}")
    with pytest.raises(ParseError) as info:
        load_scenario(write(tmp_path, "w.yaml", text))
    msg = str(info.value)
    assert "weibull" in msg and "exponential, gamma" in msg and "w.yaml:5" in msg


def test_atom_at_zero_is_validation_error(tmp_path):
    text = MINIMAL.replace("{kind: uniform, lo: 0.0, hi: 2.0}", "{kind: deterministic, value: 0}")
    with pytest.raises(ValidationError, match="AtomAtZero"):
        load_scenario(write(tmp_path, "z.yaml", text))


@pytest.mark.parametrize("text,needle", [
    ("name: x\nmode: renewal\nseed: [1\n", ":4:"),
    (MINIMAL.replace("seed: 5", "seed: five"), "seed"),
    (MINIMAL.replace("mode: renewal", "mode: queue"), "unknown mode"),
    (MINIMAL + "checks:\n  h_magic: {}\n", "h_magic"),
    (MINIMAL + "colour: blue\n", "colour"),
    (MINIMAL.replace("seed: 5\n", ""), "seed"),
])
def test_parse_errors_name_field(tmp_path, text, needle):
    with pytest.raises(ParseError, match=needle):
        load_scenario(write(tmp_path, "bad.yaml", text))


def test_bundled_scenarios_cover_criteria():
    tags = set()
    for path in bundled_scenarios():
        tags.update(load_scenario(path).criteria)
    assert tags == {f"AC{i}" for i in range(1, 11)}


# running

def _bundled(name):
    return next(p for p in bundled_scenarios() if p.stem == name)


def test_run_exp1_renewal(tmp_path):
    res = run(load_scenario(_bundled("exp1-renewal")), tmp_path)
    assert res.passed
    summary = json.loads((tmp_path / "exp1-renewal" / "summary.json").read_text())
    (row,) = summary["checks"][[c["name"] for c in summary["checks"]].index("h_points")][
        "detail"]["rows"]
    assert abs(row["H"] - 10.0) <= 0.01
    for name in ("H.csv", "H.json", "R_grid.csv", "empirical_vs_exact.csv"):
        assert (tmp_path / "exp1-renewal" / name).exists()
    assert not list((tmp_path / "exp1-renewal").glob(".*"))


def test_run_alt_exp_uniform_reports_query(tmp_path):
    sc = load_scenario(_bundled("alt-exp-uniform")).with_overrides(replicas=30_000)
    res = run(sc, tmp_path)
    assert res.passed
    lines = (tmp_path / "alt-exp-uniform" / "analytic_law.csv").read_text().splitlines()
    assert "1,0.5,0.5,0.125,linearwise_stationary_law" in lines
    for c in res.checks:
        assert c.formula


def test_run_lattice_levels_fails_with_reason(tmp_path, capsys):
    path = write(tmp_path, "lat.yaml", LATTICE)
    code = cli.main(["run", str(path), "--out-dir", str(tmp_path / "out")])
    err = capsys.readouterr().err
    assert code == 1
    assert "LatticeSupport" in err


def test_summary_json_sorted(tmp_path):
    run(load_scenario(write(tmp_path, "m.yaml", MINIMAL)), tmp_path / "o")
    text = (tmp_path / "o" / "minimal" / "summary.json").read_text()
    data = json.loads(text)
    assert text == json.dumps(data, sort_keys=True, indent=2) + "\n"


def test_csv_outputs_reproducible(tmp_path):
    sc = load_scenario(_bundled("alt-exp-uniform")).with_overrides(replicas=20_000)
    run(sc, tmp_path / "a")
    run(sc, tmp_path / "b")
    run(sc.with_overrides(workers=2), tmp_path / "c")
    for f in sorted((tmp_path / "a" / sc.name).glob("*.csv")):
        data = f.read_bytes()
        assert data == (tmp_path / "b" / sc.name / f.name).read_bytes()
        assert data == (tmp_path / "c" / sc.name / f.name).read_bytes()


def test_seed_override_changes_estimates_not_verdicts(tmp_path):
    sc = load_scenario(_bundled("uniform-overjump-mean")).with_overrides(replicas=50_000)
    a = run(sc)
    b = run(sc.with_overrides(seed=99))
    assert [c.passed for c in a.checks] == [c.passed for c in b.checks]
    ea = next(c for c in a.checks if c.name == "mc_overjump_mean").detail["estimate"]
    eb = next(c for c in b.checks if c.name == "mc_overjump_mean").detail["estimate"]
    assert ea != eb


def test_verify_all_isolates_corrupted_file(tmp_path):
    good = shutil.copy(_bundled("exp1-key-renewal"), tmp_path / "good.yaml")
    bad = write(tmp_path, "bad.yaml", "name: broken\ncriteria: [AC99]\nmode: [\n")
    summary = verify_all([Path(bad), Path(good)], out_dir=tmp_path / "out")
    verdicts = {row.scenario: row.passed for row in summary.rows}
    assert verdicts == {"bad": False, "exp1-key-renewal": True}
    assert summary.criteria == {"AC2": True, "AC99": False}
    assert "ParseError" in summary.format()


# command line

def test_cli_usage_errors(tmp_path, capsys):
    assert cli.main(["frobnicate"]) == 2
    assert cli.main(["run"]) == 2
    assert cli.main(["run", str(tmp_path / "missing.yaml")]) == 2
    assert cli.main(["run", "x.yaml", "--workers", "0"]) == 2
    capsys.readouterr()


def test_cli_invalid_scenario_exit_two(tmp_path, capsys):
    text = LATTICE.replace("[1.0, 0.0]]", "[0.9, 0.0]]")
    assert cli.main(["run", str(write(tmp_path, "r.yaml", text))]) == 2
    assert "row 1 sums to 0.9" in capsys.readouterr().err


def test_cli_run_bundled_by_name(tmp_path, capsys):
    code = cli.main(["run", "exp1-key-renewal", "--out-dir", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "PASS  gap_at" in out and "[key_renewal_limit]" in out
    assert (tmp_path / "exp1-key-renewal" / "convergence.csv").exists()


def test_cli_overrides_reach_scenario(tmp_path):
    code = cli.main(["run", str(write(tmp_path, "m.yaml", MINIMAL)), "--grid-step", "0.01",
                     "--seed", "3", "--out-dir", str(tmp_path / "o")])
    assert code == 0
    summary = json.loads((tmp_path / "o" / "minimal" / "summary.json").read_text())
    assert summary["grid_step"] == 0.01 and summary["seed"] == 3


def test_cli_list_scenarios(capsys):
    assert cli.main(["list-scenarios"]) == 0
    out = capsys.readouterr().out
    assert "exp1-renewal" in out and "alt-exp-uniform" in out
