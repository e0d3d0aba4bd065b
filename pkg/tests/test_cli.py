import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plapsim import cli
from plapsim.cli import RunConfig
from plapsim.model import classify_regime, ProblemParams, Interval

BLOWUP_PROBLEM = {"alpha": 1.0, "beta": 0.1, "gamma": 1.0, "mu": 0.1, "nu": 0.1, "k": 1, "s": 1,
                  "l": 0.5, "q": 1, "m": 2, "r": 1, "sigma": 0.5, "p": 2}
GLOBAL_PROBLEM = {"alpha": 1.0, "beta": 1.0, "gamma": 1.0, "mu": 0.0, "nu": 1.0, "k": 1, "s": 1,
                  "l": 1, "q": 2, "m": 2, "r": 1, "sigma": 3, "p": 2}
HEAT_PROBLEM = {"alpha": 1e-300, "k": 1, "s": 1, "l": 1, "q": 1, "m": 1, "r": 1, "sigma": 1,
                "p": 2}


def write_cfg(tmp_path, d, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(d))
    return str(path)


@pytest.fixture
def heat_cfg(tmp_path):
    x = np.linspace(0, 1, 401)
    table = tmp_path / "sin.csv"
    rows = "".join("%.17g,%.17g\n" % (a, b) for a, b in zip(x, np.sin(np.pi * x)))
    table.write_text("x,u\n" + rows)
    return {
        "problem": HEAT_PROBLEM,
        "domain": {"shape": "interval", "a": 0.0, "b": 1.0},
        "initial": {"kind": "table", "path": str(table)},
        "solver": {"n": 100, "t_max": 0.1, "snapshot_every": 2000},
        "output": {"directory": str(tmp_path / "out"), "series_every": 7},
        "seed": 1,
    }


# -- config -------------------------------------------------------------------

def test_config_defaults_round_trip():
    cfg = RunConfig()
    assert RunConfig.from_json(cfg.to_json()) == cfg


def test_config_full_round_trip(heat_cfg):
    heat_cfg["sweep"] = {"axes": {"q": [1.0, 2.0]}, "solve": True}
    cfg = RunConfig.from_dict(heat_cfg)
    again = RunConfig.from_json(cfg.to_json())
    assert again == cfg
    assert again.to_json() == cfg.to_json()


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 10), st.floats(2, 4), st.integers(8, 500), st.integers(0, 2**63),
       st.sampled_from(["bump", "analytic-sub"]), st.integers(1, 3))
def test_config_round_trip_property(alpha, p, n, seed, kind, N):
    d = {"problem": {"alpha": alpha, "p": p}, "domain": {"shape": "ball", "radius": 2.0,
                                                         "dimension": N},
         "initial": {"kind": kind}, "solver": {"n": n}, "seed": seed}
    cfg = RunConfig.from_dict(d)
    assert RunConfig.from_json(cfg.to_json()) == cfg


@pytest.mark.parametrize("patch", [
    {"extra": 1},
    {"problem": {"alpha": 1.0, "zeta": 1.0}},
    {"domain": {"shape": "interval", "a": 0, "b": 1, "c": 2}},
    {"initial": {"kind": "bump", "colour": "red"}},
    {"initial": {"kind": "spline"}},
    {"solver": {"n": 10, "order": 2}},
    {"output": {"directory": "x", "format": "csv"}},
    {"sweep": {"axes": {"zeta": [1.0]}}},
    {"sweep": {"axes": {}, "parallel": True}},
    {"seed": -1},
    {"seed": 1.5},
])
def test_unknown_or_bad_keys_rejected(tmp_path, patch):
    d = {"problem": GLOBAL_PROBLEM} | patch
    with pytest.raises(cli.ConfigError):
        RunConfig.from_dict(d)
    assert cli.main(["classify", "--config", write_cfg(tmp_path, d)]) == cli.EXIT_INVALID


def test_malformed_and_missing_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["solve", "--config", str(bad)]) == cli.EXIT_INVALID
    assert cli.main(["solve", "--config", str(tmp_path / "nope.json")]) == cli.EXIT_INVALID
    assert cli.main(["solve"]) == cli.EXIT_INVALID


# -- classify -----------------------------------------------------------------

def test_classify_blowup(tmp_path, capsys):
    path = write_cfg(tmp_path, {"problem": BLOWUP_PROBLEM | {"mu": 0.0, "beta": 0.0, "nu": 0.0}})
    assert cli.main(["classify", "--config", path]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["tag"] == "BlowUpPredicted"
    assert all("margin" in c for c in doc["blowup_checks"])


def test_classify_unknown_with_mu(tmp_path, capsys):
    path = write_cfg(tmp_path, {"problem": GLOBAL_PROBLEM | {"mu": 0.5}})
    assert cli.main(["classify", "--config", path]) == 0
    assert json.loads(capsys.readouterr().out)["tag"] == "Unknown"


def test_classify_invalid(tmp_path, capsys):
    path = write_cfg(tmp_path, {"problem": HEAT_PROBLEM | {"p": 1.5}})
    assert cli.main(["classify", "--config", path]) == cli.EXIT_INVALID
    assert json.loads(capsys.readouterr().out)["violations"] == ["p-1 >= p/2 violated"]


# -- solve --------------------------------------------------------------------

def test_solve_heat(tmp_path, heat_cfg):
    path = write_cfg(tmp_path, heat_cfg)
    assert cli.main(["solve", "--config", path]) == 0
    out = tmp_path / "out"
    lines = (out / "series.csv").read_text().splitlines()
    assert lines[0] == "t,sup_norm,l2_norm,nonlocal_integral,dt"
    t, sup = (float(v) for v in lines[-1].split(",")[:2])
    assert t == pytest.approx(0.1)
    assert sup == pytest.approx(math.exp(-math.pi**2 * 0.1), rel=0.02)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["result"]["status"] == "Completed"
    assert manifest["resolved"]["eps_reg"] == 1e-8
    assert manifest["resolved"]["dt"]["steps"] == manifest["result"]["steps"]
    snaps = sorted(out.glob("snapshot_*.csv"))
    assert snaps and snaps[0].read_text().startswith("x,u\n")


def test_series_numbers_round_trip(tmp_path, heat_cfg):
    cli.main(["solve", "--config", write_cfg(tmp_path, heat_cfg)])
    for line in (tmp_path / "out" / "series.csv").read_text().splitlines()[1:20]:
        for cell in line.split(","):
            assert "%.17g" % float(cell) == cell


def test_solve_is_byte_deterministic(tmp_path, heat_cfg):
    path = write_cfg(tmp_path, heat_cfg)
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["solve", "--config", path, "--out", str(a)]) == 0
    assert cli.main(["solve", "--config", path, "--out", str(b)]) == 0
    assert (a / "series.csv").read_bytes() == (b / "series.csv").read_bytes()
    ma = json.loads((a / "manifest.json").read_text())
    mb = json.loads((b / "manifest.json").read_text())
    ma.pop("timing")
    mb.pop("timing")
    assert ma == mb


def test_solve_blowup_exit_code(tmp_path):
    d = {"problem": BLOWUP_PROBLEM, "domain": {"shape": "ball", "radius": 10.0, "dimension": 1},
         "initial": {"kind": "analytic-sub", "multiplier": 1.0},
         "solver": {"n": 200, "t_max": 20.0}, "output": {"directory": str(tmp_path / "o")}}
    assert cli.main(["solve", "--config", write_cfg(tmp_path, d)]) == cli.EXIT_BLOWUP
    manifest = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert manifest["result"]["status"] == "BlowUp"
    assert manifest["result"]["T_est"] > 0
    assert manifest["resolved"]["subsolution"]["k_tilde"] == pytest.approx(1.3)


def test_solve_numerical_failure(tmp_path):
    d = {"problem": GLOBAL_PROBLEM, "solver": {"n": 20, "dt_min": 0.5, "dt_init": 1.0},
         "output": {"directory": str(tmp_path / "o")}}
    assert cli.main(["solve", "--config", write_cfg(tmp_path, d)]) == cli.EXIT_NUMERIC


def test_solve_invalid_params(tmp_path):
    d = {"problem": GLOBAL_PROBLEM | {"alpha": 0.0}, "output": {"directory": str(tmp_path)}}
    assert cli.main(["solve", "--config", write_cfg(tmp_path, d)]) == cli.EXIT_INVALID


def test_analytic_sub_outside_regime_is_invalid(tmp_path):
    d = {"problem": GLOBAL_PROBLEM, "initial": {"kind": "analytic-sub"},
         "output": {"directory": str(tmp_path)}}
    assert cli.main(["solve", "--config", write_cfg(tmp_path, d)]) == cli.EXIT_INVALID


# -- verify -------------------------------------------------------------------

@pytest.mark.parametrize("suite,code", [
    ("profile", 0), ("subsolution", 0), ("supersolution", 0), ("comparison", 0),
    ("lemma", 1),  # the inequality is false for exponents in (1, 2); see README
])
def test_verify_exit_codes(tmp_path, suite, code, capsys):
    assert cli.main(["verify", suite, "--seed", "42", "--out", str(tmp_path)]) == code
    report = json.loads((tmp_path / f"report_{suite}.json").read_text())
    assert report["verdict"] == ("pass" if code == 0 else "fail")
    if code:
        assert "FAIL" in capsys.readouterr().out


def test_verify_uses_config_seed(tmp_path):
    path = write_cfg(tmp_path, {"seed": 9})
    cli.main(["verify", "profile", "--config", path, "--out", str(tmp_path / "a")])
    cli.main(["verify", "profile", "--seed", "9", "--out", str(tmp_path / "b")])
    ra = json.loads((tmp_path / "a" / "report_profile.json").read_text())
    rb = json.loads((tmp_path / "b" / "report_profile.json").read_text())
    assert ra["inputs"]["seed"] == rb["inputs"]["seed"] == 9
    assert ra["records"] == rb["records"]


# -- sweep --------------------------------------------------------------------

def sweep_cfg(tmp_path, axes, solve=False, problem=None):
    return {"problem": problem or GLOBAL_PROBLEM | {"beta": 20.0},
            "solver": {"n": 20, "t_max": 0.01},
            "output": {"directory": str(tmp_path / "sw")},
            "sweep": {"axes": axes, "solve": solve}}


def read_sweep(tmp_path):
    with open(tmp_path / "sw" / "sweep.csv", newline="") as fh:
        return list(csv.DictReader(fh))


def test_sweep_matches_classifier(tmp_path):
    axes = {"q": [1.0, 1.5, 2.0, 2.5, 3.0], "k": [1.0, 1.5, 2.0, 2.5, 3.0]}
    assert cli.main(["sweep", "--config", write_cfg(tmp_path, sweep_cfg(tmp_path, axes))]) == 0
    rows = read_sweep(tmp_path)
    assert len(rows) == 25
    base = ProblemParams.from_dict(GLOBAL_PROBLEM | {"beta": 20.0})
    for row in rows:
        P = base.replace(q=float(row["q"]), k=float(row["k"]))
        assert row["verdict"] == classify_regime(P, Interval(0.0, 1.0)).tag
    assert [int(r["index"]) for r in rows] == list(range(25))


def test_sweep_empty_grid(tmp_path):
    assert cli.main(["sweep", "--config", write_cfg(tmp_path, sweep_cfg(tmp_path, {"q": []}))]) == 0
    assert (tmp_path / "sw" / "sweep.csv").read_text().splitlines() == [
        "index,q,valid,verdict,global_case,status,T_est,max_sup_norm,note"]


def test_sweep_flags_invalid_row(tmp_path):
    cfg = sweep_cfg(tmp_path, {"alpha": [1.0, 0.0, 2.0]}, solve=True)
    assert cli.main(["sweep", "--config", write_cfg(tmp_path, cfg)]) == 0
    rows = read_sweep(tmp_path)
    assert [r["valid"] for r in rows] == ["true", "false", "true"]
    assert rows[1]["verdict"] == "Invalid" and "alpha" in rows[1]["note"]
    assert rows[0]["status"] == rows[2]["status"] == "Completed"
    assert float(rows[0]["max_sup_norm"]) == pytest.approx(1.0)


def test_sweep_parallel_matches_serial(tmp_path):
    cfg = sweep_cfg(tmp_path, {"q": [1.0, 2.0, 3.0], "nu": [0.0, 1.0]}, solve=True)
    path = write_cfg(tmp_path, cfg)
    cli.main(["sweep", "--config", path, "--out", str(tmp_path / "s1")])
    cli.main(["sweep", "--config", path, "--out", str(tmp_path / "s2"), "--jobs", "3"])
    assert (tmp_path / "s1" / "sweep.csv").read_bytes() == (tmp_path / "s2" / "sweep.csv").read_bytes()


def test_bad_jobs_flag(tmp_path):
    path = write_cfg(tmp_path, sweep_cfg(tmp_path, {"q": [1.0]}))
    assert cli.main(["sweep", "--config", path, "--jobs", "0"]) == cli.EXIT_INVALID


def test_module_entry_point(tmp_path):
    path = write_cfg(tmp_path, {"problem": GLOBAL_PROBLEM})
    proc = subprocess.run([sys.executable, "-m", "plapsim", "classify", "--config", path],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["tag"] == "GlobalPredicted"
