import csv
import json
import subprocess
import sys

import numpy as np
import pytest
from numpy.testing import assert_array_equal

import _scenarios as sc
from taperlab import __version__
from taperlab.cli import main
from taperlab.engine import correct_pattern
from taperlab.sweep import load_pattern, load_sweep, save_pattern, save_sweep

SMALL_GRID = {"n_min": 301, "n_max": 501, "n_step": 100, "tenths": [3, 5, 7]}


@pytest.fixture
def files(tmp_path):
    sweep = str(tmp_path / "sweep.csv")
    ref = str(tmp_path / "ref.csv")
    save_sweep(sc.multipath(0), sweep)
    save_pattern(sc.truth(), ref)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"grid": SMALL_GRID, "gating": {"distance_m": 1.5}}))
    return tmp_path, sweep, ref, str(cfg)


def error_of(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_simulate_is_reproducible(tmp_path):
    truth = tmp_path / "truth.csv"
    save_pattern(sc.truth(), str(truth))
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"los_delay": 5e-9, "noise_floor": 0.03,
                                "echoes": [{"delay": 9e-9, "amplitude": 0.5}]}))
    outs = []
    for name, seed in (("a", 4), ("b", 4), ("c", 5)):
        out = tmp_path / f"{name}.csv"
        assert main(["--seed", str(seed), "simulate", "--truth", str(truth), "--f0", "4e9",
                     "--bw", "3e9", "--spec", str(spec), "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] != outs[2]
    s = load_sweep(str(tmp_path / "a.csv"))
    assert (s.freq.K, s.angles.A, s.f0) == (201, 72, 4e9)


def test_correct_matches_library(files):
    tmp, sweep, _, _ = files
    out = str(tmp / "p.csv")
    assert main(["correct", "--sweep", sweep, "--n", "401", "--s", "120", "--out", out]) == 0
    assert_array_equal(load_pattern(out).values,
                       correct_pattern(load_sweep(sweep), 401, 120).values)


def test_tune_writes_outputs(files):
    tmp, sweep, ref, cfg = files
    out = tmp / "tuned"
    assert main(["--config", cfg, "tune", "--sweep", sweep, "--ref", ref, "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert len(rep["designs"]) == 9 and rep["sigma"] == 0.1
    assert len(load_pattern(str(out / "pattern.csv"))) == 72
    rows = list(csv.reader(open(out / "landscape.csv")))
    assert rows[0] == ["n", "s", "U"] and len(rows) == 10
    labels = {r["label"] for r in csv.DictReader(open(out / "plot.csv"))}
    assert labels == {"reference", "uncorrected", "corrected"}


@pytest.mark.parametrize("extra", [["--method", "rect", "--distance", "1.5"],
                                   ["--method", "hann"], ["--method", "composite"]])
def test_gate(files, extra):
    tmp, sweep, _, _ = files
    out = str(tmp / "g.csv")
    assert main(["gate", "--sweep", sweep, "--out", out] + extra) == 0
    assert len(load_pattern(out)) == 72


def test_compare_table(files, capsys):
    tmp, sweep, ref, cfg = files
    out = tmp / "cmp.json"
    assert main(["--config", cfg, "compare", "--sweep", sweep, "--ref", ref,
                 "--out", str(out), "--table"]) == 0
    d = json.loads(out.read_text())
    assert d["per_f0"][0]["rect"] is not None
    assert "composite" in capsys.readouterr().out


def test_dpss_csv(tmp_path):
    out = tmp_path / "d.csv"
    assert main(["dpss", "--n", "64", "--thb", "4", "--out", str(out)]) == 0
    rows = list(csv.DictReader(open(out)))
    assert len(rows) == 7 * 64
    assert {int(r["order"]) for r in rows} == set(range(7))
    v0 = np.array([float(r["value"]) for r in rows if r["order"] == "0"])
    assert np.sum(v0 ** 2) == pytest.approx(1.0)


def test_load_error_is_json(files, capsys):
    tmp, _, _, _ = files
    bad = tmp / "bad.csv"
    bad.write_text("freq_hz,angle_deg,re,im\n1e9,0,1,0\n1e9,0,2,0\n2e9,0,1,0\n")
    assert main(["correct", "--sweep", str(bad), "--n", "4", "--s", "2",
                 "--out", str(tmp / "x.csv")]) == 1
    err = error_of(capsys)
    assert err["error"] == "LoadError" and "line 3" in err["message"]


def test_parameter_error_is_json(files, capsys):
    tmp, sweep, _, _ = files
    assert main(["correct", "--sweep", sweep, "--n", "1500", "--s", "10",
                 "--out", str(tmp / "x.csv")]) == 1
    assert error_of(capsys)["error"] == "ParameterError"


def test_usage_errors(capsys):
    assert main(["frobnicate"]) == 2
    assert error_of(capsys)["error"] == "UsageError"
    assert main(["correct", "--n", "401", "--s", "100", "--out", "x.csv"]) == 2
    assert "--sweep" in error_of(capsys)["message"]


def test_bad_config_key(files, capsys):
    tmp, sweep, _, _ = files
    cfg = tmp / "bad.json"
    cfg.write_text('{"t_hbb": 4}')
    assert main(["--config", str(cfg), "dpss", "--n", "16"]) == 1
    assert error_of(capsys)["error"] == "LoadError"


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "taperlab", "--version"],
                       capture_output=True, text=True, check=True)
    assert r.stdout.strip() == f"taperlab {__version__}"
