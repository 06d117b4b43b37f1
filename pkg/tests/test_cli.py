import csv
import re

import pytest

from epifuzz import io
from epifuzz.cli import main, parse_seeds
from epifuzz.config import load_config
from epifuzz.engine import run

SMALL = """
[scenario]
n_agents = 400
width = 40
height = 40
initial_infected = 4
max_days = {max_days}
seed = 5
"""


@pytest.fixture
def small_cfg(tmp_path):
    def make(max_days=60, extra=""):
        p = tmp_path / f"cfg_{max_days}.ini"
        p.write_text(SMALL.format(max_days=max_days) + extra)
        return p

    return make


def test_simulate_writes_outputs(tmp_path, small_cfg, capsys):
    out = tmp_path / "o"
    assert main(["simulate", "--config", str(small_cfg()), "--out", str(out), "--svg"]) == 0
    text = (out / "timeseries.csv").read_text()
    assert text.startswith("day,susceptible,infected,recovered,dead,new_infections,")
    assert text.endswith("\n") and "\r" not in text
    svg = (out / "chart.svg").read_text()
    assert svg.startswith("<svg") and svg.count("<polyline") == 2
    summary = list(csv.DictReader(open(out / "summary.csv")))
    assert summary[0]["seed"] == "5"
    assert "cfr" in capsys.readouterr().out


def test_simulate_max_days_zero(tmp_path, small_cfg):
    assert main(["simulate", "--config", str(small_cfg(0)), "--out", str(tmp_path)]) == 0
    assert len((tmp_path / "timeseries.csv").read_text().splitlines()) == 2
    assert not (tmp_path / "chart.svg").exists()


def test_seed_override_and_determinism(tmp_path, small_cfg):
    cfg = str(small_cfg())
    for name in ("a", "b"):
        assert main(["simulate", "--config", cfg, "--seed", "99", "--out", str(tmp_path / name)]) == 0
    a = (tmp_path / "a" / "timeseries.csv").read_bytes()
    assert a == (tmp_path / "b" / "timeseries.csv").read_bytes()
    assert list(csv.DictReader(open(tmp_path / "a" / "summary.csv")))[0]["seed"] == "99"


def test_round_trip(tmp_path, small_cfg):
    cfg, _ = load_config(small_cfg())
    series = run(cfg)
    io.write_timeseries(tmp_path / "t.csv", series)
    assert io.read_timeseries(tmp_path / "t.csv") == series.records


def test_bad_config_key_reported(tmp_path, small_cfg, capsys):
    bad = small_cfg(extra="speed = 3\n")
    assert main(["simulate", "--config", str(bad), "--out", str(tmp_path)]) != 0
    assert "'speed'" in capsys.readouterr().err
    assert main(["simulate", "--config", str(tmp_path / "missing.ini"), "--out", str(tmp_path)]) != 0
    assert "missing.ini" in capsys.readouterr().err


def test_compare_self(tmp_path, small_cfg, capsys):
    main(["simulate", "--config", str(small_cfg()), "--out", str(tmp_path)])
    ts = str(tmp_path / "timeseries.csv")
    rep = tmp_path / "comparison.csv"
    assert main(["compare", "--sim", ts, "--obs", ts, "--truncate", "19", "--out", str(rep)]) == 0
    row = list(csv.DictReader(open(rep)))[0]
    assert float(row["rmse"]) == 0 and row["truncation_day"] == "19" and row["n_days"] == "19"
    assert rep.read_text().endswith("\n")


def test_compare_observed_file(tmp_path):
    sim = tmp_path / "sim.csv"
    obs = tmp_path / "obs.csv"
    sim.write_text("day,new_cases\n0,1\n1,2\n2,3\n3,9\n")
    obs.write_text("day,new_cases\n1,2\n2,5\n3,4\n")
    assert main(["compare", "--sim", str(sim), "--obs", str(obs), "--out", str(tmp_path / "c.csv")]) == 0
    row = list(csv.DictReader(open(tmp_path / "c.csv")))[0]
    assert float(row["mae"]) == pytest.approx(7 / 3)
    assert row["peak_day_offset"] == "1"


def test_compare_gap_names_line(tmp_path, capsys):
    obs = tmp_path / "obs.csv"
    obs.write_text("day,new_cases\n0,1\n1,2\n3,4\n")
    assert main(["compare", "--sim", str(obs), "--obs", str(obs)]) != 0
    assert re.search(r"obs\.csv:4: day 3 does not follow day 1", capsys.readouterr().err)


def test_compare_malformed_row(tmp_path, capsys):
    obs = tmp_path / "obs.csv"
    obs.write_text("day,new_cases\n0,1\n1,x\n")
    assert main(["compare", "--sim", str(obs), "--obs", str(obs)]) != 0
    assert "obs.csv:3" in capsys.readouterr().err


def test_compare_no_overlap(tmp_path, capsys):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    a.write_text("day,new_cases\n0,1\n1,2\n")
    b.write_text("day,new_cases\n5,1\n6,2\n")
    assert main(["compare", "--sim", str(a), "--obs", str(b)]) != 0
    assert "share no days" in capsys.readouterr().err


@pytest.mark.parametrize("text, seeds", [("1..3", [1, 2, 3]), ("4,2", [4, 2]), ("1..2,9", [1, 2, 9])])
def test_parse_seeds(text, seeds):
    assert parse_seeds(text) == seeds


def test_sweep_degenerate_matches_simulate(tmp_path, small_cfg):
    cfg = str(small_cfg())
    main(["simulate", "--config", cfg, "--seed", "1", "--out", str(tmp_path / "sim")])
    assert main(["sweep", "--config", cfg, "--param", "variant_factor", "--values", "1.0",
                 "--seeds", "1", "--out", str(tmp_path / "sw")]) == 0
    rows = list(csv.DictReader(open(tmp_path / "sw" / "sweep_summary.csv")))
    assert len(rows) == 1
    [run_file] = (tmp_path / "sw" / "runs").iterdir()
    assert run_file.read_bytes() == (tmp_path / "sim" / "timeseries.csv").read_bytes()


def test_sweep_grid_and_workers(tmp_path, small_cfg):
    cfg = str(small_cfg(30))
    args = ["sweep", "--config", cfg, "--param", "variant_factor", "--values", "1.0,1.5", "--seeds", "1..4"]
    assert main(args + ["--out", str(tmp_path / "w1")]) == 0
    assert main(args + ["--out", str(tmp_path / "w2"), "--workers", "2"]) == 0
    one = (tmp_path / "w1" / "sweep_summary.csv").read_text()
    assert len(one.splitlines()) == 9
    assert one == (tmp_path / "w2" / "sweep_summary.csv").read_text()


def test_sweep_unknown_param(tmp_path, small_cfg, capsys):
    assert main(["sweep", "--config", str(small_cfg()), "--param", "speed", "--values", "1",
                 "--seeds", "1", "--out", str(tmp_path / "x")]) != 0
    assert "unknown sweep parameter" in capsys.readouterr().err
    assert not (tmp_path / "x").exists()
