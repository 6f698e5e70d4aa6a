import json
import math
import os
import subprocess
import sys

import pytest

from pareto_records import cli
from pareto_records.law import EmpiricalLaw
from pareto_records.stream import PooledRun

KEYS = {"manifest", "d", "pmf", "se", "tv_truncation_bound", "stats"}


def run(*argv):
    code, report, text = cli.run(list(argv))
    return code, report, text


def test_report_d2(capsys):
    code, rep, _ = run("report", "--d", "2")
    assert code == 0
    assert set(rep) == KEYS
    assert rep["stats"]["a_d"] == pytest.approx(8 * math.sqrt(2))
    assert rep["stats"]["pk1_lower"] == 0.0625
    assert rep["stats"]["d2_exact"]["pk1_exact"] == 0.5
    assert rep["pmf"][:3] == [0.5, 0.25, 0.125]
    assert rep["stats"]["pk1_upper_asymptotic"]["asymptotic_only"] is True


def test_report_d1_marks_unavailable(capsys):
    code, rep, _ = run("report", "--d", "1")
    assert code == 0
    assert "unavailable" in rep["stats"]["moment_upper_bound"]
    assert "unavailable" in rep["stats"]["tail_bounds"]


def test_stream_d1(capsys):
    code, rep, _ = run("stream", "--d", "1", "--n", "1000", "--model", "exp-max", "--seed", "7", "--replicates", "50")
    assert code == 0
    assert rep["pmf"][1] == 1.0
    assert rep["manifest"]["seed"] == 7


def test_stream_conservation_reported(capsys):
    for seed in ("1", "2"):
        code, rep, _ = run("stream", "--d", "2", "--n", "2", "--seed", seed)
        s = rep["stats"]
        assert code == 0 and s["conservation_ok"]
        assert s["records_total"] == s["remaining"] + s["total_kills"]


def test_limit_examples(capsys):
    code, rep, _ = run("limit", "--d", "1", "--delta", "3", "--samples", "4000", "--seed", "1")
    assert code == 0
    p, se = rep["pmf"][1], rep["se"][1]
    assert abs(p - (1 - math.exp(-3))) < 4 * se
    assert rep["tv_truncation_bound"] == pytest.approx(math.exp(-3))
    code, rep, _ = run("limit", "--d", "3", "--delta", "0.0001", "--samples", "100")
    assert rep["pmf"][0] == 1.0


def test_limit_default_delta_and_diagnostics(tmp_path, capsys):
    diag = tmp_path / "d.jsonl"
    code, rep, _ = run("limit", "--d", "3", "--samples", "50", "--diagnostics", str(diag))
    assert code == 0 and rep["stats"]["delta"] == 8.0
    lines = [json.loads(x) for x in diag.read_text().splitlines()]
    assert len(lines) == 50
    assert set(lines[0]) == {"k", "g", "n_candidates", "n_maximal", "n_external"}
    assert all(r["k"] <= r["n_maximal"] <= r["n_candidates"] for r in lines)


def test_csv_format(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code, _, _ = run("limit", "--d", "2", "--samples", "200", "--format", "csv", "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# manifest: ")
    header = next(i for i, l in enumerate(lines) if not l.startswith("#"))
    assert lines[header] == "k,pmf,se"
    k, p, s = lines[header + 1].split(",")
    assert k == "0" and 0 <= float(p) <= 1


@pytest.mark.parametrize(
    "argv",
    [
        ("stream", "--d", "0", "--n", "10"),
        ("stream", "--d", "2"),
        ("stream", "--d", "2", "--n", "10", "--model", "weird"),
        ("limit", "--d", "2", "--delta", "-1"),
        ("limit", "--d", "2", "--samples", "0"),
        ("report", "--d", "x"),
        ("compare", "--d", "2", "--n-grid", "a,b"),
        ("limit", "--d", "2", "--seed", "-3"),
        (),
    ],
)
def test_usage_errors(argv, capsys):
    assert run(*argv)[0] == cli.EXIT_USAGE


def test_insufficient_events_exit(capsys):
    code, _, _ = run("stream", "--d", "1", "--n", "1000000", "--window-factor", "1.000001", "--replicates", "1")
    assert code == cli.EXIT_INSUFFICIENT
    assert "insufficient" in capsys.readouterr().err


def test_budget_exit(capsys):
    code, _, _ = run("limit", "--d", "2", "--delta", "40", "--samples", "5", "--method", "slab", "--budget", "1000")
    assert code == cli.EXIT_BUDGET
    assert "budget" in capsys.readouterr().err


def test_invariant_exit(monkeypatch, capsys):
    def broken(*a, **k):
        law = EmpiricalLaw([1, 1], 2)
        return PooledRun(law, {0: 1, 1: 1}, 1, records_total=5, remaining=1, total_kills=1)

    monkeypatch.setattr(cli, "pooled_conditional_run", broken)
    assert run("stream", "--d", "2", "--n", "10")[0] == cli.EXIT_INVARIANT


def test_compare_d1(capsys):
    code, rep, _ = run("compare", "--d", "1", "--n-grid", "4,64,1024", "--delta", "10", "--samples", "4000", "--events", "2000")
    assert code == 0
    for row in rep["stats"]["rows"]:
        assert row["tv"] <= row["budget"] * 3 + 1e-3


def _cli_text(args, workers):
    env = dict(os.environ, PARETO_RECORDS_WORKERS=str(workers))
    res = subprocess.run([sys.executable, "-m", "pareto_records.cli", *args], capture_output=True, text=True, env=env, check=True)
    return res.stdout


@pytest.mark.parametrize(
    "args",
    [
        ("limit", "--d", "3", "--delta", "5", "--samples", "5000", "--seed", "4"),
        ("stream", "--d", "2", "--n", "256", "--replicates", "150", "--seed", "4", "--format", "csv"),
        ("stream", "--d", "3", "--n", "256", "--replicates", "70", "--seed", "4"),
        ("compare", "--d", "2", "--n-grid", "64,128", "--samples", "3000", "--events", "800", "--seed", "3"),
        ("report", "--d", "3"),
    ],
)
def test_determinism_across_workers(args):
    fmt = "csv" if "csv" in args else "json"
    a = _cli_text(args, 1)
    b = _cli_text(args, 1)
    c = _cli_text(args, 2)
    assert cli.data_section(a, fmt) == cli.data_section(b, fmt) == cli.data_section(c, fmt)
