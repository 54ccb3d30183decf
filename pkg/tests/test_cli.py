import json
from pathlib import Path

import pytest

from enforcers.cli import EXIT_ABORT, EXIT_CONFIG, EXIT_OK, main
from enforcers.scenario import BUNDLED, load_scenario, read_trace, trace_lines
from enforcers.simulator import run

GOLDEN = Path(__file__).parent / "golden"


@pytest.mark.parametrize("name", BUNDLED)
def test_run_and_replay_bundled(name, tmp_path, capsys):
    trace = tmp_path / "t.jsonl"
    metrics = tmp_path / "m.json"
    assert main(["run", "--scenario", name, "--trace", str(trace), "--metrics", str(metrics)]) == EXIT_OK
    assert "ok:" in capsys.readouterr().out
    m = json.loads(metrics.read_text())
    assert m["completed"] and m["aborted"] is None
    assert main(["replay", str(trace)]) == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert summary["violations"] == 0
    assert summary["deviation"] == {a: v["deviation"] for a, v in m["per_agent"].items()}


def test_fig1_matches_golden_trace():
    assert trace_lines(run(load_scenario("fig1"))) == (GOLDEN / "fig1.jsonl").read_text().splitlines()


def test_validate(capsys):
    assert main(["validate", "--scenario", "fig1"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "warning" in out and "ok:" in out


def test_validate_rejects_small_comm_dist(capsys):
    assert main(["validate", "--scenario", "fig1", "-d", "1"]) == EXIT_CONFIG


def test_random_agents_run(capsys):
    assert main(["run", "--agents", "6", "--grid", "8x8", "--seed", "3"]) == EXIT_OK


def test_too_many_agents(capsys):
    assert main(["run", "--agents", "10", "--grid", "3x3"]) == EXIT_CONFIG


def test_missing_scenario(capsys):
    assert main(["run", "--scenario", "nope"]) == EXIT_CONFIG
    assert main(["run"]) == EXIT_CONFIG


@pytest.mark.parametrize("content", ["{not json", "[1, 2]", '{"grid": {"width": 3}}',
                                     '{"grid": {"width": 3, "height": 3}, "agents": [{"id": "a"}]}'])
def test_malformed_scenario(content, tmp_path, capsys):
    f = tmp_path / "bad.json"
    f.write_text(content)
    assert main(["run", "--scenario", str(f)]) == EXIT_CONFIG
    assert "error" in capsys.readouterr().err


def test_custom_graph_scenario(tmp_path, capsys):
    ring = "\n".join(f"v{i} n v{(i + 1) % 6}\nv{(i + 1) % 6} p v{i}\nv{i} s v{i}" for i in range(6))
    (tmp_path / "ring.txt").write_text(ring + "\n")
    (tmp_path / "s.json").write_text(json.dumps({
        "graph": "ring.txt", "lookahead": 2, "deviation": 2, "comm_dist": 3,
        "agents": [{"id": "a", "start": "v0", "plan": "nn"}, {"id": "b", "start": "v3", "plan": "pp"}]}))
    trace = tmp_path / "t.jsonl"
    assert main(["run", "--scenario", str(tmp_path / "s.json"), "--trace", str(trace)]) == EXIT_OK
    assert main(["replay", str(trace)]) == EXIT_OK


def test_bad_graph_rejected(tmp_path, capsys):
    (tmp_path / "g.txt").write_text("a x b\nb x a\n")
    (tmp_path / "s.json").write_text(json.dumps({"graph": "g.txt", "agents": []}))
    assert main(["validate", "--scenario", str(tmp_path / "s.json")]) == EXIT_CONFIG


def test_corrupted_trace_fails_replay(tmp_path, capsys):
    lines = (GOLDEN / "fig1.jsonl").read_text().splitlines()
    rec = json.loads(lines[3])
    rec["positions"]["blue"] = rec["positions"]["green"]
    lines[3] = json.dumps(rec)
    bad = tmp_path / "bad.jsonl"
    bad.write_text("\n".join(lines) + "\n")
    assert main(["replay", str(bad)]) == EXIT_ABORT
    assert "violation" in capsys.readouterr().err


def test_unreadable_trace(tmp_path, capsys):
    f = tmp_path / "x.jsonl"
    f.write_text("garbage\n")
    assert main(["replay", str(f)]) == EXIT_CONFIG


def test_empty_trace_passes(tmp_path, capsys):
    f = tmp_path / "e.jsonl"
    f.write_text("")
    assert main(["replay", str(f)]) == EXIT_OK
    assert read_trace(f) == (None, [])


def test_positions_csv(tmp_path):
    out = tmp_path / "p.csv"
    assert main(["positions", str(GOLDEN / "fig1.jsonl"), "-o", str(out)]) == EXIT_OK
    rows = out.read_text().splitlines()
    assert rows[0] == "tick,agent,x,y" and "5,blue,1,2" in rows


def test_bench_small(capsys):
    assert main(["bench", "--max-agents", "3", "--no-timing"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "MISMATCH" not in out and "   18" in out


def test_max_ticks_exit_code(capsys):
    assert main(["run", "--scenario", "fig1", "--max-ticks", "2"]) == EXIT_ABORT
