import runpy
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


def run_script(name, argv, monkeypatch):
    monkeypatch.setattr(sys, "argv", [name, *argv])
    with pytest.raises(SystemExit) as e:
        runpy.run_path(str(SCRIPTS / name), run_name="__main__")
    return e.value.code


def test_table_script(monkeypatch, capsys):
    assert run_script("scaling_table.py", ["--seeds", "1", "--max-agents", "3"], monkeypatch) == 0
    assert "   18" in capsys.readouterr().out


def test_scale_script(monkeypatch, capsys):
    assert run_script("run_scale.py", ["--agents", "5", "--side", "12", "--seeds", "1"], monkeypatch) == 0


def test_flag_script(monkeypatch, capsys):
    assert run_script("explore_flags.py", ["2", "3"], monkeypatch) == 0
    assert run_script("explore_flags.py", ["3", "--clear-on-replan"], monkeypatch) == 0
    assert "cycle [0, 1, 2]" in capsys.readouterr().out


def test_stress_script(monkeypatch, capsys):
    assert run_script("stress.py", ["--runs", "5"], monkeypatch) == 0
