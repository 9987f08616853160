import subprocess
import sys

import pytest

from maxbloch.cli import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, main

from .test_harness import TINY


@pytest.fixture
def conf(tmp_path):
    p = tmp_path / "tiny.conf"
    p.write_text(TINY)
    return p


def test_success_and_overrides(conf, tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["pumpprobe", "--config", str(conf), "--out", str(out), "--seed", "3", "--members", "1"]) == EXIT_OK
    text = (out / "manifest.txt").read_text()
    assert "config.seed = 3" in text and "config.ensemble_m = 1" in text
    assert "spectra.csv" in capsys.readouterr().out


def test_full_history_flag(conf, tmp_path):
    assert main(["single", "--config", str(conf), "--out", str(tmp_path), "--full-history"]) == EXIT_OK
    assert (tmp_path / "history.npz").exists()


def test_misspelled_key_exit_two(tmp_path, capsys):
    p = tmp_path / "bad.conf"
    p.write_text("gamma_pmup = 20\n")
    assert main(["single", "--config", str(p)]) == EXIT_CONFIG
    assert "gamma_pmup" in capsys.readouterr().err


def test_grid_resolution_exit_two(conf, tmp_path, capsys):
    conf.write_text(TINY.replace("n_t = 2001", "n_t = 201"))
    assert main(["single", "--config", str(conf), "--out", str(tmp_path)]) == EXIT_CONFIG
    assert "n_t >=" in capsys.readouterr().err


def test_budget_violation_exit_one(conf, tmp_path, capsys):
    conf.write_text(TINY.replace("n_z = 81", "n_z = 11"))
    assert main(["single", "--config", str(conf), "--out", str(tmp_path)]) == EXIT_RUNTIME
    assert "increase n_z" in capsys.readouterr().err


def test_console_script_entry(conf, tmp_path):
    r = subprocess.run([sys.executable, "-m", "maxbloch.cli", "lintest", "--config", str(conf),
                        "--out", str(tmp_path)], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    r = subprocess.run([sys.executable, "-m", "maxbloch.cli", "nonsense", "--config", str(conf)],
                       capture_output=True, text=True)
    assert r.returncode == 2
