import math

import numpy as np
import pytest

from maxbloch import harness
from maxbloch.config import loads
from maxbloch.harness import (
    SWEEP_HEADER,
    _ordered_map,
    ensemble_average,
    member_seeds,
    run_member,
    run_scenario,
    sweep_rows,
    thread_count,
)
from maxbloch.propagate import AccuracyBudgetError
from maxbloch.spectral import spectrum

TINY = """
omega_c_ghz = 0.5
t_window_ns = 8
n_t = 2001
n_z = 81
n_modes = 10
gamma_pump_ghz = 5
omega_00_ghz = 0.02
a_ns = 1.2
seed = 7
ensemble_m = 2
instrument_fwhm_ghz = 1
sweep_values = 0.01 0.02
"""


def cfg(scenario, **kw):
    return loads(TINY, scenario, **kw)


def _data_files(out):
    return {p.name: p.read_bytes() for p in sorted(out.iterdir()) if p.name != "manifest.txt"}


@pytest.mark.parametrize("scenario", ["single", "pumpprobe", "lintest", "sweep-energy"])
def test_rerun_is_byte_identical(tmp_path, scenario):
    a = run_scenario(cfg(scenario), tmp_path / "a")
    b = run_scenario(cfg(scenario), tmp_path / "b")
    fa, fb = _data_files(a.out_dir), _data_files(b.out_dir)
    assert fa and fa == fb
    ma = a.manifest.read_text().splitlines()
    mb = b.manifest.read_text().splitlines()
    skip = ("started_utc", "finished_utc", "wall_time_s", "config.output_dir")
    assert [x for x in ma if not x.startswith(skip)] == [x for x in mb if not x.startswith(skip)]


def test_single_outputs(tmp_path):
    out = run_scenario(cfg("single", full_history=True), tmp_path)
    names = {p.name for p in out.files}
    assert {"trace_z0.csv", "trace_zL.csv", "area_vs_z.csv", "spectra.csv", "spectra_raw.csv",
            "history.npz"} <= names
    head = (tmp_path / "trace_zL.csv").read_text().splitlines()
    assert head[0] == "t_ns,re,im,intensity" and len(head) == 2002
    assert (tmp_path / "spectra.csv").read_text().startswith("delta_GHz,j_in,j_out,k,valid\n")
    hist = np.load(tmp_path / "history.npz")
    assert hist["pump"].shape == (81, 2001)
    text = out.manifest.read_text()
    assert "status = complete" in text and "config.seed = 7" in text and "generator = splitmix64-v1" in text


def test_manifest_marks_failures(tmp_path):
    bad = loads(TINY.replace("n_z = 81", "n_z = 11"), "single")
    with pytest.raises(AccuracyBudgetError):
        run_scenario(bad, tmp_path)
    assert "status = failed" in (tmp_path / "manifest.txt").read_text()


def test_ensemble_of_one_is_a_single_run():
    c = cfg("pumpprobe")
    ens = ensemble_average(c, m=1)
    _, res = run_member(c, member_seeds(c, 1)[0])
    assert np.array_equal(ens.j_in.intensity, spectrum(res.probe_in).intensity)
    assert np.array_equal(ens.j_out.intensity, spectrum(res.probe_out).intensity)


def test_reduction_independent_of_scheduling():
    c = cfg("pumpprobe", ensemble_m=4)
    serial = ensemble_average(c, threads=1, keep_members=True)
    pooled = ensemble_average(c, threads=4)
    assert np.array_equal(serial.j_in.intensity, pooled.j_in.intensity)
    assert np.array_equal(serial.j_out.intensity, pooled.j_out.intensity)
    assert [m.seed for m in serial.members] == serial.seeds


def test_ordered_map_keeps_input_order():
    import time

    def slow_first(x):
        time.sleep(0.02 * (5 - x))
        return x * x

    assert _ordered_map(slow_first, list(range(6)), threads=6) == [x * x for x in range(6)]


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("MAXBLOCH_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("MAXBLOCH_THREADS", "zero")
    assert thread_count() >= 1


def test_standard_error_shrinks_like_root_m():
    # mode-resolved input intensity, spread over repeated master seeds
    c = cfg("pumpprobe")
    mode_bins = None

    def spread(m):
        vals = []
        for master in range(24):
            e = ensemble_average(c.with_seed(1000 + master), m=m, threads=1)
            nonlocal mode_bins
            if mode_bins is None:
                d = e.j_in.delta
                modes = np.arange(-4, 5) * c.pump.delta_mode
                mode_bins = np.array([int(np.argmin(np.abs(d - w))) for w in modes])
            vals.append(e.j_in.intensity[mode_bins])
        vals = np.array(vals)
        return np.mean(vals.std(axis=0) / vals.mean(axis=0))

    ratio = spread(1) / spread(8)
    assert math.sqrt(8) / 2 <= ratio <= 2 * math.sqrt(8)


def test_sweep_rows_order_and_purity():
    c = cfg("sweep-energy", ensemble_m=1, sweep_values=[0.02, 0.01])
    rows = sweep_rows(c)
    assert [r[0] for r in rows] == [0.02, 0.01]
    assert len(rows[0]) == len(SWEEP_HEADER)
    assert rows[0][1] == pytest.approx(2 * rows[1][1])
    same = sweep_rows(cfg("sweep-energy", ensemble_m=1, sweep_values=[0.015, 0.015]))
    np.testing.assert_array_equal(np.array(same[0], float), np.array(same[1], float))


def test_detuning_and_coupling_sweeps(tmp_path):
    c = cfg("sweep-detuning", ensemble_m=1, sweep_values=[0.0, 0.5])
    out = run_scenario(c, tmp_path)
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == ",".join(SWEEP_HEADER) and len(lines) == 3
    wc = harness.with_parameter(c, "omega_c", 0.3)
    assert wc.medium.omega_c == pytest.approx(2 * math.pi * 0.3e9)
    with pytest.raises(ValueError):
        harness.with_parameter(c, "gamma2", 1.0)
    assert out.summary["rows"] == 2


def test_lintest_summary(tmp_path):
    out = run_scenario(cfg("lintest"), tmp_path)
    s = out.summary
    assert s["valid_bins"] > 10 and s["rms_deviation"] >= 0
    assert (tmp_path / "lintest.csv").read_text().startswith("delta_GHz,j_in,j_out,k_num,k_linear,valid\n")


def test_keep_members(tmp_path):
    run_scenario(cfg("pumpprobe", keep_members=True), tmp_path)
    data = np.load(tmp_path / "members.npz")
    assert data["j_in"].shape == (2, 2001)
