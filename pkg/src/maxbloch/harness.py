"""Scenario execution, ensemble averaging and serialization.

Every run writes ``manifest.txt`` first (``status = running``) and rewrites it
when finished.  Data files are CSV with a single header line and values in
``%.17g`` so that identical runs produce identical bytes.  Independent
propagations (ensemble members, sweep points) may run on a thread pool; the
numba sweeps release the GIL.  Results are always reduced in member-index
order, never in completion order.
"""

from __future__ import annotations

import datetime as _dt
import math
import os
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import __version__
from .config import RunConfig
from .features import k_features
from .params import C_LIGHT, ProbeSpec, envelope_switch_on_step, ghz_to_rad, rad_to_ghz, s_to_ns
from .propagate import PropagationResult, propagate_pair, propagate_pump
from .rng import GENERATOR_NAME, member_seed
from .spectral import (
    SpectrumTable,
    TransmissionTable,
    frequency_grid,
    instrument_convolve,
    linear_transfer,
    pulse_area,
    rms,
    spectrum,
    transmission,
)
from .synth import max_time_step, synthesize_probe, synthesize_pump

THREADS_ENV = "MAXBLOCH_THREADS"
CSV_FMT = "%.17g"


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            n = int(raw)
        except ValueError:
            n = 0
        if n >= 1:
            return n
    return os.cpu_count() or 1


def _ordered_map(fn: Callable, items: list, threads: Optional[int] = None) -> list:
    """``[fn(x) for x in items]``, possibly concurrent, always in input order."""
    threads = thread_count() if threads is None else threads
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        futures = [pool.submit(fn, x) for x in items]
        return [f.result() for f in futures]


def member_seeds(config: RunConfig, m: Optional[int] = None) -> list:
    m = config.ensemble_m if m is None else m
    return [member_seed(config.pump.seed, i) for i in range(m)]


# --------------------------------------------------------------------------
# ensemble


@dataclass(eq=False)
class MemberResult:
    seed: int
    input_area: float
    j_in: np.ndarray
    j_out: np.ndarray
    max_slice_change: float


@dataclass(eq=False)
class EnsembleResult:
    j_in: SpectrumTable  # averaged raw spectra
    j_out: SpectrumTable
    seeds: list
    input_areas: np.ndarray
    max_slice_change: float
    members: Optional[list] = None

    def convolved(self, fwhm: float):
        return instrument_convolve(self.j_in, fwhm), instrument_convolve(self.j_out, fwhm)

    def transmission(self, fwhm: float, floor: float) -> TransmissionTable:
        a, b = self.convolved(fwhm)
        return transmission(a, b, floor)


def run_member(config: RunConfig, seed: int, full_history: bool = False):
    """Synthesize and propagate one pump+probe realization."""
    pump = replace(config.pump, seed=seed)
    rec = synthesize_pump(pump, config.grid)
    probe_in = synthesize_probe(rec, config.probe or ProbeSpec(), config.grid)
    res = propagate_pair(rec.envelope, probe_in, config.medium, config.grid, full_history)
    return rec, res


def ensemble_average(config: RunConfig, m: Optional[int] = None, keep_members: bool = False,
                     threads: Optional[int] = None) -> EnsembleResult:
    """Average probe input/output intensity spectra over ``m`` phase realizations."""
    seeds = member_seeds(config, m)
    if not seeds:
        raise ValueError("ensemble needs at least one member")

    def one(seed):
        rec, res = run_member(config, seed)
        return MemberResult(seed, pulse_area(rec.envelope), spectrum(res.probe_in).intensity,
                            spectrum(res.probe_out).intensity, res.max_slice_change)

    members = _ordered_map(one, seeds, threads)
    delta = frequency_grid(config.grid.n_t, config.grid.dt)
    j_in = np.zeros_like(delta)
    j_out = np.zeros_like(delta)
    for mr in members:  # index order
        j_in += mr.j_in
        j_out += mr.j_out
    n = len(members)
    return EnsembleResult(
        j_in=SpectrumTable(delta, j_in / n),
        j_out=SpectrumTable(delta, j_out / n),
        seeds=seeds,
        input_areas=np.array([mr.input_area for mr in members]),
        max_slice_change=max(mr.max_slice_change for mr in members),
        members=members if keep_members else None,
    )


# --------------------------------------------------------------------------
# serialization


def write_csv(path: Path, header: list, columns: list) -> Path:
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    np.savetxt(path, data, fmt=CSV_FMT, delimiter=",", header=",".join(header), comments="")
    return path


def write_trace(path: Path, env) -> Path:
    s = env.samples
    return write_csv(path, ["t_ns", "re", "im", "intensity"],
                     [s_to_ns(env.times), s.real, s.imag, s.real**2 + s.imag**2])


def write_spectra(path: Path, j_in: SpectrumTable, j_out: SpectrumTable, floor: float) -> Path:
    k = transmission(j_in, j_out, floor)
    return write_csv(path, ["delta_GHz", "j_in", "j_out", "k", "valid"],
                     [rad_to_ghz(j_in.delta), j_in.intensity, j_out.intensity, k.k_ratio,
                      k.valid.astype(float)])


def _fmt(value) -> str:
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple, np.ndarray)):
        return " ".join(_fmt(v) for v in value)
    return str(value)


def write_manifest(path: Path, entries: dict) -> Path:
    lines = [f"{k} = {_fmt(v)}" for k, v in entries.items()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def derived_quantities(config: RunConfig) -> dict:
    med, grid = config.medium, config.grid
    return {
        "omega_c_ghz_effective": rad_to_ghz(med.omega_c),
        "alpha0_L": med.alpha0 * med.length_L,
        "dt_ps": grid.dt * 1e12,
        "dz_cm": grid.dz(med),
        "d_delta_ghz": 1.0 / (s_to_ns(grid.dt) * grid.n_t),
        "max_dt_for_pump_ps": max_time_step(config.pump) * 1e12,
        "envelope_switch_on_step": envelope_switch_on_step(config.pump.t0, config.pump.a, config.pump.b),
        "probe_cos_phi": math.cos(grid.phi),
        "probe_walkoff_term": "dropped",
        "c_cm_per_s": C_LIGHT,
    }


# --------------------------------------------------------------------------
# scenarios


@dataclass(eq=False)
class RunOutputs:
    out_dir: Path
    files: list
    manifest: Path
    summary: dict = field(default_factory=dict)


def _k_summary(table: TransmissionTable) -> dict:
    feat = k_features(table)
    pos = rad_to_ghz(table.delta[feat.maxima])
    return {
        "k0": feat.k0,
        "k_max": float(table.k_ratio[feat.argmax]),
        "delta_k_max_ghz": rad_to_ghz(float(table.delta[feat.argmax])),
        "k_max_offset_bins": feat.offset_of_max(),
        "local_max_delta_ghz": list(pos),
        "local_max_k": list(table.k_ratio[feat.maxima]),
        "local_min_delta_ghz": list(rad_to_ghz(table.delta[feat.minima])),
    }


def _single(config: RunConfig, out: Path, full_history: bool) -> tuple:
    seed = member_seed(config.pump.seed, 0)
    rec = synthesize_pump(replace(config.pump, seed=seed), config.grid)
    res = propagate_pump(rec.envelope, config.medium, config.grid, full_history)
    files = [
        write_trace(out / "trace_z0.csv", res.pump_in),
        write_trace(out / "trace_zL.csv", res.pump_out),
        write_csv(out / "area_vs_z.csv", ["z_cm", "area", "d0_final", "energy"],
                  [res.z, res.area, res.d0_final, res.energy]),
    ]
    raw_in, raw_out = spectrum(res.pump_in), spectrum(res.pump_out)
    files.append(write_spectra(out / "spectra_raw.csv", raw_in, raw_out, config.floor))
    files.append(write_spectra(out / "spectra.csv", instrument_convolve(raw_in, config.instrument_fwhm),
                               instrument_convolve(raw_out, config.instrument_fwhm), config.floor))
    if full_history:
        files.append(_save_history(out, res))
    summary = {
        "seeds": [seed],
        "input_area_pi": pulse_area(res.pump_in) / math.pi,
        "output_area_pi": pulse_area(res.pump_out) / math.pi,
        "max_bloch_drift": res.max_bloch_drift,
        "max_slice_change": res.max_slice_change,
    }
    return files, summary


def _save_history(out: Path, res: PropagationResult) -> Path:
    path = out / "history.npz"
    arrays = {"z_cm": res.z, "t_ns": s_to_ns(res.pump_in.times), "pump": res.history}
    if res.probe_history is not None:
        arrays["probe"] = res.probe_history
    np.savez(path, **arrays)
    return path


def _pumpprobe(config: RunConfig, out: Path, full_history: bool) -> tuple:
    ens = ensemble_average(config, keep_members=config.keep_members)
    files = [
        write_spectra(out / "spectra_raw.csv", ens.j_in, ens.j_out, config.floor),
    ]
    a, b = ens.convolved(config.instrument_fwhm)
    files.append(write_spectra(out / "spectra.csv", a, b, config.floor))
    if ens.members is not None:
        path = out / "members.npz"
        np.savez(path, delta=ens.j_in.delta, seeds=np.array(ens.seeds, dtype=np.uint64),
                 j_in=np.array([mr.j_in for mr in ens.members]),
                 j_out=np.array([mr.j_out for mr in ens.members]))
        files.append(path)
    if full_history:
        _, res = run_member(config, ens.seeds[0], full_history=True)
        files.append(_save_history(out, res))
    summary = {
        "seeds": ens.seeds,
        "input_area_pi": list(ens.input_areas / math.pi),
        "max_slice_change": ens.max_slice_change,
        **_k_summary(transmission(a, b, config.floor)),
    }
    return files, summary


def lintest_table(config: RunConfig):
    """Numerical single-beam K(delta) next to ``|linear_transfer|**2`` on the raw grid."""
    seed = member_seed(config.pump.seed, 0)
    rec = synthesize_pump(replace(config.pump, seed=seed), config.grid)
    res = propagate_pump(rec.envelope, config.medium, config.grid)
    j_in, j_out = spectrum(res.pump_in), spectrum(res.pump_out)
    k = transmission(j_in, j_out, config.floor)
    k_lin = np.abs(linear_transfer(j_in.delta, config.medium)) ** 2
    dev = rms((k.k_ratio - k_lin)[k.valid])
    return seed, res, j_in, j_out, k, k_lin, dev


def _lintest(config: RunConfig, out: Path, full_history: bool) -> tuple:
    seed, res, j_in, j_out, k, k_lin, dev = lintest_table(config)
    files = [write_csv(out / "lintest.csv", ["delta_GHz", "j_in", "j_out", "k_num", "k_linear", "valid"],
                       [rad_to_ghz(j_in.delta), j_in.intensity, j_out.intensity, k.k_ratio, k_lin,
                        k.valid.astype(float)])]
    if full_history:
        files.append(_save_history(out, propagate_pump(res.pump_in, config.medium, config.grid, True)))
    summary = {
        "seeds": [seed],
        "input_area_pi": pulse_area(res.pump_in) / math.pi,
        "rms_deviation": dev,
        "max_abs_deviation": float(np.max(np.abs(k.k_ratio - k_lin)[k.valid])),
        "valid_bins": int(k.valid.sum()),
    }
    return files, summary


def with_parameter(config: RunConfig, parameter: str, value_ghz: float) -> RunConfig:
    """Copy of ``config`` with one sweep parameter set (value in GHz)."""
    w = ghz_to_rad(value_ghz)
    if parameter == "omega_00":
        return replace(config, pump=replace(config.pump, omega_00=w))
    if parameter == "delta0":
        return replace(config, pump=replace(config.pump, delta0=w))
    if parameter == "omega_c":
        return replace(config, medium=replace(config.medium, omega_c=w))
    raise ValueError(f"unknown sweep parameter {parameter!r}")


SWEEP_HEADER = ["value_GHz", "input_area_pi", "k0", "k_max", "delta_k_max_GHz", "n_local_max",
                "local_max_1_GHz", "local_max_1_k", "local_max_2_GHz", "local_max_2_k"]


def sweep_rows(config: RunConfig, threads: Optional[int] = None) -> list:
    """One row per sweep value in input order (see ``SWEEP_HEADER``)."""
    if not config.sweep_values:
        raise ValueError("sweep needs a non-empty list of values")
    points = [with_parameter(config, config.sweep_parameter, v) for v in config.sweep_values]
    # flatten (point, member) so a thread pool sees every propagation at once
    seeds = member_seeds(config)
    jobs = [(i, s) for i in range(len(points)) for s in seeds]

    def one(job):
        i, s = job
        rec, res = run_member(points[i], s)
        return pulse_area(rec.envelope), spectrum(res.probe_in), spectrum(res.probe_out)

    done = _ordered_map(one, jobs, threads)
    rows = []
    m = len(seeds)
    for i, value in enumerate(config.sweep_values):
        chunk = done[i * m:(i + 1) * m]
        delta = chunk[0][1].delta
        j_in = np.zeros_like(delta)
        j_out = np.zeros_like(delta)
        for _, a, b in chunk:
            j_in += a.intensity
            j_out += b.intensity
        a = instrument_convolve(SpectrumTable(delta, j_in / m), config.instrument_fwhm)
        b = instrument_convolve(SpectrumTable(delta, j_out / m), config.instrument_fwhm)
        s = _k_summary(transmission(a, b, config.floor))
        # two highest local maxima, ordered by detuning
        order = np.argsort(s["local_max_k"])[::-1][:2]
        top = sorted((s["local_max_delta_ghz"][j], s["local_max_k"][j]) for j in order)
        top += [(math.nan, math.nan)] * (2 - len(top))
        area = float(np.mean([c[0] for c in chunk])) / math.pi
        rows.append([value, area, s["k0"], s["k_max"], s["delta_k_max_ghz"], len(s["local_max_k"]),
                     top[0][0], top[0][1], top[1][0], top[1][1]])
    return rows


def _sweep(config: RunConfig, out: Path, full_history: bool) -> tuple:
    rows = sweep_rows(config)
    cols = list(zip(*rows))
    files = [write_csv(out / "sweep.csv", SWEEP_HEADER, cols)]
    summary = {"seeds": member_seeds(config), "sweep_parameter": config.sweep_parameter,
               "rows": len(rows)}
    return files, summary


_SCENARIOS = {
    "single": _single,
    "pumpprobe": _pumpprobe,
    "lintest": _lintest,
    "sweep-energy": _sweep,
    "sweep-detuning": _sweep,
}


def run_scenario(config: RunConfig, out_dir=None) -> RunOutputs:
    """Run ``config.scenario`` and write its files plus ``manifest.txt`` into ``out_dir``."""
    out = Path(out_dir if out_dir is not None else config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest_path = out / "manifest.txt"
    head = {
        "status": "running",
        "scenario": config.scenario,
        "code_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "generator": GENERATOR_NAME,
        "member_seed_rule": "mix64(master + (index + 1) * 0x9E3779B97F4A7C15)",
        "master_seed": config.pump.seed,
        "threads": thread_count(),
        "started_utc": _now(),
    }
    head.update({f"config.{k}": v for k, v in sorted(config.echo.items())})
    head.update({f"derived.{k}": v for k, v in derived_quantities(config).items()})
    write_manifest(manifest_path, head)

    t0 = time.perf_counter()
    try:
        files, summary = _SCENARIOS[config.scenario](config, out, config.full_history)
    except Exception as exc:
        write_manifest(manifest_path, {**head, "status": "failed", "finished_utc": _now(),
                                       "error": f"{type(exc).__name__}: {exc}"})
        raise
    wall = time.perf_counter() - t0

    final = dict(head)
    final["status"] = "complete"
    final["finished_utc"] = _now()
    final["wall_time_s"] = round(wall, 3)
    final.update({f"result.{k}": v for k, v in summary.items()})
    final["files"] = [p.name for p in files]
    write_manifest(manifest_path, final)
    return RunOutputs(out, files, manifest_path, summary)
