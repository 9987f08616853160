"""Quasistochastic multimode pump synthesis and the delayed weak probe copy."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import TWO_PI, ComplexEnvelope, DomainError, GridSpec, ProbeSpec, PumpSpec, envelope_c
from .rng import SplitMix64

SAMPLES_PER_BEAT = 10


class GridResolutionError(DomainError):
    """The time step cannot resolve the fastest spectral component."""


@dataclass(frozen=True, eq=False)
class SynthesisRecord:
    spec: PumpSpec
    grid: GridSpec
    phases: np.ndarray
    envelope: ComplexEnvelope

    @property
    def mode_offsets(self) -> np.ndarray:
        return mode_offsets(self.spec)


def mode_offsets(spec: PumpSpec) -> np.ndarray:
    """Mode offsets ``k * delta_mode`` for k = -N..N, rad/s."""
    k = np.arange(-spec.n_modes, spec.n_modes + 1)
    return k * spec.delta_mode


def mode_weights(spec: PumpSpec) -> np.ndarray:
    """Gaussian comb amplitudes; ``gamma_pump`` is the FWHM of the amplitude weights."""
    w = mode_offsets(spec)
    if spec.n_modes == 0:
        return np.array([spec.omega_00])
    return spec.omega_00 * np.exp(-4.0 * math.log(2.0) * (w / spec.gamma_pump) ** 2)


def mode_phases(spec: PumpSpec) -> np.ndarray:
    """Phases alpha_k in [0, 2 pi), drawn in index order k = -N..N."""
    n = 2 * spec.n_modes + 1
    if spec.zero_phases:
        return np.zeros(n)
    gen = SplitMix64(spec.seed)
    return np.array([TWO_PI * gen.uniform() for _ in range(n)])


def max_time_step(spec: PumpSpec) -> float:
    """Largest dt giving ``SAMPLES_PER_BEAT`` samples per period of the fastest beat."""
    if spec.max_beat == 0:
        return math.inf
    return TWO_PI / (SAMPLES_PER_BEAT * spec.max_beat)


def synthesize_pump(spec: PumpSpec, grid: GridSpec, t_start: float = 0.0) -> SynthesisRecord:
    dt_max = max_time_step(spec)
    if grid.dt > dt_max:
        k_lim = spec.n_modes if spec.delta0 >= 0 else -spec.n_modes
        raise GridResolutionError(
            f"dt = {grid.dt:.4g} s is too coarse for mode k = {k_lim} at detuning "
            f"{spec.delta0 + k_lim * spec.delta_mode:.6g} rad/s; need dt <= {dt_max:.4g} s "
            f"(n_t >= {math.ceil(grid.t_window / dt_max) + 1})"
        )
    t = grid.times(t_start)
    phases = mode_phases(spec)
    weights = mode_weights(spec)
    offsets = mode_offsets(spec)
    total = np.zeros(grid.n_t, dtype=np.complex128)
    # sequential accumulation keeps the summation order fixed
    for wk, ok, ak in zip(weights, offsets, phases):
        total += wk * np.exp(1j * ((spec.delta0 + ok) * t + ak))
    samples = envelope_c(t, spec.t0, spec.a, spec.b) * total
    return SynthesisRecord(spec, grid, phases, ComplexEnvelope(t_start, grid.dt, samples))


def delayed_copy(env: ComplexEnvelope, tau0: float, g_ratio: float = 1.0) -> ComplexEnvelope:
    """``env(t - tau0) / g_ratio`` with linear interpolation; zero before ``t_start + tau0``."""
    src = env.samples
    n = src.shape[0]
    shift = tau0 / env.dt
    m = round(shift)
    out = np.zeros(n, dtype=np.complex128)
    if abs(shift - m) <= 1e-9 * max(1.0, shift):
        if m < n:
            out[m:] = src[: n - m]
    else:
        m = math.floor(shift)
        frac = shift - m
        start = m + 1
        if start < n:
            lo = src[: n - start]
            hi = src[1 : n - start + 1]
            # t_i - tau0 falls between samples (i - m - 1) and (i - m)
            out[start:] = frac * lo + (1.0 - frac) * hi
    return ComplexEnvelope(env.t_start, env.dt, out / g_ratio)


def synthesize_probe(pump: SynthesisRecord, probe: ProbeSpec, grid: GridSpec) -> ComplexEnvelope:
    if probe.tau0 >= grid.t_window:
        raise DomainError(f"probe delay {probe.tau0!r} s exceeds the time window")
    return delayed_copy(pump.envelope, probe.tau0, probe.g_ratio)
