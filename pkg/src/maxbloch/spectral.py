"""Spectra, instrument smoothing, transmission ratio, pulse area, linear response.

Sign convention: ``amp(delta) = dt * sum_i env(t_i) exp(-i delta t_i)``, so an
envelope component ``exp(+i delta1 t)`` shows up at ``delta = +delta1``
(blue detuning positive).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.ndimage import convolve1d

from .params import TWO_PI, ComplexEnvelope, DomainError, MediumParams


@dataclass(frozen=True, eq=False)
class SpectrumTable:
    delta: np.ndarray
    intensity: np.ndarray
    amp: Optional[np.ndarray] = None

    @property
    def d_delta(self) -> float:
        return float(self.delta[1] - self.delta[0])

    def zero_index(self) -> int:
        return int(np.argmin(np.abs(self.delta)))


@dataclass(frozen=True, eq=False)
class TransmissionTable:
    delta: np.ndarray
    k_ratio: np.ndarray  # NaN where invalid
    valid: np.ndarray


def frequency_grid(n: int, dt: float) -> np.ndarray:
    """Natural detuning grid of an n-sample window, ascending, rad/s."""
    return np.fft.fftshift(np.fft.fftfreq(n, dt)) * TWO_PI


def spectrum(env: ComplexEnvelope) -> SpectrumTable:
    n = len(env)
    delta = frequency_grid(n, env.dt)
    raw = np.fft.fft(env.samples) * env.dt
    amp = np.fft.fftshift(raw) * np.exp(-1j * delta * env.t_start)
    return SpectrumTable(delta, np.abs(amp) ** 2, amp)


def inverse_spectrum(table: SpectrumTable, t_start: float = 0.0) -> ComplexEnvelope:
    if table.amp is None:
        raise DomainError("spectrum carries no amplitudes (intensity-only table)")
    n = table.delta.shape[0]
    dt = TWO_PI / (n * table.d_delta)
    raw = np.fft.ifftshift(table.amp * np.exp(1j * table.delta * t_start))
    return ComplexEnvelope(t_start, dt, np.fft.ifft(raw) / dt)


def gaussian_kernel(fwhm: float, d_delta: float, max_half_width: int) -> np.ndarray:
    sigma = fwhm / (2.0 * math.sqrt(2.0 * math.log(2.0))) / d_delta
    half = min(max_half_width, max(1, math.ceil(8.0 * sigma)))
    x = np.arange(-half, half + 1)
    kern = np.exp(-0.5 * (x / sigma) ** 2)
    return kern / kern.sum()


def instrument_convolve(table: SpectrumTable, fwhm: float) -> SpectrumTable:
    """Smooth the intensity with a unit-area Gaussian of the given FWHM (rad/s)."""
    if fwhm < 0:
        raise DomainError("instrument FWHM must be >= 0")
    if fwhm == 0:
        return SpectrumTable(table.delta, table.intensity.copy(), None)
    n = table.delta.shape[0]
    kern = gaussian_kernel(fwhm, table.d_delta, n - 1)
    smoothed = convolve1d(table.intensity, kern, mode="constant", cval=0.0)
    return SpectrumTable(table.delta, smoothed, None)


def transmission(j_in: SpectrumTable, j_out: SpectrumTable, floor: float = 1e-3) -> TransmissionTable:
    """Per-bin ratio ``j_out / j_in``; bins below ``floor * max(j_in)`` are invalid."""
    if j_in.delta.shape != j_out.delta.shape or not np.array_equal(j_in.delta, j_out.delta):
        raise DomainError("input and output spectra are on different detuning grids")
    jin = j_in.intensity
    valid = (jin >= floor * jin.max()) & (jin > 0)
    k = np.full(jin.shape, np.nan)
    k[valid] = j_out.intensity[valid] / jin[valid]
    return TransmissionTable(j_in.delta, k, valid)


def pulse_area(env: ComplexEnvelope) -> float:
    """Magnitude of the time-integrated envelope (the resonant spectral component)."""
    return float(abs(np.sum(env.samples) * env.dt))


def linear_transfer(delta, medium: MediumParams, phi: float = 0.0):
    """Field transfer function of the medium linearized about ``D0 = d_eq``.

    ``exp(-(omega_c**2 L / (c cos phi)) d_eq / (gamma2 + i delta))``.
    """
    delta_arr = np.asarray(delta, dtype=float)
    if medium.gamma2 == 0 and np.any(delta_arr == 0):
        raise DomainError("linear transfer has a pole at delta = 0 when gamma2 = 0")
    depth = medium.coupling * medium.length_L / math.cos(phi)
    h = np.exp(-depth * medium.d_eq / (medium.gamma2 + 1j * delta_arr))
    if np.ndim(delta) == 0:
        return complex(h)
    return h


def rms(values) -> float:
    v = np.asarray(values, dtype=float)
    return float(np.sqrt(np.mean(v**2)))
