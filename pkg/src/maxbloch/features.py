"""Shape features of transmission spectra and output time traces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .spectral import TransmissionTable


@dataclass(frozen=True)
class KFeatures:
    k0: float  # K at the delta = 0 bin (NaN if invalid)
    zero_index: int
    argmax: int  # global maximum over valid bins
    maxima: np.ndarray  # indices of local maxima inside the valid band
    minima: np.ndarray

    def offset_of_max(self) -> int:
        return self.argmax - self.zero_index


def _valid_band(valid: np.ndarray, centre: int) -> slice:
    """Contiguous run of valid bins containing ``centre`` (empty if centre is invalid)."""
    if not valid[centre]:
        return slice(centre, centre)
    lo = centre
    while lo > 0 and valid[lo - 1]:
        lo -= 1
    hi = centre
    while hi < valid.shape[0] - 1 and valid[hi + 1]:
        hi += 1
    return slice(lo, hi + 1)


def k_features(table: TransmissionTable) -> KFeatures:
    zero = int(np.argmin(np.abs(table.delta)))
    k = table.k_ratio
    if not table.valid.any():
        empty = np.zeros(0, dtype=int)
        return KFeatures(np.nan, zero, zero, empty, empty)
    argmax = int(np.nanargmax(np.where(table.valid, k, np.nan)))
    band = _valid_band(table.valid, zero)
    seg = k[band]
    if seg.size >= 3:
        maxima = find_peaks(seg)[0] + band.start
        minima = find_peaks(-seg)[0] + band.start
    else:
        maxima = minima = np.zeros(0, dtype=int)
    k0 = float(k[zero]) if table.valid[zero] else np.nan
    return KFeatures(k0, zero, argmax, maxima, minima)


def lowpass_intensity(samples: np.ndarray, dt: float, cutoff: float) -> np.ndarray:
    """|field|^2 after a Gaussian spectral filter of standard deviation ``cutoff`` (Hz)."""
    n = samples.shape[0]
    f = np.fft.fftfreq(n, dt)
    smooth = np.fft.ifft(np.fft.fft(samples) * np.exp(-0.5 * (f / cutoff) ** 2))
    return smooth.real**2 + smooth.imag**2


@dataclass(frozen=True)
class TraceFeatures:
    burst_end: float  # s from the window start
    feature_time: float  # NaN when no smooth feature was found
    feature_smoothness: float
    tail_maxima: int


def trace_features(field_in: np.ndarray, field_out: np.ndarray, dt: float, cutoff: float = 1e9,
                   energy_fraction: float = 0.9, prominence: float = 0.02, smooth_min: float = 0.4,
                   height_min: float = 0.1, half_window: float = 0.3e-9) -> TraceFeatures:
    """Locate a smooth delayed hump and count the maxima trailing it.

    The burst ends where the input has delivered ``energy_fraction`` of its
    energy.  Maxima are taken from the low-passed output intensity after the
    burst, with prominence at least ``prominence`` of its largest value.  The
    first maximum whose window of +-``half_window`` keeps at least
    ``smooth_min`` of the raw energy after filtering, and whose height is at
    least ``height_min`` of the largest, is the smooth feature; every later
    maximum counts towards the tail.
    """
    e_in = np.cumsum(np.abs(field_in) ** 2)
    tb = int(np.searchsorted(e_in, energy_fraction * e_in[-1]))
    smooth = lowpass_intensity(field_out, dt, cutoff)[tb:]
    raw = (np.abs(field_out) ** 2)[tb:]
    none = TraceFeatures(tb * dt, np.nan, np.nan, 0)
    if smooth.size < 3 or smooth.max() == 0:
        return none
    peaks = find_peaks(smooth, prominence=prominence * smooth.max())[0]
    w = max(1, int(round(half_window / dt)))
    for j, p in enumerate(peaks):
        lo, hi = max(0, p - w), p + w
        share = smooth[lo:hi].sum() / raw[lo:hi].sum()
        if share >= smooth_min and smooth[p] >= height_min * smooth.max():
            return TraceFeatures(tb * dt, (tb + p) * dt, float(share), len(peaks) - j - 1)
    return none
