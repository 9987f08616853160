import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxbloch.params import ComplexEnvelope, DomainError, GridSpec, ProbeSpec, PumpSpec, envelope_c, ghz_to_rad
from maxbloch.spectral import spectrum
from maxbloch.synth import (
    GridResolutionError,
    delayed_copy,
    max_time_step,
    mode_offsets,
    mode_phases,
    mode_weights,
    synthesize_probe,
    synthesize_pump,
)


def test_offsets_and_weights(small_pump):
    off = mode_offsets(small_pump)
    assert off.shape == (21,)
    assert off[0] == -10 * small_pump.delta_mode and off[10] == 0
    w = mode_weights(small_pump)
    assert w[10] == small_pump.omega_00
    # amplitude FWHM equals gamma_pump
    half = small_pump.omega_00 * np.exp(-4 * math.log(2) * (0.5) ** 2)
    assert half == pytest.approx(small_pump.omega_00 / 2)
    assert np.allclose(w, w[::-1])


def test_phases_reproducible_and_seed_dependent(small_pump):
    a = mode_phases(small_pump)
    assert np.array_equal(a, mode_phases(small_pump))
    assert not np.array_equal(a, mode_phases(PumpSpec(**{**small_pump.__dict__, "seed": 8})))
    assert np.all((a >= 0) & (a < 2 * math.pi))


def test_zero_phases_gives_zero_array(small_pump):
    spec = PumpSpec(**{**small_pump.__dict__, "zero_phases": True})
    assert np.all(mode_phases(spec) == 0)


def test_single_mode_reproduces_closed_form():
    grid = GridSpec(4e-9, 4001, 2)
    spec = PumpSpec(omega_00=3e8, gamma_pump=1e9, delta_mode=1e9, n_modes=0, delta0=ghz_to_rad(0.5),
                    zero_phases=True, t0=1e-9, a=1e-9, b=0.2e-9)
    env = synthesize_pump(spec, grid).envelope
    t = grid.times()
    expect = 3e8 * envelope_c(t, 1e-9, 1e-9, 0.2e-9) * np.exp(1j * spec.delta0 * t)
    assert np.allclose(env.samples, expect, rtol=1e-13, atol=0)


def test_blue_comb_lands_at_positive_detuning():
    grid = GridSpec(16e-9, 16001, 2)
    spec = PumpSpec(omega_00=1e8, gamma_pump=ghz_to_rad(2), delta_mode=ghz_to_rad(0.37), n_modes=5,
                    delta0=ghz_to_rad(3.0), seed=3)
    s = spectrum(synthesize_pump(spec, grid).envelope)
    peak = s.delta[np.argmax(s.intensity)]
    assert peak == pytest.approx(ghz_to_rad(3.0), abs=ghz_to_rad(0.4))


def test_grid_resolution_error_names_mode():
    spec = PumpSpec(omega_00=1e8, gamma_pump=ghz_to_rad(20), delta_mode=ghz_to_rad(0.37), n_modes=50)
    grid = GridSpec(16e-9, 2001, 2)
    with pytest.raises(GridResolutionError, match="k = 50"):
        synthesize_pump(spec, grid)
    assert max_time_step(spec) == pytest.approx(2 * math.pi / (10 * 50 * ghz_to_rad(0.37)))


def _env(n=64, seed=0):
    rng = np.random.default_rng(seed)
    return ComplexEnvelope(0.0, 1e-12, rng.normal(size=n) + 1j * rng.normal(size=n))


def test_integer_delay_is_exact_shift():
    env = _env()
    out = delayed_copy(env, 5e-12, 100.0)
    assert np.all(out.samples[:5] == 0)
    assert np.array_equal(out.samples[5:], env.samples[:-5] / 100.0)


def test_fractional_delay_interpolates_linearly():
    t = np.arange(200) * 1e-12
    env = ComplexEnvelope(0.0, 1e-12, 2.0 + 3.0 * t / 1e-12)
    out = delayed_copy(env, 2.25e-12).samples
    expect = 2.0 + 3.0 * (t - 2.25e-12) / 1e-12
    assert np.all(out[:3] == 0)
    assert np.allclose(out[3:], expect[3:], rtol=1e-12)


@settings(deadline=None, max_examples=30)
@given(st.floats(0.0, 50.0), st.floats(1.0, 1e3))
def test_delay_causal_and_scaled(shift, g):
    env = _env()
    out = delayed_copy(env, shift * env.dt, g).samples
    first = math.floor(shift) if abs(shift - round(shift)) > 1e-9 * max(1, shift) else round(shift)
    assert np.all(out[:first] == 0)
    assert np.max(np.abs(out)) <= np.max(np.abs(env.samples)) / g * (1 + 1e-12)


def test_probe_copy_and_window_check(small_pump, small_grid):
    rec = synthesize_pump(small_pump, small_grid)
    probe = synthesize_probe(rec, ProbeSpec(100.0, 12e-12), small_grid)
    assert np.array_equal(probe.samples[3:], rec.envelope.samples[:-3] / 100.0)
    with pytest.raises(DomainError):
        synthesize_probe(rec, ProbeSpec(100.0, 9e-9), small_grid)


def _default_comb(seed=1, **kw):
    return PumpSpec(omega_00=1.0, gamma_pump=ghz_to_rad(20), delta_mode=ghz_to_rad(0.37), n_modes=50,
                    seed=seed, **kw)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_mode_peaks_follow_gaussian_weights(seed):
    from scipy.signal import get_window

    grid = GridSpec(16e-9, 16001, 2)
    spec = _default_comb(seed)
    s = synthesize_pump(spec, grid).envelope.samples * get_window("blackmanharris", grid.n_t, fftbins=False)
    t = grid.times()
    off = mode_offsets(spec)
    # peak positions on the discrete grid
    sp = spectrum(ComplexEnvelope(0.0, grid.dt, s))
    for o in off[::10]:
        band = np.abs(sp.delta - o) < spec.delta_mode / 2
        assert abs(sp.delta[band][np.argmax(sp.intensity[band])] - o) <= sp.d_delta
    # heights at the mode frequencies, up to one common scale
    h = np.abs(np.exp(-1j * np.outer(off, t)) @ s) ** 2
    ref = mode_weights(spec) ** 2
    scale = (h @ ref) / (ref @ ref)
    strong = ref > 1e-2 * ref.max()
    assert np.max(np.abs(h[strong] / (scale * ref[strong]) - 1)) < 0.05


def test_zero_phases_resonant_comb_is_real(small_grid):
    spec = PumpSpec(omega_00=1e9, gamma_pump=ghz_to_rad(5), delta_mode=ghz_to_rad(0.37), n_modes=10,
                    zero_phases=True)
    s = synthesize_pump(spec, small_grid).envelope.samples
    assert np.max(np.abs(s.imag)) <= 1e-12 * np.max(np.abs(s))


def _rms_duration(env):
    w = np.abs(env.samples) ** 2
    t = env.times
    mean = np.sum(w * t) / np.sum(w)
    return math.sqrt(np.sum(w * (t - mean) ** 2) / np.sum(w))


def test_duration_independent_of_spectral_width():
    grid = GridSpec(16e-9, 32001, 2)
    a = _rms_duration(synthesize_pump(_default_comb(5), grid).envelope)
    wide = PumpSpec(**{**_default_comb(5).__dict__, "gamma_pump": ghz_to_rad(40)})
    b = _rms_duration(synthesize_pump(wide, grid).envelope)
    assert abs(b / a - 1) < 0.1


def test_probe_identity_and_default_delay(small_pump, small_grid):
    rec = synthesize_pump(small_pump, small_grid)
    same = synthesize_probe(rec, ProbeSpec(1.0, 0.0), small_grid)
    assert np.array_equal(same.samples, rec.envelope.samples)
    grid = GridSpec(16e-9, 16001, 2)
    rec = synthesize_pump(_default_comb(), grid)
    probe = synthesize_probe(rec, ProbeSpec(100.0, 10e-12), grid)
    assert np.array_equal(probe.samples[10:], rec.envelope.samples[:-10] / 100.0)
    assert np.all(probe.samples[:10] == 0)
