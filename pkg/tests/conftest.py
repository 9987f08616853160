import numpy as np
import pytest

from maxbloch.params import GridSpec, MediumParams, PumpSpec, ghz_to_rad


@pytest.fixture
def medium():
    """Default medium of the shipped configs."""
    return MediumParams(gamma1=ghz_to_rad(8.4e-3), gamma2=ghz_to_rad(5.4e-3), d_eq=1.0,
                        length_L=15.0, omega_c=ghz_to_rad(2.6))


@pytest.fixture
def small_grid():
    return GridSpec(t_window=8e-9, n_t=2001, n_z=81)


@pytest.fixture
def small_pump():
    return PumpSpec(omega_00=ghz_to_rad(0.02), gamma_pump=ghz_to_rad(5.0),
                    delta_mode=ghz_to_rad(0.37), n_modes=10, a=1.2e-9, seed=7)


def sech_pulse(t, area, tp, tc):
    return (area / np.pi) / tp / np.cosh((t - tc) / tp)
