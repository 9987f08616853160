"""Physical parameters, grids and the two closed-form scalar functions.

All rates and frequencies are stored as angular frequencies in rad/s, times
in seconds and lengths in centimetres (Gaussian-CGS, like the coupling
formula).  Conversion helpers translate from the external units used in
config files: ordinary frequency in GHz, time in ns, angles in degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

C_LIGHT = 2.99792458e10  # cm/s
HBAR = 1.0546e-27  # erg s

TWO_PI = 2.0 * math.pi


class DomainError(ValueError):
    """Raised when a parameter lies outside the domain of an operation."""


def ghz_to_rad(value: float) -> float:
    """Ordinary frequency in GHz -> angular frequency in rad/s."""
    return value * TWO_PI * 1e9


def rad_to_ghz(value: float) -> float:
    return value / (TWO_PI * 1e9)


def ns_to_s(value: float) -> float:
    return value * 1e-9


def s_to_ns(value: float) -> float:
    return value * 1e9


def cooperative_frequency(dipole: float, n0: float, omega0: float) -> float:
    """Field-matter coupling rate ``sqrt(2 pi d^2 omega0 n0 / hbar)``.

    Parameters
    ----------
    dipole : float
        Transition dipole moment, esu cm.
    n0 : float
        Density of ground-state atoms, cm^-3.
    omega0 : float
        Transition angular frequency, rad/s.

    Returns
    -------
    float
        Cooperative frequency in rad/s.
    """
    if dipole < 0 or n0 < 0 or omega0 < 0:
        raise DomainError(
            f"cooperative_frequency needs non-negative inputs, got "
            f"dipole={dipole!r}, n0={n0!r}, omega0={omega0!r}"
        )
    return math.sqrt(TWO_PI * dipole**2 * omega0 * n0 / HBAR)


def envelope_c(t, t0: float, a: float, b: float):
    """Pulse envelope: exponential decay times an arctan switch-on.

    ``C(t) = (2/pi) exp(-(t - t0)/a) [pi/2 + arctan((t - t0)/b)]`` for
    ``t >= 0`` and zero for ``t < 0``; ``C(t0) = 1``.  Accepts scalars or
    arrays.  For negative ``t - t0`` the closed form grows without bound,
    hence the hard cut at ``t = 0``.
    """
    if a <= 0 or b <= 0:
        raise DomainError(f"envelope needs a > 0 and b > 0, got a={a!r}, b={b!r}")
    t_arr = np.asarray(t, dtype=float)
    s = t_arr - t0
    val = (2.0 / math.pi) * np.exp(-s / a) * (0.5 * math.pi + np.arctan(s / b))
    val = np.where(t_arr < 0.0, 0.0, val)
    if np.ndim(t) == 0:
        return float(val)
    return val


def envelope_switch_on_step(t0: float, a: float, b: float) -> float:
    """Height of the discontinuity of the envelope at ``t = 0``."""
    return envelope_c(0.0, t0, a, b)


@dataclass(frozen=True)
class MediumParams:
    """Constants of the two-level medium.

    ``omega_c`` may be omitted when the microscopic triple
    (``dipole``, ``n0``, ``omega0``) is supplied; a directly given value
    always takes precedence.
    """

    gamma1: float
    gamma2: float
    d_eq: float
    length_L: float
    omega_c: Optional[float] = None
    dipole: Optional[float] = None
    n0: Optional[float] = None
    omega0: Optional[float] = None

    def __post_init__(self):
        if self.omega_c is None:
            if None in (self.dipole, self.n0, self.omega0):
                raise DomainError("omega_c or all of (dipole, n0, omega0) must be given")
            object.__setattr__(
                self, "omega_c", cooperative_frequency(self.dipole, self.n0, self.omega0)
            )
        if self.omega_c < 0:
            raise DomainError(f"omega_c must be >= 0, got {self.omega_c!r}")
        if self.gamma1 < 0 or self.gamma2 < 0:
            raise DomainError("relaxation rates must be >= 0")
        if self.length_L <= 0:
            raise DomainError(f"length_L must be > 0, got {self.length_L!r}")
        if not -1.0 <= self.d_eq <= 1.0:
            raise DomainError(f"d_eq must lie in [-1, 1], got {self.d_eq!r}")

    @property
    def coupling(self) -> float:
        """``omega_c**2 / c``: field change per unit length per unit polarization."""
        return self.omega_c**2 / C_LIGHT

    @property
    def alpha0(self) -> float:
        """Resonant intensity absorption coefficient, cm^-1 (inf if gamma2 = 0)."""
        if self.gamma2 == 0:
            return math.inf if self.d_eq * self.omega_c != 0 else 0.0
        return 2.0 * self.omega_c**2 * self.d_eq / (C_LIGHT * self.gamma2)


@dataclass(frozen=True)
class GridSpec:
    """Uniform retarded-time and propagation grids."""

    t_window: float
    n_t: int
    n_z: int
    phi: float = 0.0
    c_light: float = field(default=C_LIGHT, init=False)

    def __post_init__(self):
        if self.n_t < 16:
            raise DomainError(f"n_t must be >= 16, got {self.n_t}")
        if self.n_z < 2:
            raise DomainError(f"n_z must be >= 2, got {self.n_z}")
        if self.t_window <= 0:
            raise DomainError("t_window must be > 0")
        if not 0.0 <= self.phi < 0.5 * math.pi:
            raise DomainError(f"phi must lie in [0, pi/2), got {self.phi!r}")

    @property
    def dt(self) -> float:
        return self.t_window / (self.n_t - 1)

    def dz(self, medium: MediumParams) -> float:
        return medium.length_L / (self.n_z - 1)

    def times(self, t_start: float = 0.0) -> np.ndarray:
        return t_start + self.dt * np.arange(self.n_t)

    def z_values(self, medium: MediumParams) -> np.ndarray:
        return np.linspace(0.0, medium.length_L, self.n_z)


@dataclass(frozen=True)
class PumpSpec:
    """Multimode pump: Gaussian-weighted comb of 2N+1 modes under ``envelope_c``.

    ``zero_phases`` forces every mode phase to 0 instead of drawing them.
    """

    omega_00: float
    gamma_pump: float
    delta_mode: float
    n_modes: int
    delta0: float = 0.0
    t0: float = 1.5e-9
    a: float = 2.4e-9
    b: float = 0.3e-9
    seed: int = 0
    zero_phases: bool = False

    def __post_init__(self):
        if self.n_modes < 0:
            raise DomainError("n_modes must be >= 0")
        if self.n_modes > 0 and self.gamma_pump <= 0:
            raise DomainError("gamma_pump must be > 0 when n_modes > 0")
        if self.a <= 0 or self.b <= 0:
            raise DomainError("envelope parameters a and b must be > 0")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")

    @property
    def max_beat(self) -> float:
        """Largest angular frequency present in the envelope, rad/s."""
        return abs(self.delta0) + self.n_modes * abs(self.delta_mode)


@dataclass(frozen=True)
class ProbeSpec:
    g_ratio: float = 100.0
    tau0: float = 10e-12

    def __post_init__(self):
        if self.g_ratio < 1:
            raise DomainError(f"g_ratio must be >= 1, got {self.g_ratio!r}")
        if self.tau0 < 0:
            raise DomainError(f"tau0 must be >= 0, got {self.tau0!r}")


@dataclass(frozen=True, eq=False)
class ComplexEnvelope:
    """Uniformly sampled complex Rabi envelope in the frame rotating at resonance.

    A component ``exp(+i delta t)`` of the samples sits at detuning
    ``delta`` (positive = blue) from the transition.
    """

    t_start: float
    dt: float
    samples: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.samples, dtype=np.complex128)
        if arr.ndim != 1:
            raise DomainError("envelope samples must be one-dimensional")
        if not np.all(np.isfinite(arr)):
            raise DomainError("envelope samples must be finite")
        if self.dt <= 0:
            raise DomainError("dt must be > 0")
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(len(self))

    @classmethod
    def on_grid(cls, grid: GridSpec, samples, t_start: float = 0.0) -> "ComplexEnvelope":
        samples = np.asarray(samples)
        if samples.shape != (grid.n_t,):
            raise DomainError(f"expected {grid.n_t} samples, got {samples.shape}")
        return cls(t_start, grid.dt, samples)

    def scaled(self, factor: complex) -> "ComplexEnvelope":
        return ComplexEnvelope(self.t_start, self.dt, self.samples * factor)


@dataclass(frozen=True)
class AtomState:
    p0: complex = 0j
    d0: float = 1.0


@dataclass(frozen=True)
class ProbeMediumState:
    """First-order probe harmonics; ``D_-1 = conj(d1)`` is implied."""

    p1: complex = 0j
    pm1_conj: complex = 0j
    d1: complex = 0j
