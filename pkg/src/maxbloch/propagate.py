"""March the pump (and optionally the first-order probe) through the medium.

Working in retarded time ``tau = t - z/c`` turns the field equations into
``dOmega0/dz = -(omega_c^2/c) p0`` and ``dOmega1/dz = -(omega_c^2/(c cos phi)) p1``
at every ``tau`` sample.  Each z step is a Heun predictor-corrector: sweep
the Bloch equations over the window at slice z, predict the field at z+dz,
sweep again with the predicted field and correct with the average of the two
polarizations.  The walk-off term ``(1 - cos phi) dOmega1/dtau`` of the probe
is dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .params import AtomState, ComplexEnvelope, DomainError, GridSpec, MediumParams, ProbeMediumState

STEP_BUDGET = 0.1
SLICE_BUDGET = 0.05


class IntegrationError(RuntimeError):
    """Non-finite state encountered; carries the (z, tau) location."""

    def __init__(self, message: str, z: float = math.nan, tau: float = math.nan):
        super().__init__(f"{message} at z = {z:.6g} cm, tau = {tau:.6g} s")
        self.z = z
        self.tau = tau


class AccuracyBudgetError(RuntimeError):
    """A single z step changed the field by more than the allowed fraction."""

    def __init__(self, ratio: float, z: float, n_z: int, suggested_n_z: int):
        super().__init__(
            f"field changed by {100 * ratio:.2f}% of its maximum in one slice at z = {z:.4g} cm "
            f"(limit {100 * SLICE_BUDGET:.0f}%); increase n_z from {n_z} to at least {suggested_n_z}"
        )
        self.ratio = ratio
        self.suggested_n_z = suggested_n_z


@dataclass(eq=False)
class PropagationResult:
    pump_in: ComplexEnvelope
    pump_out: ComplexEnvelope
    z: np.ndarray
    area: np.ndarray
    d0_final: np.ndarray
    energy: np.ndarray
    max_bloch_drift: float
    max_slice_change: float
    probe_in: Optional[ComplexEnvelope] = None
    probe_out: Optional[ComplexEnvelope] = None
    probe_area: Optional[np.ndarray] = None
    probe_energy: Optional[np.ndarray] = None
    history: Optional[np.ndarray] = None
    probe_history: Optional[np.ndarray] = None

    @property
    def area_vs_z(self) -> np.ndarray:
        return np.column_stack([self.z, self.area])

    @property
    def d0_final_vs_z(self) -> np.ndarray:
        return np.column_stack([self.z, self.d0_final])

    @property
    def energy_vs_z(self) -> np.ndarray:
        return np.column_stack([self.z, self.energy])


def _check_step(dtau: float, fields, medium: MediumParams) -> None:
    rate = max([abs(w) for w in fields] + [medium.gamma1, medium.gamma2])
    if dtau * rate > STEP_BUDGET:
        raise DomainError(
            f"time step {dtau:.4g} s too large for rate {rate:.4g} rad/s "
            f"(need dtau * rate <= {STEP_BUDGET})"
        )


def step_bloch(state: AtomState, omega_a: complex, omega_b: complex, dtau: float,
               medium: MediumParams) -> AtomState:
    """One RK4 step of the pump Bloch equations; field linear between the two samples."""
    _check_step(dtau, (omega_a, omega_b), medium)
    p, d = _kernels.pump_step(complex(state.p0), float(state.d0), complex(omega_a),
                              complex(omega_b), dtau, medium.gamma1, medium.gamma2, medium.d_eq)
    if not (np.isfinite(p) and np.isfinite(d)):
        raise IntegrationError("non-finite Bloch state")
    return AtomState(complex(p), float(d))


def step_bloch_probe(state: ProbeMediumState, pump_state: AtomState, omega0_a: complex,
                     omega0_b: complex, omega1_a: complex, omega1_b: complex, dtau: float,
                     medium: MediumParams) -> ProbeMediumState:
    """One RK4 step of the probe harmonics driven by the pump's own RK4 stages."""
    _check_step(dtau, (omega0_a, omega0_b), medium)
    _, _, p1, d1, q = _kernels.pair_step(
        complex(pump_state.p0), float(pump_state.d0), complex(state.p1), complex(state.d1),
        complex(state.pm1_conj), complex(omega0_a), complex(omega0_b), complex(omega1_a),
        complex(omega1_b), dtau, medium.gamma1, medium.gamma2, medium.d_eq)
    if not (np.isfinite(p1) and np.isfinite(d1) and np.isfinite(q)):
        raise IntegrationError("non-finite probe state")
    return ProbeMediumState(p1=complex(p1), pm1_conj=complex(q), d1=complex(d1))


class _Sweeper:
    """Reusable buffers for the tau sweeps of one propagation."""

    def __init__(self, n: int, dt: float, medium: MediumParams, with_probe: bool):
        self.dt = dt
        self.args = (dt, medium.gamma1, medium.gamma2, medium.d_eq)
        self.with_probe = with_probe
        self.p = np.empty(n, np.complex128)
        self.d = np.empty(n, np.float64)
        if with_probe:
            self.p1 = np.empty(n, np.complex128)
            self.d1 = np.empty(n, np.complex128)
            self.q = np.empty(n, np.complex128)

    def run(self, om0, om1, z: float):
        if self.with_probe:
            _kernels.sweep_pair(om0, om1, *self.args, self.p, self.d, self.p1, self.d1, self.q)
            bad = ~(np.isfinite(self.p) & np.isfinite(self.p1) & np.isfinite(self.d1))
        else:
            _kernels.sweep_pump(om0, *self.args, self.p, self.d)
            bad = ~np.isfinite(self.p)
        if bad.any():
            i = int(np.argmax(bad))
            raise IntegrationError("non-finite medium state", z=z, tau=i * self.dt)


def _slice_change(new, old, z, n_z) -> float:
    scale = np.max(np.abs(old))
    if scale == 0:
        return 0.0
    ratio = float(np.max(np.abs(new - old)) / scale)
    if ratio > SLICE_BUDGET:
        suggested = math.ceil((n_z - 1) * ratio / SLICE_BUDGET * 1.2) + 1
        raise AccuracyBudgetError(ratio, z, n_z, suggested)
    return ratio


def _march(pump_in: ComplexEnvelope, probe_in: Optional[ComplexEnvelope], medium: MediumParams,
           grid: GridSpec, full_history: bool) -> PropagationResult:
    if len(pump_in) != grid.n_t or not math.isclose(pump_in.dt, grid.dt, rel_tol=1e-12):
        raise DomainError("pump envelope does not match the grid")
    with_probe = probe_in is not None
    if with_probe and (len(probe_in) != grid.n_t or probe_in.dt != pump_in.dt
                       or probe_in.t_start != pump_in.t_start):
        raise DomainError("probe envelope does not match the pump grid")

    n_z = grid.n_z
    z = grid.z_values(medium)
    dz = grid.dz(medium)
    dt = pump_in.dt
    h0 = dz * medium.coupling
    h1 = h0 / math.cos(grid.phi)
    norm0 = medium.d_eq**2

    om0 = pump_in.samples.copy()
    om1 = probe_in.samples.copy() if with_probe else None
    cur = _Sweeper(grid.n_t, dt, medium, with_probe)
    pred = _Sweeper(grid.n_t, dt, medium, with_probe)

    area = np.empty(n_z)
    energy = np.empty(n_z)
    d0_final = np.empty(n_z)
    probe_area = np.empty(n_z) if with_probe else None
    probe_energy = np.empty(n_z) if with_probe else None
    history = np.empty((n_z, grid.n_t), np.complex128) if full_history else None
    probe_history = np.empty((n_z, grid.n_t), np.complex128) if full_history and with_probe else None
    drift = 0.0
    max_change = 0.0

    def record(j):
        nonlocal drift
        area[j] = abs(np.sum(om0) * dt)
        energy[j] = np.sum(om0.real**2 + om0.imag**2) * dt
        d0_final[j] = cur.d[-1]
        drift = max(drift, float(np.max(np.abs(cur.p.real**2 + cur.p.imag**2 + cur.d**2 - norm0))))
        if history is not None:
            history[j] = om0
        if with_probe:
            probe_area[j] = abs(np.sum(om1) * dt)
            probe_energy[j] = np.sum(om1.real**2 + om1.imag**2) * dt
            if probe_history is not None:
                probe_history[j] = om1

    cur.run(om0, om1, z[0])
    record(0)
    for j in range(1, n_z):
        om0_pred = om0 - h0 * cur.p
        om1_pred = om1 - h1 * cur.p1 if with_probe else None
        pred.run(om0_pred, om1_pred, z[j])
        new0 = om0 - (0.5 * h0) * (cur.p + pred.p)
        max_change = max(max_change, _slice_change(new0, om0, z[j], n_z))
        if with_probe:
            new1 = om1 - (0.5 * h1) * (cur.p1 + pred.p1)
            max_change = max(max_change, _slice_change(new1, om1, z[j], n_z))
            om1 = new1
        om0 = new0
        cur.run(om0, om1, z[j])
        record(j)

    return PropagationResult(
        pump_in=pump_in,
        pump_out=ComplexEnvelope(pump_in.t_start, dt, om0),
        z=z,
        area=area,
        d0_final=d0_final,
        energy=energy,
        max_bloch_drift=drift,
        max_slice_change=max_change,
        probe_in=probe_in,
        probe_out=ComplexEnvelope(pump_in.t_start, dt, om1) if with_probe else None,
        probe_area=probe_area,
        probe_energy=probe_energy,
        history=history,
        probe_history=probe_history,
    )


def propagate_pump(pump_in: ComplexEnvelope, medium: MediumParams, grid: GridSpec,
                   full_history: bool = False) -> PropagationResult:
    """Propagate a single (pump) field through the medium."""
    return _march(pump_in, None, medium, grid, full_history)


def propagate_pair(pump_in: ComplexEnvelope, probe_in: ComplexEnvelope, medium: MediumParams,
                   grid: GridSpec, full_history: bool = False) -> PropagationResult:
    """Propagate pump and weak probe jointly; the probe is treated to first order."""
    return _march(pump_in, probe_in, medium, grid, full_history)
