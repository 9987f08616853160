"""Flat ``key = value`` run configuration.

Frequencies are ordinary frequencies in GHz (``nu = omega / 2 pi``), times in
ns, lengths in cm, angles in degrees.  ``#`` starts a comment.  Unknown keys
are rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .params import (
    DomainError,
    GridSpec,
    MediumParams,
    ProbeSpec,
    PumpSpec,
    ghz_to_rad,
    ns_to_s,
)

SCENARIOS = ("single", "pumpprobe", "sweep-energy", "sweep-detuning", "lintest")
SWEEP_PARAMETERS = ("omega_00", "delta0", "omega_c")


class ConfigError(ValueError):
    pass


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _floats(text: str) -> list:
    return [float(v) for v in text.replace(",", " ").split()]


def _int(text: str) -> int:
    return int(text, 0)


# key -> (parser, default); defaults describe a dense metastable-atom vapour
KEYS = {
    "scenario": (str, None),
    # medium
    "omega_c_ghz": (float, None),  # 2.6 unless the microscopic triple is given
    "gamma1_ghz": (float, 8.4e-3),
    "gamma2_ghz": (float, 5.4e-3),
    "d_eq": (float, 1.0),
    "length_cm": (float, 15.0),
    "dipole_esu_cm": (float, None),
    "n0_cm3": (float, None),
    "omega0_ghz": (float, None),
    # grid
    "t_window_ns": (float, 16.0),
    "n_t": (_int, 16001),
    "n_z": (_int, 1501),
    "phi_deg": (float, 1.0),
    # pump
    "omega_00_ghz": (float, 0.1),
    "gamma_pump_ghz": (float, 20.0),
    "delta_mode_ghz": (float, 0.37),
    "n_modes": (_int, 50),
    "delta0_ghz": (float, 0.0),
    "t0_ns": (float, 1.5),
    "a_ns": (float, 2.4),
    "b_ns": (float, 0.3),
    "seed": (_int, 1),
    "zero_phases": (_bool, False),
    # probe
    "g_ratio": (float, 100.0),
    "tau0_ns": (float, 0.01),
    # run
    "ensemble_m": (_int, 8),
    "instrument_fwhm_ghz": (float, 12.0),
    "floor": (float, 1e-3),
    "output_dir": (str, "out"),
    "sweep_parameter": (str, None),
    "sweep_values": (_floats, None),
    "full_history": (_bool, False),
    "keep_members": (_bool, False),
}


def parse_text(text: str) -> dict:
    """Parse config text into ``{key: raw string}``; rejects unknown and repeated keys."""
    raw = {}
    unknown = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            unknown.append(key)
            continue
        if key in raw:
            raise ConfigError(f"line {lineno}: key {key!r} given twice")
        raw[key] = value
    if unknown:
        raise ConfigError("unknown config keys: " + ", ".join(unknown))
    return raw


def _typed(raw: dict) -> dict:
    values = {}
    for key, (parser, default) in KEYS.items():
        if key in raw:
            try:
                values[key] = parser(raw[key])
            except ValueError as exc:
                raise ConfigError(f"bad value for {key!r}: {raw[key]!r} ({exc})") from None
        else:
            values[key] = default
    return values


@dataclass(frozen=True)
class RunConfig:
    medium: MediumParams
    grid: GridSpec
    pump: PumpSpec
    probe: Optional[ProbeSpec]
    scenario: str
    ensemble_m: int = 8
    instrument_fwhm: float = ghz_to_rad(12.0)
    floor: float = 1e-3
    output_dir: Path = Path("out")
    sweep_parameter: Optional[str] = None
    sweep_values: tuple = ()
    full_history: bool = False
    keep_members: bool = False
    # external-unit echo of every key, for the manifest
    echo: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose from {', '.join(SCENARIOS)}")
        if self.ensemble_m < 1:
            raise ConfigError("ensemble_m must be >= 1")
        if self.scenario == "pumpprobe" and self.probe is None:
            raise ConfigError("scenario 'pumpprobe' needs probe parameters")
        if self.scenario.startswith("sweep"):
            if self.sweep_parameter not in SWEEP_PARAMETERS:
                raise ConfigError(f"sweep_parameter must be one of {', '.join(SWEEP_PARAMETERS)}")
            if not self.sweep_values:
                raise ConfigError("sweep needs a non-empty sweep_values list")

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, pump=replace(self.pump, seed=seed), echo={**self.echo, "seed": seed})


def build(values: dict, scenario: Optional[str] = None) -> RunConfig:
    """Build a validated RunConfig from typed values in external units."""
    scenario = scenario or values.get("scenario")
    if scenario is None:
        raise ConfigError("no scenario given")
    try:
        omega_c_ghz = values["omega_c_ghz"]
        micro = {}
        if values["dipole_esu_cm"] is not None:
            micro = dict(
                dipole=values["dipole_esu_cm"],
                n0=values["n0_cm3"],
                omega0=ghz_to_rad(values["omega0_ghz"]) if values["omega0_ghz"] is not None else None,
            )
        elif omega_c_ghz is None:
            omega_c_ghz = 2.6
        medium = MediumParams(
            gamma1=ghz_to_rad(values["gamma1_ghz"]),
            gamma2=ghz_to_rad(values["gamma2_ghz"]),
            d_eq=values["d_eq"],
            length_L=values["length_cm"],
            omega_c=ghz_to_rad(omega_c_ghz) if omega_c_ghz is not None else None,
            **micro,
        )
        grid = GridSpec(
            t_window=ns_to_s(values["t_window_ns"]),
            n_t=values["n_t"],
            n_z=values["n_z"],
            phi=math.radians(values["phi_deg"]),
        )
        pump = PumpSpec(
            omega_00=ghz_to_rad(values["omega_00_ghz"]),
            gamma_pump=ghz_to_rad(values["gamma_pump_ghz"]),
            delta_mode=ghz_to_rad(values["delta_mode_ghz"]),
            n_modes=values["n_modes"],
            delta0=ghz_to_rad(values["delta0_ghz"]),
            t0=ns_to_s(values["t0_ns"]),
            a=ns_to_s(values["a_ns"]),
            b=ns_to_s(values["b_ns"]),
            seed=values["seed"],
            zero_phases=values["zero_phases"],
        )
        probe = ProbeSpec(g_ratio=values["g_ratio"], tau0=ns_to_s(values["tau0_ns"]))
        if probe.tau0 >= grid.t_window:
            raise ConfigError("tau0_ns must be shorter than t_window_ns")
    except DomainError as exc:
        raise ConfigError(str(exc)) from None

    sweep_parameter = values["sweep_parameter"]
    if sweep_parameter is None:
        sweep_parameter = {"sweep-energy": "omega_00", "sweep-detuning": "delta0"}.get(scenario)
    echo = {k: v for k, v in values.items() if v is not None}
    echo["scenario"] = scenario
    return RunConfig(
        medium=medium,
        grid=grid,
        pump=pump,
        probe=probe,
        scenario=scenario,
        ensemble_m=values["ensemble_m"],
        instrument_fwhm=ghz_to_rad(values["instrument_fwhm_ghz"]),
        floor=values["floor"],
        output_dir=Path(values["output_dir"]),
        sweep_parameter=sweep_parameter,
        sweep_values=tuple(values["sweep_values"] or ()),
        full_history=values["full_history"],
        keep_members=values["keep_members"],
        echo=echo,
    )


def loads(text: str, scenario: Optional[str] = None, **overrides) -> RunConfig:
    """Parse config text; ``overrides`` are typed values in external units."""
    values = _typed(parse_text(text))
    for key, value in overrides.items():
        if key not in KEYS:
            raise ConfigError(f"unknown config keys: {key}")
        values[key] = value
    return build(values, scenario)


def load(path, scenario: Optional[str] = None, **overrides) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return loads(text, scenario, **overrides)
