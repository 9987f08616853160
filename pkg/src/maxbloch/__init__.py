"""Maxwell-Bloch propagation of a polychromatic pump and a weak probe through a
dense two-level medium, with spectral diagnostics and a reproducible run harness."""

__version__ = "0.1.0"

from .params import (  # noqa: E402
    AtomState,
    ComplexEnvelope,
    DomainError,
    GridSpec,
    MediumParams,
    ProbeMediumState,
    ProbeSpec,
    PumpSpec,
)
from .propagate import (  # noqa: E402
    AccuracyBudgetError,
    IntegrationError,
    PropagationResult,
    propagate_pair,
    propagate_pump,
    step_bloch,
    step_bloch_probe,
)

__all__ = [
    "AccuracyBudgetError",
    "AtomState",
    "ComplexEnvelope",
    "DomainError",
    "GridSpec",
    "IntegrationError",
    "MediumParams",
    "ProbeMediumState",
    "ProbeSpec",
    "PropagationResult",
    "PumpSpec",
    "propagate_pair",
    "propagate_pump",
    "step_bloch",
    "step_bloch_probe",
]
