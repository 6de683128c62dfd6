"""Two-pointer time-of-flight momentum measurement of a free quantum particle.

Everything is expressed in scaled units with an effective hbar of one.
Phase-space vectors use the fixed ordering (X, P, x1, p1, x2, p2).
"""

from .errors import (
    AliasingError,
    AmbiguousInstantError,
    ContractViolationError,
    DegenerateConditioningError,
    DegenerateFunctionalError,
    InfeasibleError,
    InvalidCouplingError,
    InvalidParameterError,
    NoCrossingError,
    OutOfSupportError,
    ResolutionError,
    ToFError,
)
from .setup import ToFSetup, desk_setup, reference_setup
from .phasespace import (
    LABELS,
    GaussianState,
    PhaseIndex,
    SymplecticMap,
    apply_map,
    compose,
    condition_on_linear,
    make_initial_state,
    marginal,
    symplectic_form,
)
from .dynamics import (
    CouplingCoefficients,
    DeltaSchedule,
    SampledSchedule,
    delta_coefficients,
    delta_symplectic_composed,
    evolution_map,
    free_map,
    gaussian_pulse_schedule,
    kick_map,
    propagate,
    quadrature_coefficients,
    symplectic_from_coefficients,
)
from .tof import (
    ConditionedResult,
    ToFFunctional,
    condition_on_tof,
    distribution_samples,
    gradient_d,
    tof_expectation,
    tof_functional,
    traced_variance,
    width_ratio,
)

__version__ = "0.1.0"

__all__ = [
    "AliasingError",
    "AmbiguousInstantError",
    "ConditionedResult",
    "ContractViolationError",
    "CouplingCoefficients",
    "DegenerateConditioningError",
    "DegenerateFunctionalError",
    "DeltaSchedule",
    "GaussianState",
    "InfeasibleError",
    "InvalidCouplingError",
    "InvalidParameterError",
    "LABELS",
    "NoCrossingError",
    "OutOfSupportError",
    "PhaseIndex",
    "ResolutionError",
    "SampledSchedule",
    "SymplecticMap",
    "ToFError",
    "ToFFunctional",
    "ToFSetup",
    "apply_map",
    "compose",
    "condition_on_linear",
    "condition_on_tof",
    "delta_coefficients",
    "delta_symplectic_composed",
    "desk_setup",
    "distribution_samples",
    "evolution_map",
    "free_map",
    "gaussian_pulse_schedule",
    "gradient_d",
    "kick_map",
    "make_initial_state",
    "marginal",
    "propagate",
    "quadrature_coefficients",
    "reference_setup",
    "symplectic_form",
    "symplectic_from_coefficients",
    "tof_expectation",
    "tof_functional",
    "traced_variance",
    "width_ratio",
]
