"""Analysis and synthesis of microstrip nonuniform transmission line lowpass filters."""

__version__ = "0.1.0"

from .analysis import (  # noqa: E402
    AbcdMatrix,
    FourierWidthProfile,
    FrequencyGrid,
    SParameterSweep,
    analyze,
    cascade_abcd,
    choose_num_sections,
    evaluate_profile,
    s_parameters,
    section_abcd,
)
from .microstrip import (  # noqa: E402
    LineSection,
    Substrate,
    characteristic_impedance,
    effective_permittivity,
    width_for_impedance,
)
from .objective import (  # noqa: E402
    ConstraintReport,
    FilterSpec,
    constraint_report,
    enforce_end_width,
    error_function,
    transition_bound_db,
)
from .optimizer import (  # noqa: E402
    OptimizerOptions,
    PenaltyWeights,
    SynthesisResult,
    penalized_objective,
    synthesize,
    verify,
)

__all__ = [
    "AbcdMatrix",
    "ConstraintReport",
    "FilterSpec",
    "FourierWidthProfile",
    "FrequencyGrid",
    "LineSection",
    "OptimizerOptions",
    "PenaltyWeights",
    "SParameterSweep",
    "Substrate",
    "SynthesisResult",
    "analyze",
    "cascade_abcd",
    "characteristic_impedance",
    "choose_num_sections",
    "constraint_report",
    "effective_permittivity",
    "enforce_end_width",
    "error_function",
    "evaluate_profile",
    "penalized_objective",
    "s_parameters",
    "section_abcd",
    "synthesize",
    "transition_bound_db",
    "verify",
    "width_for_impedance",
]
