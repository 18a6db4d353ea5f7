"""Monte Carlo toolkit for branching random walks with alpha-stable spines."""

from .stable_laws import (
    StableParamsA,
    StableParamsC,
    InvalidParameterError,
    c1_const,
    char_function,
    kappa_exact,
    negativity_params,
    norming_sequence,
    positive_part_mean_exact,
    sample_stable,
    scale_function,
    spectrally_negative_params,
    to_form_a,
    to_form_c,
)
from .steplaw import StepLaw, atoms_step_law, const_step_law, stable_step_law

__all__ = [
    "StableParamsA",
    "StableParamsC",
    "InvalidParameterError",
    "StepLaw",
    "atoms_step_law",
    "c1_const",
    "char_function",
    "const_step_law",
    "kappa_exact",
    "negativity_params",
    "norming_sequence",
    "positive_part_mean_exact",
    "sample_stable",
    "scale_function",
    "spectrally_negative_params",
    "stable_step_law",
    "to_form_a",
    "to_form_c",
]
