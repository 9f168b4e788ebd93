"""One-sided (left) Lebesgue decomposition of sesquilinear forms on C^n."""

from .errors import InvalidInputError, LeftDecompError, NumericalFailure, PreconditionError, ValidationError
from .forms import (
    DominatingPair,
    FormMatrix,
    LeftDecomposition,
    NonnegativeForm,
    classify_left,
    decompose_parts,
    default_pairs,
    is_abs_continuous,
    is_singular,
    kernel_of_form,
    lebesgue_decompose_psd,
    left_decompose,
    left_decompose_default,
    ml_check,
    pair_check,
    parallel_sum,
    singular_witness,
)
from .linalg_core import DEFAULT_TOL, SubspaceBasis, ToleranceContext
from .measures import (
    AtomicMeasure,
    induced_form,
    lebesgue_decompose_measure,
    radon_nikodym,
    total_variation,
)
from .verifier import full_report, parallel_sum_limit_check, sample_bound_check

__all__ = [
    "AtomicMeasure",
    "classify_left",
    "decompose_parts",
    "default_pairs",
    "DEFAULT_TOL",
    "DominatingPair",
    "FormMatrix",
    "full_report",
    "induced_form",
    "InvalidInputError",
    "is_abs_continuous",
    "is_singular",
    "kernel_of_form",
    "lebesgue_decompose_measure",
    "lebesgue_decompose_psd",
    "left_decompose",
    "left_decompose_default",
    "LeftDecompError",
    "LeftDecomposition",
    "ml_check",
    "NonnegativeForm",
    "NumericalFailure",
    "pair_check",
    "parallel_sum",
    "parallel_sum_limit_check",
    "PreconditionError",
    "radon_nikodym",
    "sample_bound_check",
    "singular_witness",
    "SubspaceBasis",
    "ToleranceContext",
    "total_variation",
    "ValidationError",
]

__version__ = "0.1.0"
