"""darbouxforge: exact symbolic verification of shifted contact/symplectic
Darboux models, Lagrangian/Legendrian sources, and their non-degeneracy."""

from .algebra import (
    AlgElement,
    GradedAlgebra,
    GradedGenerator,
    mul,
    normalize,
    partial_derivative,
    substitute,
)
from .cdga import (
    CdgaMorphism,
    CdgaPresentation,
    apply_d,
    check_chain_map,
    check_d_squared,
)
from .derham import (
    DeRhamComplex,
    DeRhamForm,
    FormSequence,
    VectorField,
    check_closed_sequence,
    check_path_equivalence,
    contract,
    de_rham_d,
    internal_d,
    push_forward,
    wedge,
)
from .kernel import BACKEND as KERNEL_BACKEND
from .report import CheckResult, VerificationReport

__version__ = "0.1.0"

__all__ = [
    "AlgElement",
    "GradedAlgebra",
    "GradedGenerator",
    "CdgaMorphism",
    "CdgaPresentation",
    "DeRhamComplex",
    "DeRhamForm",
    "FormSequence",
    "VectorField",
    "CheckResult",
    "VerificationReport",
    "KERNEL_BACKEND",
    "apply_d",
    "check_chain_map",
    "check_closed_sequence",
    "check_d_squared",
    "check_path_equivalence",
    "contract",
    "de_rham_d",
    "internal_d",
    "mul",
    "normalize",
    "partial_derivative",
    "push_forward",
    "substitute",
    "wedge",
]
