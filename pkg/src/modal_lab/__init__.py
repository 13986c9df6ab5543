"""Modal algebras, centralizers and modular flows for finite-dimensional states."""
from .algebra import (
    BlockStructure,
    OperatorAlgebra,
    block_structure,
    center,
    commutant,
    contains,
    diagonal_algebra,
    equals,
    from_span,
    full_algebra,
    generate,
    intersect,
    is_subalgebra,
    minimal_projections,
    scalar_algebra,
)
from .errors import ModalLabError
from .linalg import DEFAULT_TOL, TolerancePolicy
from .modal import (
    DispersionFreeDecomposition,
    DoublePair,
    ModalResult,
    centralizer,
    centralizer_via_density,
    correlation_pair,
    dispersion_free_check,
    dispersion_free_decomposition,
    double_of,
    kms_check,
    kms_function,
    kms_residuals,
    modal_algebra,
    modal_algebra_type_I,
    modular_flow,
    orthodox_algebra,
)
from .states import (
    QuantumState,
    SchmidtForm,
    TensorSpace,
    density_in_algebra,
    is_faithful,
    partial_trace,
    schmidt,
    support_projection,
)

__version__ = "0.1.0"

__all__ = [
    "block_structure",
    "BlockStructure",
    "center",
    "centralizer",
    "centralizer_via_density",
    "commutant",
    "contains",
    "correlation_pair",
    "DEFAULT_TOL",
    "density_in_algebra",
    "diagonal_algebra",
    "dispersion_free_check",
    "dispersion_free_decomposition",
    "DispersionFreeDecomposition",
    "double_of",
    "DoublePair",
    "equals",
    "from_span",
    "full_algebra",
    "generate",
    "intersect",
    "is_faithful",
    "is_subalgebra",
    "kms_check",
    "kms_function",
    "kms_residuals",
    "minimal_projections",
    "modal_algebra",
    "modal_algebra_type_I",
    "ModalLabError",
    "ModalResult",
    "modular_flow",
    "OperatorAlgebra",
    "orthodox_algebra",
    "partial_trace",
    "QuantumState",
    "scalar_algebra",
    "schmidt",
    "SchmidtForm",
    "support_projection",
    "TensorSpace",
    "TolerancePolicy",
]
