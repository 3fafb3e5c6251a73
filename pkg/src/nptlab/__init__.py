"""Constructions and numerical certificates for n-copy undistillable NPT states."""

__version__ = "0.1.0"

from .qcore import (  # noqa: E402
    BipartitePureState,
    ComplexOperator,
    SchmidtDecomposition,
    hermitian_spectrum,
    hs_distance,
    is_ppt,
    partial_transpose,
    regrouped_tensor_power,
    schmidt_decompose,
    tensor,
    witness_value,
)
from .constructions import (  # noqa: E402
    ConstructedPair,
    ConstructionSpec,
    Method,
    build_rho,
    complement_state,
    dur_pt_operator,
    generalized_rho,
    method_one,
    method_two,
    pure_pt_eigensystem,
)
from .distillability import (  # noqa: E402
    SeesawOptions,
    SeesawResult,
    ThresholdReport,
    certificate_verify,
    epsilon_threshold,
    f_estimate,
    seesaw_min,
)
