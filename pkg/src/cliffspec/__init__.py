"""Numerical S-spectrum machinery for finite-dimensional Clifford-module operators."""

from .clifford import (
    CliffordNum,
    DoubleSector,
    Paravector,
    abs_value,
    clifford_product,
    conjugate,
    from_polar,
    in_sector,
    polar_decompose,
    unit_imag,
)
from .errors import (
    ArgumentError,
    CertificationError,
    CliffSpecError,
    DegenerateInputError,
    DimensionMismatchError,
    DomainError,
    NotInvertibleError,
    NumericalFailureError,
    PreconditionError,
    SchemaError,
)
from .module import (
    AdjointPair,
    CliffordOperator,
    ModuleVector,
    OperatorSolver,
    RealRepresentation,
    adjoint_operator,
    adjoint_pair,
    inner_product,
    operator_from_real,
    operator_norm,
    real_representation,
    rho_matrix,
    scalar_mul_left,
    scalar_mul_right,
    scalar_part,
    solve_operator,
)
from .spectrum import (
    BisectorReport,
    GridSpec,
    PseudoResolventPoint,
    RaySampling,
    SpectrumScan,
    check_bisectorial,
    default_scan_grid,
    left_s_resolvent,
    pseudo_resolvent_point,
    q_operator,
    right_s_resolvent,
    scan_spectrum_slice,
)
from .functions import (
    BoundedCertificate,
    DecayCertificate,
    IntrinsicFunction,
    certify_bounded,
    certify_decay,
    check_intrinsic,
    constant_function,
    e_alpha_family,
    eval_intrinsic,
    f0_infty,
    f_ab_function,
    f_ab_tail_bound,
    product_function,
    rational_function,
    regularizer,
    resolve_function,
    scale_function,
    sum_function,
)
from .calculus import (
    CalculusResult,
    ContourConfig,
    ContourEngine,
    adjoint_calculus_check,
    combined_tolerance,
    f_ab_operator,
    hinf_calculus,
    omega_calculus,
    rational_calculus,
    scaled_calculus,
)
from .quadratic import (
    DualSamples,
    FrameBounds,
    QuadGridConfig,
    SignVector,
    adjoint_frame_bounds,
    default_quad_grid,
    dual_select,
    dyadic_sign_identity,
    frame_bounds,
    frame_operator,
    quadratic_norm,
    sign_matrix,
    sign_vectors,
)
from .serialization import (
    operator_from_dict,
    operator_to_dict,
    parse_operator_file,
    parse_vector_file,
    scan_to_csv,
    vector_from_dict,
    vector_to_dict,
)
from .suite import SuiteConfig, default_f_specs, default_g_specs, run_theorem_suite

__version__ = "0.1.0"
