"""Central values and derivatives of quadratically twisted newform
L-series, and the mixed first moment of their products over a fundamental
discriminant family.

The pieces, bottom up: exact Hecke eigenvalue tables (a weight-12 level-1
cusp form expanded from its eta-power product, elliptic-curve forms by
point counting), quadratic Gauss sums with a closed-form evaluator,
Poisson summation for real characters under smooth weights, the two
incomplete-gamma kernels of the approximate functional equations, the
Euler product behind the moment's leading constant, and a deterministic
harness that ties them into the weighted first moment with its four-way
truncation split.
"""

from .arith import SieveTables, build_sieve, default_sieve, kronecker
from .errors import (
    CacheFormatError,
    CapacityError,
    DegenerateFactorError,
    DomainError,
    EmptyFamilyError,
    FactorLimitError,
    IndeterminateSignError,
    QuadratureError,
    RamifiedTwistError,
    ResourceError,
    SignInconsistencyError,
    TableTooShortError,
    TwistMomentError,
    VerificationError,
    WrongSignError,
)
from .euler import (
    E_at_origin,
    EulerConstantReport,
    bounded_ratio_diagnostic,
    constant_Cfg,
    edge_L_values,
    euler_local_factor,
)
from .forms import (
    CoefficientTable,
    Newform,
    build_table,
    delta_coefficients,
    delta_tau,
    determine_fricke_sign,
    elliptic_ap,
    get_form,
    load_coefficient_file,
)
from .gauss import GaussValue, gauss_brute, gauss_fast, poisson_verify
from .kernels import KernelSuite, w1_contour, w2_contour
from .lfun import (
    CentralValue,
    TwistCharacter,
    afe_general_s,
    central_derivative,
    central_value,
    central_value_balanced,
    derivative_fd_oracle,
    make_twist,
    omega,
)
from .moment import (
    Attrition,
    MomentRecord,
    MomentRun,
    decompose_I,
    enumerate_admissible,
    recompute_sum,
    run_moment,
)
from .smooth import (
    SmoothWeight,
    TransformConfig,
    make_bump_J,
    make_partition_G,
    make_step_psi,
    make_window_V,
)

__version__ = "0.1.0"

__all__ = [
    "Attrition",
    "CacheFormatError",
    "CapacityError",
    "CentralValue",
    "CoefficientTable",
    "DegenerateFactorError",
    "DomainError",
    "E_at_origin",
    "EmptyFamilyError",
    "EulerConstantReport",
    "FactorLimitError",
    "GaussValue",
    "IndeterminateSignError",
    "KernelSuite",
    "MomentRecord",
    "MomentRun",
    "Newform",
    "QuadratureError",
    "RamifiedTwistError",
    "ResourceError",
    "SieveTables",
    "SignInconsistencyError",
    "SmoothWeight",
    "TableTooShortError",
    "TransformConfig",
    "TwistCharacter",
    "TwistMomentError",
    "VerificationError",
    "WrongSignError",
    "afe_general_s",
    "bounded_ratio_diagnostic",
    "build_sieve",
    "build_table",
    "central_derivative",
    "central_value",
    "central_value_balanced",
    "constant_Cfg",
    "decompose_I",
    "default_sieve",
    "delta_coefficients",
    "delta_tau",
    "derivative_fd_oracle",
    "determine_fricke_sign",
    "edge_L_values",
    "elliptic_ap",
    "enumerate_admissible",
    "euler_local_factor",
    "gauss_brute",
    "gauss_fast",
    "get_form",
    "kronecker",
    "load_coefficient_file",
    "make_bump_J",
    "make_partition_G",
    "make_step_psi",
    "make_twist",
    "make_window_V",
    "omega",
    "poisson_verify",
    "recompute_sum",
    "run_moment",
    "w1_contour",
    "w2_contour",
]
