"""eikamp: oscillation-free evaluation of moderately small eikonal
scattering amplitudes.

The rapidly oscillating impact-parameter integrals of the eikonal expansion
are replaced by closed forms for integrals of products of Bessel functions
(complete elliptic integrals and algebraic branch tables), leaving only
smooth low-dimensional quadratures over Born amplitudes.
"""

from .exceptions import (
    BoundaryCaseError,
    ChiGateError,
    EikampError,
    ExtrapolationDivergenceError,
    ModelFileError,
    NonConvergenceError,
    RealityClassError,
)
from .special import bessel_i0, bessel_i0e, bessel_j0, elliptic_k

__version__ = "0.1.0"

from .quadrature import (  # noqa: E402
    DEFAULT_P_SEQUENCE,
    IntegralResult,
    QuadratureConfig,
    integrate_1d,
    integrate_2d,
    integrate_damped_bessel_product,
)
from .besselprod import (  # noqa: E402
    Branch,
    BranchReport,
    delta3_sq,
    delta4_sq,
    f3_eval,
    f4_classify,
    f4_eval,
    f5_eval,
    f5_eval_symmetric,
    f6_eval,
    f6_eval_chain,
    g_kernel,
    smeared_delta_kernel,
    weber_integral,
)
from .models import (  # noqa: E402
    BornKind,
    BornModel,
    ExponentialPoleBorn,
    GaussianBorn,
    Kinematics,
    TabulatedBorn,
    load_model,
)
from .eikonal import (  # noqa: E402
    AmplitudeTerms,
    BornReality,
    EikonalProfile,
    a1_term,
    a2_term,
    a3_term,
    assemble_amplitude,
    build_profile,
    compute_terms,
    decompose_a3_domain,
    diff_cross_section,
    eikonal_chi,
    infer_reality,
)
from .oracle import (  # noqa: E402
    OracleConfig,
    direct_eikonal_amplitude,
    gaussian_series_amplitude,
    reference_besselproduct,
)

__all__ = [
    "__version__",
    "EikampError",
    "BoundaryCaseError",
    "NonConvergenceError",
    "ExtrapolationDivergenceError",
    "RealityClassError",
    "ChiGateError",
    "ModelFileError",
    "bessel_j0",
    "bessel_i0",
    "bessel_i0e",
    "elliptic_k",
    "QuadratureConfig",
    "IntegralResult",
    "DEFAULT_P_SEQUENCE",
    "integrate_1d",
    "integrate_2d",
    "integrate_damped_bessel_product",
    "Branch",
    "BranchReport",
    "delta3_sq",
    "delta4_sq",
    "f3_eval",
    "f4_classify",
    "f4_eval",
    "f5_eval",
    "f5_eval_symmetric",
    "f6_eval",
    "f6_eval_chain",
    "g_kernel",
    "weber_integral",
    "smeared_delta_kernel",
    "BornKind",
    "BornModel",
    "GaussianBorn",
    "ExponentialPoleBorn",
    "TabulatedBorn",
    "Kinematics",
    "load_model",
    "BornReality",
    "EikonalProfile",
    "AmplitudeTerms",
    "eikonal_chi",
    "build_profile",
    "a1_term",
    "a2_term",
    "a3_term",
    "compute_terms",
    "assemble_amplitude",
    "decompose_a3_domain",
    "diff_cross_section",
    "infer_reality",
    "OracleConfig",
    "direct_eikonal_amplitude",
    "gaussian_series_amplitude",
    "reference_besselproduct",
]
