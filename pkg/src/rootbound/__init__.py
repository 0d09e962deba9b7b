"""First hitting time of a square-root boundary by a Bessel process.

For a Bessel process R of index ±nu started at 1 and the boundary
R_u^2 = (b+u)/c with 0 < b < c, the crossing time sigma has a closed-form
Mellin transform E[(b+sigma)^(-s)] expressible through expectations
E[(1+2*beta*gamma_alpha)^(-p)] over a gamma variable.  This package
evaluates those transforms, inverts them numerically to densities, CDFs and
quantiles, simulates the crossing by exact geometric-Brownian increments,
and verifies every identity by Monte Carlo.
"""

from .errors import (
    ConsistencyError,
    DomainError,
    NearIntegerParameterError,
    NormalizationError,
    NumericalError,
    RootboundError,
    ToleranceNotMetError,
    TruncationTailError,
)
from .inversion import (
    CdfTable,
    ContourTable,
    DensityCurve,
    InversionConfig,
    build_contour_table,
    cdf_from_density,
    default_grid,
    density_at,
    density_curve,
    mellin_from_density,
    quantile,
)
from .numerics import (
    kolmogorov_sf,
    ks_critical_value,
    ks_one_sample,
    ks_two_sample,
    log_gamma,
    reciprocal_gamma,
    regularized_incomplete_gamma_lower,
    regularized_incomplete_gamma_upper,
)
from .quadrature import (
    QuadratureConfig,
    gauss_laguerre_nodes,
    integrate_gamma_weighted,
    integrate_gamma_weighted_laguerre,
)
from .simulate import (
    AffinePairs,
    HittingResult,
    HittingSample,
    PerpetuityResult,
    SampleSet,
    SimConfig,
    gamma_sample,
    gbm_path,
    sample_affine_pair,
    sample_affine_pairs,
    sample_dufresne,
    sample_hitting_time,
    sample_hitting_times,
    sample_perpetuities,
    sample_perpetuity_truncated,
)
from .transforms import (
    BesselSpec,
    Boundary,
    TransformQuery,
    duality_residual,
    gamma_expectation,
    gamma_expectation_via_u,
    mellin_neg_index,
    mellin_pos_index,
    mellin_transform,
    tricomi_u,
    whittaker_w,
)
from .verify import (
    VerificationReport,
    reports_to_json,
    reports_to_text,
    run_all,
    verify_affine,
    verify_duality,
    verify_dufresne,
    verify_inversion,
    verify_transform_mc,
    verify_whittaker,
)

__version__ = "0.1.0"

__all__ = [
    "AffinePairs",
    "BesselSpec",
    "Boundary",
    "CdfTable",
    "ConsistencyError",
    "ContourTable",
    "DensityCurve",
    "DomainError",
    "HittingResult",
    "HittingSample",
    "InversionConfig",
    "NearIntegerParameterError",
    "NormalizationError",
    "NumericalError",
    "PerpetuityResult",
    "QuadratureConfig",
    "RootboundError",
    "SampleSet",
    "SimConfig",
    "ToleranceNotMetError",
    "TransformQuery",
    "TruncationTailError",
    "VerificationReport",
    "build_contour_table",
    "cdf_from_density",
    "default_grid",
    "density_at",
    "density_curve",
    "duality_residual",
    "gamma_expectation",
    "gamma_expectation_via_u",
    "gamma_sample",
    "gauss_laguerre_nodes",
    "gbm_path",
    "integrate_gamma_weighted",
    "integrate_gamma_weighted_laguerre",
    "kolmogorov_sf",
    "ks_critical_value",
    "ks_one_sample",
    "ks_two_sample",
    "log_gamma",
    "mellin_from_density",
    "mellin_neg_index",
    "mellin_pos_index",
    "mellin_transform",
    "quantile",
    "reciprocal_gamma",
    "regularized_incomplete_gamma_lower",
    "regularized_incomplete_gamma_upper",
    "reports_to_json",
    "reports_to_text",
    "run_all",
    "sample_affine_pair",
    "sample_affine_pairs",
    "sample_dufresne",
    "sample_hitting_time",
    "sample_hitting_times",
    "sample_perpetuities",
    "sample_perpetuity_truncated",
    "tricomi_u",
    "verify_affine",
    "verify_duality",
    "verify_dufresne",
    "verify_inversion",
    "verify_transform_mc",
    "verify_whittaker",
    "whittaker_w",
]
