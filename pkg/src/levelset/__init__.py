"""Recovery and denoising of point clouds on zero level sets of bandlimited functions.

The pieces: frequency supports and sampling bounds (:mod:`levelset.supports`),
exponential feature maps with annihilation-based coefficient recovery
(:mod:`levelset.features`), shift-invariant kernel matrices
(:mod:`levelset.kernels`), reweighted graph-Laplacian denoising
(:mod:`levelset.denoise`), zero-set geometry (:mod:`levelset.contours`),
and the synthetic experiment harness (:mod:`levelset.harness`).
"""

from .cloud import PointCloud, load_csv, save_csv
from .denoise import (
    IrlsConfig,
    IrlsTrace,
    LaplacianTriple,
    affinity_laplacian,
    half_inverse,
    irls_denoise,
    laplacian_from,
    laplacian_spectrum,
    surrogate_cost,
)
from .errors import (
    AmbiguityWarning,
    ConfigError,
    InputError,
    IterationError,
    LevelsetError,
    NumericalError,
    PointCloudFormatError,
    SamplingError,
)
from .features import (
    CoefficientVector,
    FeatureMatrix,
    GramQ,
    build_feature_matrix,
    build_gram_q,
    evaluate_psi,
    feature_map,
    feature_rank,
    nullspace_basis,
    psi_grid,
    real_bracket,
    real_bracket_grid,
    recover_coefficients,
    sum_of_squares_at,
    sum_of_squares_field,
)
from .harness import (
    CurveInstance,
    DenoiseBenchmarkConfig,
    DenoiseBenchmarkResult,
    Metrics,
    PhaseTransitionConfig,
    PhaseTransitionResult,
    add_noise,
    circle_cloud,
    coefficient_correlation,
    eigenvector_alignment,
    product_curve,
    random_curve,
    run_denoise_benchmark,
    run_phase_transition,
    sample_curve,
)
from .kernels import (
    DirichletKernel,
    GaussianKernel,
    KernelGram,
    dirichlet_kernel,
    effective_bandwidth,
    gaussian_kernel,
    gram_matrix,
    numerical_rank,
)
from .supports import (
    FourierSupport,
    SamplingBounds,
    min_samples,
    rank_bound,
    shift_count,
)

__version__ = "0.1.0"

__all__ = [
    "AmbiguityWarning",
    "CoefficientVector",
    "ConfigError",
    "CurveInstance",
    "DenoiseBenchmarkConfig",
    "DenoiseBenchmarkResult",
    "DirichletKernel",
    "FeatureMatrix",
    "FourierSupport",
    "GaussianKernel",
    "GramQ",
    "InputError",
    "IrlsConfig",
    "IrlsTrace",
    "IterationError",
    "KernelGram",
    "LaplacianTriple",
    "LevelsetError",
    "Metrics",
    "NumericalError",
    "PhaseTransitionConfig",
    "PhaseTransitionResult",
    "PointCloud",
    "PointCloudFormatError",
    "SamplingBounds",
    "SamplingError",
    "add_noise",
    "affinity_laplacian",
    "build_feature_matrix",
    "build_gram_q",
    "circle_cloud",
    "coefficient_correlation",
    "dirichlet_kernel",
    "effective_bandwidth",
    "eigenvector_alignment",
    "evaluate_psi",
    "feature_map",
    "feature_rank",
    "gaussian_kernel",
    "gram_matrix",
    "half_inverse",
    "irls_denoise",
    "laplacian_from",
    "laplacian_spectrum",
    "load_csv",
    "min_samples",
    "nullspace_basis",
    "numerical_rank",
    "product_curve",
    "psi_grid",
    "random_curve",
    "rank_bound",
    "real_bracket",
    "real_bracket_grid",
    "recover_coefficients",
    "run_denoise_benchmark",
    "run_phase_transition",
    "sample_curve",
    "save_csv",
    "shift_count",
    "sum_of_squares_at",
    "sum_of_squares_field",
    "surrogate_cost",
]
