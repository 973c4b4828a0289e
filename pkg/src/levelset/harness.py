"""Synthetic experiments: random curves, zero-set sampling, sweeps, benchmarks.

All randomness flows through ``numpy.random.default_rng`` seeded either with
a caller-supplied integer or, inside sweeps, with a fixed (master seed, cell,
trial) tuple, so every experiment is reproducible bit for bit.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import signal

from . import contours
from .cloud import PointCloud
from .denoise import (
    IrlsConfig,
    IrlsTrace,
    LaplacianTriple,
    affinity_laplacian,
    irls_denoise,
    laplacian_spectrum,
)
from .errors import AmbiguityWarning, InputError, SamplingError
from .features import (
    CoefficientVector,
    build_gram_q,
    real_bracket,
    real_bracket_grid,
    recover_coefficients,
)
from .kernels import GaussianKernel, gram_matrix
from .supports import FourierSupport, min_samples

DEFAULT_GRID_RESOLUTION = 256
_MAX_SIGN_CHANGE_DRAWS = 256


@dataclass(frozen=True, eq=False)
class CurveInstance:
    """A ground-truth curve: unit-norm conjugate-symmetric coefficients.

    The zero set is guaranteed non-empty inside the box (enforced at
    generation time by checking for sign changes on the rasterization grid).
    """

    coefficients: CoefficientVector
    seed: int | None
    grid_resolution: int

    def field(self, axes) -> np.ndarray:
        """Real zero-level field sampled on a separable grid."""
        return real_bracket_grid(self.coefficients, axes)

    def field_at(self, points) -> np.ndarray:
        """Real zero-level field at scattered points (2,) or (2, M)."""
        return real_bracket(self.coefficients, points)


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _symmetrized_draw(rng: np.random.Generator, support: FourierSupport) -> np.ndarray:
    refl = support.reflection_indices
    raw = rng.standard_normal(support.size) + 1j * rng.standard_normal(support.size)
    return (raw + np.conj(raw[refl])) / 2.0


def random_curve(support: FourierSupport, seed, grid_resolution: int = DEFAULT_GRID_RESOLUTION) -> CurveInstance:
    """Random curve with a non-empty zero set on the given support.

    Coefficients are i.i.d. complex Gaussian, conjugate-paired about the
    support center so the zero-level field is real.  When the support holds
    its own center frequency, the constant term is shifted so the field
    changes sign on the rasterization grid; supports without a center
    element (even extents) are redrawn until a sign change appears.
    """
    rng = _as_rng(seed)
    axes = (contours.lattice_axis(grid_resolution),) * support.dims
    center = support.center
    has_center = np.all(center == np.round(center)) and support.contains(
        np.round(center).astype(np.int64)
    )
    for _ in range(_MAX_SIGN_CHANGE_DRAWS):
        values = _symmetrized_draw(rng, support)
        coeffs = CoefficientVector(support, values, conj_symmetric=True)
        grid = real_bracket_grid(coeffs, axes)
        lo, hi = float(grid.min()), float(grid.max())
        if has_center:
            if hi <= lo:
                continue
            idx = support.index_of(np.round(center).astype(np.int64))
            values = values.copy()
            values[idx] -= (lo + hi) / 2.0
            grid = grid - (lo + hi) / 2.0
            lo, hi = float(grid.min()), float(grid.max())
        if lo < 0.0 < hi:
            values = values / np.linalg.norm(values)
            coeffs = CoefficientVector(support, values, conj_symmetric=True)
            return CurveInstance(
                coefficients=coeffs,
                seed=seed if isinstance(seed, (int, np.integer)) else None,
                grid_resolution=grid_resolution,
            )
    raise SamplingError("could not draw a curve with a sign change on the grid")


def product_curve(a: CurveInstance, b: CurveInstance) -> CurveInstance:
    """Curve whose zero set is the union of two factor curves.

    The coefficient array of the product function is the convolution of the
    factor coefficient arrays; rectangular supports add as sizes minus one.
    """
    sa, sb = a.coefficients.support, b.coefficients.support
    if sa.dims != sb.dims:
        raise InputError("factor curves must share the ambient dimension")
    if sa.shape_tag != "rect" or sb.shape_tag != "rect":
        raise InputError("product curves are defined for rectangular supports")
    sizes = tuple(ka + kb - 1 for ka, kb in zip(sa.sizes, sb.sizes))
    box_a = np.zeros(sa.sizes, dtype=np.complex128)
    box_a[tuple((sa.elements - sa.elements.min(axis=0)).T)] = a.coefficients.values
    box_b = np.zeros(sb.sizes, dtype=np.complex128)
    box_b[tuple((sb.elements - sb.elements.min(axis=0)).T)] = b.coefficients.values
    conv = signal.convolve(box_a, box_b, mode="full", method="direct")
    values = conv.ravel() / np.linalg.norm(conv)
    support = FourierSupport.rect(*sizes)
    coeffs = CoefficientVector(support, values, conj_symmetric=True)
    return CurveInstance(
        coefficients=coeffs,
        seed=None,
        grid_resolution=max(a.grid_resolution, b.grid_resolution),
    )


def sample_curve(inst: CurveInstance, count: int, grid_resolution: int | None = None) -> PointCloud:
    """`count` points on the zero set, spread by arc position.

    The zero-level field is rasterized, marching-squares crossings are
    refined by bisection along their lattice edges, and the requested number
    of points is picked at uniform positions of the cumulative arc length.
    Every returned point satisfies |psi| < 1e-10.
    """
    if count < 1:
        raise InputError("must request at least one point")
    res = grid_resolution or inst.grid_resolution
    axes = (contours.lattice_axis(res),) * 2
    grid = inst.field(axes)
    points = contours.refine_and_select(grid, axes, inst.field_at, count)
    residual = float(np.max(np.abs(inst.field_at(points))))
    if residual >= 1e-10:
        raise SamplingError(f"refined samples only reached |psi| = {residual:.2e}")
    return PointCloud(np.clip(points, -0.5, 0.5))


def add_noise(cloud: PointCloud, noise_sigma: float, seed) -> PointCloud:
    """Per-coordinate i.i.d. Gaussian perturbation, clamped to the unit box."""
    if noise_sigma < 0:
        raise InputError("noise level must be nonnegative")
    rng = _as_rng(seed)
    noise = rng.normal(0.0, noise_sigma, size=cloud.coordinates.shape)
    return PointCloud(np.clip(cloud.coordinates + noise, -0.5, 0.5))


def coefficient_correlation(a: CoefficientVector, b: CoefficientVector) -> float:
    """|<a, b>| normalized to [0, 1]; phase-invariant recovery quality."""
    na, nb = a.norm, b.norm
    if na == 0 or nb == 0:
        return 0.0
    return float(abs(np.vdot(a.values, b.values)) / (na * nb))


@dataclass(frozen=True)
class Metrics:
    """Distance-to-curve statistics plus optional recovery diagnostics."""

    mean_distance: float
    max_distance: float
    coefficient_correlation: float | None = None
    sos_residual: float | None = None


def rasterized_curve_distances(cloud: PointCloud, grid: np.ndarray, axes) -> np.ndarray:
    """Distance from each point to the zero set of a rasterized field."""
    polylines = contours.extract_zero_contours(grid, axes)
    if not polylines:
        raise InputError("the oracle field has no zero set to measure against")
    return contours.polyline_distances(cloud.coordinates, polylines)


# ---------------------------------------------------------------------------
# phase-transition sweep


@dataclass(frozen=True)
class PhaseTransitionConfig:
    """Sweep over bandwidth K and sample count N with T trials per cell."""

    k_values: tuple[int, ...] = (2, 3, 4)
    n_values: tuple[int, ...] = tuple(range(4, 81))
    trials: int = 10
    master_seed: int = 0
    grid_resolution: int = DEFAULT_GRID_RESOLUTION
    success_threshold: float = 0.99


@dataclass(frozen=True, eq=False)
class PhaseTransitionResult:
    config: PhaseTransitionConfig
    rates: np.ndarray
    theory_min_n: tuple[int, ...]
    lambda_sizes: tuple[int, ...]


def _trial_rng(master_seed: int, *indices: int) -> np.random.Generator:
    return np.random.default_rng([int(master_seed), *[int(i) for i in indices]])


def run_phase_transition(cfg: PhaseTransitionConfig) -> PhaseTransitionResult:
    """Empirical recovery success rates over a (K, N) grid.

    A trial draws a random curve of bandwidth K x K, samples N points on it,
    rebuilds the coefficients from the minimum eigenvector, and succeeds when
    the recovered/true coefficient correlation exceeds the threshold with a
    unique smallest eigenvalue.  Degenerate recoveries and sampling failures
    count as failures, not errors.
    """
    if not cfg.k_values or not cfg.n_values:
        raise InputError("sweep ranges must be non-empty")
    if cfg.trials < 1:
        raise InputError("need at least one trial per cell")
    rates = np.zeros((len(cfg.k_values), len(cfg.n_values)))
    for ki, k in enumerate(cfg.k_values):
        support = FourierSupport.rect(k, k)
        for ni, n in enumerate(cfg.n_values):
            successes = 0
            for t in range(cfg.trials):
                rng = _trial_rng(cfg.master_seed, ki, ni, t)
                try:
                    inst = random_curve(support, rng, cfg.grid_resolution)
                    cloud = sample_curve(inst, n)
                except SamplingError:
                    continue
                q = build_gram_q(cloud, support)
                with warnings.catch_warnings(record=True) as caught:
                    warnings.simplefilter("always", AmbiguityWarning)
                    recovered = recover_coefficients(q)
                    ambiguous = any(
                        isinstance(w.message, AmbiguityWarning) for w in caught
                    )
                if ambiguous:
                    continue
                corr = coefficient_correlation(recovered, inst.coefficients)
                if corr > cfg.success_threshold:
                    successes += 1
            rates[ki, ni] = successes / cfg.trials
    theory = tuple(
        min_samples(None, (k, k)).total_min for k in cfg.k_values
    )
    sizes = tuple(k * k for k in cfg.k_values)
    return PhaseTransitionResult(cfg, rates, theory, sizes)


# ---------------------------------------------------------------------------
# denoising benchmark


def eigenvector_alignment(ref_vals: np.ndarray, ref_vecs: np.ndarray,
                          test_vec: np.ndarray, index: int,
                          cluster_tol: float = 1e-6) -> float:
    """|cos| between a test eigenvector and the reference eigenspace at `index`.

    Reference eigenvalues within ``cluster_tol`` of the indexed one (relative
    to the spectral spread) are treated as one eigenspace, which makes the
    measure well defined for degenerate pairs such as the harmonics of a
    closed loop.
    """
    spread = max(float(ref_vals[-1] - ref_vals[0]), 1e-300)
    cluster = np.abs(ref_vals - ref_vals[index]) <= cluster_tol * spread
    basis = ref_vecs[:, cluster]
    return float(np.linalg.norm(basis.T @ test_vec))


def circle_cloud(n_points: int, radius: float) -> PointCloud:
    """Evenly spaced points on a centered circle."""
    theta = (np.arange(n_points) + 0.5) * (2.0 * np.pi / n_points)
    return PointCloud(radius * np.stack([np.cos(theta), np.sin(theta)]))


@dataclass
class DenoiseBenchmarkConfig:
    n_points: int = 200
    radius: float = 0.3
    noise_sigma: float = 0.02
    seed: int = 0
    irls: IrlsConfig = field(
        default_factory=lambda: IrlsConfig(
            lam=0.02, sigma=0.2, max_iters=50, gamma_decay=0.7
        )
    )
    baseline_sigma: float | None = None
    eigvec_number: int = 4
    oracle_resolution: int = 1024


@dataclass(frozen=True, eq=False)
class DenoiseBenchmarkResult:
    config: DenoiseBenchmarkConfig
    metrics_before: Metrics
    metrics_after: Metrics
    alignments: dict
    spectra: dict
    trace: IrlsTrace
    denoised: PointCloud
    noisy: PointCloud
    clean: PointCloud
    oracle_max_discrepancy: float
    oracle_cell_size: float


def run_denoise_benchmark(cfg: DenoiseBenchmarkConfig) -> DenoiseBenchmarkResult:
    """Circle denoising benchmark with Laplacian eigenvector comparison.

    Reports point-to-circle distances before and after denoising, and how
    well the indexed eigenvector of three Laplacians (classical Gaussian
    weights on the noisy data, the first reweighted iteration, and the final
    iteration) aligns with the clean-data Laplacian's eigenspace.
    """
    clean = circle_cloud(cfg.n_points, cfg.radius)
    noisy = add_noise(clean, cfg.noise_sigma, cfg.seed)
    irls_cfg = replace(cfg.irls, keep_laplacians=True)
    denoised, trace = irls_denoise(noisy, irls_cfg)

    def analytic(cloud: PointCloud) -> np.ndarray:
        return np.abs(np.hypot(*cloud.coordinates) - cfg.radius)

    d_before = analytic(noisy)
    d_after = analytic(denoised)
    metrics_before = Metrics(float(d_before.mean()), float(d_before.max()))
    metrics_after = Metrics(float(d_after.mean()), float(d_after.max()))

    # parity check of the rasterized oracle against the analytic distance
    axis = contours.lattice_axis(cfg.oracle_resolution)
    grid = (
        axis[:, None] ** 2 + axis[None, :] ** 2 - cfg.radius**2
    )
    d_raster = rasterized_curve_distances(noisy, grid, (axis, axis))
    oracle_max_discrepancy = float(np.max(np.abs(d_raster - d_before)))
    oracle_cell_size = float(axis[1] - axis[0])

    sigma_b = cfg.baseline_sigma if cfg.baseline_sigma is not None else cfg.irls.sigma
    kernel = GaussianKernel(sigma_b, 2)
    lap_clean = affinity_laplacian(gram_matrix(clean, kernel))
    lap_noisy = affinity_laplacian(gram_matrix(noisy, kernel))
    lap_first = trace.laplacian_first
    lap_final = trace.laplacian_last

    spectra = {
        "clean": laplacian_spectrum(lap_clean),
        "noisy": laplacian_spectrum(lap_noisy),
        "first_iteration": laplacian_spectrum(lap_first),
        "final": laplacian_spectrum(lap_final),
    }
    idx = cfg.eigvec_number - 1
    ref_vals, ref_vecs = spectra["clean"]
    alignments = {
        name: eigenvector_alignment(ref_vals, ref_vecs, spectra[name][1][:, idx], idx)
        for name in ("noisy", "first_iteration", "final")
    }
    return DenoiseBenchmarkResult(
        config=cfg,
        metrics_before=metrics_before,
        metrics_after=metrics_after,
        alignments=alignments,
        spectra=spectra,
        trace=trace,
        denoised=denoised,
        noisy=noisy,
        clean=clean,
        oracle_max_discrepancy=oracle_max_discrepancy,
        oracle_cell_size=oracle_cell_size,
    )
