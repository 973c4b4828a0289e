"""Shift-invariant kernels, Gram matrices, and numerical rank estimation.

The Gram matrix of the exponential feature maps depends only on point
differences, so it can be assembled from a kernel function instead of the
(potentially huge) feature matrix.  A centered rectangular support gives a
separable Dirichlet kernel; a Gaussian drops the hard band edge in exchange
for an effective bandwidth set by its width.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .cloud import PointCloud
from .errors import InputError
from .supports import FourierSupport

DEFAULT_RANK_TOL = 1e-8


def _dirichlet_1d(t: np.ndarray, size: int) -> np.ndarray:
    """sum_{k=-m}^{m} exp(2j*pi*k*t) for size = 2m+1, evaluated stably.

    Periodic with period 1; the removable singularity at integer t returns
    `size`.
    """
    t = t - np.round(t)
    small = np.abs(t) < 1e-9
    ts = np.where(small, 1.0, t)
    out = np.sin(size * np.pi * ts) / np.sin(np.pi * ts)
    # second-order series keeps the branch join smooth at the cutover
    series = size * (1.0 - (size**2 - 1) * (np.pi * t) ** 2 / 6.0)
    return np.where(small, series, out)


@dataclass(frozen=True, eq=False)
class DirichletKernel:
    """Kernel induced by an origin-symmetric frequency support."""

    support: FourierSupport

    def __post_init__(self):
        if not self.support.is_origin_symmetric:
            raise InputError(
                "Dirichlet kernel needs a support symmetric about the origin "
                "(otherwise the kernel is complex-valued)"
            )

    @property
    def dims(self) -> int:
        return self.support.dims

    @property
    def value_at_zero(self) -> float:
        return float(self.support.size)

    def __call__(self, diffs) -> np.ndarray:
        """Evaluate at displacement vectors (n,) or (n, M)."""
        d = np.asarray(diffs, dtype=np.float64)
        single = d.ndim == 1
        if single:
            d = d[:, None]
        if d.shape[0] != self.dims:
            raise InputError(f"displacements must be {self.dims} x M")
        if self.support.shape_tag == "rect":
            out = np.ones(d.shape[1])
            for a, size in enumerate(self.support.sizes):
                out = out * _dirichlet_1d(d[a], size)
        else:
            # symmetric support: the pairwise exponentials sum to a cosine sum
            out = np.cos(2.0 * np.pi * (self.support.elements @ d)).sum(axis=0)
        return float(out[0]) if single else out


@dataclass(frozen=True, eq=False)
class GaussianKernel:
    """Isotropic Gaussian kernel exp(-|r|^2 / (2 sigma^2)).

    The domain is the centered unit box, so for sigma well below the box
    width the periodic images are negligible; set ``periodize`` to fold in
    the 3^n nearest images when validating that approximation.
    """

    sigma: float
    dims: int
    periodize: bool = False

    def __post_init__(self):
        if self.sigma <= 0:
            raise InputError("gaussian width must be positive")
        if self.dims < 1:
            raise InputError("dimension must be >= 1")

    @property
    def value_at_zero(self) -> float:
        if not self.periodize:
            return 1.0
        zero = np.zeros((self.dims, 1))
        return float(self(zero)[0])

    @cached_property
    def _image_shifts(self) -> np.ndarray:
        grids = np.meshgrid(*([np.array([-1.0, 0.0, 1.0])] * self.dims), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def __call__(self, diffs) -> np.ndarray:
        d = np.asarray(diffs, dtype=np.float64)
        single = d.ndim == 1
        if single:
            d = d[:, None]
        if d.shape[0] != self.dims:
            raise InputError(f"displacements must be {self.dims} x M")
        if self.periodize:
            out = np.zeros(d.shape[1])
            for shift in self._image_shifts:
                sq = np.sum((d + shift[:, None]) ** 2, axis=0)
                out += np.exp(-sq / (2.0 * self.sigma**2))
        else:
            sq = np.sum(d**2, axis=0)
            out = np.exp(-sq / (2.0 * self.sigma**2))
        return float(out[0]) if single else out


KernelDescriptor = DirichletKernel | GaussianKernel


def dirichlet_kernel(diffs, support: FourierSupport):
    """Convenience wrapper: evaluate the Dirichlet kernel of `support`."""
    return DirichletKernel(support)(diffs)


def gaussian_kernel(diffs, sigma: float):
    """Convenience wrapper: evaluate the Gaussian kernel of width `sigma`."""
    d = np.asarray(diffs, dtype=np.float64)
    dims = d.shape[0] if d.ndim > 0 else 1
    return GaussianKernel(sigma, dims)(diffs)


@dataclass(frozen=True, eq=False)
class KernelGram:
    """N x N symmetric kernel matrix of one point cloud."""

    matrix: np.ndarray
    descriptor: KernelDescriptor
    source_count: int

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != self.source_count:
            raise InputError(f"matrix must be {self.source_count} square")
        if not np.array_equal(m, m.T):
            raise InputError("kernel matrix must be exactly symmetric")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def kernel_matrix(coordinates: np.ndarray, kernel: KernelDescriptor) -> np.ndarray:
    """Pairwise kernel matrix of raw n x N coordinates.

    Only the strict upper triangle is evaluated and then mirrored, which
    halves the work and enforces exact symmetry; the diagonal is filled with
    the kernel's value at zero displacement.
    """
    coords = np.asarray(coordinates, dtype=np.float64)
    if coords.ndim != 2 or coords.shape[0] != kernel.dims:
        raise InputError("coordinates and kernel dimensions differ")
    n = coords.shape[1]
    out = np.empty((n, n), dtype=np.float64)
    np.fill_diagonal(out, kernel.value_at_zero)
    iu, ju = np.triu_indices(n, k=1)
    if iu.size:
        diffs = coords[:, ju] - coords[:, iu]
        vals = kernel(diffs)
        out[iu, ju] = vals
        out[ju, iu] = vals
    return out


def gram_matrix(cloud: PointCloud, kernel: KernelDescriptor) -> KernelGram:
    """Kernel matrix of a point cloud, entry (i, j) = kernel(x_j - x_i)."""
    if cloud.dims != kernel.dims:
        raise InputError("point cloud and kernel dimensions differ")
    return KernelGram(kernel_matrix(cloud.coordinates, kernel), kernel, cloud.count)


def numerical_rank(gram, rel_tol: float = DEFAULT_RANK_TOL) -> int:
    """Count of eigenvalues above rel_tol times the largest one."""
    m = gram.matrix if isinstance(gram, KernelGram) else np.asarray(gram, dtype=np.float64)
    w = np.linalg.eigvalsh(m)
    top = float(w[-1])
    if top <= 0.0:
        return 0
    return int(np.count_nonzero(w > rel_tol * top))


def effective_bandwidth(sigma: float, dims: int) -> tuple[float, float]:
    """Frequency cutoff and support-size estimate for a Gaussian of width sigma.

    The Fourier coefficients of the Gaussian are negligible beyond
    3 / (pi * sigma) per axis, so the induced support holds roughly
    (6 / (pi * sigma))^n frequencies.
    """
    if sigma <= 0:
        raise InputError("gaussian width must be positive")
    cutoff = 3.0 / (np.pi * sigma)
    return cutoff, float((2.0 * cutoff) ** dims)
