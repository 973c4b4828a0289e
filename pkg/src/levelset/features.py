"""Exponential feature maps, annihilation relations, and coefficient recovery.

A point x maps to the vector of complex exponentials exp(2j*pi*k.x) over a
frequency support.  Points on the zero set of a trigonometric polynomial with
coefficients c satisfy c . phi(x) = 0, so the coefficients can be recovered
from sampled points as the minimum eigenvector of an accumulated Gram matrix
of the features.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .cloud import PointCloud
from .errors import AmbiguityWarning, InputError
from .supports import FourierSupport

DEFAULT_RANK_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Complex coefficients indexed by a frequency support.

    When ``conj_symmetric`` is set, the value at the reflection of k about
    the support's center equals the conjugate of the value at k.  For a
    support centered on the origin this makes the represented function
    real-valued; for shifted supports it is real after demodulating by the
    center frequency (see :func:`real_bracket`).
    """

    support: FourierSupport
    values: np.ndarray
    conj_symmetric: bool = False

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.complex128).ravel()
        if values.shape[0] != self.support.size:
            raise InputError(
                f"expected {self.support.size} coefficients, got {values.shape[0]}"
            )
        if self.conj_symmetric:
            refl = self.support.reflection_indices
            scale = max(1.0, float(np.abs(values).max()))
            if not np.allclose(values[refl], np.conj(values), rtol=0.0, atol=1e-9 * scale):
                raise InputError(
                    "values are not conjugate-symmetric about the support center"
                )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.values))


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """|support| x N matrix whose column i is the feature map of point i."""

    support: FourierSupport
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.complex128)
        if entries.ndim != 2 or entries.shape[0] != self.support.size:
            raise InputError(
                f"entries must be {self.support.size} x N, got shape {entries.shape}"
            )
        if np.max(np.abs(np.abs(entries) - 1.0)) > 1e-12:
            raise InputError("feature-matrix entries must have unit modulus")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def count(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True, eq=False)
class GramQ:
    """Hermitian PSD Gram matrix of conjugated feature maps.

    matrix[a, b] = sum_i exp(2j*pi*(k_b - k_a) . x_i), so that
    c^H matrix c = sum_i |psi_c(x_i)|^2 for any coefficient vector c.
    """

    support: FourierSupport
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape != (self.support.size, self.support.size):
            raise InputError(
                f"matrix must be {self.support.size} square, got shape {m.shape}"
            )
        scale = max(1.0, float(np.abs(m).max()))
        if np.max(np.abs(m - m.conj().T)) > 1e-10 * scale:
            raise InputError("matrix is not Hermitian to tolerance")
        w = np.linalg.eigvalsh(m)
        if w[0] < -1e-10 * max(w[-1], 1e-30):
            raise InputError("matrix is not positive semidefinite to tolerance")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def _as_columns(points, dims: int) -> tuple[np.ndarray, bool]:
    pts = np.asarray(points, dtype=np.float64)
    single = pts.ndim == 1
    if single:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] != dims:
        raise InputError(f"points must be {dims} x N, got shape {pts.shape}")
    return pts, single


def feature_map(x, support: FourierSupport) -> np.ndarray:
    """Vector of exp(2j*pi*k.x) over the support, in support order."""
    pts, single = _as_columns(x, support.dims)
    phi = np.exp(2j * np.pi * (support.elements @ pts))
    return phi[:, 0] if single else phi


def build_feature_matrix(cloud: PointCloud, support: FourierSupport) -> FeatureMatrix:
    if cloud.dims != support.dims:
        raise InputError("point cloud and support dimensions differ")
    entries = np.exp(2j * np.pi * (support.elements @ cloud.coordinates))
    return FeatureMatrix(support, entries)


def build_gram_q(cloud: PointCloud, support: FourierSupport) -> GramQ:
    """Accumulate the coefficient-space Gram matrix of the sampled points.

    The (a, b) entry is sum_i exp(2j*pi*(k_b - k_a) . x_i); minimizing the
    induced quadratic form over unit coefficient vectors is the least-squares
    fit of a vanishing trigonometric polynomial to the points.
    """
    if cloud.dims != support.dims:
        raise InputError("point cloud and support dimensions differ")
    phi = np.exp(2j * np.pi * (support.elements @ cloud.coordinates))
    q = np.conj(phi) @ phi.T
    q = (q + q.conj().T) / 2.0
    return GramQ(support, q)


def evaluate_psi(coeffs: CoefficientVector, points):
    """Evaluate sum_k c_k exp(2j*pi*k.r) at one point (n,) or many (n, N).

    Returns real values when the coefficients are conjugate-symmetric about
    the origin, complex otherwise.
    """
    support = coeffs.support
    pts, single = _as_columns(points, support.dims)
    vals = coeffs.values @ np.exp(2j * np.pi * (support.elements @ pts))
    if coeffs.conj_symmetric and np.all(support.center == 0):
        vals = vals.real
    return vals[0] if single else vals


def psi_grid(coeffs: CoefficientVector, axes) -> np.ndarray:
    """Evaluate the trigonometric polynomial on a separable grid.

    `axes` is one 1-D coordinate array per dimension; the result has shape
    (len(axes[0]), ..., len(axes[n-1])) and is always complex.  Evaluation
    contracts one axis at a time, which is far cheaper than evaluating every
    grid point independently.
    """
    support = coeffs.support
    axes = [np.asarray(a, dtype=np.float64).ravel() for a in axes]
    if len(axes) != support.dims:
        raise InputError(f"expected {support.dims} axes, got {len(axes)}")
    lo = support.elements.min(axis=0)
    sizes = support.elements.max(axis=0) - lo + 1
    box = np.zeros(tuple(int(s) for s in sizes), dtype=np.complex128)
    box[tuple((support.elements - lo).T)] = coeffs.values
    out = box
    for a in range(support.dims):
        freqs = lo[a] + np.arange(sizes[a])
        basis = np.exp(2j * np.pi * np.outer(freqs, axes[a]))
        out = np.tensordot(out, basis, axes=([0], [0]))
    return out


def real_bracket(coeffs: CoefficientVector, points) -> np.ndarray:
    """Real zero-set indicator: psi demodulated by the support's center.

    Conjugate symmetry about the center makes exp(-2j*pi*mu.r) * psi(r) real;
    its sign changes locate the zero set even when the support itself is not
    origin-symmetric.
    """
    if not coeffs.conj_symmetric:
        raise InputError("real bracket requires conjugate-symmetric coefficients")
    support = coeffs.support
    pts, single = _as_columns(points, support.dims)
    vals = coeffs.values @ np.exp(2j * np.pi * (support.elements @ pts))
    mu = support.center
    if np.any(mu != 0):
        vals = vals * np.exp(-2j * np.pi * (mu @ pts))
    vals = vals.real
    return vals[0] if single else vals


def real_bracket_grid(coeffs: CoefficientVector, axes) -> np.ndarray:
    """Grid version of :func:`real_bracket`."""
    if not coeffs.conj_symmetric:
        raise InputError("real bracket requires conjugate-symmetric coefficients")
    out = psi_grid(coeffs, axes)
    mu = coeffs.support.center
    for a in range(coeffs.support.dims):
        if mu[a] != 0:
            shape = [1] * coeffs.support.dims
            shape[a] = -1
            out = out * np.exp(-2j * np.pi * mu[a] * np.asarray(axes[a])).reshape(shape)
    return out.real


def _reflect_conj(values: np.ndarray, refl: np.ndarray) -> np.ndarray:
    return np.conj(values[refl])


def project_conjugate_symmetric(values: np.ndarray, support: FourierSupport) -> np.ndarray:
    """Nearest conjugate-symmetric vector after an optimal global phase rotation.

    Eigen-solvers return vectors with an arbitrary global phase; rotating by
    half the phase of <v, T v> (T the reflect-and-conjugate involution) before
    averaging v with T v recovers the symmetric representative exactly when
    one exists, instead of collapsing to zero at unlucky phases.
    """
    refl = support.reflection_indices
    t_v = _reflect_conj(values, refl)
    overlap = np.vdot(values, t_v)
    nrm2 = float(np.vdot(values, values).real)
    if abs(overlap) > 1e-12 * nrm2:
        rotated = values * np.exp(1j * np.angle(overlap) / 2.0)
    else:
        rotated = values
    sym = (rotated + _reflect_conj(rotated, refl)) / 2.0
    if np.linalg.norm(sym) < 1e-12 * np.sqrt(nrm2):
        # purely anti-symmetric input: the other real combination
        sym = (rotated - _reflect_conj(rotated, refl)) / 2j
    return sym


def _fix_phase(values: np.ndarray, conj_symmetric: bool) -> np.ndarray:
    """Deterministic gauge: largest-modulus entry real positive.

    Ties are broken by the lowest index.  Conjugate-symmetric vectors only
    admit a sign flip (a general rotation would break the symmetry), so for
    them the distinguished entry gets a positive real (or, failing that,
    imaginary) part.
    """
    mags = np.abs(values)
    mmax = float(mags.max())
    if mmax == 0.0:
        return values
    idx = int(np.argmax(mags >= mmax * (1.0 - 1e-12)))
    pivot = values[idx]
    if conj_symmetric:
        if abs(pivot.real) > 1e-12 * mmax:
            return values if pivot.real > 0 else -values
        return values if pivot.imag >= 0 else -values
    return values * np.conj(pivot / abs(pivot))


def recover_coefficients(q: GramQ, rank_tol: float = DEFAULT_RANK_TOL) -> CoefficientVector:
    """Unit-norm coefficient vector minimizing the annihilation residual.

    Returns the eigenvector of the smallest eigenvalue of the Gram matrix.
    If the bottom eigenvalue is degenerate within ``rank_tol`` (relative to
    the largest), an :class:`AmbiguityWarning` carrying the degeneracy count
    is emitted and one vector from the eigenspace is returned anyway.

    The result is projected onto the conjugate-symmetric subspace when that
    raises the residual by less than ``rank_tol`` of the spectral scale,
    which removes eigen-solver phase drift for real zero sets.
    """
    w, v = np.linalg.eigh(q.matrix)
    scale = max(float(w[-1]), 1e-300)
    multiplicity = int(np.count_nonzero(w - w[0] <= rank_tol * scale))
    if multiplicity > 1:
        warnings.warn(
            AmbiguityWarning(
                f"smallest eigenvalue is {multiplicity}-fold degenerate; "
                "recovery is not unique",
                nullity=multiplicity,
            ),
            stacklevel=2,
        )
    vec = v[:, 0]
    conj_symmetric = False
    try:
        candidate = project_conjugate_symmetric(vec, q.support)
        nrm = np.linalg.norm(candidate)
        if nrm > 1e-8:
            candidate = candidate / nrm
            res_orig = float(np.vdot(vec, q.matrix @ vec).real)
            res_sym = float(np.vdot(candidate, q.matrix @ candidate).real)
            if res_sym - res_orig <= 1e-8 * scale:
                vec = candidate
                conj_symmetric = True
    except InputError:
        pass
    vec = vec / np.linalg.norm(vec)
    vec = _fix_phase(vec, conj_symmetric)
    return CoefficientVector(q.support, vec, conj_symmetric=conj_symmetric)


def nullspace_basis(q: GramQ, rank_tol: float = DEFAULT_RANK_TOL) -> list[CoefficientVector]:
    """Orthonormal eigenbasis of the near-null eigenspace of the Gram matrix.

    Eigenvectors with eigenvalue <= rank_tol * lambda_max are returned in
    ascending eigenvalue order; an empty list means the matrix is (numerically)
    positive definite.  Each basis vector annihilates every sampled point.
    """
    w, v = np.linalg.eigh(q.matrix)
    scale = max(float(w[-1]), 1e-300)
    keep = w <= rank_tol * scale
    basis = []
    for i in np.nonzero(keep)[0]:
        vec = _fix_phase(v[:, i], conj_symmetric=False)
        basis.append(CoefficientVector(q.support, vec, conj_symmetric=False))
    return basis


def _common_support(basis) -> FourierSupport:
    if not basis:
        raise InputError("expected a non-empty list of coefficient vectors")
    support = basis[0].support
    for c in basis[1:]:
        if c.support is not support and not np.array_equal(
            c.support.elements, support.elements
        ):
            raise InputError("coefficient vectors must share one support")
    return support


def sum_of_squares_field(basis, axes) -> np.ndarray:
    """Sum of |psi_i|^2 over the basis, evaluated on a separable grid.

    The result is nonnegative everywhere and vanishes exactly on the common
    zero set of the basis functions; it is invariant under unitary mixing of
    the basis, so any orthonormal nullspace basis gives the same field.
    """
    _common_support(basis)
    out = None
    for c in basis:
        vals = psi_grid(c, axes)
        term = vals.real**2 + vals.imag**2
        out = term if out is None else out + term
    return out


def sum_of_squares_at(basis, points) -> np.ndarray:
    """Sum of |psi_i|^2 over the basis at scattered points (n,) or (n, N)."""
    support = _common_support(basis)
    pts, single = _as_columns(points, support.dims)
    e = np.exp(2j * np.pi * (support.elements @ pts))
    coeff = np.stack([c.values for c in basis], axis=0)
    vals = coeff @ e
    out = np.sum(vals.real**2 + vals.imag**2, axis=0)
    return float(out[0]) if single else out


def feature_rank(fm: FeatureMatrix, rel_tol: float = DEFAULT_RANK_TOL) -> int:
    """Numerical rank of the feature matrix by relative singular-value cutoff."""
    s = np.linalg.svd(fm.entries, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))
