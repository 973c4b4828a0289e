"""Integer frequency supports and sample-count bounds for curve recovery."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InputError


def _axis_range(size: int) -> np.ndarray:
    """Centered contiguous range of `size` integers.

    Odd sizes are symmetric about 0; even sizes keep the extra frequency on
    the negative side, e.g. size 4 -> [-2, -1, 0, 1].
    """
    if size < 1:
        raise InputError(f"support size must be >= 1, got {size}")
    lo = -(size // 2)
    return np.arange(lo, lo + size, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class FourierSupport:
    """Ordered finite set of integer frequency vectors.

    ``elements`` is an (m, dims) integer array stored in lexicographic row
    order; that ordering fixes how coefficient vectors and feature maps are
    indexed everywhere else.
    """

    dims: int
    elements: np.ndarray
    shape_tag: str = "explicit"
    sizes: tuple[int, ...] | None = None

    def __post_init__(self):
        elements = np.atleast_2d(np.asarray(self.elements, dtype=np.int64))
        if elements.ndim != 2 or elements.shape[1] != self.dims:
            raise InputError(
                f"expected frequency vectors of dimension {self.dims}, "
                f"got array of shape {elements.shape}"
            )
        if elements.shape[0] == 0:
            raise InputError("a frequency support cannot be empty")
        order = np.lexsort(elements.T[::-1])
        elements = elements[order]
        if len(np.unique(elements, axis=0)) != elements.shape[0]:
            raise InputError("frequency vectors must be distinct")
        elements.setflags(write=False)
        object.__setattr__(self, "elements", elements)
        if self.shape_tag == "rect":
            if self.sizes is None or len(self.sizes) != self.dims:
                raise InputError("rect supports need one size per axis")
            if elements.shape[0] != int(np.prod(self.sizes)):
                raise InputError("rect support element count does not match sizes")

    @classmethod
    def rect(cls, *sizes: int) -> "FourierSupport":
        """Centered rectangular support of the given per-axis sizes."""
        axes = [_axis_range(int(s)) for s in sizes]
        grids = np.meshgrid(*axes, indexing="ij")
        elements = np.stack([g.ravel() for g in grids], axis=1)
        return cls(len(sizes), elements, "rect", tuple(int(s) for s in sizes))

    @classmethod
    def ball(cls, radius: float, dims: int) -> "FourierSupport":
        """All integer vectors with Euclidean norm <= radius."""
        if radius < 0:
            raise InputError("ball radius must be nonnegative")
        r = int(np.floor(radius))
        candidates = np.array(
            list(itertools.product(range(-r, r + 1), repeat=dims)), dtype=np.int64
        )
        keep = np.sum(candidates.astype(float) ** 2, axis=1) <= radius**2
        return cls(dims, candidates[keep], "ball", None)

    @classmethod
    def explicit(cls, elements) -> "FourierSupport":
        elements = np.atleast_2d(np.asarray(elements, dtype=np.int64))
        return cls(elements.shape[1], elements, "explicit", None)

    @property
    def size(self) -> int:
        return self.elements.shape[0]

    def __len__(self) -> int:
        return self.size

    @cached_property
    def center(self) -> np.ndarray:
        """Per-axis midpoint (min+max)/2; half-integral for even extents."""
        lo = self.elements.min(axis=0)
        hi = self.elements.max(axis=0)
        return (lo + hi) / 2.0

    @cached_property
    def _index(self) -> dict:
        return {tuple(int(v) for v in row): i for i, row in enumerate(self.elements)}

    def index_of(self, k) -> int:
        key = tuple(int(v) for v in np.asarray(k).ravel())
        try:
            return self._index[key]
        except KeyError:
            raise InputError(f"frequency {key} is not in the support") from None

    def contains(self, k) -> bool:
        return tuple(int(v) for v in np.asarray(k).ravel()) in self._index

    @cached_property
    def reflection_indices(self) -> np.ndarray:
        """Permutation mapping element k to element 2*center - k.

        Raises if the support is not closed under reflection about its
        center.  Rectangular supports always are.
        """
        lo = self.elements.min(axis=0)
        hi = self.elements.max(axis=0)
        reflected = (lo + hi)[None, :] - self.elements
        perm = np.empty(self.size, dtype=np.int64)
        for i, row in enumerate(reflected):
            key = tuple(int(v) for v in row)
            if key not in self._index:
                raise InputError("support is not closed under reflection about its center")
            perm[i] = self._index[key]
        return perm

    @property
    def is_origin_symmetric(self) -> bool:
        """True when the support equals its own negation."""
        if np.any(self.center != 0):
            return False
        try:
            self.reflection_indices
        except InputError:
            return False
        return True


def shift_count(inner: FourierSupport, outer: FourierSupport) -> int:
    """Number of integer translates of `inner` fully contained in `outer`.

    For rectangular supports of sizes K_i and L_i this is prod(L_i - K_i + 1);
    other shapes are counted by explicit enumeration.
    """
    if inner.dims != outer.dims:
        raise InputError("supports must share the ambient dimension")
    if inner.shape_tag == "rect" and outer.shape_tag == "rect":
        count = 1
        for k, ell in zip(inner.sizes, outer.sizes):
            if k > ell:
                raise InputError(
                    f"inner support size {k} exceeds outer support size {ell}"
                )
            count *= ell - k + 1
        return count
    inner_lo = inner.elements.min(axis=0)
    inner_hi = inner.elements.max(axis=0)
    outer_lo = outer.elements.min(axis=0)
    outer_hi = outer.elements.max(axis=0)
    if np.any(inner_hi - inner_lo > outer_hi - outer_lo):
        raise InputError("inner support exceeds the outer support extent")
    outer_set = set(map(tuple, outer.elements.tolist()))
    count = 0
    ranges = [
        range(int(outer_lo[a] - inner_lo[a]), int(outer_hi[a] - inner_hi[a]) + 1)
        for a in range(inner.dims)
    ]
    for shift in itertools.product(*ranges):
        shifted = inner.elements + np.asarray(shift, dtype=np.int64)
        if all(tuple(row) in outer_set for row in shifted.tolist()):
            count += 1
    return count


def rank_bound(inner: FourierSupport, outer: FourierSupport) -> int:
    """Feature-matrix rank bound |outer| - (number of shifts of inner in outer)."""
    return outer.size - shift_count(inner, outer)


@dataclass(frozen=True)
class SamplingBounds:
    """Strict lower bounds on sample counts plus the minimal integers above them."""

    per_factor_bound: tuple[int, ...]
    per_factor_min: tuple[int, ...]
    total_bound: int
    total_min: int


def min_samples(
    factor_bandwidths,
    total_bandwidth,
    gamma_bandwidth=None,
) -> SamplingBounds:
    """Sample-count bounds for recovering a curve from points on its factors.

    Parameters
    ----------
    factor_bandwidths : sequence of (K1_j, K2_j) pairs, or None
        Rectangular bandwidth of each irreducible factor.  None or an empty
        sequence means a single factor equal to `total_bandwidth`.
    total_bandwidth : (K1, K2)
        Rectangular bandwidth of the full curve function.
    gamma_bandwidth : (L1, L2), optional
        Oversized support used for the recovery; when given, the bounds use
        (L1+L2) in place of (K1+K2) as the multiplier.

    Returns
    -------
    SamplingBounds
        Per-factor strict bounds base*(K1_j+K2_j), the closed-form total
        bound base*(K1+K2+2*(J-1)), and the minimal integer counts strictly
        above each bound.  The total uses the closed form rather than the sum
        of the per-factor bounds, so it is meaningful even when the factor
        list does not match the total bandwidth exactly.
    """
    k1, k2 = (int(v) for v in total_bandwidth)
    if k1 < 1 or k2 < 1:
        raise InputError("total bandwidth entries must be >= 1")
    if not factor_bandwidths:
        factor_bandwidths = [(k1, k2)]
    factors = [(int(a), int(b)) for a, b in factor_bandwidths]
    if any(a < 1 or b < 1 for a, b in factors):
        raise InputError("factor bandwidth entries must be >= 1")
    if gamma_bandwidth is not None:
        l1, l2 = (int(v) for v in gamma_bandwidth)
        if l1 < k1 or l2 < k2:
            raise InputError("oversized support must contain the total bandwidth")
        base = l1 + l2
    else:
        base = k1 + k2
    j = len(factors)
    per_bound = tuple(base * (a + b) for a, b in factors)
    total_bound = base * (k1 + k2 + 2 * (j - 1))
    return SamplingBounds(
        per_factor_bound=per_bound,
        per_factor_min=tuple(b + 1 for b in per_bound),
        total_bound=total_bound,
        total_min=total_bound + 1,
    )
