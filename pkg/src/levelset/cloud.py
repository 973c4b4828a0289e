"""Point clouds on the centered unit box and their CSV serialization."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import InputError, PointCloudFormatError

DOMAIN_HALF_WIDTH = 0.5


@dataclass(frozen=True, eq=False)
class PointCloud:
    """N points in [-1/2, 1/2]^n stored as the columns of an n x N matrix."""

    coordinates: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coordinates, dtype=np.float64)
        if coords.ndim != 2:
            raise InputError(f"coordinates must be an n x N matrix, got shape {coords.shape}")
        if coords.shape[1] < 1:
            raise InputError("a point cloud needs at least one point")
        if not np.all(np.isfinite(coords)):
            raise InputError("coordinates must be finite")
        if np.any(np.abs(coords) > DOMAIN_HALF_WIDTH):
            raise InputError(
                "coordinates must lie in the centered unit box [-1/2, 1/2]^n"
            )
        coords.setflags(write=False)
        object.__setattr__(self, "coordinates", coords)

    @classmethod
    def from_rows(cls, rows) -> "PointCloud":
        """Build from an (N, n) array of points-as-rows."""
        return cls(np.asarray(rows, dtype=np.float64).T)

    @property
    def dims(self) -> int:
        return self.coordinates.shape[0]

    @property
    def count(self) -> int:
        return self.coordinates.shape[1]

    @property
    def rows(self) -> np.ndarray:
        """(N, n) view, one point per row (the CSV layout)."""
        return self.coordinates.T


def save_csv(cloud: PointCloud, path) -> None:
    """Write one point per row with header x0,...,x{n-1}.

    Floats are printed with 17 significant digits so that load(save(x)) == x.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(f"x{i}" for i in range(cloud.dims)) + "\n")
        for row in cloud.rows:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def load_csv(path) -> PointCloud:
    """Parse a point-cloud CSV, reporting the offending row on failure."""
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise PointCloudFormatError(f"cannot read point-cloud file: {exc}") from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise PointCloudFormatError("empty point-cloud file")
        header = [h.strip() for h in header]
        expected = [f"x{i}" for i in range(len(header))]
        if header != expected:
            raise PointCloudFormatError(
                f"bad header {header!r}, expected {expected!r}"
            )
        dims = len(header)
        rows = []
        for idx, row in enumerate(reader):
            if not row:
                continue
            if len(row) != dims:
                raise PointCloudFormatError(
                    f"row {idx} has {len(row)} fields, expected {dims}", row=idx
                )
            try:
                values = [float(v) for v in row]
            except ValueError:
                raise PointCloudFormatError(
                    f"row {idx} contains a non-numeric field", row=idx
                ) from None
            if not all(np.isfinite(values)):
                raise PointCloudFormatError(
                    f"row {idx} contains NaN or infinite coordinates", row=idx
                )
            if any(abs(v) > DOMAIN_HALF_WIDTH for v in values):
                raise PointCloudFormatError(
                    f"row {idx} lies outside [-1/2, 1/2]^n", row=idx
                )
            rows.append(values)
    if not rows:
        raise PointCloudFormatError("point-cloud file has a header but no points")
    return PointCloud.from_rows(np.asarray(rows, dtype=np.float64))
