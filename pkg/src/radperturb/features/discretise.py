"""Grey-level discretisation of ROI intensities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyRoi

FBN = "fbn"
FBS = "fbs"

# Guards floor() against round-off right below a bin edge, so that
# rescaling intensities affinely does not move voxels between bins.
_EDGE_EPS = 1e-9


@dataclass(frozen=True)
class DiscretisationSpec:
    """Fixed bin number (``method="fbn"``, ``bins``) or fixed bin size
    (``method="fbs"``, ``bin_width`` in HU, bins start at ``fbs_anchor``)."""

    method: str
    bins: int | None = None
    bin_width: float | None = None
    fbs_anchor: float = 0.0

    def __post_init__(self):
        if self.method == FBN:
            if self.bins is None or int(self.bins) != self.bins or self.bins < 2:
                raise ValueError(f"fixed bin number needs an integer bins >= 2, got {self.bins}")
        elif self.method == FBS:
            if self.bin_width is None or not self.bin_width > 0:
                raise ValueError(f"fixed bin size needs bin_width > 0, got {self.bin_width}")
        else:
            raise ValueError(f"unknown discretisation method {self.method!r}")

    @property
    def tag(self) -> str:
        if self.method == FBN:
            return f"fbn{int(self.bins)}"
        return f"fbs{self.bin_width:g}"


@dataclass(frozen=True, eq=False)
class DiscretisedRoi:
    """Grey levels of the ROI voxels.

    ``levels`` holds one level in ``1..ng`` per ROI voxel. ``grid`` is the
    same information laid out on a (cropped) voxel grid with 0 outside the
    ROI; texture matrices need it, histogram features do not.
    """

    levels: np.ndarray
    ng: int
    grid: np.ndarray | None = None

    @property
    def n_voxels(self) -> int:
        return int(self.levels.size)


def discretise_values(intensities, spec: DiscretisationSpec) -> tuple[np.ndarray, int]:
    x = np.asarray(intensities, dtype=np.float64).ravel()
    if x.size == 0:
        raise EmptyRoi("no intensities to discretise")
    if spec.method == FBN:
        lo, hi = float(x.min()), float(x.max())
        if hi == lo:
            return np.ones(x.size, dtype=np.int32), 1
        n = int(spec.bins)
        levels = np.floor(n * (x - lo) / (hi - lo) + _EDGE_EPS).astype(np.int64) + 1
        return np.minimum(levels, n).astype(np.int32), n
    levels = np.floor((x - spec.fbs_anchor) / spec.bin_width + _EDGE_EPS).astype(np.int64) + 1
    levels = np.maximum(levels, 1).astype(np.int32)
    return levels, int(levels.max())


def discretise(intensities, spec: DiscretisationSpec) -> DiscretisedRoi:
    """Map ROI intensities to grey levels.

    Fixed bin number: ``min(floor(N (I - Imin) / (Imax - Imin)) + 1, N)``,
    and a constant ROI becomes a single level. Fixed bin size:
    ``floor((I - anchor) / w) + 1`` with ``ng`` the highest level found.
    Values below the anchor are put in the first bin.
    """
    levels, ng = discretise_values(intensities, spec)
    return DiscretisedRoi(levels, ng)


def discretise_grid(image: np.ndarray, roi: np.ndarray, spec: DiscretisationSpec) -> DiscretisedRoi:
    """Discretise ``image[roi]`` and also return the levels on the grid."""
    roi = np.asarray(roi, dtype=bool)
    levels, ng = discretise_values(image[roi], spec)
    grid = np.zeros(roi.shape, dtype=np.int32)
    grid[roi] = levels
    return DiscretisedRoi(levels, ng, grid)

