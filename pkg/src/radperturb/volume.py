"""Volumetric data model shared by every processing stage.

Arrays are indexed ``[x, y, z]`` so that ``data.shape == dims`` and
``spacing``/``origin`` line up with the array axes. ``z`` is the slice
stacking axis. World coordinates follow ``origin + index * spacing``; grids
are always axis aligned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyMask, GeometryMismatch, NotBinarised

Triple = tuple[float, float, float]


def _as_triple(values, name: str) -> Triple:
    out = tuple(float(v) for v in values)
    if len(out) != 3:
        raise ValueError(f"{name} must have three components, got {len(out)}")
    return out  # type: ignore[return-value]


@dataclass(frozen=True, eq=False)
class _Grid:
    data: np.ndarray
    spacing: Triple = (1.0, 1.0, 1.0)
    origin: Triple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64, order="C", copy=True)
        if data.ndim != 3:
            raise ValueError(f"expected a 3-D array, got shape {data.shape}")
        if min(data.shape) < 1:
            raise ValueError(f"all dimensions must be >= 1, got {data.shape}")
        spacing = _as_triple(self.spacing, "spacing")
        if min(spacing) <= 0.0:
            raise ValueError(f"spacing must be positive, got {spacing}")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "origin", _as_triple(self.origin, "origin"))

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.data.shape  # type: ignore[return-value]

    @property
    def voxel_volume(self) -> float:
        """Volume of one voxel in mm^3."""
        return self.spacing[0] * self.spacing[1] * self.spacing[2]

    def same_geometry(self, other: _Grid) -> bool:
        return (
            self.dims == other.dims
            and self.spacing == other.spacing
            and self.origin == other.origin
        )

    def replace_data(self, data: np.ndarray):
        """Return a grid of the same type and geometry holding ``data``."""
        if data.shape != self.dims:
            raise ValueError(f"shape {data.shape} does not match dims {self.dims}")
        return type(self)(data, self.spacing, self.origin)

    def world_coordinates(self, index) -> np.ndarray:
        return np.asarray(self.origin) + np.asarray(index, dtype=float) * np.asarray(self.spacing)


class Volume(_Grid):
    """Scalar image in Hounsfield units, stored as float64."""


class RoiMask(_Grid):
    """Region-of-interest occupancy in [0, 1].

    Occupancy is fractional after interpolation and binary after
    thresholding; :meth:`is_binary` tells the two apart.
    """

    def __post_init__(self):
        super().__post_init__()
        d = self.data
        if d.size and (np.nanmin(d) < 0.0 or np.nanmax(d) > 1.0 or np.isnan(d).any()):
            raise ValueError("mask occupancy must lie in [0, 1]")

    def is_binary(self) -> bool:
        return bool(np.all((self.data == 0.0) | (self.data == 1.0)))

    def as_bool(self) -> np.ndarray:
        if not self.is_binary():
            raise NotBinarised("mask holds fractional occupancy; threshold it first")
        return self.data == 1.0

    @classmethod
    def from_bool(cls, mask: np.ndarray, like: _Grid) -> RoiMask:
        return cls(mask.astype(np.float64), like.spacing, like.origin)


@dataclass(frozen=True)
class RoiPair:
    """Morphological mask and the (re-segmented) intensity mask derived from it."""

    morphological: RoiMask
    intensity: RoiMask

    def __post_init__(self):
        if not self.morphological.same_geometry(self.intensity):
            raise GeometryMismatch("morphological and intensity masks differ in geometry")
        if np.any(self.intensity.data > self.morphological.data):
            raise ValueError("intensity mask must be a subset of the morphological mask")


def check_pair(volume: Volume, mask: RoiMask) -> None:
    if not volume.same_geometry(mask):
        raise GeometryMismatch(
            f"volume {volume.dims}/{volume.spacing}/{volume.origin} and mask "
            f"{mask.dims}/{mask.spacing}/{mask.origin} do not share a grid"
        )


def count_voxels(mask: RoiMask) -> int:
    """Number of voxels inside a binarised mask."""
    return int(np.count_nonzero(mask.as_bool()))


def roi_bounding_box(mask: RoiMask) -> tuple[np.ndarray, np.ndarray]:
    """Inclusive lower and exclusive upper index bounds of the non-zero occupancy."""
    idx = np.argwhere(mask.data > 0.0)
    if idx.size == 0:
        raise EmptyMask("mask contains no voxels")
    return idx.min(axis=0), idx.max(axis=0) + 1


def crop_slices(volume: Volume, mask: RoiMask, margin: float) -> tuple[slice, slice, slice]:
    """Index slices of the mask bounding box grown by ``ceil(margin / spacing)`` voxels."""
    check_pair(volume, mask)
    lo, hi = roi_bounding_box(mask)
    pad = np.array([math.ceil(margin / s) for s in volume.spacing], dtype=int)
    lo = np.maximum(lo - pad, 0)
    hi = np.minimum(hi + pad, np.array(volume.dims))
    return tuple(slice(int(a), int(b)) for a, b in zip(lo, hi))


def crop_to_roi(volume: Volume, mask: RoiMask, margin: float) -> tuple[Volume, RoiMask]:
    """Crop volume and mask to the mask bounding box plus ``margin`` mm per side.

    The margin is converted to ``ceil(margin / spacing)`` voxels per axis and
    the box is clipped to the grid. The origin moves so every retained voxel
    keeps its world position.
    """
    sl = crop_slices(volume, mask, margin)
    origin = tuple(o + s.start * d for o, s, d in zip(volume.origin, sl, volume.spacing))
    return (
        Volume(volume.data[sl], volume.spacing, origin),
        RoiMask(mask.data[sl], mask.spacing, origin),
    )
