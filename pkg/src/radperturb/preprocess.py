"""Image processing ahead of feature computation.

Anti-aliased resampling to an isotropic grid, rounding to integer Hounsfield
units, partial-volume thresholding of the interpolated mask and intensity
re-segmentation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import EmptyIntensityMask, EmptyMask, InvalidBeta
from .volume import RoiMask, RoiPair, Volume, check_pair


@dataclass(frozen=True)
class InterpolationSpec:
    target_spacing: float
    beta: float = 0.93
    shift: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not self.target_spacing > 0:
            raise ValueError(f"target_spacing must be positive, got {self.target_spacing}")
        if not 0.0 < self.beta <= 1.0:
            raise InvalidBeta(f"beta must lie in (0, 1], got {self.beta}")
        shift = tuple(float(s) for s in self.shift)
        if len(shift) != 3 or any(not 0.0 <= s < 1.0 for s in shift):
            raise ValueError(f"shift components must lie in [0, 1), got {self.shift}")
        object.__setattr__(self, "shift", shift)


@dataclass(frozen=True)
class ResegmentationSpec:
    range_low: float
    range_high: float
    outlier_sigma: float = 3.0

    def __post_init__(self):
        if not self.range_low < self.range_high:
            raise ValueError(f"empty re-segmentation range [{self.range_low}, {self.range_high}]")
        if not self.outlier_sigma > 0:
            raise ValueError("outlier_sigma must be positive")


def gaussian_sigma(beta: float, d_in: float, d_out: float) -> float:
    """Width of the anti-aliasing Gaussian in voxels of the input grid.

    ``sigma**2 = -8 * (d_out / d_in)**2 * ln(beta)``; ``beta`` closer to 1
    means less smoothing, and ``beta = 1`` disables the filter.
    """
    if not 0.0 < beta <= 1.0:
        raise InvalidBeta(f"beta must lie in (0, 1], got {beta}")
    if d_in <= 0 or d_out <= 0:
        raise ValueError("spacings must be positive")
    if beta == 1.0:
        return 0.0
    return (d_out / d_in) * math.sqrt(-8.0 * math.log(beta))


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Unit-sum sampled Gaussian truncated at ``ceil(4 * sigma)``."""
    radius = math.ceil(4.0 * sigma)
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def gaussian_prefilter(volume: Volume, sigma_per_axis) -> Volume:
    """Separable Gaussian smoothing with reflective boundaries.

    ``sigma_per_axis`` is in voxel units; axes with zero sigma are untouched.
    """
    data = volume.data
    for axis, sigma in enumerate(sigma_per_axis):
        if sigma < 0:
            raise ValueError("sigma must be non-negative")
        if sigma > 0:
            data = ndimage.correlate1d(data, gaussian_kernel(sigma), axis=axis, mode="reflect")
    if data is volume.data:
        return volume
    return volume.replace_data(data)


def output_positions(n_in: int, d_in: float, d_out: float, shift: float) -> np.ndarray:
    """Sample positions of the resampled grid, in input index units.

    Both grids share the centre of their world bounding boxes before the
    output grid is moved by ``shift * d_out``.
    """
    n_out = max(1, math.ceil(n_in * d_in / d_out - 1e-9))
    offset = 0.5 * (n_in - 1) * d_in - 0.5 * (n_out - 1) * d_out + shift * d_out
    return (offset + np.arange(n_out) * d_out) / d_in


def _interp_axis(data: np.ndarray, pos: np.ndarray, axis: int, outside_zero: bool) -> np.ndarray:
    n = data.shape[axis]
    if n == 1:
        out = np.take(data, np.zeros(len(pos), dtype=np.intp), axis=axis)
        if outside_zero:
            keep = pos == 0.0
            shape = [1, 1, 1]
            shape[axis] = len(pos)
            out = out * keep.reshape(shape)
        return out
    p = np.clip(pos, 0.0, n - 1.0)
    i0 = np.minimum(np.floor(p).astype(np.intp), n - 2)
    w = p - i0
    shape = [1, 1, 1]
    shape[axis] = len(pos)
    w = w.reshape(shape)
    out = np.take(data, i0, axis=axis) * (1.0 - w) + np.take(data, i0 + 1, axis=axis) * w
    if outside_zero:
        inside = ((pos >= 0.0) & (pos <= n - 1.0)).reshape(shape)
        out = np.where(inside, out, 0.0)
    return out


def trilinear(data: np.ndarray, positions, outside_zero: bool = False) -> np.ndarray:
    """Trilinear interpolation on an axis-aligned sample lattice.

    ``positions`` holds one array of input-index coordinates per axis. On a
    lattice trilinear interpolation factorises into three 1-D passes.
    Out-of-range samples take the nearest edge value, or zero when
    ``outside_zero`` is set.
    """
    out = data
    for axis, pos in enumerate(positions):
        out = _interp_axis(out, np.asarray(pos, dtype=np.float64), axis, outside_zero)
    return out


def resample(volume: Volume, mask: RoiMask, spec: InterpolationSpec) -> tuple[Volume, RoiMask]:
    """Resample image and mask to isotropic ``spec.target_spacing``.

    The image is low-pass filtered along every axis that is being
    downsampled; the mask is interpolated unfiltered and stays fractional.
    """
    check_pair(volume, mask)
    d_out = spec.target_spacing
    sigmas = [
        gaussian_sigma(spec.beta, d_in, d_out) if d_out > d_in else 0.0 for d_in in volume.spacing
    ]
    smoothed = gaussian_prefilter(volume, sigmas)
    positions = [
        output_positions(n, d_in, d_out, eta)
        for n, d_in, eta in zip(volume.dims, volume.spacing, spec.shift)
    ]
    origin = tuple(o + p[0] * d for o, p, d in zip(volume.origin, positions, volume.spacing))
    spacing = (d_out, d_out, d_out)
    image = trilinear(smoothed.data, positions)
    occupancy = np.clip(trilinear(mask.data, positions, outside_zero=True), 0.0, 1.0)
    return Volume(image, spacing, origin), RoiMask(occupancy, spacing, origin)


def round_hu(volume: Volume) -> Volume:
    """Round to the nearest integer, halves away from zero."""
    d = volume.data
    return volume.replace_data(np.sign(d) * np.floor(np.abs(d) + 0.5))


def threshold_mask(mask: RoiMask, threshold: float = 0.5) -> RoiMask:
    """Binarise a fractional mask; occupancy equal to the threshold is kept."""
    return mask.replace_data((mask.data >= threshold).astype(np.float64))


def resegment(volume: Volume, morphological: RoiMask, spec: ResegmentationSpec) -> RoiPair:
    """Derive the intensity mask by range and outlier re-segmentation.

    Voxels outside ``[range_low, range_high]`` are dropped first. The mean and
    population standard deviation of the remaining voxels then define the
    outlier band; voxels strictly further than ``outlier_sigma`` deviations
    from the mean are dropped as well.
    """
    check_pair(volume, morphological)
    roi = morphological.as_bool()
    if not roi.any():
        raise EmptyMask("morphological mask is empty")
    img = volume.data
    keep = roi & (img >= spec.range_low) & (img <= spec.range_high)
    if not keep.any():
        raise EmptyIntensityMask("no ROI voxel lies inside the re-segmentation range")
    values = img[keep]
    mu = values.mean()
    sd = values.std()
    if sd > 0.0:
        keep &= ~(np.abs(img - mu) > spec.outlier_sigma * sd)
    return RoiPair(morphological, RoiMask.from_bool(keep, morphological))
