"""Seeded synthetic CT-like volumes: a textured ellipsoid in a uniform background."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import SpecInvalid
from .preprocess import gaussian_prefilter, round_hu
from .seeding import derive_seed, make_rng
from .volume import RoiMask, Volume

_TEXTURE_STREAM = 11
_NOISE_STREAM = 12


def _triple(values, name, cast=float):
    try:
        out = tuple(cast(v) for v in values)
    except TypeError:
        out = (cast(values),) * 3
    if len(out) != 3:
        raise SpecInvalid(f"{name} needs three components")
    return out


@dataclass(frozen=True)
class PhantomSpec:
    """Geometry and intensity model of a phantom.

    ``semi_axes`` and ``centre`` are in mm; ``centre=None`` puts the
    ellipsoid in the middle of the grid. Inside the ellipsoid the intensity
    is ``base_hu`` plus a smooth random field with standard deviation
    ``modulation`` HU and Gaussian correlation length ``correlation_mm``.
    Independent noise of ``noise_sigma`` HU is added everywhere.
    """

    dims: tuple[int, int, int] = (48, 48, 48)
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0)
    semi_axes: tuple[float, float, float] = (12.0, 10.0, 8.0)
    centre: tuple[float, float, float] | None = None
    base_hu: float = 40.0
    modulation: float = 30.0
    correlation_mm: float = 3.0
    noise_sigma: float = 10.0
    background_hu: float = -100.0
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        dims = _triple(self.dims, "dims", int)
        spacing = _triple(self.spacing, "spacing")
        axes = _triple(self.semi_axes, "semi_axes")
        origin = _triple(self.origin, "origin")
        if any(d < 1 for d in dims):
            raise SpecInvalid(f"dims must be positive, got {dims}")
        if any(not s > 0 for s in spacing) or any(not a > 0 for a in axes):
            raise SpecInvalid("spacing and semi-axes must be positive")
        if not self.noise_sigma >= 0 or not self.modulation >= 0 or not self.correlation_mm >= 0:
            raise SpecInvalid("noise, modulation and correlation length must be non-negative")
        if self.centre is None:
            centre = tuple(o + 0.5 * (n - 1) * s for o, n, s in zip(origin, dims, spacing))
        else:
            centre = _triple(self.centre, "centre")
        for c, a, o, n, s in zip(centre, axes, origin, dims, spacing):
            if c - a < o or c + a > o + (n - 1) * s:
                raise SpecInvalid("ellipsoid does not fit inside the grid")
        for name, value in (("dims", dims), ("spacing", spacing), ("semi_axes", axes)):
            object.__setattr__(self, name, value)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "centre", centre)


@dataclass(frozen=True)
class AcquisitionDelta:
    """How the retest image differs: noise scaled by ``noise_scale`` and a
    Gaussian blur of ``smoothing_sigma`` voxels."""

    noise_scale: float = 1.0
    smoothing_sigma: float = 0.0

    def __post_init__(self):
        if not self.noise_scale >= 0 or not self.smoothing_sigma >= 0:
            raise SpecInvalid("noise scale and smoothing must be non-negative")


def occupancy(spec: PhantomSpec) -> np.ndarray:
    """Fraction of 8 sub-voxel points (offsets of +-1/4 voxel) inside the ellipsoid."""
    axes_idx = [np.arange(n, dtype=np.float64) for n in spec.dims]
    occ = np.zeros(spec.dims)
    for offs in itertools.product((-0.25, 0.25), repeat=3):
        r2 = 0.0
        for ax, (idx, off) in enumerate(zip(axes_idx, offs)):
            w = spec.origin[ax] + (idx + off) * spec.spacing[ax]
            t = ((w - spec.centre[ax]) / spec.semi_axes[ax]) ** 2
            shape = [1, 1, 1]
            shape[ax] = -1
            r2 = r2 + t.reshape(shape)
        occ += r2 <= 1.0
    return occ / 8.0


def _texture(spec: PhantomSpec, seed: int) -> np.ndarray:
    if spec.modulation == 0:
        return np.zeros(spec.dims)
    field = make_rng(derive_seed(seed, 0, _TEXTURE_STREAM)).standard_normal(spec.dims)
    if spec.correlation_mm > 0:
        sigmas = [spec.correlation_mm / s for s in spec.spacing]
        field = gaussian_prefilter(Volume(field, spec.spacing, spec.origin), sigmas).data
    sd = field.std()
    return field * (spec.modulation / sd) if sd > 0 else field


def _clean_image(spec: PhantomSpec, occ: np.ndarray, seed: int) -> np.ndarray:
    inside = spec.base_hu + _texture(spec, seed)
    return spec.background_hu + occ * (inside - spec.background_hu)


def _noise(spec: PhantomSpec, seed: int) -> np.ndarray:
    return make_rng(derive_seed(seed, 0, _NOISE_STREAM)).standard_normal(spec.dims)


def generate_phantom(spec: PhantomSpec, seed: int) -> tuple[Volume, RoiMask]:
    """Phantom image (integer HU) and its fractional ellipsoid mask."""
    occ = occupancy(spec)
    data = _clean_image(spec, occ, seed) + spec.noise_sigma * _noise(spec, seed)
    vol = round_hu(Volume(data, spec.spacing, spec.origin))
    return vol, RoiMask(occ, spec.spacing, spec.origin)


def generate_retest_pair(
    spec: PhantomSpec,
    delta: AcquisitionDelta,
    seed: int,
    retest_noise_seed: int | None = None,
) -> tuple[tuple[Volume, RoiMask], tuple[Volume, RoiMask]]:
    """Two acquisitions of the same phantom.

    Both share the texture field. The retest image reuses the test noise
    draws scaled by ``noise_scale`` unless ``retest_noise_seed`` is given,
    in which case its noise is drawn independently. The retest image is then
    blurred by ``smoothing_sigma`` voxels along every axis.
    """
    occ = occupancy(spec)
    clean = _clean_image(spec, occ, seed)
    noise1 = _noise(spec, seed)
    noise2 = noise1 if retest_noise_seed is None else _noise(spec, retest_noise_seed)
    first = Volume(clean + spec.noise_sigma * noise1, spec.spacing, spec.origin)
    second = Volume(clean + spec.noise_sigma * delta.noise_scale * noise2, spec.spacing, spec.origin)
    if delta.smoothing_sigma > 0:
        second = gaussian_prefilter(second, (delta.smoothing_sigma,) * 3)
    mask = RoiMask(occ, spec.spacing, spec.origin)
    return (round_hu(first), mask), (round_hu(second), mask)
