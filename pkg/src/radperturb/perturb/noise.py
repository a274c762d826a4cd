"""Noise level estimation and Gaussian noise addition."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..errors import VolumeTooSmall
from ..preprocess import round_hu
from ..seeding import make_rng
from ..volume import Volume

# Decomposition high-pass filter of the coiflet-1 wavelet.
COIF1_HIGHPASS = np.array(
    [
        0.07273261951252645,
        0.3378976624574818,
        -0.8525720202116004,
        0.3848648468648578,
        0.07273261951252645,
        -0.015655728135791993,
    ]
)

NOISE_CONSTANT = 0.6754
MAD_CONSTANT = 0.6745


@dataclass(frozen=True)
class NoiseEstimate:
    sigma_noise: float

    def __post_init__(self):
        if not self.sigma_noise >= 0.0:
            raise ValueError(f"noise level must be non-negative, got {self.sigma_noise}")


def highpass_xy(data: np.ndarray) -> np.ndarray:
    """Cascade the coiflet-1 high-pass along x then y; z is left alone."""
    out = ndimage.convolve1d(np.asarray(data, dtype=np.float64), COIF1_HIGHPASS, axis=0, mode="reflect")
    return ndimage.convolve1d(out, COIF1_HIGHPASS, axis=1, mode="reflect")


def estimate_noise_sigma(volume: Volume, constant: float = NOISE_CONSTANT) -> NoiseEstimate:
    """Estimate the noise standard deviation of an image.

    The image is high-pass filtered in-plane and the median absolute filter
    response is divided by ``constant``. The default is 0.6754; pass
    :data:`MAD_CONSTANT` for the usual Gaussian MAD normalisation.
    """
    nx, ny, _ = volume.dims
    if nx < len(COIF1_HIGHPASS) or ny < len(COIF1_HIGHPASS):
        raise VolumeTooSmall(
            f"in-plane size {nx}x{ny} is smaller than the {len(COIF1_HIGHPASS)}-tap filter"
        )
    diff = np.abs(highpass_xy(volume.data))
    # the taps sum to ~1e-16, not 0; drop round-off so flat images give exactly 0
    scale = float(np.max(np.abs(volume.data)))
    diff[diff <= 1e-12 * scale] = 0.0
    return NoiseEstimate(float(np.median(diff) / constant))


def add_noise(volume: Volume, estimate: NoiseEstimate, seed: int) -> Volume:
    """Add i.i.d. Gaussian noise with the estimated deviation, then round to HU."""
    if estimate.sigma_noise == 0.0:
        return round_hu(volume)
    noise = make_rng(seed).normal(0.0, estimate.sigma_noise, size=volume.dims)
    return round_hu(volume.replace_data(volume.data + noise))
