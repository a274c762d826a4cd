"""Processing of one image into feature vectors, with or without perturbation.

Perturbed instances follow a fixed order: rotation, noise addition,
translation with interpolation, intensity rounding, mask thresholding,
volume adaptation, contour randomisation, re-segmentation and feature
extraction. Rotation and noise act on the original grid; the remaining
steps are repeated for every configured spacing.
"""

from __future__ import annotations

import logging
import os
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .errors import RadPerturbError
from .features import FeatureConfig, FeatureVector, extract_spacing, schema, spacing_schema
from .perturb import (
    NOISE_CONSTANT,
    NoiseEstimate,
    PerturbationSpec,
    adapt_volume,
    add_noise,
    estimate_noise_sigma,
    randomize_contour,
    rotate_inplane,
)
from .preprocess import (
    InterpolationSpec,
    ResegmentationSpec,
    resample,
    resegment,
    round_hu,
    threshold_mask,
)
from .volume import RoiMask, Volume, check_pair

log = logging.getLogger(__name__)

PARTIAL_VOLUME_THRESHOLD = 0.5


@dataclass(frozen=True)
class ProcessingConfig:
    reseg: ResegmentationSpec
    features: FeatureConfig
    beta: float = 0.93
    noise_constant: float = NOISE_CONSTANT
    mask_threshold: float = PARTIAL_VOLUME_THRESHOLD

    @property
    def spacings(self) -> tuple[float, ...]:
        return self.features.spacings

    def schema(self) -> list[str]:
        return schema(self.features)


@dataclass(frozen=True, eq=False)
class InstanceResult:
    index: int
    features: FeatureVector
    reason: str = field(default="")


def _spacing_features(volume, mask, spacing, config, perturbation):
    """Resample, binarise, optionally perturb the mask, re-segment, extract."""
    shift = perturbation.shift if perturbation is not None else (0.0, 0.0, 0.0)
    vol, occ = resample(volume, mask, InterpolationSpec(spacing, config.beta, shift))
    vol = round_hu(vol)
    morph = threshold_mask(occ, config.mask_threshold)
    if perturbation is not None:
        if perturbation.volume_fraction != 0:
            morph = adapt_volume(morph, perturbation.volume_fraction, perturbation.volume_seed)
        if perturbation.randomise_contour:
            morph = randomize_contour(vol, morph, config.reseg, perturbation.contour_seed)
    pair = resegment(vol, morph, config.reseg)
    return extract_spacing(vol, pair, config.features, spacing)


def _per_spacing(volume, mask, config, perturbation) -> FeatureVector:
    parts = []
    for spacing in config.spacings:
        try:
            parts.append(_spacing_features(volume, mask, spacing, config, perturbation))
        except RadPerturbError as exc:
            parts.append(
                FeatureVector.missing(spacing_schema(config.features, spacing), type(exc).__name__)
            )
    return FeatureVector.concat(parts)


def extract_unperturbed(volume: Volume, mask: RoiMask, config: ProcessingConfig) -> FeatureVector:
    """Reference features: interpolation, rounding, thresholding, re-segmentation
    and extraction at every configured spacing, without any perturbation."""
    check_pair(volume, mask)
    return _per_spacing(volume, mask, config, None)


def process_instance(
    volume: Volume,
    mask: RoiMask,
    perturbation: PerturbationSpec,
    config: ProcessingConfig,
    noise: NoiseEstimate | None = None,
) -> FeatureVector:
    """Features of one perturbed instance of ``(volume, mask)``.

    ``noise`` must be the estimate obtained on the original image; it is
    computed here when missing.
    """
    check_pair(volume, mask)
    vol, occ = rotate_inplane(volume, mask, perturbation.rotation_deg)
    if perturbation.add_noise:
        if noise is None:
            noise = estimate_noise_sigma(volume, config.noise_constant)
        vol = add_noise(vol, noise, perturbation.noise_seed)
    return _per_spacing(vol, occ, config, perturbation)


def extract_all(
    volume: Volume,
    mask: RoiMask,
    config: ProcessingConfig,
    perturbation: PerturbationSpec | None = None,
    noise: NoiseEstimate | None = None,
) -> FeatureVector:
    """Full feature vector over all spacings and discretisations.

    Takes the original image and mask; with ``perturbation`` the instance is
    perturbed first. Failures of single families or spacings show up as NaN
    entries with a reason and never abort the vector.
    """
    if perturbation is None:
        return extract_unperturbed(volume, mask, config)
    return process_instance(volume, mask, perturbation, config, noise)


def _worker(args):
    volume, mask, perturbation, config, noise = args
    try:
        fv = process_instance(volume, mask, perturbation, config, noise)
    except RadPerturbError as exc:
        log.warning("instance %d failed: %s", perturbation.index, exc)
        fv = FeatureVector.missing(config.schema(), type(exc).__name__)
    return perturbation.index, fv


def resolve_threads(threads: int | None) -> int:
    if threads is None or threads <= 0:
        return os.cpu_count() or 1
    return threads


def run_instances(
    volume: Volume,
    mask: RoiMask,
    perturbations: Sequence[PerturbationSpec],
    config: ProcessingConfig,
    threads: int = 1,
) -> list[FeatureVector]:
    """Process many instances of one image, in instance order.

    The noise level is estimated once on the original image when any
    instance needs it. With ``threads > 1`` instances run in worker
    processes; results are reordered so the output never depends on it.
    """
    noise = None
    if any(p.add_noise for p in perturbations):
        try:
            noise = estimate_noise_sigma(volume, config.noise_constant)
        except RadPerturbError:
            noise = None  # every noisy instance then fails on its own
    jobs = [(volume, mask, p, config, noise) for p in perturbations]
    threads = resolve_threads(threads)
    if threads == 1 or len(jobs) <= 1:
        results = [_worker(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(threads, len(jobs))) as pool:
            results = list(pool.map(_worker, jobs))
    results.sort(key=lambda r: r[0])
    return [fv for _, fv in results]
