"""Contour randomisation through supervoxel selection."""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from ..errors import EmptyMask
from ..preprocess import ResegmentationSpec
from ..seeding import make_rng
from ..volume import RoiMask, Volume, crop_slices, crop_to_roi
from .slic import slic_supervoxels
from .volume_adaptation import STRUCTURE_6

CROP_MARGIN_MM = 25.0
ALWAYS_SELECT = 0.90
NEVER_SELECT = 0.20


def supervoxel_overlaps(labels: np.ndarray, roi: np.ndarray) -> np.ndarray:
    """Fraction of each supervoxel that lies inside ``roi``, indexed by label."""
    flat = labels.ravel()
    size = np.bincount(flat)
    inside = np.bincount(flat, weights=roi.ravel().astype(np.float64), minlength=size.size)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(size > 0, inside / np.maximum(size, 1), 0.0)


def select_supervoxels(overlaps: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Boolean selection per supervoxel.

    One uniform number is drawn for every supervoxel in label order, whether
    or not it is needed, so the draws do not depend on the overlap values.
    Overlaps of at least 0.9 are always kept, overlaps under 0.2 never; in
    between a supervoxel is kept with probability equal to its overlap. The
    supervoxel with the largest overlap (lowest label on ties) is always
    kept so that the result is never empty.
    """
    overlaps = np.asarray(overlaps, dtype=np.float64)
    draws = rng.random(overlaps.size)
    chosen = (overlaps >= ALWAYS_SELECT) | ((overlaps >= NEVER_SELECT) & (draws < overlaps))
    if overlaps.size and overlaps.max() > 0:
        chosen[int(np.argmax(overlaps))] = True
    return chosen


def close_mask(roi: np.ndarray) -> np.ndarray:
    """Morphological closing with the 6-neighbour element; the grid edge counts as outside."""
    padded = np.pad(roi, 1)
    closed = ndimage.binary_closing(padded, structure=STRUCTURE_6)
    return closed[1:-1, 1:-1, 1:-1]


def randomize_contour(
    volume: Volume,
    mask: RoiMask,
    reseg: ResegmentationSpec,
    seed: int,
    margin: float = CROP_MARGIN_MM,
) -> RoiMask:
    """Replace the mask by a random union of supervoxels that follows its outline."""
    roi = mask.as_bool()
    if not roi.any():
        raise EmptyMask("cannot randomise the contour of an empty mask")
    sl = crop_slices(volume, mask, margin)
    sub, _ = crop_to_roi(volume, mask, margin)
    labels = slic_supervoxels(sub, reseg)
    chosen = select_supervoxels(supervoxel_overlaps(labels, roi[sl]), make_rng(seed))
    out = np.zeros(roi.shape, dtype=bool)
    out[sl] = close_mask(chosen[labels])
    return RoiMask.from_bool(out, mask)
