"""Growing or shrinking a mask to a target voxel count."""

from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

from ..errors import EmptyMask
from ..seeding import make_rng
from ..volume import RoiMask

# Centre voxel plus its six face neighbours.
STRUCTURE_6 = ndimage.generate_binary_structure(3, 1)


def target_count(n_voxels: int, tau: float) -> int:
    # the tiny guard keeps e.g. 100 * (1 + 0.07) from flooring to 106
    return math.floor(n_voxels * (1.0 + tau) + 1e-9)


def adapt_volume(mask: RoiMask, tau: float, seed: int) -> RoiMask:
    """Change the mask volume by the fraction ``tau``.

    The mask is dilated (``tau > 0``) or eroded (``tau < 0``) with the
    6-neighbour structuring element until one more step would overshoot the
    target count ``floor(V0 * (1 + tau))``. The remaining difference is
    made up by adding or removing randomly chosen voxels of the rim between
    the last accepted mask and the overshooting one.
    """
    if not tau > -1.0:
        raise ValueError(f"tau must exceed -1, got {tau}")
    roi = mask.as_bool()
    v0 = int(np.count_nonzero(roi))
    if v0 == 0:
        raise EmptyMask("cannot adapt the volume of an empty mask")
    if tau == 0:
        return mask

    v_target = target_count(v0, tau)
    grow = tau > 0
    op = ndimage.binary_dilation if grow else ndimage.binary_erosion
    kept, v_kept = roi, v0
    while True:
        nxt = op(kept, structure=STRUCTURE_6)
        v_next = int(np.count_nonzero(nxt))
        if v_next == 0:
            break
        if grow and v_next > v_target:
            break
        if not grow and v_next < v_target:
            break
        if v_next == v_kept:
            # dilation saturated the grid; nothing left to add
            break
        kept, v_kept = nxt, v_next

    n_change = abs(v_target - v_kept)
    if n_change:
        rim = np.flatnonzero(np.logical_xor(nxt, kept))
        n_change = min(n_change, rim.size)
        chosen = make_rng(seed).choice(rim, size=n_change, replace=False)
        kept = kept.copy().ravel()
        kept[chosen] = grow
        kept = kept.reshape(roi.shape)
    return RoiMask.from_bool(kept, mask)
