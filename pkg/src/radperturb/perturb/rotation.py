"""In-plane rotation of image and mask about the z axis."""

from __future__ import annotations

import math

import numpy as np

from ..preprocess import round_hu
from ..volume import RoiMask, Volume, check_pair


def _source_positions(dims, spacing, theta_deg):
    """Input-index coordinates sampled by each output voxel of one slice."""
    nx, ny = dims[0], dims[1]
    dx, dy = spacing[0], spacing[1]
    t = math.radians(theta_deg)
    cos_t, sin_t = math.cos(t), math.sin(t)
    # world offsets from the slice centre
    u = (np.arange(nx) - 0.5 * (nx - 1)) * dx
    v = (np.arange(ny) - 0.5 * (ny - 1)) * dy
    uu, vv = np.meshgrid(u, v, indexing="ij")
    # inverse mapping: rotate output positions by -theta
    su = cos_t * uu + sin_t * vv
    sv = -sin_t * uu + cos_t * vv
    return su / dx + 0.5 * (nx - 1), sv / dy + 0.5 * (ny - 1)


def _bilinear(data, px, py, outside_zero):
    nx, ny = data.shape[0], data.shape[1]
    inside = (px >= 0) & (px <= nx - 1) & (py >= 0) & (py <= ny - 1)
    cx = np.clip(px, 0.0, nx - 1.0)
    cy = np.clip(py, 0.0, ny - 1.0)
    x0 = np.minimum(np.floor(cx).astype(np.intp), max(nx - 2, 0))
    y0 = np.minimum(np.floor(cy).astype(np.intp), max(ny - 2, 0))
    x1 = np.minimum(x0 + 1, nx - 1)
    y1 = np.minimum(y0 + 1, ny - 1)
    wx = (cx - x0)[..., None]
    wy = (cy - y0)[..., None]
    out = (
        data[x0, y0] * (1 - wx) * (1 - wy)
        + data[x1, y0] * wx * (1 - wy)
        + data[x0, y1] * (1 - wx) * wy
        + data[x1, y1] * wx * wy
    )
    if outside_zero:
        out = np.where(inside[..., None], out, 0.0)
    return out


def rotate_inplane(volume: Volume, mask: RoiMask, theta_deg: float) -> tuple[Volume, RoiMask]:
    """Rotate every axial slice by ``theta_deg`` about its world centre.

    Positive angles turn the x axis towards the y axis. The image is sampled
    bilinearly and rounded to integer HU; the mask is sampled bilinearly and
    left fractional. Samples falling outside the slice take the nearest edge
    value for the image and zero for the mask.
    """
    check_pair(volume, mask)
    if theta_deg == 0:
        return volume, mask
    px, py = _source_positions(volume.dims, volume.spacing, theta_deg)
    image = _bilinear(volume.data, px, py, outside_zero=False)
    occupancy = np.clip(_bilinear(mask.data, px, py, outside_zero=True), 0.0, 1.0)
    return round_hu(volume.replace_data(image)), mask.replace_data(occupancy)
