"""Pure numpy implementations of the hot kernels.

These mirror ``_ckernels.pyx`` function for function. Integer outputs are
identical between the two; floating point results of the SLIC assignment
step are identical too because both evaluate the same expression in the
same order.
"""

import numpy as np
from scipy import ndimage

from .directions import DIRECTIONS, NEIGHBOURS


def _shift_slices(offset, shape):
    src, dst = [], []
    for o, n in zip(offset, shape):
        if o >= 0:
            src.append(slice(0, n - o))
            dst.append(slice(o, n))
        else:
            src.append(slice(-o, n))
            dst.append(slice(0, n + o))
    return tuple(src), tuple(dst)


def glcm_matrices(levels, ng):
    """Symmetric co-occurrence counts for the 13 directions, shape (13, ng, ng)."""
    levels = np.asarray(levels, dtype=np.int32)
    out = np.zeros((len(DIRECTIONS), ng, ng), dtype=np.float64)
    for k, d in enumerate(DIRECTIONS):
        src, dst = _shift_slices(d, levels.shape)
        a = levels[src]
        b = levels[dst]
        valid = (a > 0) & (b > 0)
        idx = (a[valid].astype(np.int64) - 1) * ng + (b[valid] - 1)
        counts = np.bincount(idx, minlength=ng * ng).reshape(ng, ng).astype(np.float64)
        out[k] = counts + counts.T
    return out


def glrlm_matrices(levels, ng):
    """Run-length counts for the 13 directions, shape (13, ng, max(levels.shape))."""
    levels = np.asarray(levels, dtype=np.int32)
    shape = levels.shape
    max_run = max(shape)
    out = np.zeros((len(DIRECTIONS), ng, max_run), dtype=np.float64)
    padded = np.pad(levels, 1)
    roi = levels > 0
    coords = np.nonzero(roi)
    lv = levels[roi]
    extent = np.array(shape) + 2 * max_run + 1
    for k, d in enumerate(DIRECTIONS):
        d = np.array(d)
        prev = padded[tuple(slice(1 - o, n + 1 - o) for o, n in zip(d, shape))]
        nxt = padded[tuple(slice(1 + o, n + 1 + o) for o, n in zip(d, shape))]
        starts = (prev != levels)[roi]
        ends = (nxt != levels)[roi]
        axis = int(np.flatnonzero(d)[0])
        t = coords[axis] * d[axis]
        base = [c - t * o + max_run for c, o in zip(coords, d)]
        key = np.ravel_multi_index(base, extent)
        s_order = np.lexsort((t[starts], key[starts]))
        e_order = np.lexsort((t[ends], key[ends]))
        t_s = t[starts][s_order]
        t_e = t[ends][e_order]
        run_len = t_e - t_s + 1
        run_lv = lv[starts][s_order]
        np.add.at(out[k], (run_lv - 1, run_len - 1), 1.0)
    return out


def neighbourhood_stats(levels):
    """Per-voxel 26-neighbourhood sums over ROI voxels.

    Returns ``(level_sum, n_valid, n_equal)``: the sum of neighbour levels,
    the number of neighbours inside the ROI and the number of neighbours
    sharing the centre level. Voxels outside the ROI get zeros.
    """
    levels = np.asarray(levels, dtype=np.int32)
    shape = levels.shape
    padded = np.pad(levels, 1)
    level_sum = np.zeros(shape, dtype=np.float64)
    n_valid = np.zeros(shape, dtype=np.int32)
    n_equal = np.zeros(shape, dtype=np.int32)
    for d in NEIGHBOURS:
        nb = padded[tuple(slice(1 + o, n + 1 + o) for o, n in zip(d, shape))]
        inside = nb > 0
        level_sum += nb
        n_valid += inside
        n_equal += inside & (nb == levels)
    outside = levels <= 0
    level_sum[outside] = 0.0
    n_valid[outside] = 0
    n_equal[outside] = 0
    return level_sum, n_valid, n_equal


def slic_assign(image, centres, half_window, spatial_weight, labels, distance):
    """One SLIC assignment sweep, updating ``labels`` and ``distance`` in place.

    ``centres`` rows are ``(intensity, x, y, z)``. Each centre competes for
    voxels in a cube of ``half_window`` voxels around it; a voxel moves to a
    centre only if the combined distance is strictly smaller, so ties go to
    the lower centre index.
    """
    nx, ny, nz = image.shape
    for k in range(centres.shape[0]):
        c, cx, cy, cz = centres[k]
        x0 = max(int(cx) - half_window, 0)
        x1 = min(int(cx) + half_window + 1, nx)
        y0 = max(int(cy) - half_window, 0)
        y1 = min(int(cy) + half_window + 1, ny)
        z0 = max(int(cz) - half_window, 0)
        z1 = min(int(cz) + half_window + 1, nz)
        if x0 >= x1 or y0 >= y1 or z0 >= z1:
            continue
        dx = np.arange(x0, x1, dtype=np.float64)[:, None, None] - cx
        dy = np.arange(y0, y1, dtype=np.float64)[None, :, None] - cy
        dz = np.arange(z0, z1, dtype=np.float64)[None, None, :] - cz
        diff = image[x0:x1, y0:y1, z0:z1] - c
        ds = dx * dx + dy * dy + dz * dz
        dist = diff * diff + ds * spatial_weight
        win_d = distance[x0:x1, y0:y1, z0:z1]
        better = dist < win_d
        win_d[better] = dist[better]
        labels[x0:x1, y0:y1, z0:z1][better] = k


def moran_geary(values, coords):
    """Moran's I and Geary's C with inverse-distance weights for one voxel set."""
    x = np.asarray(values, dtype=np.float64)
    p = np.asarray(coords, dtype=np.float64)
    n = x.shape[0]
    diff = p[:, None, :] - p[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    np.fill_diagonal(dist, np.inf)
    w = 1.0 / dist
    dev = x - x.mean()
    den = (dev * dev).sum()
    wsum = w.sum()
    moran = n / wsum * (dev @ w @ dev) / den
    geary = (n - 1) / (2.0 * wsum) * (w * (x[:, None] - x[None, :]) ** 2).sum() / den
    return float(moran), float(geary)


def zone_labels(levels):
    """Label 26-connected zones of equal level.

    Returns ``(labels, n)`` with labels ``1..n`` numbered in raster order of
    each zone's first voxel and 0 outside the ROI.
    """
    levels = np.asarray(levels, dtype=np.int32)
    out = np.zeros(levels.shape, dtype=np.int64)
    structure = np.ones((3, 3, 3), dtype=bool)
    offset = 0
    for level in np.unique(levels[levels > 0]):
        lab, n = ndimage.label(levels == level, structure=structure)
        inside = lab > 0
        out[inside] = lab[inside] + offset
        offset += n
    if offset == 0:
        return out.astype(np.int32), 0
    flat = out.ravel()
    nz = flat > 0
    _, first = np.unique(flat[nz], return_index=True)
    order = np.argsort(first)
    remap = np.zeros(offset + 1, dtype=np.int32)
    remap[1 + order] = np.arange(1, offset + 1, dtype=np.int32)
    return remap[out], offset
