"""Texture matrix features: GLCM, GLRLM, GLSZM, GLDZM, NGTDM and NGLDM.

All functions take a :class:`DiscretisedRoi` whose ``grid`` holds levels
``1..ng`` inside the ROI and 0 outside. Neighbourhoods are 3-D with
Chebyshev distance 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .. import _kernels
from ..errors import EmptyRoi
from .discretise import DiscretisedRoi
from .partial import Partial

GLCM_NAMES = (
    "joint_max",
    "joint_entropy",
    "asm",
    "contrast",
    "dissimilarity",
    "inv_diff",
    "inv_diff_moment",
    "correlation",
)
GLRLM_NAMES = ("sre", "lre", "lgre", "hgre", "glnu", "rlnu", "rp")
GLSZM_NAMES = ("sze", "lze", "glnu", "zsnu", "zp")
GLDZM_NAMES = ("sde", "lde", "glnu", "zdnu")
NGTDM_NAMES = ("coarseness", "contrast", "busyness", "complexity", "strength")
NGLDM_NAMES = ("lde", "hde", "dcnu", "dce")

COARSENESS_CAP = 1e6


def _grid(d: DiscretisedRoi) -> np.ndarray:
    if d.grid is None:
        raise ValueError("texture features need the levels laid out on a grid")
    if not np.any(d.grid > 0):
        raise EmptyRoi("no voxels in the ROI")
    return np.ascontiguousarray(d.grid, dtype=np.int32)


def _entropy(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p))) + 0.0


def features_glcm(d: DiscretisedRoi) -> Partial:
    """Co-occurrence features averaged over the 13 directions.

    Directions without any voxel pair are left out of the average, and so
    are directions where the correlation is undefined (zero variance).
    """
    grid = _grid(d)
    ng = d.ng
    mats = _kernels.glcm_matrices(grid, ng)
    totals = mats.sum(axis=(1, 2))
    used = totals > 0
    if not used.any():
        return Partial.all_missing(GLCM_NAMES, "no voxel pairs")
    p = mats[used] / totals[used, None, None]
    i = np.arange(1, ng + 1, dtype=np.float64)
    ii, jj = np.meshgrid(i, i, indexing="ij")
    diff = np.abs(ii - jj)
    logp = np.log2(np.where(p > 0, p, 1.0))
    per_dir = (
        p.max(axis=(1, 2)),
        -np.sum(p * logp, axis=(1, 2)) + 0.0,
        np.sum(p * p, axis=(1, 2)),
        np.sum(diff * diff * p, axis=(1, 2)),
        np.sum(diff * p, axis=(1, 2)),
        np.sum(p / (1.0 + diff), axis=(1, 2)),
        np.sum(p / (1.0 + diff * diff), axis=(1, 2)),
    )
    out = Partial((name, float(np.mean(v))) for name, v in zip(GLCM_NAMES[:-1], per_dir))
    pi = p.sum(axis=2)
    mu = pi @ i
    var = np.sum((i[None, :] - mu[:, None]) ** 2 * pi, axis=1)
    ok = var > 0
    if ok.any():
        cross = np.sum(ii * jj * p[ok], axis=(1, 2))
        out["correlation"] = float(np.mean((cross - mu[ok] ** 2) / var[ok]))
    else:
        out.missing("correlation", "zero variance")
    return out


def features_glrlm(d: DiscretisedRoi) -> Partial:
    """Run-length features averaged over the 13 directions."""
    grid = _grid(d)
    n_voxels = int(np.count_nonzero(grid))
    mats = _kernels.glrlm_matrices(grid, d.ng)
    i = np.arange(1, d.ng + 1, dtype=np.float64)[:, None]
    j = np.arange(1, mats.shape[2] + 1, dtype=np.float64)[None, :]
    rows = []
    for r in mats:
        ns = r.sum()
        rows.append(
            (
                np.sum(r / (j * j)) / ns,
                np.sum(r * j * j) / ns,
                np.sum(r / (i * i)) / ns,
                np.sum(r * i * i) / ns,
                np.sum(r.sum(axis=1) ** 2) / ns,
                np.sum(r.sum(axis=0) ** 2) / ns,
                ns / n_voxels,
            )
        )
    mean = np.mean(np.array(rows), axis=0)
    return Partial(zip(GLRLM_NAMES, (float(v) for v in mean)))


@dataclass(frozen=True, eq=False)
class Zones:
    """26-connected zones of equal level.

    ``labels`` numbers zones ``1..n`` in raster order of their first voxel
    (0 outside the ROI); ``level`` and ``size`` are indexed by zone - 1.
    """

    labels: np.ndarray
    level: np.ndarray
    size: np.ndarray

    @property
    def count(self) -> int:
        return int(self.level.size)


def find_zones(grid: np.ndarray) -> Zones:
    labels, n = _kernels.zone_labels(grid)
    flat = labels.ravel()
    inside = flat > 0
    size = np.bincount(flat[inside] - 1, minlength=n)
    level = np.zeros(n, dtype=np.int64)
    level[flat[inside] - 1] = grid.ravel()[inside]
    return Zones(labels, level, size)


def _non_uniformity(values: np.ndarray) -> float:
    counts = np.bincount(values)
    return float(np.sum(counts.astype(np.float64) ** 2) / values.size)


def features_glszm(d: DiscretisedRoi, zones: Zones | None = None) -> Partial:
    grid = _grid(d)
    z = zones if zones is not None else find_zones(grid)
    s = z.size.astype(np.float64)
    return Partial(
        sze=float(np.mean(1.0 / (s * s))),
        lze=float(np.mean(s * s)),
        glnu=_non_uniformity(z.level),
        zsnu=_non_uniformity(z.size),
        zp=z.count / int(np.count_nonzero(grid)),
    )


def border_distance(morph: np.ndarray) -> np.ndarray:
    """City-block distance of each mask voxel to the outside; border voxels get 1."""
    padded = np.pad(np.asarray(morph, dtype=bool), 1)
    dist = ndimage.distance_transform_cdt(padded, metric="taxicab")
    return dist[1:-1, 1:-1, 1:-1]


def features_gldzm(d: DiscretisedRoi, morph: np.ndarray, zones: Zones | None = None) -> Partial:
    """Distance-zone features; a zone's distance is its smallest voxel distance
    to the border of the morphological mask ``morph`` (same grid as ``d``)."""
    grid = _grid(d)
    z = zones if zones is not None else find_zones(grid)
    dist = border_distance(morph).ravel()
    flat = z.labels.ravel()
    inside = flat > 0
    zd = np.full(z.count, np.iinfo(np.int64).max, dtype=np.int64)
    np.minimum.at(zd, flat[inside] - 1, dist[inside].astype(np.int64))
    zf = zd.astype(np.float64)
    return Partial(
        sde=float(np.mean(1.0 / (zf * zf))),
        lde=float(np.mean(zf * zf)),
        glnu=_non_uniformity(z.level),
        zdnu=_non_uniformity(zd),
    )


def features_ngtdm(d: DiscretisedRoi) -> Partial:
    """Neighbourhood grey-tone difference features.

    Only voxels with at least one ROI neighbour take part. Coarseness is
    capped at 1e6 when all differences vanish; busyness and strength are 0
    when their denominators vanish.
    """
    grid = _grid(d)
    level_sum, n_valid, _ = _kernels.neighbourhood_stats(grid)
    ok = (grid > 0) & (n_valid > 0)
    n_vc = int(np.count_nonzero(ok))
    if n_vc == 0:
        return Partial.all_missing(NGTDM_NAMES, "no valid neighbourhood")
    lv = grid[ok].astype(np.int64)
    abs_diff = np.abs(lv - level_sum[ok] / n_valid[ok])
    ng = d.ng
    s = np.bincount(lv - 1, weights=abs_diff, minlength=ng)
    n = np.bincount(lv - 1, minlength=ng).astype(np.float64)
    present = n > 0
    p = n[present] / n_vc
    s = s[present]
    i = np.arange(1, ng + 1, dtype=np.float64)[present]
    ngp = p.size

    ps = float(np.sum(p * s))
    s_total = float(np.sum(s))
    di = i[:, None] - i[None, :]
    pi, pj = p[:, None], p[None, :]

    coarseness = COARSENESS_CAP if ps == 0 else min(1.0 / ps, COARSENESS_CAP)
    if ngp > 1:
        contrast = float(np.sum(pi * pj * di * di)) / (ngp * (ngp - 1)) * s_total / n_vc
    else:
        contrast = 0.0
    bus_den = float(np.sum(np.abs(i[:, None] * pi - i[None, :] * pj)))
    busyness = 0.0 if bus_den == 0 else ps / bus_den
    complexity = float(np.sum(np.abs(di) * (pi * s[:, None] + pj * s[None, :]) / (pi + pj))) / n_vc
    strength = 0.0 if s_total == 0 else float(np.sum((pi + pj) * di * di)) / s_total
    return Partial(
        coarseness=coarseness,
        contrast=contrast,
        busyness=busyness,
        complexity=complexity,
        strength=strength,
    )


def features_ngldm(d: DiscretisedRoi) -> Partial:
    """Neighbouring grey-level dependence features with coarseness 0.

    The dependence of a voxel is one plus the number of ROI neighbours that
    share its level.
    """
    grid = _grid(d)
    _, _, n_equal = _kernels.neighbourhood_stats(grid)
    roi = grid > 0
    lv = grid[roi].astype(np.int64)
    dep = n_equal[roi].astype(np.int64) + 1
    ns = lv.size
    jf = dep.astype(np.float64)
    joint = np.bincount((lv - 1) * 27 + (dep - 1), minlength=d.ng * 27) / ns
    return Partial(
        lde=float(np.mean(1.0 / (jf * jf))),
        hde=float(np.mean(jf * jf)),
        dcnu=_non_uniformity(dep),
        dce=_entropy(joint),
    )
