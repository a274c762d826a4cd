"""Spatial autocorrelation of ROI intensities (Moran's I and Geary's C)."""

from __future__ import annotations

import math

import numpy as np

from .. import _kernels
from ..errors import ZeroVariance
from ..seeding import make_rng
from .partial import Partial

SPATIAL_NAMES = ("moran_i", "geary_c")
SUBSAMPLE = 100
SEM_TARGET = 0.002
MIN_REPEATS = 10
MAX_REPEATS = 1000


def moran_geary(intensities, positions, seed: int, subsample: int = SUBSAMPLE) -> Partial:
    """Moran's I and Geary's C with inverse-distance weights.

    ``positions`` are voxel centres in mm. ROIs of at most ``subsample``
    voxels are evaluated exactly once. Larger ROIs are evaluated on random
    subsets of ``subsample`` voxels until the standard error of both running
    means falls below 0.002, with at least 10 and at most 1000 subsets.
    The number of evaluations used is stored on the result as
    ``repetitions``.
    """
    x = np.asarray(intensities, dtype=np.float64).ravel()
    pos = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
    if x.size < 2 or np.all(x == x[0]):
        raise ZeroVariance("spatial autocorrelation needs at least two distinct intensities")
    if x.size <= subsample:
        m, g = _kernels.moran_geary(x, pos)
        out = Partial(moran_i=m, geary_c=g)
        out.repetitions = 1
        return out

    rng = make_rng(seed)
    morans, gearys = [], []
    for repeat in range(1, MAX_REPEATS + 1):
        pick = np.sort(rng.choice(x.size, size=subsample, replace=False))
        sub = x[pick]
        if np.all(sub == sub[0]):
            continue
        m, g = _kernels.moran_geary(sub, pos[pick])
        morans.append(m)
        gearys.append(g)
        k = len(morans)
        if k >= MIN_REPEATS:
            sem_m = np.std(morans, ddof=1) / math.sqrt(k)
            sem_g = np.std(gearys, ddof=1) / math.sqrt(k)
            if sem_m < SEM_TARGET and sem_g < SEM_TARGET:
                break
    if not morans:
        raise ZeroVariance("every subsample had constant intensity")
    out = Partial(moran_i=float(np.mean(morans)), geary_c=float(np.mean(gearys)))
    out.repetitions = repeat
    return out
