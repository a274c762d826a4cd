"""First-order features: intensity statistics, intensity histogram and the
intensity-volume histogram."""

from __future__ import annotations

import math

import numpy as np

from ..errors import EmptyRoi
from .discretise import DiscretisedRoi
from .partial import Partial

STAT_NAMES = (
    "mean",
    "variance",
    "skewness",
    "kurtosis",
    "median",
    "minimum",
    "p10",
    "p90",
    "maximum",
    "iqr",
    "range",
    "mad",
    "rmad",
    "medad",
    "cov",
    "qcod",
    "energy",
    "rms",
)
HIST_NAMES = ("mean", "variance", "skewness", "kurtosis", "median", "mode", "entropy", "uniformity")
IVH_PERCENTILES = (10, 25, 50, 75, 90)
IVH_NAMES = (
    *(f"v{p}" for p in IVH_PERCENTILES),
    *(f"i{p}" for p in IVH_PERCENTILES),
    "v10_v90",
    "i10_i90",
)


def _values(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size == 0:
        raise EmptyRoi("no voxels in the ROI")
    return x


def _moments(x: np.ndarray) -> tuple[float, float, float, float]:
    """Mean, population variance, skewness and excess kurtosis.

    Skewness and kurtosis are set to 0 when the variance vanishes.
    """
    mu = x.mean()
    dev = x - mu
    m2 = np.mean(dev * dev)
    if m2 == 0:
        return float(mu), 0.0, 0.0, 0.0
    m3 = np.mean(dev**3)
    m4 = np.mean(dev**4)
    return float(mu), float(m2), float(m3 / m2**1.5), float(m4 / (m2 * m2) - 3.0)


def features_intensity_stats(intensities) -> Partial:
    x = _values(intensities)
    mu, var, skew, kurt = _moments(x)
    p10, p25, med, p75, p90 = np.percentile(x, [10, 25, 50, 75, 90])
    inner = x[(x >= p10) & (x <= p90)]
    out = Partial(
        mean=mu,
        variance=var,
        skewness=skew,
        kurtosis=kurt,
        median=float(med),
        minimum=float(x.min()),
        p10=float(p10),
        p90=float(p90),
        maximum=float(x.max()),
        iqr=float(p75 - p25),
        range=float(x.max() - x.min()),
        mad=float(np.mean(np.abs(x - mu))),
        rmad=math.nan,
        medad=float(np.mean(np.abs(x - med))),
    )
    if inner.size == 0:
        # tiny ROIs can have no voxel between the interpolated p10 and p90
        out.missing("rmad", "empty robust range")
    else:
        out["rmad"] = float(np.mean(np.abs(inner - inner.mean())))
    if mu == 0:
        out.missing("cov", "zero mean")
    else:
        out["cov"] = math.sqrt(var) / mu
    if p75 + p25 == 0:
        out.missing("qcod", "zero quartile sum")
    else:
        out["qcod"] = float((p75 - p25) / (p75 + p25))
    out["energy"] = float(np.sum(x * x))
    out["rms"] = math.sqrt(out["energy"] / x.size)
    return out


def features_intensity_histogram(d: DiscretisedRoi) -> Partial:
    """Statistics of the discretised grey levels; entropy is in bits."""
    x = _values(d.levels)
    mu, var, skew, kurt = _moments(x)
    counts = np.bincount(d.levels.astype(np.int64))
    p = counts[counts > 0] / x.size
    return Partial(
        mean=mu,
        variance=var,
        skewness=skew,
        kurtosis=kurt,
        median=float(np.median(x)),
        mode=float(np.argmax(counts)),
        entropy=float(-np.sum(p * np.log2(p))) + 0.0,
        uniformity=float(np.sum(p * p)),
    )


def features_ivh(intensities, percentiles=IVH_PERCENTILES) -> Partial:
    """Volume and intensity percentiles of the intensity-volume histogram.

    Intensities are stepped in 1 HU increments from the ROI minimum. The
    intensity fraction of a level ``i`` is ``(i - min) / (max - min)``.
    ``v<x>`` is the fraction of voxels at or above the first level whose
    intensity fraction reaches ``x`` %. ``i<x>`` is the lowest level at which
    at most ``x`` % of the volume has that intensity or more. A constant ROI
    has every ``v<x>`` equal to 1.
    """
    x = _values(intensities)
    n = x.size
    xs = np.sort(x)
    lo, hi = float(xs[0]), float(xs[-1])
    span = hi - lo
    steps = lo + np.arange(math.ceil(span) + 2)

    def frac_at_least(level):
        return (n - np.searchsorted(xs, level, side="left")) / n

    nu = frac_at_least(steps)
    out = Partial()
    for p in percentiles:
        if span == 0:
            out[f"v{p}"] = 1.0
        else:
            # small guard against 0.1 * 30 evaluating to 3.0000000000000004
            k = math.ceil(p / 100.0 * span - 1e-9)
            out[f"v{p}"] = float(frac_at_least(lo + k))
    for p in percentiles:
        first = int(np.argmax(nu <= p / 100.0 + 1e-12))
        out[f"i{p}"] = float(steps[first])
    if 10 in percentiles and 90 in percentiles:
        out["v10_v90"] = out["v10"] - out["v90"]
        out["i10_i90"] = out["i10"] - out["i90"]
    return out
