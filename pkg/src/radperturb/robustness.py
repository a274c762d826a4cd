"""ICC(1,1) with confidence intervals and robustness summaries."""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DegenerateVariance, SchemaMismatch, TooFewSubjects, ZeroSpread

ROBUST_THRESHOLD = 0.90
BIAS_Z_CRITICAL = 1.96


@dataclass(frozen=True, eq=False)
class MeasurementMatrix:
    """``n x k`` table of one feature: rows are subjects, columns repeated
    measurements (perturbation instances or images)."""

    values: np.ndarray
    subject_ids: tuple = ()
    column_labels: tuple = ()

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(f"expected a 2-D table, got shape {values.shape}")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        n, k = values.shape
        ids = tuple(self.subject_ids) or tuple(range(n))
        labels = tuple(self.column_labels) or tuple(range(k))
        if len(ids) != n or len(labels) != k:
            raise ValueError("subject ids and column labels must match the table shape")
        object.__setattr__(self, "subject_ids", ids)
        object.__setattr__(self, "column_labels", labels)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def complete_rows(self) -> tuple[MeasurementMatrix, int]:
        """Drop subjects with any missing value; returns the table and the drop count."""
        keep = np.all(np.isfinite(self.values), axis=1)
        ids = tuple(s for s, kp in zip(self.subject_ids, keep) if kp)
        return MeasurementMatrix(self.values[keep], ids, self.column_labels), int((~keep).sum())


@dataclass(frozen=True)
class IccResult:
    icc: float
    ci_low: float
    ci_high: float
    n_used: int
    k: int
    n_dropped: int = 0


@dataclass(frozen=True)
class RobustnessLabel:
    robust: bool
    threshold: float = ROBUST_THRESHOLD
    reason: str = ""


@dataclass(frozen=True)
class ConfusionSummary:
    """Perturbation labels (test) against reference labels.

    ``fp`` counts features robust only under the test condition, ``fn``
    those robust only under the reference.
    """

    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def fractions(self) -> dict[str, float]:
        t = self.total
        return {k: (getattr(self, k) / t if t else math.nan) for k in ("tp", "tn", "fp", "fn")}


def _row_means(x: np.ndarray) -> np.ndarray:
    # constant rows keep their exact value, so perfect agreement gives ICC = 1
    means = x.mean(axis=1)
    constant = np.all(x == x[:, :1], axis=1)
    return np.where(constant, x[:, 0], means)


def mean_squares(x: np.ndarray) -> tuple[float, float]:
    """Between- and within-subject mean squares of a one-way ANOVA."""
    n, k = x.shape
    rm = _row_means(x)
    grand = rm.mean() if not np.all(rm == rm[0]) else rm[0]
    ssb = k * float(np.sum((rm - grand) ** 2))
    ssw = float(np.sum((x - rm[:, None]) ** 2))
    return ssb / (n - 1), ssw / (n * (k - 1))


def icc_1_1(m: MeasurementMatrix | np.ndarray, alpha: float = 0.05) -> IccResult:
    """One-way random effects, single measurement ICC with an F-based interval.

    ``ICC = (MSB - MSW) / (MSB + (k - 1) MSW)``. The ``1 - alpha`` interval
    uses ``F = MSB / MSW`` scaled down and up by the ``1 - alpha/2`` F
    quantiles. Subjects with missing values are dropped first.
    """
    if not isinstance(m, MeasurementMatrix):
        m = MeasurementMatrix(m)
    m, dropped = m.complete_rows()
    n, k = m.shape
    if n < 2 or k < 2:
        raise TooFewSubjects(f"ICC needs at least 2 subjects and 2 measurements, got {n}x{k}")
    msb, msw = mean_squares(m.values)
    if msb == 0 and msw == 0:
        raise DegenerateVariance("all measurements are identical")
    icc = (msb - msw) / (msb + (k - 1) * msw)
    if msw == 0:
        return IccResult(1.0, 1.0, 1.0, n, k, dropped)
    f = msb / msw
    q = 1.0 - alpha / 2.0
    f_low = f / stats.f.ppf(q, n - 1, n * (k - 1))
    f_high = f * stats.f.ppf(q, n * (k - 1), n - 1)
    lo = (f_low - 1.0) / (f_low + k - 1.0)
    hi = (f_high - 1.0) / (f_high + k - 1.0)
    return IccResult(float(icc), float(lo), float(hi), n, k, dropped)


def average_perturbation_icc(icc_image1: float, icc_image2: float) -> float:
    """Mean of the perturbation ICCs of the two images; NaN if either is NaN."""
    return (icc_image1 + icc_image2) / 2.0


def classify(icc: float, threshold: float = ROBUST_THRESHOLD) -> RobustnessLabel:
    """Robust when ``icc >= threshold``; an undetermined ICC counts as non-robust."""
    if icc is None or not math.isfinite(icc):
        return RobustnessLabel(False, threshold, "undetermined")
    return RobustnessLabel(bool(icc >= threshold), threshold)


def pooled_bias_z(differences: Sequence[float], n_effective: int = 1) -> float:
    """Location statistic ``sqrt(n) * mean / sd`` of per-feature ICC differences.

    Non-finite differences are ignored. The standard deviation is the sample
    one (``ddof=1``).
    """
    d = np.asarray(differences, dtype=np.float64)
    d = d[np.isfinite(d)]
    if d.size < 2:
        raise TooFewSubjects("need at least two finite differences")
    if np.all(d == d[0]):
        raise ZeroSpread("differences have zero spread")
    return math.sqrt(n_effective) * float(d.mean()) / float(d.std(ddof=1))


def bias_significant(z: float) -> bool:
    return abs(z) >= BIAS_Z_CRITICAL


def _as_bool(label) -> bool:
    return bool(label.robust) if isinstance(label, RobustnessLabel) else bool(label)


def confusion(reference: Mapping[str, object], test: Mapping[str, object]) -> ConfusionSummary:
    """Tabulate test (perturbation) labels against reference labels per feature."""
    if set(reference) != set(test):
        raise SchemaMismatch("reference and test cover different features")
    tp = tn = fp = fn = 0
    for fid in reference:
        r, t = _as_bool(reference[fid]), _as_bool(test[fid])
        if r and t:
            tp += 1
        elif not r and not t:
            tn += 1
        elif t:
            fp += 1
        else:
            fn += 1
    return ConfusionSummary(tp, tn, fp, fn)
