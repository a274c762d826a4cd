"""Feature schema and extraction for one processed image."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import RadPerturbError
from ..seeding import derive_seed
from ..volume import RoiPair, Volume, roi_bounding_box
from .discretise import FBN, FBS, DiscretisationSpec, discretise, discretise_grid
from .morphology import MORPH_NAMES, features_morphology
from .partial import Partial
from .spatial import SPATIAL_NAMES, moran_geary
from .statistics import (
    HIST_NAMES,
    IVH_NAMES,
    STAT_NAMES,
    features_intensity_histogram,
    features_intensity_stats,
    features_ivh,
)
from .texture import (
    GLCM_NAMES,
    GLDZM_NAMES,
    GLRLM_NAMES,
    GLSZM_NAMES,
    NGLDM_NAMES,
    NGTDM_NAMES,
    features_glcm,
    features_gldzm,
    features_glrlm,
    features_glszm,
    features_ngldm,
    features_ngtdm,
    find_zones,
)

SPATIAL_STREAM = 4

# Families computed once per spacing, then once per (spacing, discretisation).
SPACING_FAMILIES = (
    ("stat", STAT_NAMES),
    ("morph", MORPH_NAMES),
    ("ivh", IVH_NAMES),
    ("spatial", SPATIAL_NAMES),
)
DISCRETISED_FAMILIES = (
    ("hist", HIST_NAMES),
    ("glcm", GLCM_NAMES),
    ("glrlm", GLRLM_NAMES),
    ("glszm", GLSZM_NAMES),
    ("gldzm", GLDZM_NAMES),
    ("ngtdm", NGTDM_NAMES),
    ("ngldm", NGLDM_NAMES),
)


def spacing_tag(spacing: float) -> str:
    return f"{spacing:g}mm"


def feature_id(family: str, name: str, spacing: float, disc: DiscretisationSpec | None = None) -> str:
    """Stable identifier such as ``glcm.contrast@fbn32@2mm``."""
    middle = f"@{disc.tag}" if disc is not None else ""
    return f"{family}.{name}{middle}@{spacing_tag(spacing)}"


@dataclass(frozen=True)
class FeatureConfig:
    """Spacings and discretisations making up the feature schema."""

    spacings: tuple[float, ...] = (1.0, 2.0, 3.0, 4.0)
    discretisations: tuple[DiscretisationSpec, ...] = ()
    spatial_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "spacings", tuple(float(s) for s in self.spacings))
        object.__setattr__(self, "discretisations", tuple(self.discretisations))
        if not self.spacings or any(not s > 0 for s in self.spacings):
            raise ValueError("spacings must be a non-empty list of positive values")
        if len(set(self.spacings)) != len(self.spacings):
            raise ValueError("spacings must be unique")
        tags = [d.tag for d in self.discretisations]
        if len(set(tags)) != len(tags):
            raise ValueError("discretisations must be unique")

    @classmethod
    def default(cls, fbs_anchor: float, spatial_seed: int = 0) -> FeatureConfig:
        discs = [DiscretisationSpec(FBN, bins=b) for b in (8, 16, 32, 64)]
        discs += [DiscretisationSpec(FBS, bin_width=w, fbs_anchor=fbs_anchor) for w in (6, 12, 18, 24)]
        return cls(spacings=(1.0, 2.0, 3.0, 4.0), discretisations=tuple(discs), spatial_seed=spatial_seed)


def spacing_schema(config: FeatureConfig, spacing: float) -> list[str]:
    ids = [feature_id(f, n, spacing) for f, names in SPACING_FAMILIES for n in names]
    for disc in config.discretisations:
        ids += [feature_id(f, n, spacing, disc) for f, names in DISCRETISED_FAMILIES for n in names]
    return ids


def schema(config: FeatureConfig) -> list[str]:
    """Ordered feature identifiers for a configuration."""
    ids = []
    for s in config.spacings:
        ids += spacing_schema(config, s)
    return ids


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """Feature values in schema order, with a reason for each missing value."""

    ids: tuple[str, ...]
    values: np.ndarray
    reasons: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (len(self.ids),):
            raise ValueError("one value per feature id is required")
        values.flags.writeable = False
        object.__setattr__(self, "ids", tuple(self.ids))
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.ids)

    def __getitem__(self, fid: str) -> float:
        return float(self.values[self.ids.index(fid)])

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.ids, self.values.tolist()))

    def identical(self, other: FeatureVector) -> bool:
        """Bitwise equality of ids, values (NaN payloads included) and reasons."""
        return (
            self.ids == other.ids
            and self.values.tobytes() == other.values.tobytes()
            and self.reasons == other.reasons
        )

    @classmethod
    def concat(cls, parts) -> FeatureVector:
        parts = list(parts)
        ids = [i for p in parts for i in p.ids]
        values = np.concatenate([p.values for p in parts]) if parts else np.empty(0)
        reasons = {}
        for p in parts:
            reasons.update(p.reasons)
        return cls(tuple(ids), values, reasons)

    @classmethod
    def missing(cls, ids, reason: str) -> FeatureVector:
        ids = tuple(ids)
        return cls(ids, np.full(len(ids), math.nan), {i: reason for i in ids})


def _run(family: str, names, fn, *args) -> Partial:
    try:
        out = fn(*args)
    except RadPerturbError as exc:
        return Partial.all_missing(names, type(exc).__name__)
    return out


def _collect(store_ids, store_vals, reasons, family, names, part, spacing, disc=None):
    for n in names:
        fid = feature_id(family, n, spacing, disc)
        store_ids.append(fid)
        store_vals.append(part[n])
        if n in part.reasons:
            reasons[fid] = part.reasons[n]


def extract_spacing(volume: Volume, pair: RoiPair, config: FeatureConfig, spacing: float) -> FeatureVector:
    """Features of one processed image at one spacing.

    ``pair`` holds the morphological and intensity masks. Morphology uses
    the former, everything else the latter, except that zone distances are
    measured to the border of the morphological mask.
    """
    morph = pair.morphological.as_bool()
    inten = pair.intensity.as_bool()
    lo, hi = roi_bounding_box(pair.morphological)
    box = tuple(slice(int(a), int(b)) for a, b in zip(lo, hi))
    image = volume.data[box]
    morph = morph[box]
    inten = inten[box]
    values = image[inten]

    idx = np.argwhere(inten)
    positions = idx * np.asarray(volume.spacing)
    index = config.spacings.index(spacing) if spacing in config.spacings else 0
    spatial_seed = derive_seed(config.spatial_seed, index, SPATIAL_STREAM)

    ids, vals, reasons = [], [], {}
    first = (
        ("stat", STAT_NAMES, features_intensity_stats, (values,)),
        ("morph", MORPH_NAMES, features_morphology, (morph, volume.spacing)),
        ("ivh", IVH_NAMES, features_ivh, (values,)),
        ("spatial", SPATIAL_NAMES, moran_geary, (values, positions, spatial_seed)),
    )
    for family, names, fn, args in first:
        _collect(ids, vals, reasons, family, names, _run(family, names, fn, *args), spacing)

    for disc in config.discretisations:
        try:
            d = discretise_grid(image, inten, disc)
        except RadPerturbError as exc:
            for family, names in DISCRETISED_FAMILIES:
                part = Partial.all_missing(names, type(exc).__name__)
                _collect(ids, vals, reasons, family, names, part, spacing, disc)
            continue
        zones = find_zones(d.grid)
        second = (
            ("hist", HIST_NAMES, features_intensity_histogram, (d,)),
            ("glcm", GLCM_NAMES, features_glcm, (d,)),
            ("glrlm", GLRLM_NAMES, features_glrlm, (d,)),
            ("glszm", GLSZM_NAMES, features_glszm, (d, zones)),
            ("gldzm", GLDZM_NAMES, features_gldzm, (d, morph, zones)),
            ("ngtdm", NGTDM_NAMES, features_ngtdm, (d,)),
            ("ngldm", NGLDM_NAMES, features_ngldm, (d,)),
        )
        for family, names, fn, args in second:
            _collect(ids, vals, reasons, family, names, _run(family, names, fn, *args), spacing, disc)
    return FeatureVector(tuple(ids), np.array(vals, dtype=np.float64), reasons)


__all__ = [
    "DiscretisationSpec",
    "FeatureConfig",
    "FeatureVector",
    "discretise",
    "extract_spacing",
    "feature_id",
    "schema",
    "spacing_schema",
]
