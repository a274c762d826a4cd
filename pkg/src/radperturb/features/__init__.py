"""Radiomic features computed on processed images and masks."""

from .discretise import FBN, FBS, DiscretisationSpec, DiscretisedRoi, discretise, discretise_grid
from .extract import FeatureConfig, FeatureVector, extract_spacing, feature_id, schema, spacing_schema
from .morphology import features_morphology
from .partial import Partial
from .spatial import moran_geary
from .statistics import features_intensity_histogram, features_intensity_stats, features_ivh
from .texture import (
    features_glcm,
    features_gldzm,
    features_glrlm,
    features_glszm,
    features_ngldm,
    features_ngtdm,
)

__all__ = [
    "FBN",
    "FBS",
    "DiscretisationSpec",
    "DiscretisedRoi",
    "FeatureConfig",
    "FeatureVector",
    "Partial",
    "discretise",
    "discretise_grid",
    "extract_spacing",
    "feature_id",
    "features_glcm",
    "features_gldzm",
    "features_glrlm",
    "features_glszm",
    "features_intensity_histogram",
    "features_intensity_stats",
    "features_ivh",
    "features_morphology",
    "features_ngldm",
    "features_ngtdm",
    "moran_geary",
    "schema",
    "spacing_schema",
]
