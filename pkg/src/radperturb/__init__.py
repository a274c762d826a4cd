"""Radiomics feature robustness assessment through image perturbation.

Images are perturbed (rotation, noise, translation, volume adaptation,
contour randomisation), features are extracted at several spacings and
discretisations, and the agreement across perturbed instances is summarised
with ICC(1,1).
"""

__version__ = "0.1.0"

from .errors import RadPerturbError
from .volume import RoiMask, RoiPair, Volume

__all__ = ["RadPerturbError", "RoiMask", "RoiPair", "Volume", "__version__"]
