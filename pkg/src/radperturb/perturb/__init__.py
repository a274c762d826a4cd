"""Image and mask perturbations."""

from .chains import CATALOGUE, ChainSpec, PerturbationSpec, expand_chain, get_chain
from .contour import randomize_contour, select_supervoxels, supervoxel_overlaps
from .noise import MAD_CONSTANT, NOISE_CONSTANT, NoiseEstimate, add_noise, estimate_noise_sigma
from .rotation import rotate_inplane
from .slic import slic_supervoxels
from .volume_adaptation import adapt_volume

__all__ = [
    "CATALOGUE",
    "ChainSpec",
    "MAD_CONSTANT",
    "NOISE_CONSTANT",
    "NoiseEstimate",
    "PerturbationSpec",
    "adapt_volume",
    "add_noise",
    "estimate_noise_sigma",
    "expand_chain",
    "get_chain",
    "randomize_contour",
    "rotate_inplane",
    "select_supervoxels",
    "slic_supervoxels",
    "supervoxel_overlaps",
]
