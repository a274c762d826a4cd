"""Shape features from a marching-cubes mesh of the morphological mask."""

from __future__ import annotations

import math

import numpy as np
from skimage import measure

from ..errors import DegenerateMesh, EmptyMask
from .partial import Partial

MORPH_NAMES = ("volume_voxel", "volume_mesh", "area_mesh", "sphericity", "compactness1")


def roi_mesh(roi: np.ndarray, spacing) -> tuple[np.ndarray, np.ndarray]:
    """Vertices (mm) and triangles of the 0.5 iso-surface of a binary mask."""
    padded = np.pad(np.asarray(roi, dtype=np.float64), 1)
    verts, faces, _, _ = measure.marching_cubes(
        padded, level=0.5, spacing=tuple(float(s) for s in spacing), method="lorensen"
    )
    # skimage hands back float32 vertices; area sums need double precision
    return verts.astype(np.float64), faces


def mesh_volume(verts: np.ndarray, faces: np.ndarray) -> float:
    """Enclosed volume via the divergence theorem (signed tetrahedra to the origin)."""
    a, b, c = verts[faces[:, 0]], verts[faces[:, 1]], verts[faces[:, 2]]
    return abs(float(np.sum(a * np.cross(b, c))) / 6.0)


def mesh_area(verts: np.ndarray, faces: np.ndarray) -> float:
    a, b, c = verts[faces[:, 0]], verts[faces[:, 1]], verts[faces[:, 2]]
    return float(np.sum(np.linalg.norm(np.cross(b - a, c - a), axis=1)) / 2.0)


def features_morphology(roi: np.ndarray, spacing) -> Partial:
    roi = np.asarray(roi, dtype=bool)
    n = int(np.count_nonzero(roi))
    if n == 0:
        raise EmptyMask("morphological mask is empty")
    verts, faces = roi_mesh(roi, spacing)
    if len(verts) < 4 or len(faces) == 0:
        raise DegenerateMesh("mesh has fewer than four vertices")
    volume = mesh_volume(verts, faces)
    area = mesh_area(verts, faces)
    if volume == 0 or area == 0:
        raise DegenerateMesh("mesh encloses no volume")
    return Partial(
        volume_voxel=n * float(np.prod(spacing)),
        volume_mesh=volume,
        area_mesh=area,
        sphericity=math.pi ** (1 / 3) * (6 * volume) ** (2 / 3) / area,
        compactness1=volume / (math.sqrt(math.pi) * area**1.5),
    )
