"""Hot inner loops with a compiled core and a pure numpy fallback.

The compiled extension ``_ckernels`` is used when it has been built and
``RADPERTURB_PURE_PYTHON`` is not set to a true value. Both backends expose
the same functions and produce identical integer counts.
"""

import importlib
import os

from . import _pykernels
from .directions import DIRECTIONS, NEIGHBOURS

_FUNCTIONS = ("glcm_matrices", "glrlm_matrices", "neighbourhood_stats", "slic_assign", "moran_geary", "zone_labels")


def _load_compiled():
    if os.environ.get("RADPERTURB_PURE_PYTHON", "").lower() in ("1", "true", "yes"):
        return None
    try:
        return importlib.import_module("._ckernels", __name__)
    except ImportError:
        return None


_compiled = _load_compiled()
BACKEND = "cython" if _compiled is not None else "python"
_active = _compiled if _compiled is not None else _pykernels

glcm_matrices = _active.glcm_matrices
glrlm_matrices = _active.glrlm_matrices
neighbourhood_stats = _active.neighbourhood_stats
slic_assign = _active.slic_assign
moran_geary = _active.moran_geary
zone_labels = _active.zone_labels


def available_backends():
    """Mapping of backend name to module, compiled first when present."""
    out = {}
    if _compiled is not None:
        out["cython"] = _compiled
    else:
        try:
            out["cython"] = importlib.import_module("._ckernels", __name__)
        except ImportError:
            pass
    out["python"] = _pykernels
    return out


__all__ = ["BACKEND", "DIRECTIONS", "NEIGHBOURS", "available_backends", *_FUNCTIONS]
