"""Backend selection for the hot kernels.

The compiled extension is used when it was built and imports cleanly;
otherwise the pure-Python twin is used. Set ``GEOVOTE_PURE_PYTHON=1`` to
force the fallback.
"""
import os

from . import _pykernels

if os.environ.get("GEOVOTE_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

haversine = _impl.haversine
haversine_batch = _impl.haversine_batch
centroid = _impl.centroid
dbscan_labels = _impl.dbscan_labels

EARTH_RADIUS_KM = _pykernels.EARTH_RADIUS_KM
NOISE = _pykernels.NOISE


def available_backends():
    """Map backend name -> kernel module for every backend importable here."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        found["cython"] = _ckernels
    return found
