"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the NumPy
reference kernels take over.  ``RSAPPROX_KERNELS=python`` forces the
fallback.
"""

import os

from . import _pykernels

BACKENDS = {"python": _pykernels}

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None
else:
    BACKENDS["cython"] = _ckernels

_choice = os.environ.get("RSAPPROX_KERNELS", "auto").lower()
if _choice == "python" or _ckernels is None:
    BACKEND = "python"
else:
    BACKEND = "cython"

_impl = BACKENDS[BACKEND]
ndft2 = _impl.ndft2
lagrange_resample = _impl.lagrange_resample
lag_correlation = _impl.lag_correlation

__all__ = ["BACKEND", "BACKENDS", "ndft2", "lagrange_resample", "lag_correlation"]
