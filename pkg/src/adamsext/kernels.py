"""Kernel selection: the compiled extension if importable, else the fallback.

Set ``ADAMSEXT_PURE=1`` before import to force the pure-Python path.
"""

import os

from . import _fallback

BACKEND = "python"
if os.environ.get("ADAMSEXT_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _fallback
    else:
        BACKEND = "cython"
else:
    _impl = _fallback

rref_inplace = _impl.rref_inplace
reduce_rows = _impl.reduce_rows

__all__ = ["BACKEND", "rref_inplace", "reduce_rows"]
