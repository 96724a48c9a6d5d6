"""Kernel backend selection: compiled Cython core, numpy fallback.

The compiled extension is optional; if it was not built (or FBLLAB_PURE
is set) the numpy implementation is used.  Both backends satisfy the same
contract and agree to ~1e-13 relative.
"""

import os

from . import pyfallback

_impl = None
if not os.environ.get("FBLLAB_PURE"):
    try:
        from . import _subsetnorm as _impl
    except ImportError:
        _impl = None
if _impl is None:
    _impl = pyfallback

subset_sup_pow = _impl.subset_sup_pow
BACKEND = "python" if _impl is pyfallback else "compiled"
