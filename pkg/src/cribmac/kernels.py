"""Kernel dispatch: the compiled core when importable, numpy otherwise.

Set ``CRIBMAC_PURE=1`` to force the numpy path.
"""

import os

from . import _fallback

BACKEND = "numpy"
typical_mask = _fallback.typical_mask
pentagon_terms = _fallback.pentagon_terms

if os.environ.get("CRIBMAC_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels
    except ImportError:  # extension not built
        pass
    else:
        BACKEND = "cython"
        typical_mask = _ckernels.typical_mask
        pentagon_terms = _ckernels.pentagon_terms

__all__ = ["BACKEND", "typical_mask", "pentagon_terms"]
