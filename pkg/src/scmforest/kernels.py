"""Kernel backend selection.

The compiled extension is used when it has been built; otherwise the numpy
fallback is imported. Set ``SCMFOREST_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _fallback

if os.environ.get("SCMFOREST_PURE_PYTHON", "") not in ("", "0"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback
        BACKEND = "python"

best_rule = _impl.best_rule
best_split = _impl.best_split
