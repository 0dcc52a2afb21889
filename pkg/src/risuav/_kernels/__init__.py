"""Evaluation kernels with a compiled core and a NumPy fallback.

The compiled extension (``_core``, Cython) is preferred when it built
successfully; otherwise the pure-NumPy ``_fallback`` module provides the
same functions.  Set ``RISUAV_BACKEND=fallback`` to force the fallback, or
``RISUAV_BACKEND=compiled`` to fail loudly when the extension is missing.
Both backends expose: classify_to_point, d2d_eval, cu_eval, joint_scan.
"""

import os

from . import _fallback

_requested = os.environ.get("RISUAV_BACKEND", "").strip().lower()

if _requested == "fallback":
    _impl = _fallback
elif _requested == "compiled":
    from . import _core as _impl
else:
    try:
        from . import _core as _impl
    except ImportError:
        _impl = _fallback

classify_to_point = _impl.classify_to_point
d2d_eval = _impl.d2d_eval
cu_eval = _impl.cu_eval
joint_scan = _impl.joint_scan


def backend_name() -> str:
    """Name of the active backend: 'compiled' or 'fallback'."""
    return _impl.backend_name()
