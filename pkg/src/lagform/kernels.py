"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the NumPy twin.
Set ``LAGFORM_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("LAGFORM_PURE_PYTHON"):
    from lagform import _pykernels as _impl
    BACKEND = "python"
else:
    try:
        from lagform import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        from lagform import _pykernels as _impl
        BACKEND = "python"

minors = _impl.minors
eval_on_frames = _impl.eval_on_frames
table_product = _impl.table_product

__all__ = ["BACKEND", "minors", "eval_on_frames", "table_product"]
