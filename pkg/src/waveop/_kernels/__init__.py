"""Stepping-kernel dispatch: compiled extension if available, NumPy otherwise.

Set WAVEOP_PURE_PYTHON=1 to force the fallback (used by the benchmark and
for debugging); ``backend()`` reports which implementation is active.
"""

import os

from . import _ref

if os.environ.get("WAVEOP_PURE_PYTHON"):
    _impl = _ref
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _ref

rk4_bilinear = _impl.rk4_bilinear


def backend() -> str:
    """Name of the active kernel implementation: 'compiled' or 'python'."""
    return "compiled" if _impl.__name__.endswith("_core") else "python"
