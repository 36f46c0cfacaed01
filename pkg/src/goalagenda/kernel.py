"""Kernel backend selection.

The compiled extension is preferred when importable; the pure-Python twin is
the fallback. Set GOALAGENDA_PURE=1 before import to force the fallback
(used by the backend benchmark and the parity tests).
"""

from __future__ import annotations

import os

from . import _kernel_py

if os.environ.get("GOALAGENDA_PURE") == "1":
    _impl = _kernel_py
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernel_py

GraphKernel = _impl.GraphKernel
PyGraphKernel = _kernel_py.GraphKernel


def backend() -> str:
    """Name of the active backend: 'c' or 'python'."""
    return _impl.BACKEND
