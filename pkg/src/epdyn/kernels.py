"""Backend selection for the quadrature kernels.

The compiled extension is used when it imports cleanly; otherwise the numpy
fallback is used. Set ``EPDYN_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("EPDYN_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

j0 = _impl.j0
j1 = _impl.j1
circle_panels = _impl.circle_panels
bessel_time_panels = _impl.bessel_time_panels

__all__ = ["BACKEND", "j0", "j1", "circle_panels", "bessel_time_panels"]
