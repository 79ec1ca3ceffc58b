"""Backend selection for the hot eigen kernel.

The compiled module is preferred; setting ``CMV_SPECTRAL_PURE_PYTHON=1``
forces the numpy fallback (used by the benchmark and by tests that pin
both backends to the same answers).
"""

import os

from . import _jacobi_py

BACKEND = "python"
jacobi_sweeps = _jacobi_py.jacobi_sweeps

if os.environ.get("CMV_SPECTRAL_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from ._jacobi import jacobi_sweeps as _compiled
    except ImportError:
        pass
    else:
        jacobi_sweeps = _compiled
        BACKEND = "compiled"


def backends():
    """Map of available backend name -> kernel function."""
    out = {"python": _jacobi_py.jacobi_sweeps}
    try:
        from ._jacobi import jacobi_sweeps as compiled
    except ImportError:
        return out
    out["compiled"] = compiled
    return out
