"""Kernel backend chosen at import: the compiled extension when it was built,
otherwise the numpy reference.  Set PLAPSIM_PURE_PYTHON=1 to force numpy."""

import os

from . import _kernels_py

if os.environ.get("PLAPSIM_PURE_PYTHON", "") not in ("", "0"):
    backend = _kernels_py
else:
    try:
        from . import _kernels as backend
    except ImportError:  # extension not built
        backend = _kernels_py

BACKEND = backend.BACKEND
DONE, CHUNK, BLOWUP, UNDERFLOW = (_kernels_py.DONE, _kernels_py.CHUNK,
                                  _kernels_py.BLOWUP, _kernels_py.UNDERFLOW)


def available() -> dict:
    out = {"python": _kernels_py}
    try:
        from . import _kernels
        out["cython"] = _kernels
    except ImportError:
        pass
    return out
