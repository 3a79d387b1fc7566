"""Select the compiled kernel module, falling back to NumPy.

Set ``LAND_PURE_PYTHON=1`` to force the fallback.
"""

import importlib
import os

from land import _fallback


def load(name=None):
    """Return the kernel module named ``"compiled"`` or ``"python"``."""
    if name == "python":
        return _fallback
    try:
        return importlib.import_module("land._core")
    except ImportError:
        if name == "compiled":
            raise
        return _fallback


if os.environ.get("LAND_PURE_PYTHON", "") not in ("", "0"):
    kernels = _fallback
else:
    kernels = load()

BACKEND = "python" if kernels is _fallback else "compiled"
