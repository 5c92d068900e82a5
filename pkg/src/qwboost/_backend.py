"""
Kernel backend selection.

The compiled extension is used when importable; ``QWBOOST_BACKEND=numpy``
forces the pure NumPy fallback.
"""

import importlib
import os

from . import _kernels_py


def load(name=None):
    name = name or os.environ.get("QWBOOST_BACKEND", "auto")
    if name == "numpy":
        return _kernels_py
    try:
        return importlib.import_module("qwboost._kernels")
    except ImportError:
        if name == "cython":
            raise
        return _kernels_py


def available():
    names = ["numpy"]
    try:
        importlib.import_module("qwboost._kernels")
        names.insert(0, "cython")
    except ImportError:
        pass
    return names


def use(name):
    """Switch the active backend ("cython", "numpy" or "auto"); returns the module."""
    global kernels
    kernels = load(name)
    return kernels


kernels = load()
