"""Select the walk kernel: compiled if importable, else pure Python.

Set ``BARRIERPATHS_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _walk_py

python_kernel = _walk_py

try:
    if os.environ.get("BARRIERPATHS_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from . import _walk_core as compiled_kernel
except ImportError:
    compiled_kernel = None

kernel = compiled_kernel if compiled_kernel is not None else python_kernel
BACKEND = kernel.BACKEND
