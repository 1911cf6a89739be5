"""Select the compiled search kernels when available, else the Python ones.

Set ``PATTERNCSP_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

BACKEND: str
if os.environ.get("PATTERNCSP_PURE_PYTHON"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"
    else:
        BACKEND = "cython"

count_solutions = _impl.count_solutions
find_homomorphisms = _impl.find_homomorphisms

__all__ = ["BACKEND", "count_solutions", "find_homomorphisms"]
