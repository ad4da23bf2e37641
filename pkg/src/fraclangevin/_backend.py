"""Kernel selection.

The compiled extension is used when it imports; otherwise (or when the
environment variable ``FRACLANGEVIN_PURE_PYTHON`` is set to a non-empty value
other than ``0``) the numpy implementations are used.
"""

from __future__ import annotations

import os

from . import _kernels_py

_force_py = os.environ.get("FRACLANGEVIN_PURE_PYTHON", "") not in ("", "0")

if _force_py:
    kernels = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on the build
        kernels = _kernels_py
        BACKEND = "python"

SERIES = _kernels_py.SERIES
ASYMPTOTIC = _kernels_py.ASYMPTOTIC
CONTOUR = _kernels_py.CONTOUR

__all__ = ["kernels", "BACKEND", "SERIES", "ASYMPTOTIC", "CONTOUR"]
