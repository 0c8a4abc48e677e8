"""Kernel backend selection.

The compiled extension ``xxzquench._kernels`` is preferred when it
imports cleanly; otherwise the numpy fallback ``_kernels_py`` is used.
Setting the environment variable ``XXZQUENCH_PURE_PYTHON=1`` before
import forces the fallback (useful for debugging and for the backend
equivalence tests).  ``BACKEND`` reports which one is active.
"""

from __future__ import annotations

import os

if os.environ.get("XXZQUENCH_PURE_PYTHON") == "1":
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels

BACKEND: str = kernels.BACKEND
gap_map_sums = kernels.gap_map_sums
correlator_series = kernels.correlator_series
basis_grid_scan = kernels.basis_grid_scan

__all__ = ["BACKEND", "kernels", "gap_map_sums", "correlator_series", "basis_grid_scan"]
