"""Backend selection for the loop kernels.

The compiled extension is preferred when present; setting the environment
variable ``CSPCA_PURE_PYTHON`` (to any non-empty value) before import
forces the numpy fallback.  ``BACKEND`` records which one is active.
"""

import os

if os.environ.get("CSPCA_PURE_PYTHON"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels_cy as _impl

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

# row_norms stays on numpy regardless of backend: einsum beats the naive
# compiled loop at every size worth measuring (see benchmarks/bench_kernels.py)
from ._kernels_py import row_norms  # noqa: E402

nearest_centers = _impl.nearest_centers
sum_by_label = _impl.sum_by_label
contingency_table = _impl.contingency_table

__all__ = [
    "BACKEND",
    "row_norms",
    "nearest_centers",
    "sum_by_label",
    "contingency_table",
]
