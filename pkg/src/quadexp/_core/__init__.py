"""Kernel backend selection.

The compiled Cython kernel is used when present; the pure-Python twin is the
fallback. QUADEXP_PURE_PYTHON=1 forces the fallback (used by the benchmark
and for debugging). BACKEND names the implementation actually loaded.
"""

import os

if os.environ.get("QUADEXP_PURE_PYTHON"):
    from ._lll_py import lll_reduce_rows

    BACKEND = "python"
else:
    try:
        from ._lll_cy import lll_reduce_rows  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        from ._lll_py import lll_reduce_rows  # type: ignore[no-redef]

        BACKEND = "python"

__all__ = ["lll_reduce_rows", "BACKEND"]
