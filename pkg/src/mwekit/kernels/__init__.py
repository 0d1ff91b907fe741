"""Numeric inner loops, compiled with numba when available.

Set ``MWEKIT_DISABLE_NUMBA=1`` to force the pure-numpy implementations.
Both backends return identical results; ``tests/test_kernels.py`` checks
them against each other.
"""

import os

from . import _numpy

_disabled = os.environ.get("MWEKIT_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _disabled:
        raise ImportError
    from . import _numba as _impl
    BACKEND = "numba"
except ImportError:
    _impl = _numpy
    BACKEND = "numpy"

splitmix64_stream = _impl.splitmix64_stream
fisher_yates = _impl.fisher_yates
levenshtein = _impl.levenshtein
longest_match_ends = _impl.longest_match_ends
row_entropy = _impl.row_entropy
sum_column_groups = _impl.sum_column_groups
mean_row_groups = _impl.mean_row_groups

__all__ = [
    "BACKEND",
    "splitmix64_stream",
    "fisher_yates",
    "levenshtein",
    "longest_match_ends",
    "row_entropy",
    "sum_column_groups",
    "mean_row_groups",
]
