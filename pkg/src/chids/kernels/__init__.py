"""Hot-loop kernels with backend selection.

The compiled extension (chids._speedups) is preferred when importable;
otherwise the pure-Python twin takes over. Set CHIDS_PURE_PYTHON=1 to force
the fallback, e.g. for benchmarking or debugging.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pure

if os.environ.get("CHIDS_PURE_PYTHON"):
    _impl = _pure
else:
    try:
        from chids import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pure


def backend_name() -> str:
    return "pure-python" if _impl is _pure else "compiled"


def best_group_cut(counts: np.ndarray, min_each_side: int):
    """Backend dispatch; see chids.kernels._pure.best_group_cut."""
    if _impl is _pure:
        return _pure.best_group_cut(counts, min_each_side)
    return _impl.best_group_cut(np.ascontiguousarray(counts, dtype=np.int64), min_each_side)


def group_counts(values: np.ndarray, classes: np.ndarray, n_classes: int):
    """Aggregate records into distinct-value groups, sorted ascending.

    Returns (group_values, counts) where counts[i, c] is the number of
    records with value group_values[i] and class c. Integer-exact, shared
    by both backends.
    """
    values = np.asarray(values)
    classes = np.asarray(classes, dtype=np.int64)
    # counts are aggregated per distinct value, so sort stability is irrelevant
    order = np.argsort(values)
    v = values[order]
    y = classes[order]
    n = v.size
    if n == 0:
        return v, np.zeros((0, n_classes), dtype=np.int64)
    is_start = np.empty(n, dtype=bool)
    is_start[0] = True
    np.not_equal(v[1:], v[:-1], out=is_start[1:])
    gidx = np.cumsum(is_start) - 1
    g = int(gidx[-1]) + 1
    group_values = v[is_start]
    counts = np.bincount(gidx * n_classes + y, minlength=g * n_classes).reshape(g, n_classes)
    return group_values, counts
