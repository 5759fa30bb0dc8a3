"""Input checks shared by the estimators and the command line."""

from __future__ import annotations

from typing import Iterable

import numpy as np
from sklearn.utils import check_array

from .system import System, UnknownEntityError


def check_system(system) -> System:
    if not isinstance(system, System):
        raise TypeError(f"expected a System, got {type(system).__name__}")
    return system


def check_labels(system: System, items: Iterable, name: str = "entities") -> frozenset[str]:
    if isinstance(items, str):
        items = [items] if items else []
    items = list(items)
    unknown = []
    out = []
    for it in items:
        try:
            out.append(system.labels[system.index_of(it)])
        except (UnknownEntityError, ValueError, TypeError):
            unknown.append(it)
    if unknown:
        raise ValueError(f"{name}: unknown entities {unknown!r}")
    return frozenset(out)


def _is_label_collection(X) -> bool:
    if isinstance(X, (str, set, frozenset)):
        return True
    if isinstance(X, (list, tuple)) and X and all(isinstance(v, str) for v in X):
        return True
    return False


def check_failure_matrix(X, system: System) -> np.ndarray:
    """Rows of initial failures as a boolean ``(n_samples, n_entities)`` array.

    Accepts a 0/1 array-like, a single label collection, or a list of label
    collections.
    """
    n = len(system)
    if _is_label_collection(X):
        X = [X]
    if isinstance(X, (list, tuple)) and X and all(
        isinstance(r, (set, frozenset)) or _is_label_collection(r) for r in X
    ):
        out = np.zeros((len(X), n), dtype=bool)
        for r, row in enumerate(X):
            for lab in check_labels(system, row, "failure row"):
                out[r, system.index[lab]] = True
        return out
    arr = check_array(X, ensure_2d=False, dtype=None, ensure_min_samples=0)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.shape[1] != n:
        raise ValueError(f"expected {n} columns (one per entity), got {arr.shape[1]}")
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("failure indicators must be 0/1")
    return arr.astype(bool)


def row_mask(row: np.ndarray) -> int:
    m = 0
    for i in np.flatnonzero(row):
        m |= 1 << int(i)
    return m


def mask_row(mask: int, n: int) -> np.ndarray:
    return np.array([mask >> i & 1 for i in range(n)], dtype=bool)
