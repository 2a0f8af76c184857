"""Argument checks shared by the estimator wrapper and the harness."""
from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils import check_array

from .instance import Instance, Tour


def check_coords(X) -> np.ndarray:
    """Finite float array of shape ``(n, 2)`` with ``n >= 3``."""
    X = check_array(X, dtype=np.float64, ensure_min_samples=3)
    if X.shape[1] != 2:
        raise ValueError(f"coordinates must have shape (n, 2), got {X.shape}")
    return X


def check_instance(X, name: str = "instance") -> Instance:
    """An :class:`Instance`, a coordinate array or a vertex count (unit weights)."""
    if isinstance(X, Instance):
        return X
    if isinstance(X, numbers.Integral) and not isinstance(X, bool):
        return Instance.unit(int(X))
    return Instance.from_coords(check_coords(X).tolist(), name=name)


def check_tour(tour, n: int) -> Tour:
    if not isinstance(tour, Tour):
        tour = Tour(tuple(int(v) for v in np.asarray(tour).ravel()))
    if tour.n != n:
        raise ValueError(f"tour visits {tour.n} vertices, instance has {n}")
    return tour
