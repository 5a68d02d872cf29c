"""Closed-form scalar/vector fields as sympy expression trees.

Fields are expressions in the coordinate symbols ``X = (x, y, z)``. Exact
derivatives come from sympy, numerical samples from ``lambdify``.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
import sympy as sp

x, y, z = sp.symbols("x y z", real=True)
X = (x, y, z)


def as_vector(v) -> sp.Matrix:
    m = sp.Matrix(v)
    if m.shape != (3, 1):
        m = m.reshape(3, 1)
    return m


def curl(F) -> sp.Matrix:
    F = as_vector(F)
    return sp.Matrix([
        sp.diff(F[2], y) - sp.diff(F[1], z),
        sp.diff(F[0], z) - sp.diff(F[2], x),
        sp.diff(F[1], x) - sp.diff(F[0], y),
    ])


def div(F) -> sp.Expr:
    F = as_vector(F)
    return sum(sp.diff(F[i], X[i]) for i in range(3))


def grad(f) -> sp.Matrix:
    return sp.Matrix([sp.diff(f, c) for c in X])


def apply_coefficient(coef, F) -> sp.Matrix:
    """coef * F for a scalar coefficient or 3x3 matrix coefficient."""
    F = as_vector(F)
    if isinstance(coef, sp.MatrixBase):
        return coef * F
    return coef * F


def sample(expr, points: np.ndarray) -> np.ndarray:
    """Evaluate a scalar, vector or matrix expression at points (N, 3).

    Returns complex arrays shaped (N,), (N, 3) or (N, 3, 3).
    """
    points = np.asarray(points, dtype=float)
    n = points.shape[0]
    if isinstance(expr, sp.MatrixBase):
        shape = expr.shape
        flat = [sample(e, points) for e in expr]
        arr = np.stack(flat, axis=-1)
        if shape[1] == 1:
            return arr.reshape(n, shape[0])
        return arr.reshape(n, *shape)
    expr = sp.sympify(expr)
    if not expr.free_symbols:
        return np.full(n, complex(expr), dtype=complex)
    fn = _compile(expr)
    val = fn(points[:, 0], points[:, 1], points[:, 2])
    return np.broadcast_to(np.asarray(val, dtype=complex), (n,)).copy()


@lru_cache(maxsize=4096)
def _compile(expr):
    return sp.lambdify(X, expr, modules="numpy")
