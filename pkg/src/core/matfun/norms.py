"""
Induced norms and matrix measures (logarithmic norms) for the max and
absolute-sum vector norms.

All functions accept a single matrix or a stack of matrices with shape
(..., n, n); the batched forms are what the grid samplers use.
"""

import numpy as np

from src.models.schemas import NormKind

_ORDERS = {NormKind.INF: np.inf, NormKind.ONE: 1}


def _oriented(matrices: np.ndarray, norm: NormKind) -> np.ndarray:
    """Row-oriented view: the one-norm formulas are the inf-norm ones on the transpose"""
    matrices = np.asarray(matrices, dtype=float)
    return matrices if NormKind.parse(norm) == NormKind.INF else np.swapaxes(matrices, -1, -2)


def vector_norm(x: np.ndarray, norm: NormKind = NormKind.INF) -> float:
    return float(np.linalg.norm(np.asarray(x, dtype=float), ord=_ORDERS[NormKind.parse(norm)]))


def vector_norms(rows: np.ndarray, norm: NormKind = NormKind.INF) -> np.ndarray:
    """Norm of every row of a (k, n) array"""
    return np.linalg.norm(np.asarray(rows, dtype=float), ord=_ORDERS[NormKind.parse(norm)], axis=-1)


def matrix_norms(matrices: np.ndarray, norm: NormKind = NormKind.INF) -> np.ndarray:
    """Induced norm of every matrix in a (..., n, n) stack"""
    return np.abs(_oriented(matrices, norm)).sum(axis=-1).max(axis=-1)


def matrix_norm(C: np.ndarray, norm: NormKind = NormKind.INF) -> float:
    """Max absolute row sum (inf) or max absolute column sum (one)"""
    C = np.asarray(C, dtype=float)
    return float(np.linalg.norm(C, ord=_ORDERS[NormKind.parse(norm)]))


def matrix_measures(matrices: np.ndarray, norm: NormKind = NormKind.INF) -> np.ndarray:
    """Matrix measure of every matrix in a (..., n, n) stack"""
    oriented = _oriented(matrices, norm)
    diagonal = np.diagonal(oriented, axis1=-2, axis2=-1)
    off_diagonal = np.where(np.eye(oriented.shape[-1], dtype=bool), 0.0, np.abs(oriented)).sum(axis=-1)
    return (diagonal + off_diagonal).max(axis=-1)


def matrix_measure(C: np.ndarray, norm: NormKind = NormKind.INF) -> float:
    """
    mu(C) = max_i (c_ii + sum_{j != i} |c_ij|) for inf,
    mu(C) = max_j (c_jj + sum_{i != j} |c_ij|) for one
    """
    return float(matrix_measures(np.asarray(C, dtype=float)[np.newaxis], norm)[0])


def matrix_measure_limit(C: np.ndarray, norm: NormKind = NormKind.INF, nu: float = 1e-6) -> float:
    """Difference quotient (|E + nu C| - 1) / nu of the defining limit"""
    if nu <= 0:
        raise ValueError("nu must be positive")
    C = np.asarray(C, dtype=float)
    shifted = np.eye(C.shape[0]) + nu * C
    return (matrix_norm(shifted, norm) - 1.0) / nu
