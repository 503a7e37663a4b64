"""
Norms, matrix measures and windowed sup estimation

- norms: induced inf/one norms and matrix measures of constant matrices
- functions: MatrixFunction and grid sup estimators
"""

from .functions import (
    MatrixFunction,
    eval_matrix,
    sample_grid,
    sup_norm_over_window,
    sup_ratio_of_samples,
    sup_ratio_over_window,
)
from .norms import (
    matrix_measure,
    matrix_measure_limit,
    matrix_measures,
    matrix_norm,
    matrix_norms,
    vector_norm,
    vector_norms,
)

__all__ = [
    "MatrixFunction",
    "eval_matrix",
    "matrix_measure",
    "matrix_measure_limit",
    "matrix_measures",
    "matrix_norm",
    "matrix_norms",
    "sample_grid",
    "sup_norm_over_window",
    "sup_ratio_of_samples",
    "sup_ratio_over_window",
    "vector_norm",
    "vector_norms",
]
