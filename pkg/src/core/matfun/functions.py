import logging
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.errors import ConfigError, ExprDomainError, ExprSyntaxError, SignChangeError
from src.core.expressions import Binary, Constant, Expr, parse_value
from src.models.schemas import NormKind, SupEstimate, SupMethod
from .norms import matrix_norms

logger = logging.getLogger(__name__)

Window = Tuple[float, float]


class MatrixFunction(BaseModel):
    """n x n grid of expressions in t, with an optional declared sup of its norm"""

    model_config = ConfigDict(frozen=True)

    entries: Tuple[Tuple[Expr, ...], ...]
    declared_sup: Optional[float] = Field(None, ge=0)

    @model_validator(mode="after")
    def _square(self) -> "MatrixFunction":
        n = len(self.entries)
        if n < 1 or any(len(row) != n for row in self.entries):
            raise ValueError("matrix function entries must form a non-empty square grid")
        return self

    @classmethod
    def from_spec(cls, rows: Sequence[Sequence], declared_sup: Optional[float] = None) -> "MatrixFunction":
        """Build from config rows of numbers or expression strings"""
        entries = []
        for i, row in enumerate(rows):
            parsed = []
            for j, value in enumerate(row):
                try:
                    parsed.append(parse_value(value))
                except ExprSyntaxError as e:
                    raise ConfigError(f"entry ({i}, {j}): {e}") from e
            entries.append(tuple(parsed))
        return cls(entries=tuple(entries), declared_sup=declared_sup)

    @classmethod
    def constant(cls, matrix, declared_sup: Optional[float] = None) -> "MatrixFunction":
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        return cls(
            entries=tuple(tuple(Constant(value=float(v)) for v in row) for row in matrix),
            declared_sup=declared_sup,
        )

    @classmethod
    def zeros(cls, n: int) -> "MatrixFunction":
        return cls.constant(np.zeros((n, n)), declared_sup=0.0)

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def is_constant(self) -> bool:
        return not any(entry.depends_on_t for row in self.entries for entry in row)

    @property
    def is_zero(self) -> bool:
        return all(isinstance(e, Constant) and e.value == 0.0 for row in self.entries for e in row)

    def with_declared_sup(self, declared_sup: Optional[float]) -> "MatrixFunction":
        return self.model_copy(update={"declared_sup": declared_sup})

    def divided_by(self, denominator: Expr) -> "MatrixFunction":
        """Entrywise quotient by a scalar expression (no declared sup carried over)"""
        return MatrixFunction(
            entries=tuple(tuple(Binary(op="/", left=e, right=denominator) for e in row) for row in self.entries)
        )

    def evaluate(self, t: float) -> np.ndarray:
        return self.tabulate(np.array([t], dtype=float))[0]

    def tabulate(self, times: np.ndarray) -> np.ndarray:
        """Values on a grid of times, shape (len(times), n, n)"""
        times = np.asarray(times, dtype=float)
        values = np.empty((times.size, self.n, self.n))
        for i, row in enumerate(self.entries):
            for j, entry in enumerate(row):
                try:
                    values[:, i, j] = entry.evaluate(times)
                except ExprDomainError as e:
                    raise e.at_entry((i, j)) from e
        return values


def eval_matrix(F: MatrixFunction, t: float) -> np.ndarray:
    """Pointwise value of every entry; domain errors carry entry coordinates"""
    return F.evaluate(t)


def sample_grid(window: Window, samples: int) -> np.ndarray:
    lo, hi = window
    if not hi > lo:
        raise ValueError(f"degenerate window [{lo}, {hi}]")
    if samples < 2:
        raise ValueError("at least two samples are required")
    return np.linspace(lo, hi, samples)


def sup_norm_over_window(
    F: MatrixFunction,
    norm: NormKind = NormKind.INF,
    window: Window = (0.0, 1.0),
    samples: int = 2001,
) -> SupEstimate:
    """
    Declared sup when present, otherwise the max norm over a uniform grid
    that includes both endpoints
    """
    if F.declared_sup is not None:
        return SupEstimate(value=F.declared_sup, method=SupMethod.DECLARED, window=tuple(window))
    times = sample_grid(window, samples)
    if F.is_constant:
        value = float(matrix_norms(F.tabulate(times[:1]), norm)[0])
    else:
        value = float(matrix_norms(F.tabulate(times), norm).max())
    logger.debug(f"Sampled sup {value:.6g} over [{window[0]}, {window[1]}] with {samples} samples")
    return SupEstimate(value=value, method=SupMethod.SAMPLED, window=tuple(window), samples=samples)


def sup_ratio_of_samples(numerator_norms: np.ndarray, denominators: np.ndarray, window: Window) -> SupEstimate:
    """Sup of |numerator(t_i)| / |denominator(t_i)| from values already on a grid"""
    denominators = np.asarray(denominators, dtype=float)
    if not (np.all(denominators < 0) or np.all(denominators > 0)):
        index = int(np.argmin(np.abs(denominators)))
        raise SignChangeError(
            f"denominator vanishes or changes sign on the grid (value {denominators[index]:.3g} at sample {index})"
        )
    ratios = np.asarray(numerator_norms, dtype=float) / np.abs(denominators)
    return SupEstimate(
        value=float(ratios.max()), method=SupMethod.SAMPLED, window=tuple(window), samples=int(denominators.size)
    )


def sup_ratio_over_window(
    numerator: MatrixFunction,
    denominator: Callable[[np.ndarray], np.ndarray],
    norm: NormKind = NormKind.INF,
    window: Window = (0.0, 1.0),
    samples: int = 2001,
) -> SupEstimate:
    """
    Sup over the grid of |numerator(t)| / |denominator(t)|, pointwise then sup

    Raises:
        SignChangeError: the denominator is zero or changes sign on the grid
    """
    times = sample_grid(window, samples)
    denominators = np.broadcast_to(np.asarray(denominator(times), dtype=float), times.shape)
    return sup_ratio_of_samples(matrix_norms(numerator.tabulate(times), norm), denominators, window)
