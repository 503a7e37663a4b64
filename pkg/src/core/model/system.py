import logging
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.errors import ExprDomainError
from src.core.expressions import Binary, Expr, Variable
from src.core.matfun import MatrixFunction

logger = logging.getLogger(__name__)

# two delays closer than this are treated as equal / as a non-delayed argument
DELAY_EPS = 1e-12


class DelayArg(BaseModel):
    """Delayed argument h(t) with declared bound 0 <= t - h(t) <= tau"""

    model_config = ConfigDict(frozen=True)

    h: Expr
    tau: float = Field(..., ge=0)

    def values(self, times: np.ndarray) -> np.ndarray:
        return np.asarray(self.h.evaluate(np.asarray(times, dtype=float)), dtype=float)

    def delays(self, times: np.ndarray) -> np.ndarray:
        """t - h(t) on the grid"""
        times = np.asarray(times, dtype=float)
        return times - self.values(times)

    @property
    def is_identity(self) -> bool:
        """h(t) = t structurally"""
        return isinstance(self.h, Variable)

    def constant_delay(self, times: np.ndarray) -> Optional[float]:
        """The delay c when h(t) = t - c on the whole grid, otherwise None"""
        delays = self.delays(times)
        if np.ptp(delays) <= DELAY_EPS * max(1.0, float(np.abs(times).max())):
            return float(delays[0])
        return None


class DelayTerm(BaseModel):
    model_config = ConfigDict(frozen=True)

    B: MatrixFunction
    h: DelayArg


class NeutralSystem(BaseModel):
    """
    x'(t) - A(t) x'(g(t)) = sum_k B_k(t) x(h_k(t)) + f(t),  t >= t0
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1)
    t0: float = Field(0.0, ge=0)
    A: MatrixFunction
    g: DelayArg
    terms: Tuple[DelayTerm, ...] = Field(..., min_length=1)
    f: Optional[Tuple[Expr, ...]] = None
    B_sum_sup: Optional[float] = Field(None, ge=0)

    @model_validator(mode="after")
    def _shapes(self) -> "NeutralSystem":
        if self.A.n != self.n or any(term.B.n != self.n for term in self.terms):
            raise ValueError(f"all matrix functions must be {self.n}x{self.n}")
        if self.f is not None and len(self.f) != self.n:
            raise ValueError(f"forcing must have {self.n} entries")
        return self

    @property
    def m(self) -> int:
        return len(self.terms)

    @property
    def sigma(self) -> float:
        return self.g.tau

    @property
    def taus(self) -> List[float]:
        return [term.h.tau for term in self.terms]

    @property
    def is_neutral(self) -> bool:
        return not self.A.is_zero

    @property
    def is_homogeneous(self) -> bool:
        return self.f is None

    @property
    def is_constant(self) -> bool:
        """All coefficient matrices are time independent"""
        return self.A.is_constant and all(term.B.is_constant for term in self.terms)

    @property
    def B_sum(self) -> MatrixFunction:
        """B(t) = sum_k B_k(t)"""
        if self.m == 1:
            return self.terms[0].B.with_declared_sup(self.B_sum_sup if self.B_sum_sup is not None else self.terms[0].B.declared_sup)
        entries = []
        for i in range(self.n):
            row = []
            for j in range(self.n):
                total = self.terms[0].B.entries[i][j]
                for term in self.terms[1:]:
                    total = Binary(op="+", left=total, right=term.B.entries[i][j])
                row.append(total)
            entries.append(tuple(row))
        return MatrixFunction(entries=tuple(entries), declared_sup=self.B_sum_sup)

    def forcing(self, times: np.ndarray) -> np.ndarray:
        """f on a grid, shape (len(times), n); zero when the system is homogeneous"""
        times = np.asarray(times, dtype=float)
        if self.f is None:
            return np.zeros((times.size, self.n))
        return _tabulate_vector(self.f, times)

    def with_forcing(self, f: Optional[Tuple[Expr, ...]]) -> "NeutralSystem":
        return self.model_copy(update={"f": f})


class InitialData(BaseModel):
    """Phi on [t0 - max tau, t0] and Psi on [t0 - sigma, t0]"""

    model_config = ConfigDict(frozen=True)

    phi: Tuple[Expr, ...]
    psi: Tuple[Expr, ...]

    @model_validator(mode="after")
    def _same_length(self) -> "InitialData":
        if len(self.phi) != len(self.psi):
            raise ValueError("phi and psi must have the same dimension")
        return self

    @property
    def n(self) -> int:
        return len(self.phi)

    def phi_values(self, times: np.ndarray) -> np.ndarray:
        return _tabulate_vector(self.phi, times)

    def psi_values(self, times: np.ndarray) -> np.ndarray:
        return _tabulate_vector(self.psi, times)


class DelayBounds(NamedTuple):
    sigma: float
    taus: List[float]
    max_tau: float


def effective_delay_bounds(sys: NeutralSystem) -> DelayBounds:
    """Declared delay bounds consumed by every certificate formula"""
    taus = sys.taus
    return DelayBounds(sigma=sys.sigma, taus=taus, max_tau=max(taus))


def _tabulate_vector(entries: Tuple[Expr, ...], times: np.ndarray) -> np.ndarray:
    times = np.atleast_1d(np.asarray(times, dtype=float))
    values = np.empty((times.size, len(entries)))
    for i, entry in enumerate(entries):
        try:
            values[:, i] = entry.evaluate(times)
        except ExprDomainError as e:
            raise e.at_entry((i,)) from e
    return values
