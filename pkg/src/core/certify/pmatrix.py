import logging
from typing import List, Optional

import numpy as np

from src.core.matfun import MatrixFunction, matrix_measures, matrix_norms, sample_grid, sup_norm_over_window
from src.core.model import NeutralSystem
from src.models.schemas import NormKind, SamplingPolicy, SupEstimate

logger = logging.getLogger(__name__)


class SampledSystem:
    """
    Coefficients and delays of a system tabulated once on the sampling grid

    Every certificate for a given (system, norm, sampling) reads from the same
    grid, so decay-rate searches only rebuild P(t) per rate.
    """

    def __init__(self, sys: NeutralSystem, norm: NormKind = NormKind.INF, sampling: Optional[SamplingPolicy] = None):
        self.sys = sys
        self.norm = NormKind.parse(norm)
        self.sampling = sampling or SamplingPolicy()
        self.window = self.sampling.window(sys.t0)
        self.samples = self.sampling.samples
        self.times = sample_grid(self.window, self.samples)

        self.A = sys.A.tabulate(self.times)
        self.B: List[np.ndarray] = [term.B.tabulate(self.times) for term in sys.terms]
        self.B_total = np.sum(self.B, axis=0)
        self.g_delays = sys.g.delays(self.times)
        self.h_delays: List[np.ndarray] = [term.h.delays(self.times) for term in sys.terms]

        self.A_norms = matrix_norms(self.A, self.norm)
        self.B_norms: List[np.ndarray] = [matrix_norms(values, self.norm) for values in self.B]

    def sup(self, F: MatrixFunction) -> SupEstimate:
        return sup_norm_over_window(F, self.norm, self.window, self.samples)

    def A_sup(self) -> SupEstimate:
        return self.sup(self.sys.A)

    def Bk_sup(self, k: int) -> SupEstimate:
        return self.sup(self.sys.terms[k].B)

    def B_sum_sup(self) -> SupEstimate:
        return self.sup(self.sys.B_sum)

    def P(self, rate: float) -> np.ndarray:
        """P(t) on the whole grid, shape (samples, n, n)"""
        values = rate * np.eye(self.sys.n)[np.newaxis] - (rate * np.exp(rate * self.g_delays))[:, None, None] * self.A
        for delays, B in zip(self.h_delays, self.B):
            values = values + np.exp(rate * delays)[:, None, None] * B
        return values

    def P_measures(self, rate: float) -> np.ndarray:
        return matrix_measures(self.P(rate), self.norm)

    def B_measures(self) -> np.ndarray:
        return matrix_measures(self.B_total, self.norm)


def build_P(sys: NeutralSystem, rate: float, t: float) -> np.ndarray:
    """
    P(t) = sum_k e^{rate (t - h_k(t))} B_k(t) - rate e^{rate (t - g(t))} A(t) + rate E
    """
    if rate < 0:
        raise ValueError("rate must be nonnegative")
    times = np.array([t], dtype=float)
    value = rate * np.eye(sys.n) - rate * np.exp(rate * sys.g.delays(times)[0]) * sys.A.tabulate(times)[0]
    for term in sys.terms:
        value = value + np.exp(rate * term.h.delays(times)[0]) * term.B.tabulate(times)[0]
    return value
