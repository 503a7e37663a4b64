"""
Tests for systems with one non-delayed and one delayed term

    x'(t) - A_1(t) x'(H_1(t)) = A_0(t) x(t) + A_2(t) x(H_2(t)),  t - H_2(t) <= h_2

and the classical autonomous baselines they are compared against.
"""

import logging
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from src.core.matfun import matrix_measure, matrix_norm
from src.core.model import DELAY_EPS, NeutralSystem
from src.models.schemas import Certificate, NormKind, SamplingPolicy, StabilityTest
from .ledger import ConstantLedger, inapplicable
from .pmatrix import SampledSystem

logger = logging.getLogger(__name__)

PROP1_ANOMALY = (
    "as printed this condition cannot hold for induced norms: |mu(A_0)| <= |A_0| "
    "makes mu(A_0) + |A_0| / (1 - |A_1|) >= 0"
)
PROP1_VARIANT = "evaluated with |A_2| in place of |A_0| in the numerator"


class NondelayShape(NamedTuple):
    """Indices of the non-delayed (A_0) and delayed (A_2) terms; delayed is None when absent"""

    non_delayed: int
    delayed: Optional[int]


def nondelay_shape(sys: NeutralSystem, grid: SampledSystem) -> Optional[NondelayShape]:
    """Split the terms into A_0 x(t) and A_2 x(H_2(t)), or None on a shape mismatch"""
    if sys.m > 2:
        return None
    non_delayed = [k for k in range(sys.m) if np.all(np.abs(grid.h_delays[k]) <= DELAY_EPS)]
    if not non_delayed:
        return None
    k0 = non_delayed[0]
    if sys.m == 1:
        return NondelayShape(k0, None)
    return NondelayShape(k0, 1 - k0)


def certify_nondelay_form(
    sys: NeutralSystem,
    norm: NormKind = NormKind.INF,
    sampling: Optional[SamplingPolicy] = None,
    grid: Optional[SampledSystem] = None,
) -> Certificate:
    """
    Conditions with mu(A_0(t) + A_2(t)) <= -beta:

        cond41: |A_1| < 1 and -beta + (|A_0| + |A_2|)(|A_1| + h_2|A_2|) / (1 - |A_1|) < 0
        cond42: q = |A_1| + h_2|A_2| < 1 and -beta + |A_0 + A_2| q / (1 - q) < 0
    """
    test_id = StabilityTest.COR41
    grid = grid or SampledSystem(sys, norm, sampling)
    shape = nondelay_shape(sys, grid)
    if shape is None:
        return inapplicable(test_id, "system must have one non-delayed term and at most one delayed term")

    ledger = ConstantLedger()
    a1 = ledger.estimate("A1_sup", grid.A_sup())
    a0 = ledger.estimate("A0_sup", grid.Bk_sup(shape.non_delayed))
    if shape.delayed is None:
        a2 = ledger.config("A2_sup", 0.0)
        h2 = ledger.config("h_2", 0.0)
    else:
        a2 = ledger.estimate("A2_sup", grid.Bk_sup(shape.delayed))
        h2 = ledger.config("h_2", sys.taus[shape.delayed])
    a02 = ledger.estimate("A0_plus_A2_sup", grid.B_sum_sup())
    beta = ledger.sampled("beta", -float(grid.B_measures().max()), grid.window, grid.samples)
    q = ledger.computed("q", a1 + h2 * a2, "A1_sup", "h_2", "A2_sup")

    margins = {}
    if a1 < 1.0:
        lhs = ledger.computed("lhs_cond41", -beta + (a0 + a2) * q / (1.0 - a1), "beta", "A0_sup", "A2_sup", "q", "A1_sup")
        margins["cond41"] = min(beta, 1.0 - a1, -lhs)
    else:
        margins["cond41"] = min(beta, 1.0 - a1)
    if q < 1.0:
        lhs = ledger.computed("lhs_cond42", -beta + a02 * q / (1.0 - q), "beta", "A0_plus_A2_sup", "q")
        margins["cond42"] = min(beta, 1.0 - q, -lhs)
    else:
        margins["cond42"] = min(beta, 1.0 - q)

    return ledger.conclude(test_id, margins)


def _autonomous_data(
    sys: NeutralSystem, grid: SampledSystem
) -> Tuple[Optional[str], Optional[Tuple[np.ndarray, np.ndarray, np.ndarray, float]]]:
    """(reason, None) on mismatch, otherwise (None, (A_0, A_1, A_2, h_2)) at t0"""
    if not sys.is_constant:
        return "coefficients must be constant matrices", None
    shape = nondelay_shape(sys, grid)
    if shape is None:
        return "system must have one non-delayed term and at most one delayed term", None
    delays: List = [sys.g.constant_delay(grid.times)] + [term.h.constant_delay(grid.times) for term in sys.terms]
    if any(d is None for d in delays):
        return "delays must be constant", None

    A1 = sys.A.evaluate(sys.t0)
    A0 = sys.terms[shape.non_delayed].B.evaluate(sys.t0)
    if shape.delayed is None:
        return None, (A0, A1, np.zeros_like(A0), 0.0)
    A2 = sys.terms[shape.delayed].B.evaluate(sys.t0)
    return None, (A0, A1, A2, float(delays[1 + shape.delayed]))


def baseline_km_neutral(
    sys: NeutralSystem,
    norm: NormKind = NormKind.INF,
    sampling: Optional[SamplingPolicy] = None,
    variant: bool = False,
    grid: Optional[SampledSystem] = None,
) -> Tuple[Certificate, Certificate]:
    """
    Autonomous baselines for x'(t) - A_1 x'(t - h_1) = A_0 x(t) + A_2 x(t - h_2)

        prop1: |A_1| < 1 and mu(A_0) + (|A_0| + |A_1||A_2|) / (1 - |A_1|) < 0
        prop2: q = |A_1| + h_2|A_2| < 1 and mu(A_0 + A_2) + |A_0 + A_2| q / (1 - q) < 0

    prop1 is evaluated as printed; with variant=True |A_2| replaces |A_0| in
    its numerator. Both carry a note on the printed form.
    """
    grid = grid or SampledSystem(sys, norm, sampling)
    reason, data = _autonomous_data(sys, grid)
    if data is None:
        return inapplicable(StabilityTest.PROP1, reason), inapplicable(StabilityTest.PROP2, reason)
    A0, A1, A2, h2 = data
    norm = grid.norm

    ledger = ConstantLedger()
    a0 = ledger.computed("A0_norm", matrix_norm(A0, norm))
    a1 = ledger.computed("A1_norm", matrix_norm(A1, norm))
    a2 = ledger.computed("A2_norm", matrix_norm(A2, norm))
    mu0 = ledger.computed("mu_A0", matrix_measure(A0, norm))
    notes = [PROP1_ANOMALY]
    lead = a0
    if variant:
        lead = a2
        notes.append(PROP1_VARIANT)
    if a1 < 1.0:
        lhs = ledger.computed(
            "lhs_prop1", mu0 + (lead + a1 * a2) / (1.0 - a1), "mu_A0", "A2_norm" if variant else "A0_norm", "A1_norm"
        )
        margin = min(1.0 - a1, -lhs)
    else:
        margin = 1.0 - a1
    prop1 = ledger.conclude(StabilityTest.PROP1, {"variant" if variant else "printed": margin}, notes=notes)

    ledger = ConstantLedger()
    a1 = ledger.computed("A1_norm", matrix_norm(A1, norm))
    a2 = ledger.computed("A2_norm", matrix_norm(A2, norm))
    h2 = ledger.config("h_2", h2)
    a02 = ledger.computed("A0_plus_A2_norm", matrix_norm(A0 + A2, norm))
    mu02 = ledger.computed("mu_A0_plus_A2", matrix_measure(A0 + A2, norm))
    q = ledger.computed("q", a1 + h2 * a2, "A1_norm", "h_2", "A2_norm")
    if q < 1.0:
        lhs = ledger.computed("lhs_prop2", mu02 + a02 * q / (1.0 - q), "mu_A0_plus_A2", "A0_plus_A2_norm", "q")
        margin = min(1.0 - q, -lhs)
    else:
        margin = 1.0 - q
    prop2 = ledger.conclude(StabilityTest.PROP2, {"printed": margin})
    return prop1, prop2


def baseline_km_delay(
    sys: NeutralSystem,
    norm: NormKind = NormKind.INF,
    sampling: Optional[SamplingPolicy] = None,
    grid: Optional[SampledSystem] = None,
) -> Certificate:
    """
    x'(t) = B(t) x(t - h) with constant h: h sup|B(t)|^2 < inf |mu(B(t))|,
    mu(B(t)) <= -beta on the grid
    """
    test_id = StabilityTest.PROP3
    if sys.m != 1 or sys.is_neutral:
        return inapplicable(test_id, "single delayed term without a neutral part required")
    grid = grid or SampledSystem(sys, norm, sampling)
    delay = sys.terms[0].h.constant_delay(grid.times)
    if delay is None:
        return inapplicable(test_id, "constant delay required; the rate-free tests cover variable delays")

    ledger = ConstantLedger()
    h = ledger.config("h", max(delay, 0.0))
    b = ledger.estimate("B_sup", grid.Bk_sup(0))
    beta = ledger.sampled("beta", -float(grid.B_measures().max()), grid.window, grid.samples)
    lhs = ledger.computed("lhs_prop3", h * b * b, "h", "B_sup")
    return ledger.conclude(test_id, {"printed": min(beta, beta - lhs)})
