"""
Rate-free certificates on B(t) = sum_k B_k(t) with mu(B(t)) <= -beta

- thm32:  sum_k |B_k| / (1 - |A|) * (|A/mu(B)| + sum_k tau_k |B_k/mu(B)|) < 1
- thm32a: |B| / (1 - |A| - sum_k tau_k |B_k|) * (same bracket) < 1
- cor33a: both conditions with constant entrywise dominating matrices
"""

import logging
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from config.settings import SAMPLING_CONFIG
from src.core.matfun import matrix_norm, sup_ratio_of_samples
from src.core.model import NeutralSystem
from src.models.schemas import Certificate, NormKind, SamplingPolicy, StabilityTest
from src.observability.logging_config import observe_operation
from .ledger import ConstantLedger, inapplicable
from .pmatrix import SampledSystem

logger = logging.getLogger(__name__)

RATE_FREE_ROUTES = ("thm32", "thm32a")


def rate_free_specialization(sys: NeutralSystem) -> Optional[str]:
    """Published special case a rate-free certificate coincides with"""
    if not sys.is_neutral and sys.m == 1:
        return "cor35"
    if not sys.is_neutral:
        return "cor34"
    if sys.m == 1:
        return "cor33"
    if sys.n == 1:
        return "cor410"
    return None


@observe_operation("certify_rate_free")
def certify_rate_free(
    sys: NeutralSystem,
    norm: NormKind = NormKind.INF,
    sampling: Optional[SamplingPolicy] = None,
    routes: Optional[Iterable[str]] = None,
    test_id: Optional[StabilityTest] = None,
    grid: Optional[SampledSystem] = None,
) -> Certificate:
    """
    Evaluate the rate-free routes; certified when either holds

    Args:
        routes: subset of ("thm32", "thm32a"); both by default
        test_id: reported id; cor410 restricts the test to scalar systems
    """
    routes = tuple(routes or RATE_FREE_ROUTES)
    unknown = set(routes) - set(RATE_FREE_ROUTES)
    if unknown:
        raise ValueError(f"unknown rate-free routes {sorted(unknown)}")
    if test_id is None:
        test_id = StabilityTest.THM32A if routes == ("thm32a",) else StabilityTest.THM32
    if test_id == StabilityTest.COR410 and sys.n != 1:
        return inapplicable(test_id, f"scalar equation required, dimension is {sys.n}")

    grid = grid or SampledSystem(sys, norm, sampling)
    ledger = ConstantLedger()
    taus = [ledger.config(f"tau_{k + 1}", tau) for k, tau in enumerate(sys.taus)]
    tau_names = [f"tau_{k + 1}" for k in range(sys.m)]
    b_names = [f"B{k + 1}_sup" for k in range(sys.m)]

    a = ledger.estimate("A_sup", grid.A_sup())
    b = [ledger.estimate(name, grid.Bk_sup(k)) for k, name in enumerate(b_names)]
    b_total = ledger.estimate("B_sup", grid.B_sum_sup())
    sum_b = ledger.computed("sum_Bk_sup", sum(b), *b_names)
    delayed_b = ledger.computed("sum_tau_Bk_sup", sum(tau * bk for tau, bk in zip(taus, b)), *tau_names, *b_names)

    measures = grid.B_measures()
    beta = ledger.sampled("beta", -float(measures.max()), grid.window, grid.samples)

    notes: List[str] = []
    margins: Dict[str, float] = {}
    if beta <= 0:
        worst = float(grid.times[int(measures.argmax())])
        notes.append(f"mu(B) is nonnegative at sampled t = {worst!r}")
        margins = {route: beta for route in routes}
    else:
        a_ratio = ledger.estimate("A_over_muB", sup_ratio_of_samples(grid.A_norms, measures, grid.window))
        b_ratios = [
            ledger.estimate(f"B{k + 1}_over_muB", sup_ratio_of_samples(grid.B_norms[k], measures, grid.window))
            for k in range(sys.m)
        ]
        bracket = ledger.computed(
            "bracket",
            a_ratio + sum(tau * r for tau, r in zip(taus, b_ratios)),
            "A_over_muB", *tau_names, *[f"B{k + 1}_over_muB" for k in range(sys.m)],
        )
        if "thm32" in routes:
            if a < 1.0:
                lhs = ledger.computed("lhs_thm32", sum_b / (1.0 - a) * bracket, "sum_Bk_sup", "A_sup", "bracket")
                margins["thm32"] = min(beta, 1.0 - a, 1.0 - lhs)
            else:
                margins["thm32"] = min(beta, 1.0 - a)
        if "thm32a" in routes:
            denominator = ledger.computed("denominator_thm32a", 1.0 - a - delayed_b, "A_sup", "sum_tau_Bk_sup")
            if denominator > 0:
                lhs = ledger.computed(
                    "lhs_thm32a", b_total / denominator * bracket, "B_sup", "denominator_thm32a", "bracket"
                )
                margins["thm32a"] = min(beta, denominator, 1.0 - lhs)
            else:
                margins["thm32a"] = min(beta, denominator)

    cert = ledger.conclude(test_id, margins, rate_free_specialization(sys), notes)
    logger.info(f"{test_id.value}: {cert.verdict.value} (margin {cert.margin:.6g}, route {cert.route})")
    return cert


def certify_dominated(
    sys: NeutralSystem,
    A_dom: Optional[Sequence[Sequence[float]]],
    Bk_dom: Optional[Sequence[Sequence[Sequence[float]]]],
    B_dom: Optional[Sequence[Sequence[float]]] = None,
    norm: NormKind = NormKind.INF,
    sampling: Optional[SamplingPolicy] = None,
    grid: Optional[SampledSystem] = None,
) -> Certificate:
    """
    Rate-free test with constant matrices dominating |A(t)|, |B_k(t)| and
    |B(t)| entrywise. B_dom defaults to sum_k Bk_dom. Skipped (inapplicable)
    when the dominating matrices are not declared or do not dominate on the grid.
    """
    test_id = StabilityTest.COR33A
    if A_dom is None or Bk_dom is None:
        return inapplicable(test_id, "dominating matrices A_dom and Bk_dom are not declared")
    if len(Bk_dom) != sys.m:
        return inapplicable(test_id, f"expected {sys.m} dominating matrices for the delay terms, got {len(Bk_dom)}")

    a_bar = np.asarray(A_dom, dtype=float)
    bk_bar = [np.asarray(matrix, dtype=float) for matrix in Bk_dom]
    b_bar = np.asarray(B_dom, dtype=float) if B_dom is not None else np.sum(bk_bar, axis=0)
    shape = (sys.n, sys.n)
    if a_bar.shape != shape or b_bar.shape != shape or any(m.shape != shape for m in bk_bar):
        return inapplicable(test_id, f"dominating matrices must be {sys.n}x{sys.n}")

    grid = grid or SampledSystem(sys, norm, sampling)
    tolerance = SAMPLING_CONFIG["declared_tolerance"]
    pairs = [("A", grid.A, a_bar), ("B", grid.B_total, b_bar)] + [
        (f"B_{k + 1}", values, bound) for k, (values, bound) in enumerate(zip(grid.B, bk_bar))
    ]
    for name, values, bound in pairs:
        if np.any(np.abs(values) > bound + tolerance):
            return inapplicable(test_id, f"|{name}(t)| is not dominated entrywise on the sampling grid")

    ledger = ConstantLedger()
    taus = [ledger.config(f"tau_{k + 1}", tau) for k, tau in enumerate(sys.taus)]
    tau_names = [f"tau_{k + 1}" for k in range(sys.m)]
    a = ledger.config("A_dom_norm", matrix_norm(a_bar, grid.norm))
    b = [ledger.config(f"B{k + 1}_dom_norm", matrix_norm(m, grid.norm)) for k, m in enumerate(bk_bar)]
    b_total = ledger.config("B_dom_norm", matrix_norm(b_bar, grid.norm))
    b_names = [f"B{k + 1}_dom_norm" for k in range(sys.m)]
    beta = ledger.sampled("beta", -float(grid.B_measures().max()), grid.window, grid.samples)

    delayed = ledger.computed(
        "sum_tau_Bk_dom", sum(tau * bk for tau, bk in zip(taus, b)), *tau_names, *b_names
    )
    gain = ledger.computed("gain", a + delayed, "A_dom_norm", "sum_tau_Bk_dom")
    lhs_sum = ledger.computed("lhs_sum", sum(b) * gain, *b_names, "gain")
    lhs_total = ledger.computed("lhs_total", b_total * gain, "B_dom_norm", "gain")

    margins = {
        "sum": min(beta, 1.0 - a, beta * (1.0 - a) - lhs_sum),
        "total": min(beta, 1.0 - a, beta * (1.0 - a - delayed) - lhs_total),
    }
    return ledger.conclude(test_id, margins, None)
