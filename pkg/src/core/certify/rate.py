"""
Rate-dependent certificate: mu(P(t)) <= -beta together with the M1 route
(e^{rate sigma}|A| < 1) and the M2 route ((1 + rate sigma) e^{rate sigma}|A|
+ sum_k tau_k e^{rate tau_k}|B_k| < 1). M0 = (1 - M)^-1 from the smaller
certified M.
"""

import logging
import math
from typing import Dict, Iterable, Optional

from config.settings import CERTIFY_CONFIG
from src.core.errors import PreconditionError
from src.core.matfun import sup_ratio_of_samples
from src.core.model import NeutralSystem
from src.models.schemas import Certificate, NormKind, SamplingPolicy, StabilityTest
from src.observability.logging_config import observe_operation
from .ledger import ConstantLedger
from .pmatrix import SampledSystem

logger = logging.getLogger(__name__)

RATE_ROUTES = ("thm31", "thm31a")


def rate_specialization(sys: NeutralSystem) -> Optional[str]:
    """Published special case a rate certificate coincides with"""
    if not sys.is_neutral:
        return "cor32"
    if sys.m == 1:
        return "cor31"
    return None


@observe_operation("certify_with_rate")
def certify_with_rate(
    sys: NeutralSystem,
    rate: float,
    norm: NormKind = NormKind.INF,
    sampling: Optional[SamplingPolicy] = None,
    routes: Optional[Iterable[str]] = None,
    grid: Optional[SampledSystem] = None,
) -> Certificate:
    """
    Evaluate both rate routes at a fixed decay rate

    Args:
        sys: validated system
        rate: decay rate lambda > 0
        routes: subset of ("thm31", "thm31a"); both by default
        grid: precomputed samples for the same system, norm and sampling

    Returns:
        Certificate with beta, M1, M2 and (when certified) M0
    """
    if not rate > 0:
        raise PreconditionError(f"decay rate must be positive, got {rate!r}")
    routes = tuple(routes or RATE_ROUTES)
    unknown = set(routes) - set(RATE_ROUTES)
    if unknown:
        raise ValueError(f"unknown rate routes {sorted(unknown)}")
    grid = grid or SampledSystem(sys, norm, sampling)
    test_id = StabilityTest.THM31A if routes == ("thm31a",) else StabilityTest.THM31

    ledger = ConstantLedger()
    ledger.config("lambda", rate)
    sigma = ledger.config("sigma", sys.sigma)
    taus = [ledger.config(f"tau_{k + 1}", tau) for k, tau in enumerate(sys.taus)]
    a = ledger.estimate("A_sup", grid.A_sup())
    b = [ledger.estimate(f"B{k + 1}_sup", grid.Bk_sup(k)) for k in range(sys.m)]
    b_names = [f"B{k + 1}_sup" for k in range(sys.m)]
    tau_names = [f"tau_{k + 1}" for k in range(sys.m)]

    measures = grid.P_measures(rate)
    beta = ledger.sampled("beta", -float(measures.max()), grid.window, grid.samples)

    e_sigma = math.exp(rate * sigma)
    e_tau = [math.exp(rate * tau) for tau in taus]
    numerator = ledger.computed(
        "numerator",
        rate + sum(e * bk for e, bk in zip(e_tau, b)) + rate * e_sigma * a,
        "lambda", "sigma", "A_sup", *b_names, *tau_names,
    )
    neutral_gain = ledger.computed("exp_sigma_A", e_sigma * a, "lambda", "sigma", "A_sup")
    denominator_m2 = ledger.computed(
        "denominator_M2",
        1.0 - (1.0 + rate * sigma) * e_sigma * a - sum(tau * e * bk for tau, e, bk in zip(taus, e_tau, b)),
        "lambda", "sigma", "A_sup", *b_names, *tau_names,
    )

    notes = []
    margins: Dict[str, float] = {}
    m_values: Dict[str, float] = {}
    if beta <= 0:
        worst = float(grid.times[int(measures.argmax())])
        notes.append(f"mu(P) is nonnegative at sampled t = {worst!r}")
        margins = {route: beta for route in routes}
    else:
        a_ratio = ledger.estimate("A_over_muP", sup_ratio_of_samples(grid.A_norms, measures, grid.window))
        b_ratios = [
            ledger.estimate(f"B{k + 1}_over_muP", sup_ratio_of_samples(grid.B_norms[k], measures, grid.window))
            for k in range(sys.m)
        ]
        bracket = ledger.computed(
            "bracket",
            a_ratio * (1.0 + rate * sigma) * e_sigma + sum(r * e * tau for r, e, tau in zip(b_ratios, e_tau, taus)),
            "A_over_muP", *[f"B{k + 1}_over_muP" for k in range(sys.m)], "lambda", "sigma", *tau_names,
        )

        if "thm31" in routes:
            if neutral_gain < 1.0:
                m1 = ledger.computed("M1", numerator / (1.0 - neutral_gain) * bracket, "numerator", "exp_sigma_A", "bracket")
                m_values["thm31"] = m1
                margins["thm31"] = min(beta, 1.0 - neutral_gain, 1.0 - m1)
            else:
                margins["thm31"] = min(beta, 1.0 - neutral_gain)
        if "thm31a" in routes:
            if denominator_m2 > 0:
                m2 = ledger.computed("M2", numerator / denominator_m2 * bracket, "numerator", "denominator_M2", "bracket")
                m_values["thm31a"] = m2
                margins["thm31a"] = min(beta, denominator_m2, 1.0 - m2)
            else:
                margins["thm31a"] = min(beta, denominator_m2)

    passing = {
        route: m for route, m in m_values.items() if margins[route] > CERTIFY_CONFIG["boundary_margin"]
    }
    preferred = None
    if passing:
        preferred = min(passing, key=passing.get)
        ledger.computed("M0", 1.0 / (1.0 - passing[preferred]), "M1" if preferred == "thm31" else "M2")

    cert = ledger.conclude(test_id, margins, rate_specialization(sys), notes, prefer=preferred)
    logger.debug(f"Rate {rate!r}: beta={beta:.6g}, margins={margins}")
    return cert
