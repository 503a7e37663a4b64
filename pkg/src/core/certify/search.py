import logging
from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple, Optional

import numpy as np

from config.settings import CERTIFY_CONFIG
from src.core.errors import NoCertifiableRateError
from src.core.model import NeutralSystem
from src.models.schemas import Certificate, ExponentialBound, NormKind, SamplingPolicy
from src.observability.logging_config import observe_operation
from .bound import solution_bound
from .pmatrix import SampledSystem
from .rate import certify_with_rate

logger = logging.getLogger(__name__)


class DecayRate(NamedTuple):
    rate: float
    certificate: Certificate
    bound: ExponentialBound


@observe_operation("max_decay_rate")
def max_decay_rate(
    sys: NeutralSystem,
    norm: NormKind = NormKind.INF,
    sampling: Optional[SamplingPolicy] = None,
    lambda_max: Optional[float] = None,
    grid_points: Optional[int] = None,
    tolerance: Optional[float] = None,
    workers: Optional[int] = None,
) -> DecayRate:
    """
    Largest certifiable decay rate

    Scans a log-uniform grid on [lambda_min, lambda_max], keeps the largest
    certified rate and bisects between it and the next (failing) grid rate.
    Feasibility is not assumed monotone, so bisection only runs on the
    bracket found by the scan.

    Raises:
        NoCertifiableRateError: no grid rate certifies
    """
    lambda_max = lambda_max or CERTIFY_CONFIG["lambda_max"]
    grid_points = grid_points or CERTIFY_CONFIG["lambda_grid_points"]
    tolerance = tolerance or CERTIFY_CONFIG["bisection_tolerance"]
    lambda_min = CERTIFY_CONFIG["lambda_min"]
    if not lambda_max > lambda_min:
        raise ValueError(f"lambda_max must exceed {lambda_min}")

    grid = SampledSystem(sys, norm, sampling)
    rates = np.geomspace(lambda_min, lambda_max, grid_points)

    def _certify(rate: float) -> Certificate:
        return certify_with_rate(sys, float(rate), grid=grid)

    with ThreadPoolExecutor(max_workers=workers or CERTIFY_CONFIG["workers"]) as pool:
        certificates = list(pool.map(_certify, rates))

    passing = [i for i, cert in enumerate(certificates) if cert.certified]
    if not passing:
        raise NoCertifiableRateError(f"no certifiable rate in [{lambda_min!r}, {lambda_max!r}]")

    best = passing[-1]
    lo, lo_cert = float(rates[best]), certificates[best]
    if best + 1 < len(rates):
        hi = float(rates[best + 1])
        while hi - lo > tolerance:
            mid = 0.5 * (lo + hi)
            cert = _certify(mid)
            if cert.certified:
                lo, lo_cert = mid, cert
            else:
                hi = mid

    logger.info(f"Largest certified decay rate {lo:.6g} (route {lo_cert.route})")
    return DecayRate(rate=lo, certificate=lo_cert, bound=solution_bound(sys, lo_cert))
