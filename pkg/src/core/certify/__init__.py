"""
Stability certificates, solution bounds and decay-rate search

- pmatrix: P(t) and the sampled coefficient grid shared by every test
- rate: certificates at a fixed decay rate (M1 / M2 routes)
- rate_free: certificates on B(t) = sum_k B_k(t), including dominated bounds
- comparisons: non-delay-form tests and autonomous baselines
- bound: exponential solution bound coefficients
- search: largest certifiable decay rate
"""

from .bound import solution_bound
from .comparisons import baseline_km_delay, baseline_km_neutral, certify_nondelay_form, nondelay_shape
from .ledger import ConstantLedger, inapplicable
from .pmatrix import SampledSystem, build_P
from .rate import RATE_ROUTES, certify_with_rate, rate_specialization
from .rate_free import RATE_FREE_ROUTES, certify_dominated, certify_rate_free, rate_free_specialization
from .search import DecayRate, max_decay_rate

__all__ = [
    "ConstantLedger",
    "DecayRate",
    "RATE_FREE_ROUTES",
    "RATE_ROUTES",
    "SampledSystem",
    "baseline_km_delay",
    "baseline_km_neutral",
    "build_P",
    "certify_dominated",
    "certify_nondelay_form",
    "certify_rate_free",
    "certify_with_rate",
    "inapplicable",
    "max_decay_rate",
    "nondelay_shape",
    "rate_free_specialization",
    "rate_specialization",
    "solution_bound",
]
