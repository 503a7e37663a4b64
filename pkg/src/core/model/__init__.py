"""
Initial value problem data and its standing-assumption checks
"""

from .system import DELAY_EPS, DelayArg, DelayBounds, DelayTerm, InitialData, NeutralSystem, effective_delay_bounds
from .validation import validate

__all__ = [
    "DELAY_EPS",
    "DelayArg",
    "DelayBounds",
    "DelayTerm",
    "InitialData",
    "NeutralSystem",
    "effective_delay_bounds",
    "validate",
]
