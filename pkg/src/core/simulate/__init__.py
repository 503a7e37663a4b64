"""
Method-of-steps integration and bound verification

- integrator: Trajectory, integrate, sample, equation residuals, CSV export
- verification: data norms, bound checks and the ODE fundamental-matrix estimate
"""

from .integrator import Trajectory, equation_residuals, integrate, sample, time_grid
from .verification import coppel_check, initial_data_norms, running_forcing_norms, verify_bound

__all__ = [
    "Trajectory",
    "coppel_check",
    "equation_residuals",
    "initial_data_norms",
    "integrate",
    "running_forcing_norms",
    "sample",
    "time_grid",
    "verify_bound",
]
