import logging
from typing import Optional

import numpy as np

from config.settings import SAMPLING_CONFIG
from src.core.matfun import MatrixFunction, matrix_measures, matrix_norms, sample_grid, vector_norms
from src.core.model import InitialData, NeutralSystem
from src.models.schemas import BoundCheck, DataNorms, ExponentialBound, NormKind
from .integrator import Trajectory, time_grid

logger = logging.getLogger(__name__)


def _sup_on_interval(values_at, lo: float, hi: float, samples: int, norm: NormKind) -> float:
    times = sample_grid((lo, hi), samples) if hi > lo else np.array([hi])
    return float(vector_norms(values_at(times), norm).max())


def initial_data_norms(
    sys: NeutralSystem,
    initial: InitialData,
    norm: NormKind = NormKind.INF,
    samples: Optional[int] = None,
    t_end: Optional[float] = None,
) -> DataNorms:
    """
    |x(t0)|, sup |Psi| on [t0 - sigma, t0], sup |Phi| on [t0 - tau_k, t0] per
    delay term and sup |f| on [t0, t_end], all sampled
    """
    samples = samples or SAMPLING_CONFIG["samples"]
    t0 = sys.t0
    x0 = float(vector_norms(initial.phi_values(np.array([t0])), norm)[0])
    psi = _sup_on_interval(initial.psi_values, t0 - sys.sigma, t0, samples, norm)
    phi = [_sup_on_interval(initial.phi_values, t0 - tau, t0, samples, norm) for tau in sys.taus]
    f = 0.0
    if sys.f is not None and t_end is not None and t_end > t0:
        f = _sup_on_interval(sys.forcing, t0, t_end, samples, norm)
    return DataNorms(x0=x0, psi=psi, phi=phi, f=f)


def running_forcing_norms(sys: NeutralSystem, times: np.ndarray, norm: NormKind = NormKind.INF) -> np.ndarray:
    """|f|_[t0, t_i] as a running maximum over the grid"""
    if sys.f is None:
        return np.zeros(np.size(times))
    return np.maximum.accumulate(vector_norms(sys.forcing(times), norm))


def verify_bound(
    traj: Trajectory,
    bound: ExponentialBound,
    norms: DataNorms,
    norm: NormKind = NormKind.INF,
    sys: Optional[NeutralSystem] = None,
) -> BoundCheck:
    """
    Compare |x(t)| with the bound curve at every grid point

    The forcing term uses the running sup of |f| over [t0, t] when the system
    is given, otherwise the constant norms.f.
    """
    f_norms = running_forcing_norms(sys, traj.times, norm) if sys is not None else norms.f
    curve = bound.evaluate(traj.times, norms.x0, norms.psi, norms.phi, f_norms)
    x_norms = vector_norms(traj.x, norm)
    ratios = x_norms / np.maximum(curve, np.finfo(float).tiny)

    max_ratio = float(ratios.max())
    first_violation = None
    if max_ratio > 1.0:
        first_violation = float(traj.times[int(np.argmax(ratios > 1.0))])
        logger.info(f"Bound violated first at t = {first_violation!r} (max ratio {max_ratio:.6g})")
    return BoundCheck(
        max_ratio=max_ratio,
        first_violation=first_violation,
        margin_curve=ratios.tolist(),
        times=traj.times.tolist(),
    )


def coppel_check(
    C: MatrixFunction,
    t0: float = 0.0,
    t_end: float = 10.0,
    step: float = 1e-3,
    norm: NormKind = NormKind.INF,
) -> float:
    """
    max over the grid of |Y(t, t0)| e^{-int_{t0}^t mu(C)} for Y' = C(t) Y,
    Y(t0) = E. Y by the trapezoidal predictor-corrector, the integral by the
    trapezoidal rule on the same grid.
    """
    times = time_grid(t0, t_end, step)
    values = C.tabulate(times)
    measures = matrix_measures(values, norm)
    exponent = np.concatenate([[0.0], np.cumsum(0.5 * step * (measures[1:] + measures[:-1]))])

    Y = np.empty_like(values)
    Y[0] = np.eye(C.n)
    for i in range(times.size - 1):
        slope = values[i] @ Y[i]
        predicted = values[i + 1] @ (Y[i] + step * slope)
        Y[i + 1] = Y[i] + 0.5 * step * (slope + predicted)

    ratios = matrix_norms(Y, norm) * np.exp(-exponent)
    return float(ratios.max())
