"""
Method-of-steps integration of

    x'(t) - A(t) x'(g(t)) = sum_k B_k(t) x(h_k(t)) + f(t),   t >= t0
    x(t) = Phi(t), t <= t0;   x'(t) = Psi(t), t < t0

on a uniform grid with a trapezoidal predictor-corrector. Delayed states are
read by linear interpolation, delayed derivatives by left-constant lookup.

x' jumps at t0 and wherever g maps a grid point onto an earlier jump, so both
one-sided limits are kept per grid point. The stored derivative is the left
limit (a delayed derivative argument equal to t0 reads Psi(t0)); each step
starts from the right limit, and arguments strictly between grid points read
the right limit of the point below.
"""

import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from config.settings import SIMULATION_CONFIG
from src.core.errors import IntegrationError, PreconditionError
from src.core.matfun import vector_norms
from src.core.model import DELAY_EPS, DelayArg, InitialData, NeutralSystem
from src.models.schemas import NormKind
from src.observability.logging_config import observe_operation

logger = logging.getLogger(__name__)

# distance in steps within which a delayed derivative argument counts as a grid point
_GRID_SNAP = 1e-9


class Trajectory(BaseModel):
    """
    Grid of (t, x(t), x'(t)); immutable once built. xdot holds left limits
    (x'(t0+) at t0), xdot_right the right limits; they differ only at
    derivative jumps.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    t0: float
    step: float
    times: np.ndarray
    x: np.ndarray
    xdot: np.ndarray
    xdot_right: np.ndarray
    initial: InitialData

    @property
    def n(self) -> int:
        return self.x.shape[1]

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def sample_x(self, s: np.ndarray) -> np.ndarray:
        """x at times s (shape (k, n)): Phi before t0, linear interpolation after"""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        before = s < self.t0
        values = np.empty((s.size, self.n))
        if np.any(before):
            values[before] = self.initial.phi_values(s[before])
        after = ~before
        if np.any(after):
            for i in range(self.n):
                values[after, i] = np.interp(s[after], self.times, self.x[:, i])
        return values

    def sample_xdot(self, s: np.ndarray) -> np.ndarray:
        """
        x' at times s: Psi before t0, the stored value on grid points, the
        right limit of the grid point below in between
        """
        s = np.atleast_1d(np.asarray(s, dtype=float))
        before = s < self.t0
        values = np.empty((s.size, self.n))
        if np.any(before):
            values[before] = self.initial.psi_values(s[before])
        after = ~before
        if np.any(after):
            on_grid, index = _grid_positions((s[after] - self.t0) / self.step)
            index = np.clip(index, 0, len(self.times) - 1)
            values[after] = np.where(on_grid[:, np.newaxis], self.xdot[index], self.xdot_right[index])
        return values

    def to_frame(self) -> pd.DataFrame:
        columns = {"t": self.times}
        for i in range(self.n):
            columns[f"x{i + 1}"] = self.x[:, i]
        for i in range(self.n):
            columns[f"xd{i + 1}"] = self.xdot[:, i]
        return pd.DataFrame(columns)

    def to_csv(self, path: Union[str, Path]) -> None:
        """Header t,x1..xn,xd1..xdn; 17 significant digits"""
        self.to_frame().to_csv(path, index=False, float_format=SIMULATION_CONFIG["csv_float_format"])


def sample(traj: Trajectory, t: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    (x(t), x'(t)); for t < t0 this is (Phi(t), Psi(t)), at t0 it is
    (Phi(t0), x'(t0+))

    Raises:
        ValueError: t beyond the end of the trajectory
    """
    if t > traj.t_end + DELAY_EPS:
        raise ValueError(f"t = {t!r} is beyond the trajectory end {traj.t_end!r}")
    return traj.sample_x(np.array([t]))[0], traj.sample_xdot(np.array([t]))[0]


class _DelayedState:
    """Grid positions of a delayed state argument h(t_i), built once per run"""

    def __init__(self, arg: DelayArg, times: np.ndarray, t0: float, step: float, initial: InitialData):
        args = arg.values(times)
        _check_not_advanced(args, times)
        self.before = (args <= t0).tolist()
        self.history = initial.phi_values(np.where(args <= t0, args, t0))
        position = (args - t0) / step
        previous = np.maximum(np.arange(times.size) - 1, 0)
        index = np.minimum(np.clip(np.floor(position), 0, None).astype(int), previous)
        self.index = index.tolist()
        self.weight = np.clip(position - index, 0.0, 1.0).tolist()

    def value(self, i: int, x: np.ndarray) -> np.ndarray:
        if self.before[i]:
            return self.history[i]
        j, w = self.index[i], self.weight[i]
        return x[j] + w * (x[j + 1] - x[j])


def _grid_positions(position: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(on a grid point, index of that point or of the one below) for grid positions"""
    nearest = np.rint(position)
    on_grid = np.abs(position - nearest) <= _GRID_SNAP
    return on_grid, np.where(on_grid, nearest, np.floor(position)).astype(int)


class _DelayedDerivative:
    """
    Grid positions of g(t_i) for the neutral term. Left limits read Psi up to
    and including t0; right limits read Psi only strictly before t0.
    """

    def __init__(self, arg: DelayArg, times: np.ndarray, t0: float, step: float, initial: InitialData):
        args = arg.values(times)
        _check_not_advanced(args, times)
        self.implicit = (times - args <= DELAY_EPS).tolist()
        on_grid, index = _grid_positions((args - t0) / step)
        before = np.where(on_grid, index < 0, args < t0)
        self.history = initial.psi_values(np.minimum(args, t0))
        self.left_from_history = (before | (on_grid & (index == 0))).tolist()
        self.right_from_history = before.tolist()
        self.on_grid = on_grid.tolist()
        previous = np.maximum(np.arange(times.size) - 1, 0)
        self.index = np.minimum(np.clip(index, 0, None), previous).tolist()

    def left(self, i: int, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        """x'(g(t_i)-)"""
        if self.left_from_history[i]:
            return self.history[i]
        j = self.index[i]
        return left[j] if self.on_grid[i] else right[j]

    def right(self, i: int, right: np.ndarray) -> np.ndarray:
        """x'(g(t_i)+)"""
        if self.right_from_history[i]:
            return self.history[i]
        return right[self.index[i]]


def _check_not_advanced(args: np.ndarray, times: np.ndarray) -> None:
    advanced = args > times + DELAY_EPS * np.maximum(1.0, np.abs(times))
    if np.any(advanced):
        raise IntegrationError(f"advanced argument at t = {float(times[np.argmax(advanced)])!r}")


class _StepPlan:
    """Everything on the grid that does not depend on the solution"""

    def __init__(self, sys: NeutralSystem, init: InitialData, times: np.ndarray, step: float):
        self.n = sys.n
        self.A = sys.A.tabulate(times)
        self.B: List[np.ndarray] = [term.B.tabulate(times) for term in sys.terms]
        self.f = sys.forcing(times)
        self.neutral = sys.is_neutral
        self.states = [_DelayedState(term.h, times, sys.t0, step, init) for term in sys.terms]
        self.derivative = _DelayedDerivative(sys.g, times, sys.t0, step, init)
        self.identity = np.eye(sys.n)

    def rhs(self, i: int, x: np.ndarray) -> np.ndarray:
        value = self.f[i].copy()
        for B, state in zip(self.B, self.states):
            value += B[i] @ state.value(i, x)
        return value

    def xdot(self, i: int, x: np.ndarray, left: np.ndarray, right: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(x'(t_i-), x'(t_i+)) from the equation; reads x[: i + 1] and both limits before i"""
        rhs = self.rhs(i, x)
        if not self.neutral:
            return rhs, rhs
        if self.derivative.implicit[i]:
            try:
                solved = np.linalg.solve(self.identity - self.A[i], rhs)
            except np.linalg.LinAlgError as e:
                raise IntegrationError(f"E - A(t) is singular at grid index {i}: {e}") from e
            return solved, solved
        A = self.A[i]
        return A @ self.derivative.left(i, left, right) + rhs, A @ self.derivative.right(i, right) + rhs


def time_grid(t0: float, t_end: float, step: float) -> np.ndarray:
    if not step > 0:
        raise PreconditionError("step must be positive")
    if not t_end > t0:
        raise PreconditionError(f"t_end must exceed t0 = {t0!r}")
    count = int(round((t_end - t0) / step))
    return t0 + step * np.arange(max(count, 1) + 1)


@observe_operation("integrate")
def integrate(
    sys: NeutralSystem,
    init: InitialData,
    t_end: Optional[float] = None,
    step: Optional[float] = None,
) -> Trajectory:
    """
    Integrate on t_i = t0 + i step up to the grid point nearest t_end

    Raises:
        IntegrationError: advanced arguments or a singular E - A(t)
        ExprDomainError: coefficient or initial expressions undefined on the grid
    """
    t_end = SIMULATION_CONFIG["t_end"] if t_end is None else t_end
    step = SIMULATION_CONFIG["step"] if step is None else step
    if init.n != sys.n:
        raise PreconditionError(f"initial data has dimension {init.n}, system has {sys.n}")

    times = time_grid(sys.t0, t_end, step)
    plan = _StepPlan(sys, init, times, step)
    x = np.empty((times.size, sys.n))
    left = np.empty((times.size, sys.n))
    right = np.empty((times.size, sys.n))
    x[0] = init.phi_values(np.array([sys.t0]))[0]
    _, right[0] = plan.xdot(0, x, left, right)
    left[0] = right[0]

    half = 0.5 * step
    for i in range(times.size - 1):
        x[i + 1] = x[i] + step * right[i]
        predicted, _ = plan.xdot(i + 1, x, left, right)
        x[i + 1] = x[i] + half * (right[i] + predicted)
        left[i + 1], right[i + 1] = plan.xdot(i + 1, x, left, right)

    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(left)) and np.all(np.isfinite(right))):
        raise IntegrationError("solution left the floating point range")
    for values in (x, left, right):
        values.setflags(write=False)
    logger.debug(f"Integrated {times.size - 1} steps of {step!r} up to t = {times[-1]!r}")
    return Trajectory(t0=sys.t0, step=step, times=times, x=x, xdot=left, xdot_right=right, initial=init)


def equation_residuals(sys: NeutralSystem, traj: Trajectory, norm: NormKind = NormKind.INF) -> np.ndarray:
    """
    |x'(t_i) - A x'(g(t_i)) - sum_k B_k x(h_k(t_i)) - f(t_i)| at every grid
    point, with history read the way the integrator reads it
    """
    plan = _StepPlan(sys, traj.initial, traj.times, traj.step)
    residuals = np.empty(traj.times.size)
    for i in range(traj.times.size):
        rhs = plan.rhs(i, traj.x)
        neutral = np.zeros(sys.n)
        if plan.neutral:
            if plan.derivative.implicit[i]:
                lagged = traj.xdot[i]
            else:
                lagged = plan.derivative.left(i, traj.xdot, traj.xdot_right)
            neutral = plan.A[i] @ lagged
        residuals[i] = vector_norms((traj.xdot[i] - neutral - rhs)[np.newaxis], norm)[0]
    return residuals
