import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pytest

from src.services.config_service import ConfigService, RunContext
from src.services.fixtures import example2_config, example410_config

FIXTURES_DIR = Path(__file__).resolve().parent.parent / "fixtures"
TWO_PI = 2.0 * math.pi


def literal(value: Any) -> str:
    """Number as expression text; numpy scalars repr as np.float64(...)"""
    return repr(float(value))


def build(data: Dict[str, Any]) -> RunContext:
    return ConfigService.build(ConfigService.parse(data))


def system_config(
    terms: Sequence[Dict[str, Any]],
    A: Optional[List[List[Any]]] = None,
    g: str = "t",
    sigma: float = 0.0,
    f: Optional[List[Any]] = None,
    phi: Optional[List[Any]] = None,
    psi: Optional[List[Any]] = None,
    samples: int = 401,
    window: float = TWO_PI,
    **extra: Any,
) -> Dict[str, Any]:
    """Minimal run configuration around the given delay terms"""
    n = len(terms[0]["B"])
    data: Dict[str, Any] = {
        "name": "test_system",
        "system": {"dimension": n, "g": g, "sigma": sigma, "terms": list(terms)},
        "initial": {"phi": phi or [1.0] * n, "psi": psi or [0.0] * n},
        "sampling": {"window_length": window, "samples": samples},
        "simulation": {"step": 1e-3, "t_end": 1.0},
    }
    if A is not None:
        data["system"]["A"] = A
    if f is not None:
        data["system"]["f"] = f
    data.update(extra)
    return data


def constant_term(B: Any, delay: float = 0.0) -> Dict[str, Any]:
    matrix = np.atleast_2d(np.asarray(B, dtype=float)).tolist()
    return {"B": matrix, "h": f"t - {literal(delay)}" if delay > 0 else "t", "tau": delay}


def random_dominant(rng: np.random.Generator, n: int, diagonal: float = 1.0, spread: float = 0.2) -> np.ndarray:
    """Negative diagonal with small off-diagonal entries, so mu < 0 after summation"""
    C = rng.uniform(-spread, spread, size=(n, n)) / max(n - 1, 1)
    C[np.diag_indices(n)] = -rng.uniform(diagonal, 2.0 * diagonal, size=n)
    return C


def random_system_config(
    rng: np.random.Generator,
    n: int,
    m: int,
    neutral: bool = True,
    time_varying: bool = True,
    variable_delays: bool = True,
) -> Dict[str, Any]:
    """Random bounded system with mu(B(t)) < 0 and a small neutral part"""
    terms = []
    for _ in range(m):
        C = random_dominant(rng, n)
        tau = float(rng.uniform(0.05, 0.5))
        wobble = float(rng.uniform(0.0, 0.1))
        B = [
            [
                f"{literal(C[i, j])}*(1 + {literal(wobble)}*sin(t))" if time_varying and i != j else float(C[i, j])
                for j in range(n)
            ]
            for i in range(n)
        ]
        h = f"t - {literal(tau)}*abs(cos(t))" if variable_delays else f"t - {literal(tau)}"
        terms.append({"B": B, "h": h, "tau": tau})

    A = None
    sigma = 0.0
    g = "t"
    if neutral:
        A0 = rng.uniform(-0.1, 0.1, size=(n, n)) / n
        A = [[f"{literal(A0[i, j])}*cos(t)" if time_varying else float(A0[i, j]) for j in range(n)] for i in range(n)]
        sigma = float(rng.uniform(0.05, 0.5))
        g = f"t - {literal(sigma)}"
    return system_config(terms, A=A, g=g, sigma=sigma)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def example2() -> RunContext:
    return build(example2_config())


@pytest.fixture
def example2_n3() -> RunContext:
    return build(example2_config(n=3))


@pytest.fixture
def example410():
    """Builder: example410(nu) -> RunContext"""

    def _build(nu: float = 0.05) -> RunContext:
        return build(example410_config(nu=nu))

    return _build


@pytest.fixture
def scalar_ode() -> RunContext:
    """x' = -x, x(0) = 1"""
    return build(system_config([constant_term([[-1.0]])], samples=101, window=10.0))


@pytest.fixture
def neutral_step() -> RunContext:
    """x'(t) - 0.5 x'(t - 1) = 0, Psi = 1, x(0) = 0"""
    return build(
        system_config(
            [constant_term([[0.0]])], A=[[0.5]], g="t - 1", sigma=1.0, phi=[0.0], psi=[1.0], samples=101, window=10.0
        )
    )


@pytest.fixture
def delay_step() -> RunContext:
    """x'(t) = -x(t - 1), Phi = 1"""
    return build(system_config([constant_term([[-1.0]], delay=1.0)], samples=101, window=10.0))
