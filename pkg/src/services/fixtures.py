"""
Builders for the shipped run configurations

- example2: n x n neutral system with a cosine-power A(t), B_1 = sin^2 t C,
  B_2 = cos^2 t C for the tridiagonal C(alpha, beta)
- example410: scalar oscillating equation with parameter nu
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Union

from src.core.errors import ConfigError
from src.models.schemas import ClosedFormCheck, FixtureReport
from src.services.config_service import ConfigService

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
FIXTURES = ("example2", "example410")


def tridiagonal(n: int, alpha: float, beta: float) -> List[List[float]]:
    """-alpha on the diagonal, beta beside it in the first and last rows, beta/2 in between"""
    C = [[0.0] * n for _ in range(n)]
    for i in range(n):
        C[i][i] = -alpha
    if n == 1:
        return C
    C[0][1] = beta
    C[n - 1][n - 2] = beta
    for i in range(1, n - 1):
        C[i][i - 1] = beta / 2
        C[i][i + 1] = beta / 2
    return C


def _scaled(matrix: List[List[float]], factor: str) -> List[List[Union[str, float]]]:
    return [[f"{value!r}*{factor}" if value != 0.0 else 0.0 for value in row] for row in matrix]


def example2_config(
    n: int = 4,
    alpha: float = 0.4,
    beta: float = 0.1,
    n_gamma: float = 0.01,
    rate: float = 0.06,
    t_end: float = 50.0,
    step: float = 1e-3,
) -> Dict[str, Any]:
    """
    x'(t) - A(t) x'(t - 0.1) = sin^2 t C x(t - 0.1|sin t|) + cos^2 t C x(t - 0.1|cos t|)

    with A_ij(t) = gamma cos^i(j t), gamma = n_gamma / n. Sups are declared
    analytically: |A| = n|gamma|, |B_k| = |B| = alpha + |beta|.
    """
    gamma = n_gamma / n
    A = [[f"{gamma!r}*cos({j}*t)^{i}" for j in range(1, n + 1)] for i in range(1, n + 1)]
    C = tridiagonal(n, alpha, beta)
    b_sup = alpha + abs(beta)
    return {
        "name": f"example2_n{n}",
        "system": {
            "dimension": n,
            "t0": 0.0,
            "A": A,
            "g": "t - 0.1",
            "sigma": 0.1,
            "terms": [
                {"B": _scaled(C, "sin(t)^2"), "h": "t - 0.1*abs(sin(t))", "tau": 0.1},
                {"B": _scaled(C, "cos(t)^2"), "h": "t - 0.1*abs(cos(t))", "tau": 0.1},
            ],
        },
        "initial": {"phi": [1.0] * n, "psi": [0.0] * n},
        "declared_bounds": {"A_sup": abs(n_gamma), "Bk_sup": [b_sup, b_sup], "B_sum_sup": b_sup},
        "sampling": {"window_length": TWO_PI, "samples": 2001, "period": TWO_PI},
        "simulation": {"step": step, "t_end": t_end},
        "certification": {"lambda": rate},
        "norm": "inf",
    }


def example2_closed_form(n: int = 4, alpha: float = 0.4, beta: float = 0.1, n_gamma: float = 0.01) -> ClosedFormCheck:
    """
    |beta| < alpha, n|gamma| < 1 and
    2(alpha + |beta|)[n|gamma| + 0.2(alpha + |beta|)] < (1 - n|gamma|)(alpha - |beta|)
    """
    a = abs(n_gamma)
    s = alpha + abs(beta)
    lhs = 2.0 * s * (a + 0.2 * s)
    rhs = (1.0 - a) * (alpha - abs(beta))
    margin = min(alpha - abs(beta), 1.0 - a, rhs - lhs)
    return ClosedFormCheck(name="example2_closed_form", holds=margin > 0, margin=margin, lhs=lhs, rhs=rhs)


def example410_config(nu: float = 0.05, t_end: float = 30.0, step: float = 1e-3) -> Dict[str, Any]:
    """
    x'(t) - 0.1 nu sin t x'(t - 1) = -nu (1 - 3 cos t) x(t) - nu (1 + 3 cos t) x(t - 1)
    """
    return {
        "name": "example410",
        "parameters": {"nu": nu},
        "system": {
            "dimension": 1,
            "t0": 0.0,
            "A": [["0.1*nu*sin(t)"]],
            "g": "t - 1",
            "sigma": 1.0,
            "terms": [
                {"B": [["-nu*(1 - 3*cos(t))"]], "h": "t", "tau": 0.0},
                {"B": [["-nu*(1 + 3*cos(t))"]], "h": "t - 1", "tau": 1.0},
            ],
        },
        "initial": {"phi": [1.0], "psi": [0.0]},
        "sampling": {"window_length": TWO_PI, "samples": 2001, "period": TWO_PI},
        "simulation": {"step": step, "t_end": t_end},
        "certification": {"tests": ["thm32", "thm32a"]},
        "norm": "inf",
    }


def write_fixture(data: Dict[str, Any], path: Union[str, Path]) -> Path:
    """Validate a builder's output and write it as JSON"""
    ConfigService.build(ConfigService.parse(data))
    path = Path(path)
    path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    return path


def generate_fixture(name: str, path: Union[str, Path], n: int = 4, nu: float = 0.05) -> FixtureReport:
    """
    Write a shipped configuration; example2 takes the dimension n and
    reports its closed-form condition, example410 takes nu

    Raises:
        ConfigError: unknown fixture name or a dimension below 1
    """
    if name == "example2":
        if n < 1:
            raise ConfigError(f"example2 needs n >= 1, got {n}")
        data, closed_form = example2_config(n=n), example2_closed_form(n=n)
    elif name == "example410":
        data, closed_form = example410_config(nu=nu), None
    else:
        raise ConfigError(f"unknown fixture {name!r}; expected one of {', '.join(FIXTURES)}")
    written = write_fixture(data, path)
    logger.info(f"Wrote {data['name']} to {written}")
    return FixtureReport(config=data["name"], path=str(written), closed_form=closed_form)
