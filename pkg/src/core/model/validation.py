"""
Grid checks of the standing assumptions of a neutral system

Only boundedness and the sign/size of the delays are checkable on a grid; the
measurability hypotheses on A, B_k, g and h_k remain the caller's obligation.
"""

import logging
from typing import List, Optional

import numpy as np

from config.settings import SAMPLING_CONFIG
from src.core.errors import ExprDomainError
from src.core.matfun import MatrixFunction, matrix_norms, sample_grid
from src.models.schemas import Finding, NormKind, SamplingPolicy, Severity, ValidationReport
from .system import DelayArg, InitialData, NeutralSystem

logger = logging.getLogger(__name__)


def validate(
    sys: NeutralSystem,
    sampling: Optional[SamplingPolicy] = None,
    initial: Optional[InitialData] = None,
    norm: NormKind = NormKind.INF,
) -> ValidationReport:
    """
    Check sup |A| < 1, the delay bounds of g and every h_k, declared sups
    against sampled ones and, when given, boundedness of the initial functions.
    Findings are carried in the report; nothing is raised for failed checks.
    """
    sampling = sampling or SamplingPolicy()
    norm = NormKind.parse(norm)
    times = sample_grid(sampling.window(sys.t0), sampling.samples)
    findings: List[Finding] = []

    a_sup = _check_matrix(sys.A, "A", times, norm, findings)
    if a_sup is not None:
        bound = sys.A.declared_sup if sys.A.declared_sup is not None else a_sup
        findings.append(Finding(severity=Severity.INFO, message="sup norm of A", quantity="A_sup", value=a_sup))
        if max(bound, a_sup) >= 1.0:
            findings.append(
                Finding(
                    severity=Severity.ERROR,
                    message="‖A‖ ≥ 1 violates a_0 < 1",
                    quantity="A_sup",
                    value=max(bound, a_sup),
                )
            )

    for k, term in enumerate(sys.terms):
        _check_matrix(term.B, f"B_{k + 1}", times, norm, findings)
        _check_delay(term.h, f"h_{k + 1}", times, findings)
    _check_delay(sys.g, "g", times, findings)

    if sys.f is not None:
        try:
            values = sys.forcing(times)
            if not np.all(np.isfinite(values)):
                findings.append(Finding(severity=Severity.ERROR, message="forcing is not finite on the grid", quantity="f"))
        except ExprDomainError as e:
            findings.append(Finding(severity=Severity.ERROR, message=f"forcing: {e}", quantity="f", value=e.t))

    if initial is not None:
        _check_initial(sys, initial, sampling.samples, findings)

    report = ValidationReport.from_findings(findings)
    if not report.passed:
        logger.info(f"Validation failed with {len(report.errors)} error(s): {report.errors[0].message}")
    return report


def _check_matrix(
    F: MatrixFunction, name: str, times: np.ndarray, norm: NormKind, findings: List[Finding]
) -> Optional[float]:
    """Sampled sup of |F| compared with its declared bound; None when F cannot be evaluated"""
    try:
        sampled = float(matrix_norms(F.tabulate(times), norm).max())
    except ExprDomainError as e:
        findings.append(Finding(severity=Severity.ERROR, message=f"{name}: {e}", quantity=name, value=e.t))
        return None
    if not np.isfinite(sampled):
        findings.append(Finding(severity=Severity.ERROR, message=f"{name} is not finite on the grid", quantity=name))
        return None

    declared = F.declared_sup
    if declared is not None:
        if sampled > declared + SAMPLING_CONFIG["declared_tolerance"]:
            findings.append(
                Finding(
                    severity=Severity.ERROR,
                    message=f"sampled sup of ‖{name}‖ exceeds its declared bound {declared!r}",
                    quantity=f"{name}_sup",
                    value=sampled,
                )
            )
        elif declared > 0 and sampled >= (1.0 - SAMPLING_CONFIG["warning_fraction"]) * declared:
            findings.append(
                Finding(
                    severity=Severity.WARNING,
                    message=f"sampled sup of ‖{name}‖ is within 1% of its declared bound {declared!r}",
                    quantity=f"{name}_sup",
                    value=sampled,
                )
            )
    return sampled


def _check_delay(arg: DelayArg, name: str, times: np.ndarray, findings: List[Finding]) -> None:
    tolerance = SAMPLING_CONFIG["declared_tolerance"]
    try:
        delays = arg.delays(times)
    except ExprDomainError as e:
        findings.append(Finding(severity=Severity.ERROR, message=f"{name}: {e}", quantity=name, value=e.t))
        return

    negative = delays < -tolerance
    if np.any(negative):
        t = float(times[np.argmax(negative)])
        findings.append(
            Finding(
                severity=Severity.ERROR,
                message=f"negative delay at sampled t = {t!r} for {name}",
                quantity=name,
                value=float(delays[np.argmax(negative)]),
            )
        )
    too_long = delays > arg.tau + tolerance
    if np.any(too_long):
        index = int(np.argmax(too_long))
        findings.append(
            Finding(
                severity=Severity.ERROR,
                message=f"delay of {name} exceeds its bound {arg.tau!r} at sampled t = {float(times[index])!r}",
                quantity=name,
                value=float(delays[index]),
            )
        )


def _check_initial(sys: NeutralSystem, initial: InitialData, samples: int, findings: List[Finding]) -> None:
    if initial.n != sys.n:
        findings.append(
            Finding(
                severity=Severity.ERROR,
                message=f"initial data has dimension {initial.n}, system has {sys.n}",
                quantity="initial",
            )
        )
        return

    intervals = {"phi": max(sys.taus), "psi": sys.sigma}
    for name, length in intervals.items():
        times = np.linspace(sys.t0 - length, sys.t0, samples) if length > 0 else np.array([sys.t0])
        try:
            values = initial.phi_values(times) if name == "phi" else initial.psi_values(times)
        except ExprDomainError as e:
            findings.append(Finding(severity=Severity.ERROR, message=f"{name}: {e}", quantity=name, value=e.t))
            continue
        if not np.all(np.isfinite(values)):
            findings.append(Finding(severity=Severity.ERROR, message=f"{name} is not bounded on its interval", quantity=name))
