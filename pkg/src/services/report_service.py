import logging
from pathlib import Path
from typing import List, Optional, Sequence, Union

import pandas as pd

from config.settings import SIMULATION_CONFIG
from src.core.certify import (
    SampledSystem,
    baseline_km_delay,
    baseline_km_neutral,
    certify_dominated,
    certify_nondelay_form,
    certify_rate_free,
    certify_with_rate,
    inapplicable,
    max_decay_rate,
    solution_bound,
)
from src.core.errors import ConfigError, NoCertifiableRateError
from src.core.matfun import vector_norm
from src.core.model import validate
from src.core.simulate import initial_data_norms, integrate, verify_bound
from src.models.schemas import (
    BoundReport,
    Certificate,
    CertifyReport,
    ExponentialBound,
    SimulateReport,
    StabilityTest,
    ValidationReport,
    Verdict,
    VerifyReport,
)
from src.services.config_service import RunContext

logger = logging.getLogger(__name__)

EXIT_CERTIFIED = 0
EXIT_NOT_CERTIFIED = 1
EXIT_ERROR = 2


def certificate_exit_code(certificates: Sequence[Certificate], explicit: bool = True) -> int:
    """
    0 when every counted certificate is certified, 1 when one is not, 2 when
    nothing could be evaluated. Explicitly selected tests that are
    inapplicable count as errors; in a default run they are only reported.
    """
    if explicit and any(cert.verdict == Verdict.INAPPLICABLE for cert in certificates):
        return EXIT_ERROR
    counted = [cert for cert in certificates if cert.verdict != Verdict.INAPPLICABLE]
    if not counted:
        return EXIT_ERROR
    return EXIT_CERTIFIED if all(cert.certified for cert in counted) else EXIT_NOT_CERTIFIED


class CertificationService:
    """Service for running stability tests, bounds and bound verification on a run context"""

    @staticmethod
    def run_test(
        ctx: RunContext, test: StabilityTest, grid: SampledSystem, rate: Optional[float] = None
    ) -> Certificate:
        sys = ctx.system
        config = ctx.config
        rate = rate if rate is not None else config.certification.rate
        if test in (StabilityTest.THM31, StabilityTest.THM31A):
            if rate is None:
                return inapplicable(test, "no decay rate configured (set certification.lambda or pass --lambda)")
            return certify_with_rate(sys, rate, grid=grid, routes=(test.value,))
        if test in (StabilityTest.THM32, StabilityTest.THM32A):
            return certify_rate_free(sys, grid=grid, routes=(test.value,))
        if test == StabilityTest.COR410:
            return certify_rate_free(sys, grid=grid, test_id=test)
        if test == StabilityTest.COR33A:
            bounds = config.declared_bounds
            return certify_dominated(sys, bounds.A_dom, bounds.Bk_dom, bounds.B_dom, grid=grid)
        if test == StabilityTest.COR41:
            return certify_nondelay_form(sys, grid=grid)
        if test in (StabilityTest.PROP1, StabilityTest.PROP2):
            prop1, prop2 = baseline_km_neutral(sys, grid=grid, variant=config.certification.prop1_variant)
            return prop1 if test == StabilityTest.PROP1 else prop2
        return baseline_km_delay(sys, grid=grid)

    @staticmethod
    def validation(ctx: RunContext) -> ValidationReport:
        """Validation findings that gate every certification path"""
        report = validate(ctx.system, ctx.config.sampling, ctx.initial, ctx.norm)
        if not report.passed:
            logger.warning(f"{ctx.config.name} failed validation: {report.errors[0].message}")
        return report

    @staticmethod
    def certify(
        ctx: RunContext, tests: Optional[Sequence[StabilityTest]] = None, rate: Optional[float] = None
    ) -> CertifyReport:
        """Validate, then run the selected tests (config selection, else every test)"""
        report = CertificationService.validation(ctx)
        if not report.passed:
            return CertifyReport(
                config=ctx.config.name, norm=ctx.norm, validation=report, certificates=[], exit_code=EXIT_ERROR
            )

        explicit = bool(tests) or bool(ctx.config.certification.tests)
        selected: List[StabilityTest] = list(tests or ctx.config.certification.tests or StabilityTest)
        grid = SampledSystem(ctx.system, ctx.norm, ctx.config.sampling)
        certificates = [CertificationService.run_test(ctx, test, grid, rate) for test in selected]
        exit_code = certificate_exit_code(certificates, explicit)
        logger.info(f"Certified {sum(c.certified for c in certificates)}/{len(certificates)} tests, exit {exit_code}")
        return CertifyReport(
            config=ctx.config.name, norm=ctx.norm, validation=report, certificates=certificates, exit_code=exit_code
        )

    @staticmethod
    def _rate_certificate(ctx: RunContext, rate: Optional[float], optimize: bool):
        """(certificate, bound or None, optimized flag); bound only when certified"""
        rate = rate if rate is not None else ctx.config.certification.rate
        if optimize or rate is None:
            settings = ctx.config.certification
            try:
                result = max_decay_rate(
                    ctx.system,
                    ctx.norm,
                    ctx.config.sampling,
                    lambda_max=settings.lambda_max,
                    grid_points=settings.grid_points,
                )
            except NoCertifiableRateError as e:
                cert = Certificate(
                    test_id=StabilityTest.THM31,
                    verdict=Verdict.NOT_CERTIFIED,
                    margin=0.0,
                    notes=[str(e)],
                )
                return cert, None, True
            return result.certificate, result.bound, True
        cert = certify_with_rate(ctx.system, rate, ctx.norm, ctx.config.sampling)
        bound = solution_bound(ctx.system, cert) if cert.certified else None
        return cert, bound, False

    @staticmethod
    def bound(ctx: RunContext, rate: Optional[float] = None, optimize: bool = False) -> BoundReport:
        report = CertificationService.validation(ctx)
        if not report.passed:
            return BoundReport(config=ctx.config.name, norm=ctx.norm, validation=report, exit_code=EXIT_ERROR)
        cert, bound, optimized = CertificationService._rate_certificate(ctx, rate, optimize)
        return BoundReport(
            config=ctx.config.name,
            norm=ctx.norm,
            validation=report,
            certificate=cert,
            bound=bound,
            optimized=optimized,
            exit_code=EXIT_CERTIFIED if bound is not None else EXIT_NOT_CERTIFIED,
        )

    @staticmethod
    def simulate(ctx: RunContext, out: Optional[Union[str, Path]] = None) -> SimulateReport:
        settings = ctx.config.simulation
        if settings is None or ctx.initial is None:
            raise ConfigError("simulation needs both the simulation and initial blocks")
        traj = integrate(ctx.system, ctx.initial, settings.t_end, settings.step)
        if out is not None:
            traj.to_csv(out)
        final_norm = vector_norm(traj.x[-1], ctx.norm)
        logger.info(f"Simulated to t = {traj.t_end!r}, final norm {final_norm:.6g}")
        return SimulateReport(
            config=ctx.config.name,
            norm=ctx.norm,
            steps=len(traj.times) - 1,
            t_end=traj.t_end,
            final_norm=final_norm,
            csv_path=str(out) if out is not None else None,
        )

    @staticmethod
    def verify(
        ctx: RunContext,
        rate: Optional[float] = None,
        optimize: bool = False,
        out: Optional[Union[str, Path]] = None,
        m0_scale: Optional[float] = None,
    ) -> VerifyReport:
        """
        Certify, integrate and compare |x(t)| with the bound curve. Invalid
        systems stop with exit code 2, systems that do not certify stop before
        integration with exit code 1.
        """
        settings = ctx.config.simulation
        if settings is None or ctx.initial is None:
            raise ConfigError("verification needs both the simulation and initial blocks")
        report = CertificationService.validation(ctx)
        if not report.passed:
            return VerifyReport(config=ctx.config.name, norm=ctx.norm, validation=report, exit_code=EXIT_ERROR)
        cert, bound, _ = CertificationService._rate_certificate(ctx, rate, optimize)
        if bound is None:
            return VerifyReport(
                config=ctx.config.name, norm=ctx.norm, validation=report, certificate=cert, exit_code=EXIT_NOT_CERTIFIED
            )
        if m0_scale is not None:
            bound = scaled_bound(bound, m0_scale)

        traj = integrate(ctx.system, ctx.initial, settings.t_end, settings.step)
        norms = initial_data_norms(ctx.system, ctx.initial, ctx.norm, ctx.config.sampling.samples, traj.t_end)
        check = verify_bound(traj, bound, norms, ctx.norm, ctx.system)
        if out is not None:
            pd.DataFrame({"t": check.times, "ratio": check.margin_curve}).to_csv(
                out, index=False, float_format=SIMULATION_CONFIG["csv_float_format"]
            )
        return VerifyReport(
            config=ctx.config.name,
            norm=ctx.norm,
            validation=report,
            certificate=cert,
            bound=bound,
            data_norms=norms,
            check=check,
            exit_code=EXIT_CERTIFIED if check.first_violation is None else EXIT_NOT_CERTIFIED,
        )


def scaled_bound(bound: ExponentialBound, m0_scale: float) -> ExponentialBound:
    """Copy with M0 scaled and marked uncertified, so M0 below 1 is accepted"""
    return ExponentialBound.model_validate({**bound.model_dump(), "m0": bound.m0 * m0_scale, "certified": False})
