import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from config.settings import SIMULATION_CONFIG, SWEEP_CONFIG
from src.core.certify import SampledSystem
from src.core.model import validate
from src.models.schemas import RunConfig, StabilityTest, SweepReport, SweepRow, SweepSpec, Verdict
from src.observability.logging_config import observe_operation
from src.services.config_service import ConfigService
from src.services.report_service import CertificationService

logger = logging.getLogger(__name__)


class SweepService:
    """Service for evaluating certificates across a range of one named parameter"""

    @staticmethod
    def evaluate(config: RunConfig, spec: SweepSpec, value: float, tests: Sequence[StabilityTest]) -> SweepRow:
        """
        One sweep row. Values at which the system fails validation are
        recorded as inapplicable with zero margin.

        Raises:
            ParameterUnusedError: the swept parameter appears in no expression
        """
        ctx = ConfigService.build(
            ConfigService.with_parameters(config, {spec.parameter: value}), require_parameters=(spec.parameter,)
        )
        report = validate(ctx.system, ctx.config.sampling, ctx.initial, ctx.norm)
        if not report.passed:
            logger.warning(f"{spec.parameter} = {value!r} fails validation: {report.errors[0].message}")
            return SweepRow(
                value=value,
                verdicts={test.value: Verdict.INAPPLICABLE for test in tests},
                margins={test.value: 0.0 for test in tests},
            )

        grid = SampledSystem(ctx.system, ctx.norm, ctx.config.sampling)
        certificates = [CertificationService.run_test(ctx, test, grid) for test in tests]
        return SweepRow(
            value=value,
            verdicts={cert.test_id.value: cert.verdict for cert in certificates},
            margins={cert.test_id.value: cert.margin for cert in certificates},
        )

    @staticmethod
    def _refine(
        config: RunConfig, spec: SweepSpec, test: StabilityTest, lo: SweepRow, hi: SweepRow, tolerance: float
    ) -> float:
        """Bisect the flip of one test's verdict between two adjacent rows"""
        key = test.value
        a, b = lo.value, hi.value
        left = lo.verdicts[key]
        while b - a > tolerance:
            mid = 0.5 * (a + b)
            row = SweepService.evaluate(config, spec, mid, [test])
            if row.verdicts[key] == left:
                a = mid
            else:
                b = mid
        return 0.5 * (a + b)

    @staticmethod
    @observe_operation("sweep")
    def sweep(
        config: RunConfig,
        spec: SweepSpec,
        tests: Optional[Sequence[StabilityTest]] = None,
        out: Optional[Union[str, Path]] = None,
        workers: Optional[int] = None,
    ) -> SweepReport:
        """
        Evaluate the selected tests at `points` evenly spaced parameter values

        Rows run in parallel and are assembled in parameter order. With
        spec.refine, every verdict flip between adjacent rows is bisected to
        SWEEP_CONFIG["refine_tolerance"].
        """
        tests = list(tests or config.certification.tests or SWEEP_CONFIG["default_tests"])
        tests = [StabilityTest(test) for test in tests]
        values = [float(value) for value in np.linspace(spec.lo, spec.hi, spec.points)]

        # fail on an unused parameter before starting the pool
        first = SweepService.evaluate(config, spec, values[0], tests)
        with ThreadPoolExecutor(max_workers=workers or SWEEP_CONFIG["workers"]) as pool:
            rest = list(pool.map(lambda value: SweepService.evaluate(config, spec, value, tests), values[1:]))
        rows: List[SweepRow] = [first, *rest]

        thresholds: Dict[str, List[float]] = {test.value: [] for test in tests}
        for test in tests:
            key = test.value
            for lo, hi in zip(rows, rows[1:]):
                if lo.verdicts[key] == hi.verdicts[key]:
                    continue
                if spec.refine:
                    flip = SweepService._refine(config, spec, test, lo, hi, SWEEP_CONFIG["refine_tolerance"])
                else:
                    flip = 0.5 * (lo.value + hi.value)
                thresholds[key].append(flip)
                logger.info(f"{key}: verdict flips near {spec.parameter} = {flip:.6g}")

        if out is not None:
            SweepService.to_frame(rows, tests).to_csv(
                out, index=False, float_format=SIMULATION_CONFIG["csv_float_format"]
            )
        return SweepReport(parameter=spec.parameter, rows=rows, thresholds=thresholds)

    @staticmethod
    def to_frame(rows: Sequence[SweepRow], tests: Sequence[StabilityTest]) -> pd.DataFrame:
        """Columns: value, then verdict_<test> and margin_<test> per test"""
        records = []
        for row in rows:
            record = {"value": row.value}
            for test in tests:
                record[f"verdict_{test.value}"] = row.verdicts[test.value].value
                record[f"margin_{test.value}"] = row.margins[test.value]
            records.append(record)
        return pd.DataFrame.from_records(records)
