import logging
from typing import Dict, List, Optional, Tuple

from config.settings import CERTIFY_CONFIG
from src.models.schemas import (
    Certificate,
    ConstantRecord,
    ConstantSource,
    StabilityTest,
    SupEstimate,
    Verdict,
)

logger = logging.getLogger(__name__)


class ConstantLedger:
    """Collects every constant of a certificate together with its provenance"""

    def __init__(self):
        self.records: Dict[str, ConstantRecord] = {}

    def estimate(self, name: str, estimate: SupEstimate) -> float:
        self.records[name] = ConstantRecord.from_estimate(estimate)
        return estimate.value

    def sampled(self, name: str, value: float, window: Tuple[float, float], samples: int) -> float:
        self.records[name] = ConstantRecord.sampled(value, window, samples)
        return float(value)

    def computed(self, name: str, value: float, *inputs: str) -> float:
        self.records[name] = ConstantRecord.computed(value, *inputs)
        return float(value)

    def config(self, name: str, value: float) -> float:
        self.records[name] = ConstantRecord.config(value)
        return float(value)

    @property
    def grid_certified(self) -> bool:
        return any(record.source == ConstantSource.SAMPLED for record in self.records.values())

    def conclude(
        self,
        test_id: StabilityTest,
        route_margins: Dict[str, float],
        specialization: Optional[str] = None,
        notes: Optional[List[str]] = None,
        prefer: Optional[str] = None,
    ) -> Certificate:
        """
        Verdict from the route with the largest margin, or from `prefer` when
        that route certifies. A route margin is the smallest slack over all of
        its inequalities; margins within the boundary band of zero are
        reported as not certified.
        """
        route, margin = max(route_margins.items(), key=lambda item: item[1])
        if prefer is not None and route_margins.get(prefer, 0.0) > CERTIFY_CONFIG["boundary_margin"]:
            route, margin = prefer, route_margins[prefer]
        notes = list(notes or [])
        certified = margin > CERTIFY_CONFIG["boundary_margin"]
        if not certified and margin > 0.0:
            notes.append("boundary: margin within roundoff of zero, not certified")
        for name, value in route_margins.items():
            self.computed(f"margin_{name}", value)
        logger.debug(f"{test_id.value}: route margins {route_margins}")
        return Certificate(
            test_id=test_id,
            verdict=Verdict.CERTIFIED if certified else Verdict.NOT_CERTIFIED,
            constants=dict(self.records),
            margin=margin,
            grid_certified=self.grid_certified,
            route=route if certified else None,
            specialization=specialization,
            notes=notes,
        )


def inapplicable(test_id: StabilityTest, reason: str, ledger: Optional[ConstantLedger] = None) -> Certificate:
    """Certificate for a test whose structural precondition does not hold"""
    logger.info(f"{test_id.value} inapplicable: {reason}")
    return Certificate(
        test_id=test_id,
        verdict=Verdict.INAPPLICABLE,
        constants=dict(ledger.records) if ledger else {},
        margin=0.0,
        grid_certified=ledger.grid_certified if ledger else False,
        notes=[f"inapplicable: {reason}"],
    )
