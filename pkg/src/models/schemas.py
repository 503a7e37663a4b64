import math
from enum import Enum
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config.settings import SAMPLING_CONFIG
from src.core.errors import UnsupportedNormError


# Norm and provenance enums
class NormKind(str, Enum):
    INF = "inf"
    ONE = "one"

    @classmethod
    def parse(cls, value: Union[str, "NormKind"]) -> "NormKind":
        """Accept 'inf'/'one' (and their usual spellings); reject anything else"""
        if isinstance(value, NormKind):
            return value
        aliases = {"inf": cls.INF, "infinity": cls.INF, "max": cls.INF, "one": cls.ONE, "1": cls.ONE, "l1": cls.ONE}
        key = str(value).strip().lower()
        if key not in aliases:
            raise UnsupportedNormError(f"unsupported norm {value!r}; supported norms are 'inf' and 'one'")
        return aliases[key]


class SupMethod(str, Enum):
    DECLARED = "declared"
    SAMPLED = "sampled"


class ConstantSource(str, Enum):
    DECLARED = "declared"
    SAMPLED = "sampled"
    COMPUTED = "computed"
    CONFIG = "config"


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"


class Verdict(str, Enum):
    CERTIFIED = "certified"
    NOT_CERTIFIED = "not_certified"
    INAPPLICABLE = "inapplicable"


class StabilityTest(str, Enum):
    THM31 = "thm31"
    THM31A = "thm31a"
    THM32 = "thm32"
    THM32A = "thm32a"
    COR33A = "cor33a"
    COR41 = "cor41"
    COR410 = "cor410"
    PROP1 = "prop1"
    PROP2 = "prop2"
    PROP3 = "prop3"


# Sup estimates and constants
class SupEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float
    method: SupMethod
    window: Tuple[float, float]
    samples: Optional[int] = None

    @model_validator(mode="after")
    def _check(self) -> "SupEstimate":
        if not math.isfinite(self.value):
            raise ValueError("sup estimate must be finite")
        if self.method == SupMethod.SAMPLED and (self.samples is None or self.samples < 2):
            raise ValueError("sampled sup estimates need at least 2 samples")
        return self


class ConstantRecord(BaseModel):
    value: float
    source: ConstantSource
    window: Optional[Tuple[float, float]] = None
    samples: Optional[int] = None
    inputs: List[str] = Field(default_factory=list)

    @classmethod
    def from_estimate(cls, estimate: SupEstimate) -> "ConstantRecord":
        return cls(
            value=estimate.value,
            source=ConstantSource(estimate.method.value),
            window=estimate.window,
            samples=estimate.samples,
        )

    @classmethod
    def computed(cls, value: float, *inputs: str) -> "ConstantRecord":
        return cls(value=float(value), source=ConstantSource.COMPUTED, inputs=list(inputs))

    @classmethod
    def sampled(cls, value: float, window: Tuple[float, float], samples: int) -> "ConstantRecord":
        return cls(value=float(value), source=ConstantSource.SAMPLED, window=window, samples=samples)

    @classmethod
    def config(cls, value: float) -> "ConstantRecord":
        return cls(value=float(value), source=ConstantSource.CONFIG)


# Validation
class Finding(BaseModel):
    severity: Severity
    message: str
    quantity: str
    value: Optional[float] = None


class ValidationReport(BaseModel):
    passed: bool
    findings: List[Finding] = Field(default_factory=list)

    @classmethod
    def from_findings(cls, findings: List[Finding]) -> "ValidationReport":
        return cls(passed=not any(f.severity == Severity.ERROR for f in findings), findings=findings)

    @property
    def errors(self) -> List[Finding]:
        return [f for f in self.findings if f.severity == Severity.ERROR]


# Certificates and bounds
class Certificate(BaseModel):
    test_id: StabilityTest
    verdict: Verdict
    constants: Dict[str, ConstantRecord] = Field(default_factory=dict)
    margin: float
    grid_certified: bool = False
    route: Optional[str] = None
    specialization: Optional[str] = None
    notes: List[str] = Field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.verdict == Verdict.CERTIFIED

    def value(self, name: str) -> float:
        return self.constants[name].value


class ExponentialBound(BaseModel):
    """
    Coefficients of the solution estimate

        |x(t)| <= M0 e^{-rate (t - t0)} [c_x0 |x(t0)| + c_psi |Psi| + sum_k c_phi_k |Phi|_k]
                  + M0 c_f |f|_[t0, t]
    """

    model_config = ConfigDict(populate_by_name=True)

    rate: float = Field(alias="lambda")
    m0: float
    t0: float = 0.0
    c_x0: float = 1.0
    c_psi: float
    c_phi: List[float]
    c_f: float
    route: Optional[str] = None
    # false for bounds altered after certification (scaled M0)
    certified: bool = True

    @model_validator(mode="after")
    def _check(self) -> "ExponentialBound":
        if self.rate <= 0:
            raise ValueError("decay rate must be positive")
        if self.certified and self.m0 < 1:
            raise ValueError("M0 must be at least 1")
        if min([self.c_x0, self.c_psi, self.c_f, *self.c_phi]) < 0:
            raise ValueError("bound coefficients must be nonnegative")
        return self

    @property
    def f_gain(self) -> float:
        """M0 * c_f, the constant multiplying |f|"""
        return self.m0 * self.c_f

    def initial_term(self, x0_norm: float, psi_norm: float, phi_norms: List[float]) -> float:
        return self.c_x0 * x0_norm + self.c_psi * psi_norm + sum(c * p for c, p in zip(self.c_phi, phi_norms))

    def evaluate(self, t, x0_norm: float, psi_norm: float, phi_norms: List[float], f_norm=0.0):
        """Bound value at time(s) t; f_norm may be an array aligned with t"""
        decay = np.exp(-self.rate * (np.asarray(t, dtype=float) - self.t0))
        return self.m0 * decay * self.initial_term(x0_norm, psi_norm, phi_norms) + self.f_gain * np.asarray(f_norm)


class BoundCheck(BaseModel):
    max_ratio: float
    first_violation: Optional[float] = None
    margin_curve: List[float] = Field(default_factory=list, exclude=True)
    times: List[float] = Field(default_factory=list, exclude=True)

    @model_validator(mode="after")
    def _check(self) -> "BoundCheck":
        if (self.max_ratio <= 1.0) != (self.first_violation is None):
            raise ValueError("first_violation must be present exactly when max_ratio exceeds 1")
        return self


class DataNorms(BaseModel):
    x0: float
    psi: float
    phi: List[float]
    f: float = 0.0


# Run configuration (JSON schema)
MatrixSpec = List[List[Union[str, float]]]


class TermSpec(BaseModel):
    B: MatrixSpec
    h: Union[str, float]
    tau: float = Field(..., ge=0)


class SystemSpec(BaseModel):
    dimension: int = Field(..., ge=1)
    t0: float = Field(0.0, ge=0)
    A: Optional[MatrixSpec] = None
    g: Union[str, float] = "t"
    sigma: float = Field(0.0, ge=0)
    terms: List[TermSpec] = Field(..., min_length=1)
    f: Optional[List[Union[str, float]]] = None

    @model_validator(mode="after")
    def _dimensions(self) -> "SystemSpec":
        n = self.dimension
        matrices = [("A", self.A)] + [(f"terms[{k}].B", term.B) for k, term in enumerate(self.terms)]
        for name, matrix in matrices:
            if matrix is None:
                continue
            if len(matrix) != n or any(len(row) != n for row in matrix):
                raise ValueError(f"{name} must be {n}x{n}")
        if self.f is not None and len(self.f) != n:
            raise ValueError(f"f must have {n} entries")
        return self


class InitialSpec(BaseModel):
    phi: List[Union[str, float]]
    psi: List[Union[str, float]]


class DeclaredBounds(BaseModel):
    A_sup: Optional[float] = Field(None, ge=0)
    Bk_sup: Optional[List[Optional[float]]] = None
    B_sum_sup: Optional[float] = Field(None, ge=0)
    A_dom: Optional[List[List[float]]] = None
    Bk_dom: Optional[List[List[List[float]]]] = None
    B_dom: Optional[List[List[float]]] = None


class SamplingPolicy(BaseModel):
    window_length: float = Field(default_factory=lambda: SAMPLING_CONFIG["window_length"], gt=0)
    samples: int = Field(default_factory=lambda: SAMPLING_CONFIG["samples"], ge=2)
    period: Optional[float] = Field(None, gt=0)

    def window(self, t0: float) -> Tuple[float, float]:
        """Periodic data needs one period only; otherwise the finite window"""
        length = self.period if self.period is not None else self.window_length
        return (t0, t0 + length)


class SimulationSettings(BaseModel):
    step: float = Field(1e-3, gt=0)
    t_end: float = Field(10.0, gt=0)


class CertificationSettings(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    rate: Optional[float] = Field(None, alias="lambda", gt=0)
    tests: List[StabilityTest] = Field(default_factory=list)
    lambda_max: Optional[float] = Field(None, gt=0)
    grid_points: Optional[int] = Field(None, ge=2)
    prop1_variant: bool = False


class RunConfig(BaseModel):
    name: str = "system"
    parameters: Dict[str, float] = Field(default_factory=dict)
    system: SystemSpec
    initial: Optional[InitialSpec] = None
    declared_bounds: DeclaredBounds = Field(default_factory=DeclaredBounds)
    sampling: SamplingPolicy = Field(default_factory=SamplingPolicy)
    simulation: Optional[SimulationSettings] = None
    certification: CertificationSettings = Field(default_factory=CertificationSettings)
    norm: str = "inf"

    @field_validator("norm")
    @classmethod
    def _norm(cls, value: str) -> str:
        return NormKind.parse(value).value


class SweepSpec(BaseModel):
    parameter: str
    lo: float
    hi: float
    points: int = Field(..., ge=2)
    refine: bool = False

    @model_validator(mode="after")
    def _range(self) -> "SweepSpec":
        if not self.lo < self.hi:
            raise ValueError("sweep range needs lo < hi")
        return self

    @classmethod
    def from_range(cls, parameter: str, text: str, points: int, refine: bool = False) -> "SweepSpec":
        lo, _, hi = text.partition(":")
        return cls(parameter=parameter, lo=float(lo), hi=float(hi), points=points, refine=refine)


# Reports
class CertifyReport(BaseModel):
    config: str
    norm: NormKind
    validation: ValidationReport
    certificates: List[Certificate] = Field(default_factory=list)
    exit_code: int


class BoundReport(BaseModel):
    config: str
    norm: NormKind
    validation: Optional[ValidationReport] = None
    certificate: Optional[Certificate] = None
    bound: Optional[ExponentialBound] = None
    optimized: bool = False
    exit_code: int


class VerifyReport(BaseModel):
    config: str
    norm: NormKind
    validation: Optional[ValidationReport] = None
    certificate: Optional[Certificate] = None
    bound: Optional[ExponentialBound] = None
    data_norms: Optional[DataNorms] = None
    check: Optional[BoundCheck] = None
    exit_code: int


class SweepRow(BaseModel):
    value: float
    verdicts: Dict[str, Verdict]
    margins: Dict[str, float]


class SweepReport(BaseModel):
    parameter: str
    rows: List[SweepRow]
    thresholds: Dict[str, List[float]] = Field(default_factory=dict)
    exit_code: int = 0


class SimulateReport(BaseModel):
    config: str
    norm: NormKind
    steps: int
    t_end: float
    final_norm: float
    csv_path: Optional[str] = None
    exit_code: int = 0


class ClosedFormCheck(BaseModel):
    """Informational hand-derived sufficient condition (not a certificate)"""

    name: str
    holds: bool
    margin: float
    lhs: float
    rhs: float


class FixtureReport(BaseModel):
    config: str
    path: str
    closed_form: Optional[ClosedFormCheck] = None
    exit_code: int = 0


class ErrorReport(BaseModel):
    error: str
    kind: str
    findings: List[Finding] = Field(default_factory=list)
    exit_code: int = 2
