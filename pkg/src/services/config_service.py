import json
import logging
from pathlib import Path
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Set, Tuple, Union

from pydantic import ValidationError

from config.settings import FIXTURES_CONFIG
from src.core.errors import ConfigError, ExprSyntaxError, ParameterUnusedError
from src.core.expressions import parse_value, substitute_parameters
from src.core.matfun import MatrixFunction
from src.core.model import DelayArg, DelayTerm, InitialData, NeutralSystem
from src.models.schemas import NormKind, RunConfig

logger = logging.getLogger(__name__)

_RESERVED_NAMES = {"t", "neg", "abs", "sin", "cos", "exp", "sqrt", "pow"}


class RunContext(NamedTuple):
    config: RunConfig
    system: NeutralSystem
    initial: Optional[InitialData]
    used_parameters: Set[str]

    @property
    def norm(self) -> NormKind:
        return NormKind.parse(self.config.norm)


class _ExpressionBuilder:
    """Parses config values after parameter substitution, remembering which parameters were used"""

    def __init__(self, parameters: Mapping[str, float]):
        self.parameters = dict(parameters)
        self.used: Set[str] = set()

    def value(self, raw: Union[str, float], where: str):
        if isinstance(raw, str):
            raw, used = substitute_parameters(raw, self.parameters)
            self.used |= used
        try:
            return parse_value(raw)
        except ExprSyntaxError as e:
            raise ConfigError(f"{where}: {e}") from e

    def vector(self, raw: Sequence[Union[str, float]], where: str) -> Tuple:
        return tuple(self.value(entry, f"{where}[{i}]") for i, entry in enumerate(raw))

    def matrix(self, raw: Sequence[Sequence[Union[str, float]]], where: str, declared_sup: Optional[float]) -> MatrixFunction:
        entries = tuple(
            tuple(self.value(entry, f"{where} entry ({i}, {j})") for j, entry in enumerate(row))
            for i, row in enumerate(raw)
        )
        return MatrixFunction(entries=entries, declared_sup=declared_sup)


class ConfigService:
    """Service for loading run configurations and building systems from them"""

    @staticmethod
    def resolve_path(path: Union[str, Path]) -> Path:
        """Paths that do not exist as given are looked up in the fixtures directory"""
        candidate = Path(path)
        if candidate.exists():
            return candidate
        fixture = Path(FIXTURES_CONFIG["base_dir"]) / candidate
        return fixture if fixture.exists() else candidate

    @staticmethod
    def load(path: Union[str, Path]) -> RunConfig:
        """Read and schema-validate a JSON run configuration"""
        resolved = ConfigService.resolve_path(path)
        try:
            with open(resolved, "r", encoding="utf-8") as handle:
                data = json.load(handle)
        except OSError as e:
            raise ConfigError(f"cannot read config {resolved}: {e}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"config {resolved} is not valid JSON: {e}") from e
        return ConfigService.parse(data)

    @staticmethod
    def parse(data: Mapping) -> RunConfig:
        try:
            config = RunConfig.model_validate(data)
        except ValidationError as e:
            raise ConfigError(f"invalid run configuration: {e}") from e
        reserved = _RESERVED_NAMES & set(config.parameters)
        if reserved:
            raise ConfigError(f"parameter names {sorted(reserved)} are reserved")
        return config

    @staticmethod
    def with_parameters(config: RunConfig, overrides: Mapping[str, float]) -> RunConfig:
        parameters = {**config.parameters, **{name: float(value) for name, value in overrides.items()}}
        return config.model_copy(update={"parameters": parameters})

    @staticmethod
    def build(config: RunConfig, require_parameters: Sequence[str] = ()) -> RunContext:
        """
        Build the system and initial data of a run configuration

        Raises:
            ConfigError: an expression does not parse or a declared bound does not fit the system
            ParameterUnusedError: a required parameter appears in no expression
        """
        spec = config.system
        bounds = config.declared_bounds
        builder = _ExpressionBuilder(config.parameters)

        bk_sup: List[Optional[float]] = list(bounds.Bk_sup or [None] * len(spec.terms))
        if len(bk_sup) != len(spec.terms):
            raise ConfigError(f"declared_bounds.Bk_sup has {len(bk_sup)} entries for {len(spec.terms)} terms")

        if spec.A is None:
            A = MatrixFunction.zeros(spec.dimension)
        else:
            A = builder.matrix(spec.A, "system.A", bounds.A_sup)
        terms = tuple(
            DelayTerm(
                B=builder.matrix(term.B, f"system.terms[{k}].B", bk_sup[k]),
                h=DelayArg(h=builder.value(term.h, f"system.terms[{k}].h"), tau=term.tau),
            )
            for k, term in enumerate(spec.terms)
        )
        forcing = builder.vector(spec.f, "system.f") if spec.f is not None else None
        try:
            system = NeutralSystem(
                n=spec.dimension,
                t0=spec.t0,
                A=A,
                g=DelayArg(h=builder.value(spec.g, "system.g"), tau=spec.sigma),
                terms=terms,
                f=forcing,
                B_sum_sup=bounds.B_sum_sup,
            )
            initial = None
            if config.initial is not None:
                initial = InitialData(
                    phi=builder.vector(config.initial.phi, "initial.phi"),
                    psi=builder.vector(config.initial.psi, "initial.psi"),
                )
        except ValidationError as e:
            raise ConfigError(f"inconsistent system data: {e}") from e
        if initial is not None and initial.n != system.n:
            raise ConfigError(f"initial data has dimension {initial.n}, system has {system.n}")

        for name in require_parameters:
            if name not in builder.used:
                raise ParameterUnusedError(f"parameter {name!r} does not appear in any expression")
        logger.debug(f"Built system {config.name!r}: n={system.n}, m={system.m}, parameters {sorted(builder.used)}")
        return RunContext(config=config, system=system, initial=initial, used_parameters=builder.used)

    @staticmethod
    def load_context(path: Union[str, Path], overrides: Optional[Dict[str, float]] = None) -> RunContext:
        config = ConfigService.load(path)
        if overrides:
            config = ConfigService.with_parameters(config, overrides)
        return ConfigService.build(config)
