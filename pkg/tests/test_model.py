import numpy as np
import pytest
from pydantic import ValidationError

from src.core.expressions import parse
from src.core.matfun import MatrixFunction
from src.core.model import DelayArg, DelayTerm, InitialData, NeutralSystem, effective_delay_bounds, validate
from src.models.schemas import SamplingPolicy, Severity

from conftest import build, constant_term, system_config

SAMPLING = SamplingPolicy(window_length=10.0, samples=201)


def _messages(report, severity=Severity.ERROR):
    return [finding.message for finding in report.findings if finding.severity == severity]


def test_example2_validates(example2):
    report = validate(example2.system, example2.config.sampling, example2.initial)
    assert report.passed
    info = [f for f in report.findings if f.severity == Severity.INFO and f.quantity == "A_sup"]
    assert info[0].value == pytest.approx(0.01, abs=1e-12)


def test_identity_neutral_part_is_rejected():
    ctx = build(system_config([constant_term([[-1.0, 0.0], [0.0, -1.0]])], A=[[1.0, 0.0], [0.0, 1.0]], g="t - 1", sigma=1.0))
    report = validate(ctx.system, SAMPLING)
    assert not report.passed
    assert "‖A‖ ≥ 1 violates a_0 < 1" in _messages(report)


def test_advanced_argument_is_rejected():
    term = {"B": [[-1.0]], "h": "t + 0.1", "tau": 0.1}
    report = validate(build(system_config([term])).system, SAMPLING)
    assert not report.passed
    assert any(message.startswith("negative delay at sampled t") for message in _messages(report))


def test_delay_beyond_declared_bound_is_rejected():
    term = {"B": [[-1.0]], "h": "t - 0.5", "tau": 0.2}
    report = validate(build(system_config([term])).system, SAMPLING)
    assert any("exceeds its bound" in message for message in _messages(report))


def test_declared_sup_below_sampled_is_an_error_and_near_it_a_warning():
    term = {"B": [["sin(t)"]], "h": "t", "tau": 0.0}
    too_small = build(system_config([term], declared_bounds={"Bk_sup": [0.5]}))
    assert not validate(too_small.system, SAMPLING).passed

    tight = build(system_config([term], declared_bounds={"Bk_sup": [1.0]}))
    report = validate(tight.system, SAMPLING)
    assert report.passed
    assert _messages(report, Severity.WARNING)


def test_validation_is_repeatable(example2):
    term = {"B": [[-1.0]], "h": "t - 0.5", "tau": 0.2}
    invalid = build(system_config([term]))
    for ctx in (example2, invalid):
        first = validate(ctx.system, ctx.config.sampling, ctx.initial)
        assert validate(ctx.system, ctx.config.sampling, ctx.initial) == first


def test_undefined_coefficient_is_reported_with_its_entry():
    term = {"B": [[-1.0, "1/(t - 5)"], [0.0, -1.0]], "h": "t", "tau": 0.0}
    report = validate(build(system_config([term])).system, SamplingPolicy(window_length=10.0, samples=11))
    assert not report.passed
    assert any("entry (0, 1)" in message for message in _messages(report))


def test_initial_data_dimension_mismatch():
    ctx = build(system_config([constant_term([[-1.0]])]))
    initial = InitialData(phi=(parse("1"), parse("1")), psi=(parse("0"), parse("0")))
    report = validate(ctx.system, SAMPLING, initial)
    assert any("dimension" in message for message in _messages(report))


def test_unbounded_initial_function():
    ctx = build(system_config([constant_term([[-1.0]], delay=1.0)], phi=["1/(t + 0.5)"]))
    report = validate(ctx.system, SAMPLING, ctx.initial)
    assert not report.passed


def test_delay_bounds(example2, example410):
    assert effective_delay_bounds(example2.system).sigma == 0.1
    assert effective_delay_bounds(example2.system).taus == [0.1, 0.1]
    assert effective_delay_bounds(example410().system).taus == [0.0, 1.0]
    ctx = build(system_config([constant_term([[-1.0]], 0.3), constant_term([[-1.0]], 0.7)]))
    assert effective_delay_bounds(ctx.system).taus == [0.3, 0.7]
    assert effective_delay_bounds(ctx.system).max_tau == 0.7


def test_system_properties(example2, example410):
    sys = example2.system
    assert (sys.n, sys.m) == (4, 2)
    assert sys.is_neutral and sys.is_homogeneous and not sys.is_constant

    scalar = build(system_config([constant_term([[-1.0]])])).system
    assert not scalar.is_neutral
    assert scalar.is_constant


def test_delay_sum_combines_terms(example2):
    times = np.linspace(0.0, 3.0, 7)
    total = example2.system.B_sum.tabulate(times)
    parts = sum(term.B.tabulate(times) for term in example2.system.terms)
    np.testing.assert_allclose(total, parts, atol=1e-15)
    assert example2.system.B_sum.declared_sup == 0.5


def test_constant_delay_detection():
    times = np.linspace(0.0, 10.0, 101)
    assert DelayArg(h=parse("t - 0.25"), tau=0.25).constant_delay(times) == pytest.approx(0.25)
    assert DelayArg(h=parse("t - 0.1*abs(sin(t))"), tau=0.1).constant_delay(times) is None
    assert DelayArg(h=parse("t"), tau=0.0).is_identity


def test_shape_mismatch_is_rejected():
    term = DelayTerm(B=MatrixFunction.constant(-np.eye(2)), h=DelayArg(h=parse("t"), tau=0.0))
    with pytest.raises(ValidationError):
        NeutralSystem(n=2, A=MatrixFunction.zeros(3), g=DelayArg(h=parse("t"), tau=0.0), terms=(term,))


def test_forcing_defaults_to_zero():
    ctx = build(system_config([constant_term([[-1.0]])]))
    np.testing.assert_array_equal(ctx.system.forcing(np.linspace(0, 1, 3)), np.zeros((3, 1)))
    forced = build(system_config([constant_term([[-1.0]])], f=["sin(t)"]))
    np.testing.assert_allclose(forced.system.forcing(np.array([np.pi / 2])), [[1.0]])
