import numpy as np
import pytest

from src.core.certify import SampledSystem, baseline_km_delay, baseline_km_neutral, certify_nondelay_form
from src.core.certify.comparisons import PROP1_ANOMALY, PROP1_VARIANT
from src.models.schemas import SamplingPolicy, StabilityTest, Verdict

from conftest import build, constant_term, literal, system_config

SAMPLING = SamplingPolicy(window_length=10.0, samples=101)


def _nondelay_system(a0, a1, a2, h2=0.2, h1=0.3):
    """x'(t) - a1 x'(t - h1) = a0 x(t) + a2 x(t - h2), scalar or matrix coefficients"""
    a0, a1, a2 = (np.atleast_2d(np.asarray(a, dtype=float)) for a in (a0, a1, a2))
    terms = [constant_term(a0)]
    if np.any(a2):
        terms.append(constant_term(a2, h2))
    return build(system_config(terms, A=a1.tolist(), g=f"t - {literal(h1)}", sigma=h1)).system


def _grid(sys):
    return SampledSystem(sys, sampling=SAMPLING)


def test_nondelay_form_certifies():
    sys = _nondelay_system(-2.0, 0.1, 0.5)
    cert = certify_nondelay_form(sys, grid=_grid(sys))
    assert cert.test_id == StabilityTest.COR41
    assert cert.certified
    assert cert.value("q") == pytest.approx(0.2)
    assert cert.value("lhs_cond42") == pytest.approx(-1.5 + 1.5 * 0.2 / 0.8)
    assert cert.value("lhs_cond42") == pytest.approx(-1.125)
    assert cert.value("margin_cond42") > 0


def test_nondelay_form_large_neutral_part():
    sys = _nondelay_system(-2.0, 1.0, 0.5)
    cert = certify_nondelay_form(sys, grid=_grid(sys))
    assert cert.verdict == Verdict.NOT_CERTIFIED
    assert "lhs_cond41" not in cert.constants
    assert "lhs_cond42" not in cert.constants


def test_nondelay_form_without_delayed_term():
    sys = _nondelay_system(-2.0, 0.1, 0.0)
    cert = certify_nondelay_form(sys, grid=_grid(sys))
    assert cert.value("A2_sup") == 0.0
    assert cert.value("lhs_cond41") == pytest.approx(-2.0 + 2.0 * 0.1 / 0.9)
    assert cert.certified


def test_nondelay_form_needs_a_non_delayed_term(example2):
    grid = SampledSystem(example2.system, sampling=example2.config.sampling)
    assert certify_nondelay_form(example2.system, grid=grid).verdict == Verdict.INAPPLICABLE


def test_printed_first_baseline_fails_and_notes_it():
    sys = _nondelay_system(-2.0, 0.1, 0.3)
    prop1, prop2 = baseline_km_neutral(sys, grid=_grid(sys))
    assert prop1.verdict == Verdict.NOT_CERTIFIED
    assert prop1.value("lhs_prop1") == pytest.approx(-2.0 + (2.0 + 0.03) / 0.9)
    assert PROP1_ANOMALY in prop1.notes
    assert prop2.certified
    assert prop2.value("q") == pytest.approx(0.16)
    assert prop2.value("lhs_prop2") == pytest.approx(-1.7 + 1.7 * 0.16 / 0.84)


def test_first_baseline_variant():
    sys = _nondelay_system(-2.0, 0.1, 0.3)
    prop1, _ = baseline_km_neutral(sys, grid=_grid(sys), variant=True)
    assert prop1.certified
    assert prop1.route == "variant"
    assert PROP1_VARIANT in prop1.notes
    assert prop1.value("lhs_prop1") == pytest.approx(-2.0 + (0.3 + 0.03) / 0.9)


def test_first_baseline_is_boundary_tight():
    sys = build(system_config([constant_term(-np.eye(2))])).system
    prop1, _ = baseline_km_neutral(sys, grid=_grid(sys))
    assert prop1.verdict == Verdict.NOT_CERTIFIED
    assert prop1.margin == pytest.approx(0.0, abs=1e-15)


def test_baselines_need_constant_data(example410):
    ctx = example410(0.05)
    prop1, prop2 = baseline_km_neutral(ctx.system, sampling=ctx.config.sampling)
    assert prop1.verdict == prop2.verdict == Verdict.INAPPLICABLE
    assert prop1.notes[0].startswith("inapplicable: ")


def test_nondelay_route_matches_second_baseline():
    sys = _nondelay_system(-2.0, 0.1, 0.3)
    grid = _grid(sys)
    cert = certify_nondelay_form(sys, grid=grid)
    _, prop2 = baseline_km_neutral(sys, grid=grid)
    assert cert.value("lhs_cond42") == pytest.approx(prop2.value("lhs_prop2"), abs=1e-12)


@pytest.mark.parametrize("delay, certified", [(0.5, True), (1.5, False)])
def test_delay_baseline(delay, certified):
    sys = build(system_config([constant_term(-np.eye(2), delay)])).system
    cert = baseline_km_delay(sys, sampling=SAMPLING)
    assert cert.certified == certified
    assert cert.value("lhs_prop3") == pytest.approx(delay)


def test_delay_baseline_needs_constant_delay():
    term = {"B": (-np.eye(2)).tolist(), "h": "t - 0.1*abs(sin(t))", "tau": 0.1}
    sys = build(system_config([term])).system
    assert baseline_km_delay(sys, sampling=SAMPLING).verdict == Verdict.INAPPLICABLE


def test_delay_baseline_needs_a_single_retarded_term(example2):
    assert baseline_km_delay(example2.system, sampling=SAMPLING).verdict == Verdict.INAPPLICABLE
