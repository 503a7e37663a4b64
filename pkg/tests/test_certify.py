import numpy as np
import pytest

from src.core.certify import (
    SampledSystem,
    build_P,
    certify_dominated,
    certify_rate_free,
    certify_with_rate,
    max_decay_rate,
    solution_bound,
)
from src.core.errors import NoCertifiableRateError, PreconditionError
from src.models.schemas import ConstantSource, NormKind, SamplingPolicy, StabilityTest, Verdict

from conftest import build, constant_term, system_config

SCALAR_SAMPLING = SamplingPolicy(window_length=10.0, samples=101)


def _grid(ctx):
    return SampledSystem(ctx.system, ctx.norm, ctx.config.sampling)


def _assert_traceable(cert):
    """Every computed constant names inputs that are themselves recorded"""
    for name, record in cert.constants.items():
        if record.source == ConstantSource.COMPUTED:
            assert set(record.inputs) <= set(cert.constants), name


# P(t)
def test_P_at_zero_rate_is_the_delay_sum(example2):
    sys = example2.system
    for t in (0.0, 0.7, 2.5):
        np.testing.assert_allclose(build_P(sys, 0.0, t), sys.B_sum.evaluate(t), atol=1e-15)


def test_P_of_scalar_ode(scalar_ode):
    np.testing.assert_allclose(build_P(scalar_ode.system, 0.5, 1.3), [[-0.5]])


def test_grid_P_matches_pointwise(example2):
    grid = _grid(example2)
    values = grid.P(0.06)
    for i in (0, 137, 1000, 2000):
        np.testing.assert_allclose(values[i], build_P(example2.system, 0.06, grid.times[i]), atol=1e-14)


def test_P_rejects_negative_rate(scalar_ode):
    with pytest.raises(ValueError):
        build_P(scalar_ode.system, -0.1, 0.0)


# Rate certificates
def test_example2_rate_certificate(example2):
    cert = certify_with_rate(example2.system, 0.06, grid=_grid(example2))
    assert cert.verdict == Verdict.CERTIFIED
    assert cert.route == "thm31"
    assert cert.grid_certified
    assert cert.value("beta") >= 0.23939 - 1e-3
    assert 0.45 < cert.value("M1") <= 0.5
    assert cert.value("M0") <= 2.0
    assert cert.value("M0") == pytest.approx(1.0 / (1.0 - cert.value("M1")))
    assert cert.constants["A_sup"].source == ConstantSource.DECLARED
    assert cert.constants["beta"].source == ConstantSource.SAMPLED
    _assert_traceable(cert)


def test_example2_second_route_also_certifies(example2):
    cert = certify_with_rate(example2.system, 0.06, grid=_grid(example2), routes=("thm31a",))
    assert cert.test_id == StabilityTest.THM31A
    assert cert.certified
    assert cert.route == "thm31a"
    assert "M1" not in cert.constants
    assert cert.value("M0") == pytest.approx(1.0 / (1.0 - cert.value("M2")))


def test_example2_large_rate_is_not_certified(example2):
    cert = certify_with_rate(example2.system, 5.0, grid=_grid(example2))
    assert cert.verdict == Verdict.NOT_CERTIFIED
    assert cert.margin <= 0
    assert cert.route is None
    assert "M0" not in cert.constants


def test_delay_free_scalar_rate_certificate(scalar_ode):
    cert = certify_with_rate(scalar_ode.system, 0.5, sampling=SCALAR_SAMPLING)
    assert cert.certified
    assert cert.value("M1") == 0.0
    assert cert.value("M0") == 1.0
    assert cert.specialization == "cor32"


def test_rate_must_be_positive(scalar_ode):
    with pytest.raises(PreconditionError):
        certify_with_rate(scalar_ode.system, 0.0, sampling=SCALAR_SAMPLING)


@pytest.mark.parametrize("shift", [1e-6, 1e-3])
def test_pushing_mu_P_past_zero_flips_the_verdict(scalar_ode, shift):
    """x' = -x: mu(P) = rate - 1, so the verdict flips at rate 1"""
    inside = certify_with_rate(scalar_ode.system, 1.0 - shift, sampling=SCALAR_SAMPLING)
    outside = certify_with_rate(scalar_ode.system, 1.0 + shift, sampling=SCALAR_SAMPLING)
    assert inside.certified
    assert inside.value("beta") == pytest.approx(shift, rel=1e-6)
    assert inside.margin == pytest.approx(shift, rel=1e-6)
    assert not outside.certified
    assert outside.value("beta") == pytest.approx(-shift, rel=1e-6)


# Rate-free certificates
def test_example2_rate_free_left_sides(example2):
    cert = certify_rate_free(example2.system, grid=_grid(example2))
    assert cert.certified
    assert cert.value("beta") == pytest.approx(0.3, abs=1e-12)
    assert cert.value("lhs_thm32") == pytest.approx((1.0 / 0.99) * (0.01 / 0.3 + 2 * 0.1 * 0.5 / 0.3), abs=1e-9)
    assert cert.value("lhs_thm32") == pytest.approx(0.37037, abs=1e-5)
    assert cert.value("lhs_thm32a") == pytest.approx(0.205993, abs=1e-5)
    assert cert.specialization is None
    _assert_traceable(cert)


@pytest.mark.parametrize(
    "nu, thm32, thm32a",
    [
        (0.05, True, True),
        (0.1, False, True),
        (0.2, False, False),
    ],
)
def test_example_4_10_routes(example410, nu, thm32, thm32a):
    ctx = example410(nu)
    cert = certify_rate_free(ctx.system, grid=_grid(ctx))
    assert (cert.value("margin_thm32") > 1e-9) == thm32
    assert (cert.value("margin_thm32a") > 1e-9) == thm32a
    assert cert.certified == (thm32 or thm32a)
    assert cert.specialization == "cor410"
    assert cert.value("beta") == pytest.approx(2 * nu, rel=1e-12)
    assert cert.value("lhs_thm32") == pytest.approx(16.4 * nu / (1 - 0.1 * nu), rel=1e-9)
    assert cert.value("lhs_thm32a") == pytest.approx(4.1 * nu / (1 - 4.1 * nu), rel=1e-9)


def test_scalar_report_id_requires_a_scalar_system(example2, example410):
    assert certify_rate_free(example2.system, grid=_grid(example2), test_id=StabilityTest.COR410).verdict == (
        Verdict.INAPPLICABLE
    )
    ctx = example410(0.05)
    cert = certify_rate_free(ctx.system, grid=_grid(ctx), test_id=StabilityTest.COR410)
    assert cert.test_id == StabilityTest.COR410
    assert cert.certified


def test_nonnegative_measure_fails_with_a_note():
    ctx = build(system_config([constant_term([[0.1]])]))
    cert = certify_rate_free(ctx.system, sampling=SCALAR_SAMPLING)
    assert cert.verdict == Verdict.NOT_CERTIFIED
    assert cert.margin == pytest.approx(-0.1)
    assert any("nonnegative" in note for note in cert.notes)
    assert cert.specialization == "cor35"


# Dominated rate-free test
def test_dominated_example2(example2):
    gamma = 0.0025
    C = np.abs(np.array(example2.system.terms[1].B.evaluate(0.0)))
    cert = certify_dominated(
        example2.system, np.full((4, 4), gamma).tolist(), [C.tolist(), C.tolist()], C.tolist(), grid=_grid(example2)
    )
    assert cert.test_id == StabilityTest.COR33A
    assert cert.certified
    assert cert.value("A_dom_norm") == pytest.approx(0.01)
    assert cert.value("margin_sum") == pytest.approx(0.3 * 0.99 - 1.0 * 0.11, abs=1e-9)
    assert cert.value("margin_total") == pytest.approx(0.3 * 0.89 - 0.5 * 0.11, abs=1e-9)
    assert cert.route == "total"


def test_dominated_requires_domination(example2):
    grid = _grid(example2)
    C = np.abs(np.array(example2.system.terms[1].B.evaluate(0.0))).tolist()
    assert certify_dominated(example2.system, None, None, grid=grid).verdict == Verdict.INAPPLICABLE
    assert certify_dominated(example2.system, np.zeros((4, 4)).tolist(), [C, C], grid=grid).verdict == (
        Verdict.INAPPLICABLE
    )
    assert certify_dominated(example2.system, np.ones((4, 4)).tolist(), [C], grid=grid).verdict == (
        Verdict.INAPPLICABLE
    )


# Bounds
def test_example2_bound_coefficients(example2):
    cert = certify_with_rate(example2.system, 0.06, grid=_grid(example2))
    bound = solution_bound(example2.system, cert)
    assert bound.rate == 0.06
    assert bound.route == "thm31"
    assert bound.c_psi == pytest.approx(0.00102, rel=0.01)
    assert sum(bound.c_phi) == pytest.approx(0.102, rel=0.01)
    assert 2.0 * bound.c_f == pytest.approx(33.6, rel=0.01)
    assert bound.f_gain == pytest.approx(bound.m0 * bound.c_f)


def test_bound_without_neutral_part(scalar_ode):
    cert = certify_with_rate(scalar_ode.system, 0.5, sampling=SCALAR_SAMPLING)
    bound = solution_bound(scalar_ode.system, cert)
    assert bound.c_psi == 0.0
    times = np.array([0.0, 1.0, 2.0])
    np.testing.assert_allclose(bound.evaluate(times, 3.0, 0.0, [0.0], 0.0), bound.m0 * np.exp(-0.5 * times) * 3.0)


def test_bound_needs_a_certified_rate_certificate(example2):
    grid = _grid(example2)
    with pytest.raises(PreconditionError):
        solution_bound(example2.system, certify_with_rate(example2.system, 5.0, grid=grid))
    with pytest.raises(PreconditionError):
        solution_bound(example2.system, certify_rate_free(example2.system, grid=grid))


# Decay-rate search
def test_delay_free_rate_limit(scalar_ode):
    result = max_decay_rate(scalar_ode.system, NormKind.INF, SCALAR_SAMPLING)
    assert 1.0 - 1e-5 <= result.rate < 1.0
    assert result.certificate.certified
    assert result.bound.rate == result.rate


def test_example2_rate_search(example2):
    result = max_decay_rate(example2.system, example2.norm, example2.config.sampling)
    assert result.rate >= 0.06
    assert result.bound.m0 >= 1.0


def test_no_certifiable_rate(example410):
    ctx = example410(0.2)
    with pytest.raises(NoCertifiableRateError):
        max_decay_rate(ctx.system, ctx.norm, ctx.config.sampling, lambda_max=1.0, grid_points=20)
