import json

import pandas as pd
import pytest

from src.cli.main import main

from conftest import system_config


def _run(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_certify_selected_test(capsys):
    code, report = _run(capsys, "certify", "example2.json", "--test", "thm32")
    assert code == 0
    assert [cert["test_id"] for cert in report["certificates"]] == ["thm32"]
    assert report["certificates"][0]["verdict"] == "certified"
    assert report["config"] == "example2_n4"


def test_certify_parameter_override_fails(capsys):
    code, report = _run(capsys, "certify", "example410.json", "--set", "nu=0.2")
    assert code == 1
    assert {cert["verdict"] for cert in report["certificates"]} == {"not_certified"}


def test_explicit_inapplicable_test(capsys):
    code, report = _run(capsys, "certify", "example2.json", "--test", "prop3")
    assert code == 2
    assert report["certificates"][0]["verdict"] == "inapplicable"


def test_malformed_config(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(
        json.dumps({"system": {"dimension": 1, "terms": [{"B": [["-1 +"]], "h": "t", "tau": 0.0}]}}),
        encoding="utf-8",
    )
    code, report = _run(capsys, "certify", str(path))
    assert code == 2
    assert report["kind"] == "ConfigError"
    assert report["findings"][0]["severity"] == "error"


def test_unparsable_override_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["certify", "example410.json", "--set", "nu"])
    assert info.value.code == 2


@pytest.mark.parametrize("command", ["certify", "bound", "verify"])
def test_invalid_system_exits_with_error(capsys, tmp_path, command):
    path = tmp_path / "long_delay.json"
    path.write_text(json.dumps(system_config([{"B": [[-1.0]], "h": "t - 1.5", "tau": 0.01}])), encoding="utf-8")
    code, report = _run(capsys, command, str(path), "--lambda", "0.5")
    assert code == 2
    assert not report["validation"]["passed"]


def test_bound_at_fixed_rate(capsys):
    code, report = _run(capsys, "bound", "example2.json", "--lambda", "0.06")
    assert code == 0
    assert report["bound"]["lambda"] == 0.06
    assert report["bound"]["m0"] <= 2.0
    assert 2.0 * report["bound"]["c_f"] == pytest.approx(33.6, rel=0.01)


def test_bound_optimized(capsys):
    code, report = _run(capsys, "bound", "example2.json", "--optimize")
    assert code == 0
    assert report["optimized"]
    assert report["bound"]["lambda"] >= 0.06

    code, report = _run(capsys, "bound", "scalar_ode.json", "--optimize")
    assert code == 0
    assert report["bound"]["lambda"] == pytest.approx(1.0, abs=1e-5)


def test_simulate_writes_trajectory(capsys, tmp_path):
    out = tmp_path / "trajectory.csv"
    code, report = _run(capsys, "simulate", "neutral_step.json", "--out", str(out))
    assert code == 0
    assert report["csv_path"] == str(out)
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["t", "x1", "xd1"]
    assert frame["x1"].iloc[-1] == pytest.approx(0.5, abs=1e-9)


def test_verify(capsys):
    code, report = _run(capsys, "verify", "scalar_ode.json")
    assert code == 0
    assert report["check"]["first_violation"] is None

    code, report = _run(capsys, "verify", "scalar_ode.json", "--m0-scale", "0.5")
    assert code == 1
    assert report["check"]["max_ratio"] > 1.0


def test_sweep_refined_thresholds(capsys, tmp_path):
    out = tmp_path / "sweep.csv"
    code, report = _run(
        capsys, "sweep", "example410.json", "--param", "nu", "--range", "0.01:0.2", "--points", "20", "--refine",
        "--out", str(out),
    )
    assert code == 0
    assert report["thresholds"]["thm32"] == [pytest.approx(1 / 16.5, abs=1e-4)]
    assert report["thresholds"]["thm32a"] == [pytest.approx(1 / 8.2, abs=1e-4)]
    assert len(pd.read_csv(out)) == 20


def test_sweep_of_unused_parameter(capsys):
    code, report = _run(capsys, "sweep", "example410.json", "--param", "mu", "--range", "0:1", "--points", "3")
    assert code == 2
    assert report["kind"] == "ParameterUnusedError"


def test_output_is_deterministic(capsys):
    _, first = _run(capsys, "certify", "example410.json")
    _, second = _run(capsys, "certify", "example410.json")
    assert first == second


def test_fixture_writes_example2_with_chosen_dimension(capsys, tmp_path):
    path = tmp_path / "example2_n3.json"
    code, report = _run(capsys, "fixture", "example2", "--n", "3", "--out", str(path))
    assert code == 0
    assert report["config"] == "example2_n3"
    assert report["closed_form"]["holds"]
    assert json.loads(path.read_text(encoding="utf-8"))["system"]["dimension"] == 3

    code, report = _run(capsys, "certify", str(path), "--test", "thm32")
    assert code == 0
    assert report["config"] == "example2_n3"


def test_fixture_rejects_empty_dimension(capsys, tmp_path):
    code, report = _run(capsys, "fixture", "example2", "--n", "0", "--out", str(tmp_path / "empty.json"))
    assert code == 2
    assert report["kind"] == "ConfigError"
    assert not (tmp_path / "empty.json").exists()
