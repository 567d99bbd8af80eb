import json

import pytest

from avgfid import __version__
from avgfid.main import EXIT_INVALID, EXIT_OK, EXIT_PARSE, run


def _compute(fixture_path, channel, gate, *extra):
    return ["compute", "--channel", fixture_path(channel), "--gate", fixture_path(gate), *extra]


def _report(capsys):
    return json.loads(capsys.readouterr().out)


def test_exact_compute_report(fixture_path, capsys):
    assert run(_compute(fixture_path, "depolarizing.json", "gate_identity.json", "--method", "exact")) == EXIT_OK
    report = _report(capsys)
    assert list(report) == ["tool", "command", "method", "channel", "gate", "parameters", "results"]
    assert report["tool"] == {"name": "avgfid", "version": __version__}
    assert report["channel"]["dim"] == 2 and len(report["channel"]["sha256"]) == 64
    assert report["parameters"] == {"basis": "shiftclock"}
    assert report["results"]["gate_fidelity"]["value"] == pytest.approx(0.95, abs=1e-12)


def test_composed_channel_against_its_gate(fixture_path, capsys):
    assert run(_compute(fixture_path, "composed.json", "gate_x.json", "--method", "exact", "--basis", "pauli")) == EXIT_OK
    report = _report(capsys)
    assert report["parameters"]["basis"] == "pauli"
    assert report["results"]["gate_fidelity"]["value"] == pytest.approx(0.9, abs=1e-12)


def test_unitary_against_identity(fixture_path, capsys):
    assert run(_compute(fixture_path, "unitary_z.json", "gate_identity.json", "--method", "exact")) == EXIT_OK
    assert _report(capsys)["results"]["gate_fidelity"]["value"] == pytest.approx(1 / 3, abs=1e-12)


def test_mc_compute_report(fixture_path, capsys):
    argv = _compute(fixture_path, "depolarizing_qutrit.json", "gate_identity_qutrit.json", "--method", "mc", "--samples", "4000", "--seed", "7")
    assert run(argv) == EXIT_OK
    report = _report(capsys)
    assert report["parameters"] == {"basis": "shiftclock", "samples": 4000, "seed": 7}
    estimate = report["results"]["gate_fidelity"]
    exact = 1 - 0.2 * 2 / 3
    assert abs(estimate["raw"] - exact) < 5 * estimate["std_error"]


def test_experiment_compute_report(fixture_path, capsys):
    argv = _compute(fixture_path, "depolarizing.json", "gate_identity.json", "--method", "experiment", "--shots", "500", "--repeats", "20", "--seed", "3")
    assert run(argv) == EXIT_OK
    estimate = _report(capsys)["results"]["gate_fidelity"]
    assert estimate["shots"] == 500 and estimate["n_samples"] == 20
    assert abs(estimate["raw"] - 0.95) < 5 * estimate["std_error"]


@pytest.mark.parametrize(
    "channel,gate,extra",
    [
        ("depolarizing.json", "gate_identity.json", ("--method", "exact")),
        ("kraus_identity.json", "gate_identity.json", ("--method", "exact")),
        ("composed.json", "gate_x.json", ("--method", "exact")),
        ("depolarizing.json", "gate_x.json", ("--method", "mc", "--samples", "3000", "--seed", "11", "--workers", "3")),
        ("random_qutrit.json", "gate_identity_qutrit.json", ("--method", "experiment", "--shots", "100", "--repeats", "4", "--seed", "1")),
    ],
)
def test_reports_are_byte_identical_across_runs(fixture_path, tmp_path, channel, gate, extra):
    first, second = tmp_path / "first.json", tmp_path / "second.json"
    assert run([*_compute(fixture_path, channel, gate, *extra), "--out", str(first)]) == EXIT_OK
    assert run([*_compute(fixture_path, channel, gate, *extra), "--out", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def _assert_matches_golden(actual, expected, path="report"):
    assert type(actual) is type(expected), path
    if isinstance(expected, dict):
        assert list(actual) == list(expected), path
        for key in expected:
            _assert_matches_golden(actual[key], expected[key], f"{path}.{key}")
    elif isinstance(expected, float):
        # last bits depend on the BLAS build
        assert actual == pytest.approx(expected, abs=1e-12), path
    else:
        assert actual == expected, path


@pytest.mark.parametrize(
    "channel,gate",
    [("depolarizing.json", "gate_identity.json"), ("kraus_identity.json", "gate_identity.json"), ("composed.json", "gate_x.json")],
)
def test_exact_report_matches_golden_file(fixture_path, tmp_path, channel, gate):
    out = tmp_path / "report.json"
    assert run([*_compute(fixture_path, channel, gate, "--method", "exact"), "--out", str(out)]) == EXIT_OK
    with open(fixture_path(f"golden/{channel}"), encoding="utf-8") as f:
        expected = json.load(f)
    _assert_matches_golden(json.loads(out.read_text(encoding="utf-8")), expected)


def test_worker_count_does_not_change_report(fixture_path, tmp_path):
    base = _compute(fixture_path, "random_qutrit.json", "gate_identity_qutrit.json", "--method", "mc", "--samples", "5000", "--seed", "2")
    one, four = tmp_path / "one.json", tmp_path / "four.json"
    assert run([*base, "--workers", "1", "--out", str(one)]) == EXIT_OK
    assert run([*base, "--workers", "4", "--out", str(four)]) == EXIT_OK
    assert one.read_bytes() == four.read_bytes()


def test_timing_adds_duration(fixture_path, capsys):
    assert run(_compute(fixture_path, "depolarizing.json", "gate_identity.json", "--method", "exact", "--timing")) == EXIT_OK
    report = _report(capsys)
    assert list(report)[-1] == "duration_seconds"
    assert report["duration_seconds"] >= 0


def test_text_format(fixture_path, capsys):
    assert run(_compute(fixture_path, "depolarizing.json", "gate_identity.json", "--method", "exact", "--format", "text")) == EXIT_OK
    text = capsys.readouterr().out
    assert text.startswith(f"avgfid {__version__} :: compute (exact)")
    assert "gate_fidelity" in text and "0.95" in text
    assert "duration" not in text


def test_twirl_report(fixture_path, capsys):
    assert run(["twirl", "--channel", fixture_path("depolarizing_qutrit.json")]) == EXIT_OK
    report = _report(capsys)
    assert report["results"]["exact_twirl"]["p"] == pytest.approx(0.2, abs=1e-12)
    assert "empirical_twirl" not in report["results"]


def test_twirl_with_unitaries(fixture_path, capsys):
    assert run(["twirl", "--channel", fixture_path("unitary_z.json"), "--unitaries", "10000", "--seed", "5"]) == EXIT_OK
    report = _report(capsys)
    assert report["results"]["exact_twirl"]["p"] == pytest.approx(4 / 3, abs=1e-12)
    assert report["results"]["empirical_twirl"]["choi_distance"] < 0.05
    assert report["parameters"] == {"unitaries": 10000, "seed": 5}


def test_validate_report(fixture_path, capsys):
    assert run(["validate", "--channel", fixture_path("random_qutrit.json")]) == EXIT_OK
    results = _report(capsys)["results"]
    assert results["valid"] is True
    assert results["kraus_rank"] == 4
    assert results["trace_preservation_error"] < 1e-10


@pytest.mark.parametrize(
    "argv,expected",
    [
        (["validate", "--channel", "malformed.json"], EXIT_PARSE),
        (["validate", "--channel", "unknown_type.json"], EXIT_PARSE),
        (["validate", "--channel", "missing.json"], EXIT_PARSE),
        (["validate", "--channel", "not_trace_preserving.json"], EXIT_INVALID),
        (["twirl", "--channel", "p_out_of_range.json"], EXIT_INVALID),
        (["twirl", "--channel", "depolarizing.json", "--unitaries", "10"], EXIT_PARSE),
    ],
)
def test_exit_codes(fixture_path, argv, expected):
    resolved = [fixture_path(a) if a.endswith(".json") else a for a in argv]
    assert run(resolved) == expected


def test_missing_method_option_exits_2(fixture_path, capsys):
    assert run(_compute(fixture_path, "depolarizing.json", "gate_identity.json", "--method", "mc", "--seed", "1")) == EXIT_PARSE
    assert "--samples" in capsys.readouterr().err


def test_dimension_mismatch_exits_1(fixture_path):
    assert run(_compute(fixture_path, "depolarizing.json", "gate_identity_qutrit.json", "--method", "exact")) == EXIT_INVALID


def test_pauli_basis_needs_qubits(fixture_path):
    argv = _compute(fixture_path, "depolarizing_qutrit.json", "gate_identity_qutrit.json", "--method", "exact", "--basis", "pauli")
    assert run(argv) == EXIT_INVALID


@pytest.mark.parametrize("argv", [[], ["compute"], ["validate", "--channel", "x.json", "--samples", "3"], ["compute", "--method", "exact", "--samples", "0"]])
def test_argument_errors_exit_2(argv):
    assert run(argv) == EXIT_PARSE


def test_version(capsys):
    assert run(["--version"]) == EXIT_OK
    assert __version__ in capsys.readouterr().out


def test_errors_never_write_a_report(fixture_path, capsys):
    run(["validate", "--channel", fixture_path("not_trace_preserving.json")])
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "Validation failed" in captured.err
