import json

import numpy as np
import pytest

from avgfid.config import Settings, SpecLoader
from avgfid.documents import SpecSyntaxError, SpecValidationError, parse_channel_spec, parse_gate_spec, serialize_spec
from core.basis import shift_operator


def _kraus_spec(operators, dim=2):
    encoded = [[[[float(z.real), float(z.imag)] for z in row] for row in op] for op in operators]
    return json.dumps({"dim": dim, "channel": {"type": "kraus", "operators": encoded}})


def test_depolarizing_spec(fixture_path):
    document = SpecLoader().load_channel(fixture_path("depolarizing.json"))
    assert document.dim == 2
    assert document.channel.type == "depolarizing"
    assert document.resolve().dim == 2


def test_compose_spec_is_recursive(fixture_path):
    document = SpecLoader().load_channel(fixture_path("composed.json"))
    assert document.channel.first.type == "unitary"
    assert document.channel.then.type == "depolarizing"
    assert document.resolve().rank == 4


def test_random_spec_is_reproducible(fixture_path):
    loader = SpecLoader()
    a = loader.load_channel(fixture_path("random_qutrit.json")).resolve()
    b = loader.load_channel(fixture_path("random_qutrit.json")).resolve()
    assert a.rank == 4
    assert all(np.array_equal(x, y) for x, y in zip(a.kraus_ops, b.kraus_ops))


@pytest.mark.parametrize("name", ["malformed.json", "unknown_type.json"])
def test_structural_problems_are_syntax_errors(fixture_path, name):
    with pytest.raises(SpecSyntaxError):
        SpecLoader().load_channel(fixture_path(name))


@pytest.mark.parametrize("name", ["not_trace_preserving.json", "p_out_of_range.json"])
def test_physical_violations_are_validation_errors(fixture_path, name):
    with pytest.raises(SpecValidationError) as excinfo:
        SpecLoader().load_channel(fixture_path(name))
    assert name in str(excinfo.value)


def test_missing_file_is_a_syntax_error(tmp_path):
    with pytest.raises(SpecSyntaxError, match="not found"):
        SpecLoader().load_channel(str(tmp_path / "absent.json"))


@pytest.mark.parametrize(
    "document",
    [
        {"dim": 1, "channel": {"type": "depolarizing", "p": 0.1}},
        {"dim": 2, "channel": {"type": "depolarizing", "p": 0.1, "gamma": 2}},
        {"dim": 2, "channel": {"type": "random", "kraus_rank": 0, "seed": 1}},
        {"dim": 2, "channel": {"type": "kraus", "operators": []}},
        {"channel": {"type": "depolarizing", "p": 0.1}},
        {"dim": 2, "channel": {"type": "depolarizing", "p": "0.1"}},
        {"dim": "2", "channel": {"type": "depolarizing", "p": 0.1}},
        {"dim": 2, "channel": {"type": "kraus", "operators": [[[["1", "0"], [0, 0]], [[0, 0], [1, 0]]]]}},
        {"dim": 2, "channel": {"type": "random", "kraus_rank": 2.5, "seed": 1}},
        {"dim": 2, "channel": {"type": "random", "kraus_rank": 2, "seed": -1}},
        {"dim": 33, "channel": {"type": "depolarizing", "p": 0.1}},
        {"dim": 5000, "channel": {"type": "random", "kraus_rank": 1024, "seed": 0}},
    ],
)
def test_schema_violations(document):
    with pytest.raises(SpecSyntaxError):
        parse_channel_spec(json.dumps(document))


def test_kraus_rounding_is_absorbed():
    eye = np.eye(2) * (1 + 1e-9)
    channel = parse_channel_spec(_kraus_spec([eye])).resolve()
    completeness = channel.kraus_ops[0].conj().T @ channel.kraus_ops[0]
    assert np.max(np.abs(completeness - np.eye(2))) < 1e-14


def test_kraus_beyond_tolerance_is_rejected():
    with pytest.raises(SpecValidationError, match="trace preserving"):
        parse_channel_spec(_kraus_spec([np.eye(2) * (1 + 1e-6)]))


def test_wrong_matrix_shape_is_rejected():
    with pytest.raises(SpecValidationError, match="2x2"):
        parse_channel_spec(_kraus_spec([np.eye(3)], dim=2))


def test_ragged_rows_are_rejected():
    text = json.dumps({"dim": 2, "channel": {"type": "unitary", "matrix": [[[1, 0], [0, 0]], [[0, 0]]]}})
    with pytest.raises(SpecValidationError):
        parse_channel_spec(text)


def test_non_unitary_channel_matrix_is_rejected():
    text = json.dumps({"dim": 2, "channel": {"type": "unitary", "matrix": [[[1, 0], [0, 0]], [[0, 0], [2, 0]]]}})
    with pytest.raises(SpecValidationError, match="channel.matrix"):
        parse_channel_spec(text)


def test_named_gates():
    assert np.array_equal(parse_gate_spec('{"dim": 3, "gate": "shift"}').resolve(), shift_operator(3))
    assert np.array_equal(parse_gate_spec('{"dim": 2, "gate": "identity"}').resolve(), np.eye(2))


def test_gate_matrix_is_polished_to_unitary():
    s = 0.7071067811865  # truncated 1/sqrt(2)
    gate = parse_gate_spec(json.dumps({"dim": 2, "gate": [[[s, 0], [s, 0]], [[s, 0], [-s, 0]]]})).resolve()
    assert np.max(np.abs(gate.conj().T @ gate - np.eye(2))) < 1e-14


def test_unknown_gate_name_is_a_syntax_error():
    with pytest.raises(SpecSyntaxError):
        parse_gate_spec('{"dim": 2, "gate": "hadamard"}')


@pytest.mark.parametrize("text", ['{"dim": 2, "gate": [[["1", 0], [0, 0]], [[0, 0], [1, 0]]]}', '{"dim": 64, "gate": "identity"}'])
def test_gate_schema_violations(text):
    with pytest.raises(SpecSyntaxError):
        parse_gate_spec(text)


def test_serialized_spec_parses_to_same_document(fixture_path, tmp_path):
    loader = SpecLoader()
    original = loader.load_channel(fixture_path("composed.json"))
    target = tmp_path / "copy" / "composed.json"
    loader.save(original, str(target))
    reloaded = loader.load_channel(str(target))
    assert reloaded == original
    assert reloaded.fingerprint() == original.fingerprint()
    assert serialize_spec(reloaded) == target.read_bytes()


def test_fingerprint_ignores_whitespace():
    compact = parse_channel_spec('{"dim":2,"channel":{"type":"depolarizing","p":0.1}}')
    spaced = parse_channel_spec('{ "dim": 2,\n  "channel": { "p": 0.1, "type": "depolarizing" } }')
    assert compact.fingerprint() == spaced.fingerprint()
    assert compact.fingerprint()["type"] == "depolarizing"


def test_settings_read_environment(monkeypatch):
    monkeypatch.setenv("AVGFID_LOG_LEVEL", "DEBUG")
    monkeypatch.setenv("AVGFID_WORKERS", "3")
    settings = Settings()
    assert settings.log_level == "DEBUG"
    assert settings.workers == 3
