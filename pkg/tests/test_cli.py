import json
import subprocess
import sys

import numpy as np
import pytest

from agent_economy import Economy, dumps_economy, load_economy
from agent_economy.cli import (
    EXIT_CONSTRAINT,
    EXIT_DIMENSION,
    EXIT_INVALID,
    EXIT_MISMATCH,
    EXIT_PARSE,
    EXIT_REDUCIBLE,
    EXIT_SCENARIO,
    EXIT_USAGE,
    run,
)


def call(capsys, *argv):
    code = run(list(argv))
    return code, capsys.readouterr().out


def write(tmp_path, economy, name="e.json"):
    path = tmp_path / name
    path.write_text(dumps_economy(economy))
    return str(path)


@pytest.fixture
def rotation(tmp_path, capsys):
    path = tmp_path / "rotation.json"
    assert call(capsys, "scenario", "--name", "rotation", "--output", str(path))[0] == 0
    return str(path)


def test_scenario_file_round_trips_byte_for_byte(tmp_path, capsys, rotation):
    code, out = call(capsys, "scenario", "--name", "rotation")
    assert code == 0
    text = open(rotation).read()
    assert out == text
    assert dumps_economy(load_economy(rotation)) == text


def test_validate_reports(tmp_path, capsys, rotation):
    code, out = call(capsys, "validate", rotation, "--json")
    assert code == 0 and json.loads(out)["ok"] and json.loads(out)["irreducible"]
    bad = write(tmp_path, Economy(np.full((2, 2), 0.4), np.ones((2, 2))))
    code, out = call(capsys, "validate", bad, "--json")
    doc = json.loads(out)
    assert code == EXIT_INVALID and not doc["ok"]
    assert {v["constraint"] for v in doc["violations"]} == {"column sum != 1"}
    assert [v["index"] for v in doc["violations"]] == [[1], [2]]


def test_stationary_cross_checks_closed_form(capsys, rotation):
    code, out = call(capsys, "stationary", rotation, "--json")
    doc = json.loads(out)
    assert code == 0 and doc["closed_form_agrees"]
    np.testing.assert_allclose(doc["stationary"], [1 / 3] * 3)


def test_simulate_writes_csv(tmp_path, capsys):
    e = write(tmp_path, Economy(np.array([[0.5, 1.0], [0.5, 0.0]]), np.ones((2, 2)), [1.0, 0.0]))
    code, out = call(capsys, "simulate", e, "--episodes", "4")
    assert code == 0
    assert out.splitlines() == ["episode,x_1,x_2", "0,1,0", "1,0.5,0.5", "2,0.75,0.25", "3,0.625,0.375"]
    csv_path = tmp_path / "trace.csv"
    code, out = call(capsys, "simulate", e, "--output", str(csv_path), "--json")
    doc = json.loads(out)
    assert doc["converged"] and csv_path.read_text().startswith("episode,x_1,x_2\n")
    np.testing.assert_allclose(doc["cesaro_average"], [2 / 3, 1 / 3], atol=1e-9)


def test_best_response_reports_both_methods(capsys, rotation):
    code, out = call(capsys, "best-response", rotation, "--agent", "1", "--json", "--grid", "201")
    doc = json.loads(out)
    assert code == 0 and doc["agreement"]["agree"]
    assert doc["brute_force"]["column"] == [0.0, 0.0, 1.0]
    assert doc["grid_lp"]["agent"] == 1


def test_best_response_agent_out_of_range(capsys, rotation):
    code, out = call(capsys, "best-response", rotation, "--agent", "4")
    assert code == EXIT_MISMATCH and json.loads(out)["error"]["kind"] == "verb_mismatch"


def test_classify2_from_flags_and_files(tmp_path, capsys, rotation):
    code, out = call(capsys, "classify2", "--game", "1,3,3,1", "--json")
    points = [(e["p"][0], e["q"][0]) for e in json.loads(out)["entries"]]
    assert code == 0 and sorted(points) == [(0, 0), (0.5, 0.5), (1, 1)]
    two = write(tmp_path, Economy(np.eye(2), np.array([[1.0, 3.0], [3.0, 1.0]])))
    code, out = call(capsys, "classify2", two, "--json")
    assert code == 0 and len(json.loads(out)["entries"]) == 3
    code, out = call(capsys, "classify2", rotation)
    assert code == EXIT_MISMATCH
    code, out = call(capsys, "classify2", "--game", "1,2")
    assert code == EXIT_PARSE


def test_verify_reports_rotation_failure(capsys, rotation):
    code, out = call(capsys, "verify", rotation, "--json")
    doc = json.loads(out)
    assert code == 0 and not doc["is_equilibrium"]
    assert [v["agent"] for v in doc["per_agent"]] == [1, 2, 3]
    assert doc["per_agent"][0]["deviation_utility"] == pytest.approx(0.5)


def test_demo(capsys):
    code, out = call(capsys, "demo", "--json", "--grid", "1001")
    doc = json.loads(out)
    assert code == 0 and doc["grid_lp"]["column"] == [0.0, 0.0, 1.0]
    assert doc["utility_all_on_agent_3"] - doc["utility_all_on_agent_2"] > 1e-3


def test_error_paths(tmp_path, capsys):
    cases = []
    missing = str(tmp_path / "missing.json")
    cases.append((("verify", missing), EXIT_PARSE, "parse_error"))
    garbage = tmp_path / "garbage.json"
    garbage.write_text("{]")
    cases.append((("verify", str(garbage)), EXIT_PARSE, "parse_error"))
    shape = tmp_path / "shape.json"
    shape.write_text(json.dumps({"n": 2, "spending": [[1, 0], [0, 1]], "utility": [[1, 1, 1]]}))
    cases.append((("verify", str(shape)), EXIT_DIMENSION, "dimension_error"))
    invalid = write(tmp_path, Economy(np.full((2, 2), 0.4), np.ones((2, 2))), "invalid.json")
    cases.append((("verify", invalid), EXIT_CONSTRAINT, "invalid_economy"))
    reducible = write(tmp_path, Economy(np.eye(3), np.ones((3, 3))), "reducible.json")
    cases.append((("stationary", reducible), EXIT_REDUCIBLE, "reducible_chain"))
    cases.append((("scenario", "--name", "collaboration", "--param", "a=1"), EXIT_SCENARIO, "scenario_error"))
    cases.append((("verify",), EXIT_USAGE, "usage_error"))
    cases.append((("frobnicate",), EXIT_USAGE, "usage_error"))
    for argv, expected, kind in cases:
        code, out = call(capsys, *argv)
        doc = json.loads(out)
        assert (code, doc["error"]["code"], doc["error"]["kind"]) == (expected, expected, kind), argv


def test_console_entry_point(tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "agent_economy", "classify2", "--game", "1,1.5,3,1", "--json"],
        capture_output=True, text=True, check=True,
    ).stdout
    assert [e["scenario"] for e in json.loads(out)["entries"]] == ["no_adoption"]


def test_verify_coalition_flag(tmp_path, capsys, rotation):
    collab = tmp_path / "collab.json"
    call(capsys, "scenario", "--name", "collaboration", "--param", "a=1", "--param", "b=3",
         "--param", "c=3", "--param", "d=1", "--output", str(collab))
    code, out = call(capsys, "verify", str(collab), "--json")
    assert code == 0 and not json.loads(out)["is_equilibrium"]
    code, out = call(capsys, "verify", str(collab), "--coalition", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["is_equilibrium"] and doc["coalitions"][0]["agents"] == [2, 3]
    code, out = call(capsys, "verify", rotation, "--coalition")
    assert code == EXIT_SCENARIO
