import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from periodic_jacobi import ValidationError, discriminant_value, harper, make_jacobi
from periodic_jacobi.cli import cmd_analyze, cmd_sample, main
from periodic_jacobi.io import dumps, parse_operator


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(path)


@pytest.fixture
def harper_file(tmp_path):
    assert main(["harper", "1", "3", "-o", str(tmp_path / "h.json")]) == 0
    return str(tmp_path / "h.json")


@pytest.fixture
def constant_file(tmp_path):
    return write(tmp_path, "c.json", {"q": 3, "a": [1, 1, 1], "b": [0, 0, 0], "label": "flat"})


class TestParse:
    def test_valid(self):
        J, label = parse_operator('{"q": 2, "a": [1, 2e0], "b": [0.5, -1E-1], "label": "x"}')
        assert J.q == 2 and label == "x"
        np.testing.assert_array_equal(J.b, [0.5, -0.1])

    @pytest.mark.parametrize("text", [
        '{"q": 2, "a": [1], "b": [0, 0]}',
        '{"q": 2, "a": [1, 1], "b": [0, 0], "extra": 1}',
        '{"q": 2, "a": [1, 1]}',
        '{"q": "2", "a": [1, 1], "b": [0, 0]}',
        '{"q": 2, "a": [1, true], "b": [0, 0]}',
        '{"q": 2, "a": [1, 1], "b": [0, 0], "label": 3}',
        '[1, 2]',
        '{bad json',
    ])
    def test_invalid(self, text):
        with pytest.raises(ValidationError):
            parse_operator(text)


class TestSerialisation:
    @given(st.lists(st.floats(allow_nan=False, allow_infinity=False), max_size=8))
    @settings(max_examples=100)
    def test_float_round_trip(self, values):
        back = json.loads(dumps({"v": values}))["v"]
        assert back == values
        assert all(isinstance(v, float) for v in back)

    def test_nan_becomes_null(self):
        assert json.loads(dumps({"x": float("nan"), "y": [math.inf]})) == {"x": None, "y": [None]}

    def test_key_order_kept(self):
        text = dumps({"b": 1, "a": {"z": True, "y": None}})
        assert text.index('"b"') < text.index('"a"') < text.index('"z"') < text.index('"y"')

    def test_numpy_values(self):
        doc = {"arr": np.array([[1.5, 2.0]]), "flag": np.bool_(True), "n": np.int64(3)}
        assert json.loads(dumps(doc)) == {"arr": [[1.5, 2.0]], "flag": True, "n": 3}


class TestAnalyze:
    def test_harper_document(self, harper_file, tmp_path):
        out = tmp_path / "a.json"
        assert main(["analyze", harper_file, "-o", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert list(doc)[:4] == ["input", "shift", "c", "A"]
        assert doc["bounds"]["summary"]["c"] > 2.41
        root = next(r for r in doc["bounds"]["records"] if r["name"] == "c_root_bound")
        assert root["satisfied"] and 2.41 < root["rhs"] < 2.42
        assert len(doc["Q"]) == 6
        assert [t["n"] for t in doc["verification"]["trace_moments"]] == [0, 1, 2, 3, 4]
        assert doc["verification"]["herglotz"]["max_difference"] < 1e-5
        assert "generated_at" not in doc

    def test_constant_document(self, constant_file):
        doc = cmd_analyze(constant_file, None, skip_dirichlet=False)
        assert abs(doc["Q"][0]) < 1e-12
        v = doc["verification"]
        assert v["dirichlet_1"]["integral"] == 0.0 and v["dirichlet_2"]["integral"] == 0.0
        assert all(t["residual"] < 1e-12 for t in v["trace_moments"])
        assert v["vertical_identity"]["residual"] < 1e-12
        assert doc["bounds"]["summary"]["degenerate"]
        assert all(r["degenerate"] for r in doc["bounds"]["records"])

    def test_skip_flags_and_stamp(self, harper_file, tmp_path, capsys):
        assert main(["analyze", harper_file, "--skip-dirichlet", "--skip-herglotz", "--stamp"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert "dirichlet_1" not in doc["verification"] and "herglotz" not in doc["verification"]
        assert "generated_at" in doc

    def test_byte_identical(self, harper_file, tmp_path):
        for name in ("x.json", "y.json"):
            assert main(["analyze", harper_file, "-o", str(tmp_path / name)]) == 0
        assert (tmp_path / "x.json").read_bytes() == (tmp_path / "y.json").read_bytes()

    def test_tol_edge_and_ymax(self, harper_file, capsys):
        assert main(["analyze", harper_file, "--tol-edge", "1e-12", "--ymax", "14"]) == 0
        assert json.loads(capsys.readouterr().out)["c"] > 2.41


class TestExitCodes:
    def test_malformed_document(self, tmp_path, capsys):
        path = write(tmp_path, "bad.json", {"q": 3, "a": [1, 1], "b": [0, 0, 0]})
        assert main(["analyze", path]) == 2

    def test_missing_file(self, tmp_path):
        assert main(["bounds", str(tmp_path / "missing.json")]) == 2

    def test_usage(self, capsys):
        assert main([]) == 1
        assert main(["analyze"]) == 1
        assert main(["frobnicate", "x"]) == 1
        assert main(["analyze", "x.json", "--ymax", "tall"]) == 1

    def test_numerical_error(self, harper_file):
        # a tiny integration box leaves a tail far above tolerance
        assert main(["analyze", harper_file, "--ymax", "0.5"]) == 3

    def test_no_partial_output(self, harper_file, tmp_path):
        out = tmp_path / "out.json"
        assert main(["analyze", harper_file, "--ymax", "0.5", "-o", str(out)]) == 3
        assert not out.exists()
        assert list(tmp_path.iterdir()) == [tmp_path / "h.json"]

    def test_bad_harper(self):
        assert main(["harper", "1", "1"]) == 2

    def test_bad_trace_order(self, harper_file):
        assert main(["trace-check", harper_file, "-n", "6"]) == 2


class TestSample:
    def test_constant(self, constant_file):
        rows = np.loadtxt(cmd_sample(constant_file, None, 501).splitlines()[1:], delimiter=",")
        np.testing.assert_allclose(rows[:, 3], rows[:, 0], atol=1e-7)
        np.testing.assert_array_equal(rows[:, 4], 0.0)

    def test_harper(self, harper_file, tmp_path):
        out = tmp_path / "s.csv"
        assert main(["sample", harper_file, "-n", "1001", "-o", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "x,lambda,D,u,v" and len(lines) == 1002
        rows = np.loadtxt(lines[1:], delimiter=",")
        analysis = cmd_analyze(harper_file, str(tmp_path / "a.json"), skip_dirichlet=True)
        in_gap = np.zeros(len(rows), dtype=bool)
        for left, right in analysis["z_gaps"]:
            in_gap |= (rows[:, 0] > left) & (rows[:, 0] < right)
        np.testing.assert_array_equal(rows[:, 4] > 0, in_gap)
        mid = rows[500]
        assert mid[0] == pytest.approx(np.pi / 2)
        b_shifted = harper(1, 3).b + analysis["shift"]
        assert mid[2] == pytest.approx(discriminant_value(make_jacobi(3, [1, 1, 1], b_shifted), 0.0),
                                       abs=1e-12)

    def test_needs_two_points(self, harper_file):
        assert main(["sample", harper_file, "-n", "1"]) == 2


class TestOtherCommands:
    def test_harper_document(self, harper_file):
        doc = json.loads(Path(harper_file).read_text())
        assert doc["q"] == 3 and doc["a"] == [1.0, 1.0, 1.0]
        np.testing.assert_allclose(doc["b"], [-1, -1, 2], atol=1e-14)

    def test_bounds(self, harper_file, capsys):
        assert main(["bounds", harper_file]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["summary"]["trace_L2_input"] == 12.0
        assert all(r["satisfied"] for r in doc["records"])

    def test_oracle_check_constant(self, constant_file, capsys):
        assert main(["oracle-check", constant_file]) == 0
        assert json.loads(capsys.readouterr().out)["max_distance"] < 1e-9

    def test_oracle_check_harper(self, harper_file, capsys):
        assert main(["oracle-check", harper_file, "--n-theta", "721"]) == 0
        captured = capsys.readouterr()
        assert json.loads(captured.out)["max_distance"] < 1e-4
        assert "max distance" in captured.err

    def test_oracle_check_random_q5(self, tmp_path, capsys):
        g = np.random.default_rng(5)
        path = write(tmp_path, "r.json", {"q": 5, "a": g.uniform(0.5, 1.5, 5).tolist(),
                                          "b": g.uniform(-1, 1, 5).tolist()})
        assert main(["oracle-check", path]) == 0
        assert len(json.loads(capsys.readouterr().out)["hausdorff"]) == 5

    def test_trace_check(self, harper_file, capsys):
        assert main(["trace-check", harper_file, "-n", "3"]) == 0
        assert json.loads(capsys.readouterr().out)["residual"] < 1e-8
