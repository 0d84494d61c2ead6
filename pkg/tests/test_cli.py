import json
import subprocess
import sys
from pathlib import Path

import pytest

from steinbench import cli

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv, env=None, monkeypatch=None):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    return code, json.loads(out) if out else None


class TestExamples:
    def test_groupoid_simple_from_file(self, capsys):
        code, rep = run_json(capsys, "groupoid", "simple", "--input", str(DATA / "r2.json"), "--semiring", "boolean")
        assert code == 0 and rep["by_theorem"] is True and rep["by_bruteforce"] is True

    def test_sfp(self, capsys):
        code, rep = run_json(capsys, "selfsim", "sfp", "--builtin", "grigorchuk", "--element", "d", "--depth", "7")
        assert code == 0 and rep["count"] == 3
        assert rep["paths"] == [["e0"], ["e1"] * 3 + ["e0"], ["e1"] * 6 + ["e0"]]

    def test_omega_counterexample(self, capsys):
        code, rep = run_json(capsys, "tight", "omega", "--builtin", "grigorchuk", "--xi", "e1*", "--gs", "b,c,d")
        assert code == 1 and rep["verdict"] == "false" and rep["counterexample_prefix"] is not None


class TestSemiring:
    def test_check(self, capsys):
        code, rep = run_json(capsys, "semiring", "check", "--builtin", "z4")
        assert code == 0 and rep["valid"] is True

    def test_check_invalid_table(self, capsys, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"carrier": ["0", "1"], "add": [[0, 1], [0, 1]], "mul": [[0, 0], [0, 1]],
                                 "zero": 0, "one": 1}))
        code, rep = run_json(capsys, "semiring", "check", "--input", str(p))
        assert code == 1 and rep["violations"][0]["law"] == "additive commutativity"

    @pytest.mark.parametrize("argv, expected", [
        (["--builtin", "boolean"], 0), (["--builtin", "f5"], 0), (["--builtin", "z4"], 1),
        (["--builtin", "boolean", "--matrix", "2"], 0), (["--builtin", "boolean", "--matrix", "1", "--group", "z2"], 1),
    ])
    def test_simple(self, capsys, argv, expected):
        code, rep = run_json(capsys, "semiring", "simple", *argv)
        assert code == expected and rep["congruence_simple"] is (expected == 0)

    def test_size_cap_is_input_error(self, capsys):
        code, _, err = run(capsys, "semiring", "simple", "--builtin", "boolean", "--matrix", "3", "--cap", "100")
        assert code == 3 and "512" in err


class TestGroupoid:
    def test_analyze(self, capsys):
        code, rep = run_json(capsys, "groupoid", "analyze", "--builtin", "R2 + pt")
        assert code == 0 and rep["is_minimal"] is False and len(rep["orbits"]) == 2

    def test_decompose(self, capsys):
        code, rep = run_json(capsys, "groupoid", "decompose", "--builtin", "R2xZ2")
        assert code == 0 and rep["verification"]["ok"] is True

    def test_simple_negative(self, capsys):
        code, rep = run_json(capsys, "groupoid", "simple", "--builtin", "Z2", "--semiring", "f3")
        assert code == 1 and rep["agree"] is True

    def test_bad_semiring(self, capsys):
        code, _, err = run(capsys, "groupoid", "simple", "--builtin", "R2", "--semiring", "z4")
        assert code == 3


class TestSelfsim:
    def test_act_path(self, capsys):
        code, rep = run_json(capsys, "selfsim", "act", "--builtin", "odometer", "--element", "a", "--path", "e1,e1,e0")
        assert code == 0 and rep["image"] == ["e0", "e0", "e1"]

    def test_act_infinite(self, capsys):
        code, rep = run_json(capsys, "selfsim", "act", "--builtin", "odometer", "--element", "a", "--xi", "e1*")
        assert rep["image"] == "(e0)*"

    def test_cocycle_katsura(self, capsys):
        code, rep = run_json(capsys, "selfsim", "cocycle", "--builtin", "katsura", "--element", "g", "--path", "e12")
        assert code == 0 and rep["section"] == ["g^2"]

    def test_katsura_params(self, capsys):
        code, rep = run_json(capsys, "selfsim", "cocycle", "--builtin", "katsura", "--katsura-a", "2",
                             "--katsura-b", "1", "--element", "g", "--path", "e11^1")
        assert code == 0 and rep["section"] == ["g"]

    def test_equal(self, capsys):
        assert run_json(capsys, "selfsim", "equal", "--builtin", "grigorchuk", "--element", "b c",
                        "--other", "d")[0] == 0
        assert run_json(capsys, "selfsim", "equal", "--input", str(DATA / "grigorchuk.json"), "--element", "a",
                        "--other", "b")[0] == 1

    def test_state_cap_gives_unknown(self, capsys):
        code, rep = run_json(capsys, "selfsim", "equal", "--builtin", "grigorchuk", "--element", "a b " * 16,
                             "--other", "1", "--state-cap", "2")
        assert code == 2 and rep["verdict"] == "unknown"

    def test_bad_letter(self, capsys):
        code, _, err = run(capsys, "selfsim", "sfp", "--builtin", "grigorchuk", "--element", "z")
        assert code == 3 and "z" in err


class TestTight:
    def test_mul(self, capsys):
        code, rep = run_json(capsys, "tight", "mul", "--builtin", "odometer", "--s", "v;a;v", "--t", "e0;1;v")
        assert code == 0 and rep["product"] == {"alpha": ["e1"], "g": [], "beta": ["v"]}

    def test_mul_json_literal(self, capsys):
        s = json.dumps({"alpha": ["v"], "g": ["a"], "beta": ["v"]})
        code, rep = run_json(capsys, "tight", "mul", "--builtin", "odometer", "--s", s, "--t", s)
        assert rep["product"]["g"] == ["a^2"]

    def test_product(self, capsys):
        code, rep = run_json(capsys, "tight", "product", "--builtin", "odometer", "--x", "v;a;v", "--y", "v;a;v")
        assert code == 0 and rep["product"] == [{"alpha": ["v"], "g": ["a^2"], "beta": ["v"]}]

    def test_equal(self, capsys):
        assert run_json(capsys, "tight", "equal", "--builtin", "grigorchuk", "--x", "v;d;v",
                        "--y", "e0;1;e0|e1;b;e1")[0] == 0
        # (e0, d, e0) is not the piece of (v, d, v) over Z(e0)
        assert run_json(capsys, "tight", "equal", "--builtin", "grigorchuk", "--x", "v;d;v",
                        "--y", "e0;d;e0|e1;b;e1")[0] == 1
        code, rep = run_json(capsys, "tight", "equal", "--builtin", "grigorchuk", "--x", "v;d;v", "--y", "v;1;v")
        assert code == 1 and rep["witness"] is not None

    def test_fs(self, capsys):
        code, rep = run_json(capsys, "tight", "fs", "--builtin", "grigorchuk", "--s", "v;d;v", "--xi", "e1*")
        assert code == 0 and (rep["F"], rep["TF"]) == ("true", "false")

    def test_condition_s(self, capsys):
        code, rep = run_json(capsys, "tight", "condition-s", "--builtin", "odometer", "--elements", "v;a;v",
                             "--samples", "e1*", "e0,(e1)*")
        assert code == 0 and rep["verdict"] == "true"

    def test_hausdorff(self, capsys):
        code, rep = run_json(capsys, "tight", "hausdorff", "--builtin", "odometer", "--radius", "2", "--depth", "6")
        assert code == 0 and set(rep["counts"].values()) == {0}
        code, rep = run_json(capsys, "tight", "hausdorff", "--builtin", "katsura", "--depth", "4")
        assert code == 1

    def test_bad_triple(self, capsys):
        code, _, _ = run(capsys, "tight", "mul", "--builtin", "odometer", "--s", "v;a", "--t", "v;a;v")
        assert code == 3


class TestInputErrors:
    def test_malformed_json_has_location(self, capsys, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"units": [\n')
        code, _, err = run(capsys, "groupoid", "analyze", "--input", str(p))
        assert code == 3 and "line" in err and "column" in err

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "groupoid", "analyze", "--input", "/no/such/file.json")
        assert code == 3

    def test_unknown_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["selfsim", "sfp", "--builtin", "grigorchuk", "--element", "d", "--bogus"])
        assert exc.value.code == 3

    def test_nonpositive_depth(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["selfsim", "sfp", "--builtin", "grigorchuk", "--element", "d", "--depth", "0"])
        assert exc.value.code == 3


class TestEnvironment:
    def test_format_and_depth(self, capsys, monkeypatch):
        monkeypatch.setenv("STEINBENCH_FORMAT", "json")
        monkeypatch.setenv("STEINBENCH_DEPTH", "4")
        assert cli.main(["selfsim", "sfp", "--builtin", "grigorchuk", "--element", "d"]) == 0
        assert json.loads(capsys.readouterr().out)["count"] == 2

    def test_flag_wins(self, capsys, monkeypatch):
        monkeypatch.setenv("STEINBENCH_DEPTH", "4")
        cli.main(["selfsim", "sfp", "--builtin", "grigorchuk", "--element", "d", "--depth", "7", "--format", "json"])
        assert json.loads(capsys.readouterr().out)["count"] == 3

    def test_bad_value(self, capsys, monkeypatch):
        monkeypatch.setenv("STEINBENCH_STATE_CAP", "-1")
        assert cli.main(["selfsim", "sfp", "--builtin", "grigorchuk", "--element", "d"]) == 3


def test_text_output(capsys):
    code, out, _ = run(capsys, "selfsim", "sfp", "--builtin", "grigorchuk", "--element", "d", "--depth", "4")
    assert "count: 2" in out


def test_deterministic_bytes():
    argv = [sys.executable, "-m", "steinbench.cli", "tight", "hausdorff", "--builtin", "grigorchuk",
            "--depth", "7", "--format", "json"]
    first = subprocess.run(argv, capture_output=True)
    second = subprocess.run(argv, capture_output=True, env={"PYTHONHASHSEED": "123", "PATH": ""})
    assert first.returncode == second.returncode == 1
    assert first.stdout == second.stdout and first.stdout


def test_accept_run_subset(capsys):
    code, out, _ = run(capsys, "accept", "run", "--only", "1,5")
    assert code == 0
    assert out.splitlines()[0].startswith("[PASS] 1.")
