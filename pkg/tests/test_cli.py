import json

import pytest

from cli.main import EXIT_FAILURE, EXIT_INCOMPLETE, EXIT_OK, EXIT_USAGE, build_parser, main


def run_json(capsys, *argv):
    code = main(list(argv) + ["--json"])
    out = capsys.readouterr().out
    return code, out


class TestCheck:
    def test_failing_test_is_reported(self, capsys):
        code, out = run_json(capsys, "check", "--config", "ridecore-lite-ordered", "--family", "standard", "--bound", "3")
        report = json.loads(out)
        assert code == EXIT_FAILURE
        assert report["outcome"] == "Failure"
        cx = report["counterexample"]
        assert cx["length"] == 6
        assert cx["witness"] == [15, 31]
        assert cx["instructions"][0] == "MUL l15, (l12, l12)"
        assert len(cx["steps"]) == 6
        assert "jobs" not in report["manifest"]

    def test_reference_machine_passes(self, capsys):
        code, out = run_json(capsys, "check", "--config", "toy4", "--bound", "1")
        assert code == EXIT_OK
        assert json.loads(out)["counterexample"] is None

    def test_output_independent_of_jobs(self, capsys):
        argv = ["check", "--config", "ridecore-lite-ordered", "--bound", "3", "--family", "standard",
                "--family", "interleaved"]
        _, serial = run_json(capsys, *argv, "--jobs", "1")
        _, parallel = run_json(capsys, *argv, "--jobs", "2")
        assert serial == parallel

    def test_text_report_names_the_witness(self, capsys):
        code = main(["check", "--config", "ridecore-lite", "--family", "standard", "--bound", "1"])
        out = capsys.readouterr().out
        assert code == EXIT_FAILURE
        assert "Witness: l15=" in out
        assert "MUL l31, (l28, l28)" in out

    def test_budget_exhaustion_is_incomplete(self, capsys):
        code, out = run_json(capsys, "check", "--config", "toy4", "--max-tests", "5")
        assert code == EXIT_INCOMPLETE
        assert json.loads(out)["complete"] is False


class TestConfigErrors:
    def test_odd_location_count(self, tmp_path, capsys):
        path = tmp_path / "odd.json"
        path.write_text(json.dumps({
            "system": {"name": "odd", "location_count": 3, "opcodes": [{"name": "ADD", "expression": "a + b"}]}
        }, indent=2))
        assert main(["check", "--config", str(path)]) == EXIT_USAGE
        err = capsys.readouterr().err
        assert "system.location_count" in err
        assert "line 4" in err

    def test_runaway_expression(self, tmp_path, capsys):
        path = tmp_path / "shift.json"
        path.write_text(json.dumps({
            "system": {"name": "shift", "location_count": 4, "value_modulus": 4,
                       "opcodes": [{"name": "ADD", "expression": "a << 10**11"}]}
        }, indent=2))
        assert main(["describe", "--config", str(path)]) == EXIT_USAGE
        assert "a << 10**11" in capsys.readouterr().err

    def test_unknown_system(self, capsys):
        assert main(["describe", "--config", "nowhere"]) == EXIT_USAGE

    def test_unknown_law(self, capsys):
        assert main(["laws", "--config", "toy4", "--law", "lemma9"]) == EXIT_USAGE

    def test_jobs_must_be_positive(self):
        with pytest.raises(SystemExit):
            main(["check", "--config", "toy4", "--jobs", "0"])


class TestOtherCommands:
    def test_oracle_on_reference_machine(self, capsys):
        code, out = run_json(capsys, "oracle", "--config", "toy4", "--depth", "1")
        report = json.loads(out)
        assert code == EXIT_OK
        assert report["bugs"] == []
        assert report["complete"]

    def test_oracle_lists_type_b_bugs(self, capsys):
        code = main(["oracle", "--config", "stomp4"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "TypeB" in out
        assert "l3" in out

    def test_oracle_state_budget(self, capsys):
        assert main(["oracle", "--config", "toy4", "--max-states", "10"]) == EXIT_INCOMPLETE

    def test_laws_on_one_system(self, capsys):
        code, out = run_json(capsys, "laws", "--config", "toy4", "--law", "lemma2", "--law", "eq2")
        report = json.loads(out)
        assert code == EXIT_OK
        assert [row["law"] for row in report["laws"]] == ["lemma2", "eq2"]
        assert report["passed"]

    def test_laws_report_violations(self, capsys):
        code = main(["laws", "--config", "toy4", "--law", "lemma4b"])
        assert code == EXIT_FAILURE
        assert "FAIL" in capsys.readouterr().out

    def test_describe(self, capsys):
        code, out = run_json(capsys, "describe", "--config", "mulmul4", "--depth", "1")
        report = json.loads(out)
        assert code == EXIT_OK
        assert [op["name"] for op in report["opcodes"]] == ["ADD", "MUL", "MOV", "NOP", "SRST", "HRST"]
        assert report["injections"][0]["name"] == "mul-after-mul"
        assert report["reachable_states"] > 0

    def test_parser_requires_a_command(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])
