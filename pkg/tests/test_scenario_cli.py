from fractions import Fraction

import pytest

from ebmatch.cli import main
from ebmatch.errors import ScenarioError
from ebmatch.scenario import load_scenario, parse_scenario

MINIMAL = """
[classes]
customers 3
servers 3

[E]
1 s1
1 s2
2 s2
2 s3
3 s3

[F]
1 s2
2 s1
2 s3
3 s1
3 s2

[policy]
kind fcfs
"""


class TestParsing:
    def test_minimal(self):
        scn = parse_scenario(MINIMAL)
        assert scn.structure.n_customers == 3
        assert scn.policy.kind == "fcfs"

    def test_mu_section(self):
        scn = parse_scenario(
            MINIMAL
            + "\n[mu]\n1 s2 1/3\n2 s3 1/3\n2 s1 1/9\n3 s2 1/9\n3 s1 1/9\n"
        )
        assert scn.mu is not None
        assert scn.mu.prob(1, 2) == Fraction(1, 3)

    def test_decimal_weight_rejected(self):
        with pytest.raises(ScenarioError) as err:
            parse_scenario(MINIMAL + "\n[mu]\n1 s2 0.5\n2 s1 0.5\n")
        assert err.value.line is not None

    def test_input_pairs(self):
        scn = parse_scenario(MINIMAL + "\n[input]\npair 1 s2\npair 2 s1\n")
        assert scn.input_pairs == ((1, 2), (2, 1))

    def test_bad_server_token_has_line_number(self):
        with pytest.raises(ScenarioError) as err:
            parse_scenario(MINIMAL + "\n[input]\npair 1 2\n")
        assert "line" in str(err.value) or err.value.line is not None

    def test_unknown_section_rejected(self):
        with pytest.raises(ScenarioError):
            parse_scenario(MINIMAL + "\n[nonsense]\nfoo bar\n")

    def test_complete_arrival_graph(self):
        text = MINIMAL.replace(
            "[F]\n1 s2\n2 s1\n2 s3\n3 s1\n3 s2", "[F]\ncomplete"
        )
        scn = parse_scenario(text)
        assert len(scn.structure.F) == 9


class TestBundledScenarios:
    @pytest.mark.parametrize(
        "name",
        (
            "nn-ms-counterexample.scn",
            "nnbis-fcfs.scn",
            "nnbis-lcfs.scn",
            "nn-bm-fcfs.scn",
            "separable-triangle.scn",
        ),
    )
    def test_bundled_parse(self, name):
        from importlib import resources

        text = (
            resources.files("ebmatch") / "scenarios" / name
        ).read_text()
        parse_scenario(text)


class TestCli:
    def test_verify_subadd_counterexample_exit_code(self, capsys):
        code = main(["verify-subadd", "--scenario", "nn-ms-counterexample.scn"])
        out = capsys.readouterr().out
        assert code == 10
        assert "FAIL" in out

    def test_verify_erasing_pass(self, capsys):
        code = main(["verify-erasing", "--scenario", "nnbis-fcfs.scn"])
        assert code == 0
        assert "PASS" in capsys.readouterr().out

    def test_verify_erasing_lcfs_pass(self):
        assert main(["verify-erasing", "--scenario", "nnbis-lcfs.scn"]) == 0

    def test_loynes_reports_solution(self, capsys):
        code = main(["loynes", "--scenario", "nnbis-fcfs.scn"])
        out = capsys.readouterr().out
        assert code == 0
        assert "coupling depth" in out
        assert "construction points" in out

    def test_check_stability_restricted(self, capsys):
        code = main(["check-stability", "--scenario", "nnbis-fcfs.scn"])
        out = capsys.readouterr().out
        assert code == 0
        assert "PASS" in out and "FAIL" in out

    def test_find_erasing(self, capsys):
        code = main(["find-erasing", "--scenario", "nnbis-fcfs.scn"])
        assert code == 0

    def test_missing_scenario_is_an_error(self, capsys):
        assert main(["loynes", "--scenario", "does-not-exist.scn"]) == 1

    def test_scenario_from_file(self, tmp_path, capsys):
        path = tmp_path / "case.scn"
        path.write_text(
            MINIMAL + "\n[input]\n"
            + "".join(
                f"pair {c} s{s}\n"
                for c, s in (
                    (1, 2), (2, 1), (1, 2), (2, 3), (1, 2),
                    (2, 3), (2, 3), (3, 1), (3, 2),
                )
            )
        )
        code = main(["loynes", "--scenario", str(path)])
        assert code == 0

    def test_out_dir_written(self, tmp_path):
        out = tmp_path / "report"
        code = main(
            [
                "loynes",
                "--scenario",
                "nnbis-fcfs.scn",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        assert any(out.iterdir())


class TestLoadScenario:
    def test_load_from_path(self, tmp_path):
        path = tmp_path / "m.scn"
        path.write_text(MINIMAL)
        scn = load_scenario(path)
        assert scn.policy.kind == "fcfs"
