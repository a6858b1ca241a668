import json
from fractions import Fraction

import pytest

from hemicert.cli import cmd_certify_general, cmd_spectral, main, read_config
from hemicert.interval import Interval
from hemicert.report import Report, fmt_real, overall_verdict, plain


def test_reals_use_seventeen_digits():
    assert fmt_real(0.1) == "0.10000000000000001"
    assert fmt_real(1.0) == "1.0000000000000000"
    assert fmt_real(float("inf")) == "inf"
    assert float(fmt_real(0.015359501129158959)) == 0.015359501129158959


def test_plain_conversion():
    out = plain({"q": Fraction(1, 3), "iv": Interval(1.0, 2.0), "t": (1, 2.5), "flag": True})
    assert out == {"q": "1/3", "iv": {"lo": "1.0000000000000000", "hi": "2.0000000000000000"}, "t": [1, "2.5000000000000000"], "flag": True}
    with pytest.raises(TypeError):
        plain(object())


@pytest.mark.parametrize(
    "verdicts,expected",
    [
        (["PASS", "CERTIFIED"], "CERTIFIED"),
        (["PASS", "INCONCLUSIVE"], "INCONCLUSIVE"),
        (["INCONCLUSIVE", "FAIL"], "FALSIFIED"),
        (["ERROR"], "FALSIFIED"),
        ([], "INCONCLUSIVE"),
    ],
)
def test_overall_verdict(verdicts, expected):
    assert overall_verdict(verdicts) == expected


def test_report_round_trip_is_byte_identical():
    rep = cmd_spectral(2, 1, Fraction(400001, 1000000), 1)
    text = rep.to_json()
    again = Report.from_json(text).to_json()
    assert again == text
    assert json.loads(text)["schema_version"] == 1


def test_round_trip_rejects_tampered_verdict():
    d = json.loads(cmd_spectral(2, 1, 0, 1).to_json())
    d["overall"] = "FALSIFIED" if d["overall"] == "CERTIFIED" else "CERTIFIED"
    with pytest.raises(ValueError):
        Report.from_dict(d)


def test_spectral_command_values():
    rep = cmd_spectral(2, 1, Fraction(400001, 1000000), 1)
    data = rep.to_dict()["certificates"][0]["data"]
    assert data["mu_n"] == "-1/500000"
    assert rep.exit_code == 0
    assert cmd_spectral(2, 1, 0, 0).exit_code == 1


def test_general_precondition_failure_exits_one():
    rep = cmd_certify_general(3, 2, oracle_points=0)
    assert rep.exit_code == 1
    assert "n/(n-2)" in rep.certificates[0].data["error"]


def test_general_selects_m():
    rep = cmd_certify_general(3, 4, subdivision=500, oracle_points=100)
    assert rep.configuration["m"] == 3
    chain = next(c for c in rep.certificates if c.name == "chain")
    assert chain.verdict == "FALSIFIED"
    assert rep.exit_code == 1
    rep = cmd_certify_general(3, 4, subdivision=500, rule="corrected", oracle_points=100)
    assert rep.configuration["m"] == 11 and rep.exit_code == 0


def test_markdown_rendering():
    md = cmd_spectral(5, 2, 0, 1).to_markdown()
    assert md.startswith("# Certification report")
    assert "| spectral_sign | PASS |" in md


def test_cli_writes_json(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["spectral", "--n", "2", "--k", "1", "--a", "0.400001", "--b", "1", "--out", str(out)])
    assert code == 0
    assert json.loads(out.read_text())["overall"] == "CERTIFIED"


def test_cli_markdown_to_stdout(capsys):
    code = main(["spectral", "--n", "2", "--k", "1", "--a", "0", "--b", "0", "--format", "markdown"])
    assert code == 1
    assert "**Overall: FALSIFIED**" in capsys.readouterr().out


def test_cli_io_errors(tmp_path):
    bad = tmp_path / "missing" / "r.json"
    assert main(["spectral", "--n", "2", "--k", "1", "--a", "0", "--b", "1", "--out", str(bad)]) == 3
    assert main(["spectral", "--config", str(tmp_path / "none.cfg"), "--n", "2", "--k", "1", "--a", "0", "--b", "1"]) == 3


def test_config_file_with_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# spectral defaults\nn = 2\nk=1\na = 0.400001\nb = 1\n")
    assert read_config(str(cfg)) == {"n": "2", "k": "1", "a": "0.400001", "b": "1"}
    out = tmp_path / "r.json"
    assert main(["spectral", "--config", str(cfg), "--out", str(out)]) == 0
    # a flag beats the file
    assert main(["spectral", "--config", str(cfg), "--a", "1", "--out", str(out)]) == 1
    assert json.loads(out.read_text())["configuration"]["a"] == "1"


def test_config_rejects_unknown_keys(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("colour = blue\n")
    assert main(["spectral", "--config", str(cfg), "--n", "2", "--k", "1", "--a", "0", "--b", "1"]) == 2


def test_cli_general_exit_codes(tmp_path):
    out = str(tmp_path / "g.json")
    assert main(["certify-general", "--n", "3", "--k", "2", "--out", out]) == 1
    assert main(["certify-general", "--n", "7", "--k", "2", "--m", "4", "--oracle-points", "200", "--out", out]) == 0
    assert main(["certify-general", "--n", "5", "--k", "2", "--m", "5", "--subdivision", "1", "--oracle-points", "0", "--out", out]) == 2


def test_spectral_report_gives_admissible_scaling_range():
    rep = cmd_spectral(2, 1, Fraction(400001, 1000000), 1)
    assert rep.certificates[0].data["epsilon_upper"] == Fraction(1, 500000)
    assert cmd_spectral(2, 1, 0, 0).certificates[0].data["epsilon_upper"] is None
