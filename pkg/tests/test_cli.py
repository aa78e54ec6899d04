import json

import pytest

from tsblab.cli import main


def test_usage_errors(capsys):
    assert main(["check", "--theorem", "flatness", "--space", "sphere3"]) == 2
    capsys.readouterr()
    assert main(["check", "--theorem", "contact"]) == 2
    assert "needs --space" in capsys.readouterr().err
    assert main(["report"]) == 2
    assert "--all" in capsys.readouterr().err
    assert main([]) == 2
    capsys.readouterr()


def test_check_contact_exit_codes(capsys):
    rc = main(
        [
            "check", "--theorem", "contact", "--space", "sphere3",
            "--q", "tanh:1.0", "--a0", "contact", "--alambda", "contact",
            "--radius", "1.0",
        ]
    )
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["schema"] == 1
    assert payload["verdict"] == "pass"
    assert payload["residuals"]["contact_identity"] <= 1e-9
    assert "timing" not in payload


def test_check_expected_fail_exit_zero(capsys):
    rc = main(
        [
            "check", "--theorem", "contact", "--space", "sphere3",
            "--q", "id:1", "--a0", "const:1", "--alambda", "ak",
            "--radius", "1.0",
        ]
    )
    assert rc == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "expected-fail-confirmed"


def test_check_tables_and_rank1(capsys):
    assert main(["check", "--theorem", "tables"]) == 0
    capsys.readouterr()
    rc = main(
        [
            "check", "--theorem", "rank1", "--space", "cp2",
            "--kappa", "1.0", "--q-values", "1.0",
        ]
    )
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["verdict"] == "pass"
    assert "sasakian_normality" in payload["residuals"]


def test_bad_profile_literal(capsys):
    rc = main(
        ["check", "--theorem", "contact", "--space", "sphere3", "--q", "spam:1"]
    )
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# contact check\n"
        "theorem = contact\n"
        "space = sphere3\n"
        "q = tanh:1.0\n"
        "radius = 2.0\n"
    )
    assert main(["--config", str(cfg), "check"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["parameters"]["radius"] == 2.0
    # explicit flags win over config values
    assert main(["--config", str(cfg), "check", "--radius", "0.5"]) == 0
    assert json.loads(capsys.readouterr().out)["parameters"]["radius"] == 0.5


def test_config_bad_key_diagnostic(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("theorem = contact\nspice = sphere3\n")
    assert main(["--config", str(cfg), "check"]) == 2
    err = capsys.readouterr().err
    assert "bad.cfg:2" in err
    assert "spice" in err


def test_config_bad_line_diagnostic(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("theorem contact\n")
    assert main(["--config", str(cfg), "check"]) == 2
    assert "bad.cfg:1" in capsys.readouterr().err


def test_decompose_cache_roundtrip(tmp_path, capsys):
    args = ["decompose", "--space", "cp2", "--cache-dir", str(tmp_path)]
    assert main(args) == 0
    first = capsys.readouterr().out
    cached = tmp_path / "decomp_cp2.json"
    assert cached.exists()
    assert main(args) == 0
    assert capsys.readouterr().out == first
    assert json.loads(first)["schema"] == 1
    out = tmp_path / "roots.json"
    assert main(args + ["--out", str(out)]) == 0
    assert out.read_text() == first.rstrip("\n")


def test_catalog_listing(capsys):
    assert main(["catalog"]) == 0
    out = capsys.readouterr().out
    assert "su_so3" in out
    assert "sphere6" in out
    lines = [l for l in out.splitlines() if l.strip()]
    assert len(lines) == 16  # header + 15 spaces


@pytest.mark.slow
def test_report_all(tmp_path, capsys):
    out = tmp_path / "report.json"
    rc = main(["report", "--all", "--out", str(out), "--jobs", "4"])
    assert rc == 0
    payload = json.loads(out.read_text())
    assert payload["summary"]["fail"] == 0
    assert payload["summary"]["total"] == len(payload["reports"])
    capsys.readouterr()
