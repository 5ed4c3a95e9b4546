import json

import pytest

from ternverify.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_list_contains_catalog(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    for label in ("u:m=0", "s:m=0:AA:-1", "s:m=2:AA:+1", "quad:m=2"):
        assert label in out


def test_list_filters(capsys):
    code, out, _ = run(capsys, "list", "--class", "s", "--m", "4")
    assert code == 0
    assert out.count("s:m=4") == 2 and "m=0" not in out

    code, out, _ = run(capsys, "list", "--localizable")
    labels = [line.split()[0] for line in out.splitlines()]
    assert labels == ["u:m=0", "d:m=0", "s:m=0:AU:+1", "s:m=0:AA:+1"]


def test_verify_pass_and_json(capsys):
    code, out, _ = run(capsys, "verify", "u:m=0")
    assert code == 0
    assert "overall: pass" in out

    code, out, _ = run(capsys, "verify", "s:m=2:AA:+1", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["schema"] == 1
    assert payload["derived_constants"]["helicity"] == ["1", "-1"]


def test_verify_mutated_fails_with_relation_named(capsys):
    code, out, _ = run(capsys, "verify", "u:m=0", "--mutate", "J3+=p1")
    assert code == 1
    assert "FAIL" in out
    assert "J3" in out


def test_verify_bad_spec_usage_error(capsys):
    code, _, err = run(capsys, "verify", "nope:m=7")
    assert code == 2
    assert "error" in err


def test_verify_numeric_mode(capsys):
    code, out, _ = run(capsys, "--mode", "numeric", "--h", "0.0625",
                       "--bumps", "1", "verify", "u:m=1", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["numeric_pass"]
    rows = payload["numeric"][0]
    assert len(rows) == 45
    measured = [r["order"] for r in rows if r["order"] is not None]
    assert measured, "every relation discretized exactly?"


def test_certify_solvable_and_obstruction(capsys):
    code, out, _ = run(capsys, "--h", "0.25", "certify",
                       "unitaryT-obstruction", "--m", "2")
    assert code == 0
    cert = json.loads(out)
    assert cert["schema"] == 1 and cert["verdict"] == "inconsistent"

    code, out, _ = run(capsys, "--h", "0.25", "certify",
                       "parity-obstruction", "--m", "0")
    cert = json.loads(out)
    assert cert["verdict"] == "solvable"


def test_config_file_and_flag_priority(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "tv.cfg"
    cfg.write_text("output=json\nh=0.25  # coarse\n")
    monkeypatch.setenv("TERNVERIFY_CONFIG", str(cfg))
    code, out, _ = run(capsys, "list", "--m", "0", "--class", "u")
    assert code == 0
    payload = json.loads(out)
    assert [t["label"] for t in payload["terns"]] == ["u:m=0",
                                                      "paired-u"]

    monkeypatch.setenv("TERNVERIFY_CONFIG", str(tmp_path / "absent"))
    code, _, err = run(capsys, "list")
    assert code == 2


def test_bad_config_values(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("nonsense=1\n")
    code, _, err = run(capsys, "--config", str(cfg), "list")
    assert code == 2 and "unknown key" in err

    code, _, err = run(capsys, "--h", "0.3", "list")
    assert code == 2

    code, _, err = run(capsys, "--mode", "psychic", "verify", "u:m=0")
    assert code == 2


def test_deterministic_json(capsys):
    argv = ("--mode", "numeric", "--h", "0.25", "verify",
            "u:m=2", "--json")
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert (code1, out1) == (code2, out2)


def test_usage_exit_code(capsys):
    assert main(["frobnicate"]) == 2
    assert main([]) == 2
