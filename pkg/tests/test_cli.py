import subprocess
import sys

import pytest

from capkit.cli import fixture_path, main


def test_cap_tl_two_point_fixture(capsys, tmp_path):
    cert = tmp_path / "c.json"
    code = main(["cap", "tl", "--beta", "0.5", "--p", "2", "--q", "2", "--set", "{a}",
                 "--space", str(fixture_path("two_point.json")), "-o", str(cert)])
    out = capsys.readouterr().out
    assert code == 0
    assert "value 0.3333333333" in out
    gap = float(out.split("gap ")[1].split()[0])
    assert gap <= 1e-6
    assert main(["cap", "validate", "--space", "fixture:two_point.json", "--cert", str(cert)]) == 0


def test_nonsymmetric_fixture_rejected(capsys):
    code = main(["space", "validate", "fixture:nonsymmetric.json"])
    cap = capsys.readouterr()
    assert code == 1
    assert "(a, b)" in cap.err and "symmetry" in cap.err


def test_q_inf_and_lambda_default(capsys):
    assert main(["cap", "tl", "--space", "grid:1:4", "--set", "{7,8}", "--q", "inf"]) == 0
    assert main(["cap", "relative", "--space", "grid:1:5", "--set", "ball:16:0.05",
                 "--center", "16", "--r", "0.05"]) == 0
    out = capsys.readouterr().out
    assert out.count("value") >= 2


@pytest.mark.parametrize("argv", [
    ["cap", "tl", "--space", "two_point", "--set", "{a}", "--p", "1"],
    ["cap", "tl", "--space", "two_point", "--set", "{zz}"],
    ["cap", "relative", "--space", "two_point", "--set", "{a}"],
    ["content", "--space", "three_chain", "--set", "{0}", "--d", "-1", "--rho", "1"],
    ["cap", "tl", "--space", "missing.json", "--set", "{a}"],
])
def test_invalid_inputs_exit_one(argv, capsys):
    assert main(argv) == 1
    assert "error" in capsys.readouterr().err


def test_malformed_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["space", "validate", str(bad)]) == 1


def test_solver_nonconvergence_exit_two(monkeypatch, capsys):
    import capkit.cli as cli

    real = cli.cap_tl_primal

    def stalled(*a, **k):
        cert = real(*a, **k)
        cert.converged = False
        return cert

    monkeypatch.setattr(cli, "cap_tl_primal", stalled)
    assert main(["cap", "tl", "--space", "two_point", "--set", "{a}"]) == 2


def test_build_and_ops(tmp_path, capsys):
    sp = tmp_path / "c.json"
    E = tmp_path / "e.json"
    assert main(["space", "build", "cantor:0.3333333333333333:2", "-o", str(sp), "--set-out", str(E)]) == 0
    assert main(["space", "validate", str(sp)]) == 0
    assert main(["cap", "riesz", "--space", str(sp), "--set", str(E)]) == 0
    for op in ("H", "L", "riesz", "maxfrac", "hdual"):
        assert main(["op", op, "--space", "grid:1:3", "--beta", "0.5"]) == 0
    assert main(["content", "--space", "three_chain", "--set", "{0,1,2}", "--d", "1", "--rho", "2"]) == 0
    assert "content 1.5" in capsys.readouterr().out


def test_verify_commands(tmp_path, capsys):
    rep = tmp_path / "r.json"
    assert main(["verify", "check", "m_twosided", "--space", "three_chain", "-o", str(rep)]) == 0
    assert main(["verify", "check", "bogus"]) == 1


def test_suite_twice_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    cmd = [sys.executable, "-m", "capkit.cli", "verify", "suite", "--seed", "7"]
    r1 = subprocess.run(cmd + ["-o", str(a)], capture_output=True)
    r2 = subprocess.run(cmd + ["-o", str(b), "--jobs", "2"], capture_output=True)
    assert r1.returncode == 0 and r2.returncode == 0
    assert a.read_bytes() == b.read_bytes()
