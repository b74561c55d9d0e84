"""End-to-end command surface checks, in process via cli.main."""

import json
import subprocess
import sys

import numpy as np
import pytest

from qthue import acceptance, cli, qrm
from qthue import ulg as ulg_mod

ABC_RULES = "c <-> b\na b <-> c c\n"


@pytest.fixture
def abc_file(tmp_path):
    p = tmp_path / "abc.qts"
    p.write_text(ABC_RULES)
    return str(p)


@pytest.fixture
def stamp_file(tmp_path):
    p = tmp_path / "stamp.tm"
    p.write_text(qrm.EXAMPLES["stamp"])
    return str(p)


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_rules_parse_text(abc_file, capsys):
    code, out, _ = run_cli(capsys, "rules", "parse", abc_file)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "symbols\t3\tc b a"
    assert lines[2] == "rules\t2"
    assert "a b <-> c c" in out


def test_rules_parse_json(abc_file, capsys):
    code, out, _ = run_cli(capsys, "rules", "parse", abc_file, "--json")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["rules"]) == 2
    assert doc["rules"][1] == {
        "lhs": ["a", "b"], "rhs": ["c", "c"], "gate": "id", "width": 2,
    }


def test_rules_parse_error_is_usage(tmp_path, capsys):
    p = tmp_path / "broken.qts"
    p.write_text("a b <-> c\n")
    code, _, err = run_cli(capsys, "rules", "parse", str(p))
    assert code == 2
    assert "line 1" in err


def test_evolve_component(abc_file, capsys):
    code, out, _ = run_cli(capsys, "evolve", abc_file, "--seed", "aab", "--cap", "100")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "strings\t18"
    assert lines[2] == "capped\tfalse"
    assert len(lines) == 3 + 18


def test_evolve_deterministic(abc_file, capsys):
    first = run_cli(capsys, "evolve", abc_file, "--seed", "aab", "--json")
    second = run_cli(capsys, "evolve", abc_file, "--seed", "aab", "--json")
    assert first == second
    doc = json.loads(first[1])
    assert len(doc["strings"]) == 18


def test_evolve_dot(abc_file, capsys):
    code, out, _ = run_cli(capsys, "evolve", abc_file, "--seed", "caa", "--dot")
    assert code == 0
    assert out.startswith("graph {")
    assert '"caa" -- "baa"' in out


def test_spectrum_single_edge_block(abc_file, tmp_path, capsys):
    png = tmp_path / "spec.png"
    code, out, _ = run_cli(
        capsys, "spectrum", abc_file, "--seed", "caa", "-k", "4", "--plot", str(png)
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "dim\t2"
    vals = [float(line.split("\t")[1]) for line in lines[1:]]
    assert vals == pytest.approx([0.0, 2.0], abs=1e-12)
    assert png.read_bytes()[:4] == b"\x89PNG"


@pytest.fixture
def ulg_files(tmp_path):
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    good = ulg_mod.Ulg(2, ["a", "b"], [("a", "b", x)])
    bad = ulg_mod.Ulg(2, ["a", "b", "c"], [("a", "b", x), ("b", "c", x), ("a", "c", x)])
    gp, bp = tmp_path / "good.ulg", tmp_path / "bad.ulg"
    gp.write_text(ulg_mod.to_json(good))
    bp.write_text(ulg_mod.to_json(bad))
    return str(gp), str(bp)


def test_ulg_check_simple(ulg_files, capsys):
    good, bad = ulg_files
    code, out, _ = run_cli(capsys, "ulg", "check-simple", good)
    assert code == 0
    assert out.splitlines()[0] == "simple\ttrue"

    code, out, _ = run_cli(capsys, "ulg", "check-simple", bad)
    assert code == 1
    assert "witness\t" in out


def test_ulg_diagonalize(ulg_files, capsys):
    good, _ = ulg_files
    code, out, _ = run_cli(capsys, "ulg", "diagonalize", good, "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["laplacian_match"] == "true"
    assert doc["eigenvalues"] == pytest.approx([0, 0, 2, 2], abs=1e-12)


def test_qrm_run_halting(stamp_file, capsys):
    code, out, _ = run_cli(capsys, "qrm", "run", stamp_file, "-n", "5")
    assert code == 0
    doc = json.loads(out.splitlines()[0])
    assert doc["halted"] and doc["tape"] == ["1", "1", "1", "_", "_"]


def test_qrm_run_capped_is_failure(tmp_path, capsys):
    p = tmp_path / "orbit.tm"
    p.write_text(qrm.EXAMPLES["orbit"])
    code, out, _ = run_cli(capsys, "qrm", "run", str(p), "-n", "4", "--steps", "40")
    assert code == 1
    assert json.loads(out.splitlines()[0])["capped"]


def test_qrm_run_invalid_machine(tmp_path, capsys):
    p = tmp_path / "invalid.tm"
    p.write_text(qrm.EXAMPLE_INVALID)
    code, _, err = run_cli(capsys, "qrm", "run", str(p), "-n", "4")
    assert code == 1
    assert "invalid:" in err


def test_qrm_bad_syntax_is_usage(tmp_path, capsys):
    p = tmp_path / "bad.tm"
    p.write_text("states: a b\ndelta: a,_ -> _,right,b\n")
    code, _, err = run_cli(capsys, "qrm", "run", str(p), "-n", "4")
    assert code == 2
    assert "parse error" in err


def test_qrm_difftest_threads_deterministic(stamp_file, capsys):
    serial = run_cli(capsys, "qrm", "difftest", stamp_file, "--n-max", "6")
    threaded = run_cli(
        capsys, "--threads", "3", "qrm", "difftest", stamp_file, "--n-max", "6"
    )
    assert serial == threaded
    assert serial[0] == 0
    assert len(serial[1].splitlines()) == 3


def test_wheelbarrow_explore(capsys):
    code, out, _ = run_cli(capsys, "wheelbarrow", "explore", "-n", "9")
    assert code == 0
    rows = dict(line.split("\t")[:2] for line in out.splitlines())
    assert rows["c_star"] == "4"
    assert rows["strings"] == "566"
    assert rows["edges"] == "899"


def test_wheelbarrow_bad_length_is_usage(capsys):
    code, _, err = run_cli(capsys, "wheelbarrow", "explore", "-n", "11")
    assert code == 2
    assert "9 16 22" in err


def test_wheelbarrow_verify(capsys):
    code, out, _ = run_cli(capsys, "wheelbarrow", "verify", "-n", "9")
    assert code == 0
    assert "simple\ttrue" in out
    assert "captions\tok" in out


@pytest.mark.parametrize("flag", ["--accepting", "--rejecting"])
def test_hardness_assemble(flag, capsys):
    code, out, _ = run_cli(capsys, "hardness", "assemble", "-n", "4", flag)
    assert code == 0
    assert "satisfied\ttrue" in out
    assert "class\thistory" in out


def test_selftest_wiring(monkeypatch, capsys):
    seen = []

    def fake_run_all(emit):
        emit("PASS stub: fine")
        seen.append(True)
        return False

    monkeypatch.setattr(acceptance, "run_all", fake_run_all)
    code, out, _ = run_cli(capsys, "selftest")
    assert code == 1 and seen
    assert out == "PASS stub: fine\n"


def test_config_env_var(tmp_path, monkeypatch, abc_file, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"fmt": "json"}')
    monkeypatch.setenv(cli.CONFIG_ENV, str(cfg))
    code, out, _ = run_cli(capsys, "evolve", abc_file, "--seed", "caa")
    assert code == 0
    assert json.loads(out)["strings"] == ["caa", "baa"]


def test_config_rejects_bad_values(tmp_path, abc_file, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"tolerance": 0.5}')
    code, _, err = run_cli(capsys, "--config", str(cfg), "evolve", abc_file, "--seed", "caa")
    assert code == 2
    assert "tolerance" in err

    cfg.write_text('{"mystery": 1}')
    code, _, err = run_cli(capsys, "--config", str(cfg), "evolve", abc_file, "--seed", "caa")
    assert code == 2
    assert "mystery" in err


def test_unknown_subcommand_is_usage(capsys):
    assert run_cli(capsys, "nosuch")[0] == 2


def test_module_entry_point(abc_file):
    proc = subprocess.run(
        [sys.executable, "-m", "qthue.cli", "rules", "parse", abc_file],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("symbols\t3")
