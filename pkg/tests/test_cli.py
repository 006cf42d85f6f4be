"""End-to-end tests of the command-line front end.

Most tests drive `run(parse_args([...]))` in-process and read stdout via
capsys, which keeps them fast and lets them assert on exit codes directly.
One test invokes the installed `eqforge` console script as a subprocess to
confirm the entry point wiring.
"""

import json
import subprocess
import sys

import pytest

from eqforge.cli import EQUAL_LINE, PPAD_LINE, Command, parse_args, run


def _cli(capsys, *argv):
    """Run one invocation; returns (exit_code, stdout_text)."""
    code = run(parse_args(list(argv)))
    return code, capsys.readouterr().out


def _write_profile(path, p1, p2):
    path.write_text(json.dumps({"p1": p1, "p2": p2}))


def test_parse_args_returns_command():
    cmd = parse_args(["scan", "--valuation", "expectation"])
    assert isinstance(cmd, Command)
    assert cmd.verb == "scan"
    assert cmd.options.valuation == "expectation"


# --- gen / check round trips -------------------------------------------


def test_gen_then_check_uniform_is_equilibrium(tmp_path, capsys):
    game = tmp_path / "d3.json"
    code, _ = _cli(capsys, "gen", "--family", "D", "--m", "3", "-o", str(game))
    assert code == 0

    prof = tmp_path / "uniform.json"
    _write_profile(prof, ["1/3"] * 3, ["1/3"] * 3)
    code, out = _cli(
        capsys,
        "check",
        "--game", str(game),
        "--profile", str(prof),
        "--valuation", "esd",
        "--gamma", "1",
    )
    assert code == 0
    assert "verdict: Equilibrium" in out


def test_check_reports_deviation_and_exits_1(tmp_path, capsys):
    game = tmp_path / "d3.json"
    _cli(capsys, "gen", "--family", "D", "--m", "3", "-o", str(game))

    prof = tmp_path / "corner.json"
    _write_profile(prof, ["1", "0", "0"], ["1", "0", "0"])
    code, out = _cli(
        capsys,
        "check",
        "--game", str(game),
        "--profile", str(prof),
        "--valuation", "esd",
        "--gamma", "1",
    )
    assert code == 1
    assert "verdict: NotEquilibrium" in out
    assert "witness: player" in out


def test_check_crawford_under_tail_average(tmp_path, capsys):
    # Three distinct costs: the general verifier path, not the F(x) one.
    game = tmp_path / "crawford.json"
    _cli(capsys, "gen", "--family", "crawford", "-o", str(game))

    prof = tmp_path / "uniform.json"
    _write_profile(prof, ["1/2", "1/2"], ["1/2", "1/2"])
    code, out = _cli(
        capsys,
        "check",
        "--game", str(game),
        "--profile", str(prof),
        "--valuation", "cvar",
        "--alpha", "3/4",
    )
    assert code == 1
    assert "NotEquilibrium" in out


# --- solve --------------------------------------------------------------


def test_solve_json_shape_and_fraction_strings(tmp_path, capsys):
    game = tmp_path / "d3.json"
    _cli(capsys, "gen", "--family", "D", "--m", "3", "-o", str(game))
    code, out = _cli(
        capsys,
        "--json",
        "solve",
        "--game", str(game),
        "--valuation", "esd",
        "--gamma", "1",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["found"] is True
    assert doc["profile"]["p1"] == ["1/3", "1/3", "1/3"]

    # the emitted profile must itself pass `check`
    prof = tmp_path / "found.json"
    prof.write_text(json.dumps(doc["profile"]))
    code, _ = _cli(
        capsys,
        "check",
        "--game", str(game),
        "--profile", str(prof),
        "--valuation", "esd",
        "--gamma", "1",
    )
    assert code == 0


def test_solve_reports_absence_with_exit_1(tmp_path, capsys):
    game = tmp_path / "c2.json"
    _cli(capsys, "gen", "--family", "C", "--m", "2", "-o", str(game))
    code, out = _cli(
        capsys,
        "solve",
        "--game", str(game),
        "--valuation", "evar",
        "--gamma", "4",
    )
    assert code == 1
    assert "no F-equilibrium found" in out


# --- certify -------------------------------------------------------------


def test_certify_c2_strong_penalty(tmp_path, capsys):
    game = tmp_path / "c2.json"
    _cli(capsys, "gen", "--family", "C", "--m", "2", "-o", str(game))
    code, out = _cli(
        capsys,
        "certify",
        "--game", str(game),
        "--valuation", "evar",
        "--gamma", "4",
    )
    assert code == 0
    assert "verdict: Certified" in out


def test_certify_undecided_when_equilibria_exist(tmp_path, capsys):
    game = tmp_path / "d2.json"
    _cli(capsys, "gen", "--family", "D", "--m", "2", "-o", str(game))
    code, out = _cli(
        capsys,
        "certify",
        "--game", str(game),
        "--valuation", "esd",
        "--gamma", "1",
        "--max-depth", "14",
    )
    assert code == 1
    assert "verdict: Undecided" in out


# --- theorem / synthesize / scan -----------------------------------------


def test_theorem_verb_exit_codes(capsys):
    code, out = _cli(
        capsys, "theorem", "cm-nonexist", "--m", "2", "--valuation", "evar",
        "--gamma", "4",
    )
    assert code == 0
    assert "holds: True" in out
    assert "clause F(1/m)>b: True" in out

    code, out = _cli(
        capsys, "theorem", "dm-unique", "--m", "4", "--valuation", "esd",
        "--gamma", "1",
    )
    assert code == 1
    assert "holds: False" in out
    assert "witness:" in out

    code, _ = _cli(capsys, "theorem", "dm-unique", "--valuation", "esd", "--gamma", "1")
    assert code == 2  # --m is required


def test_synthesize_counterexample_and_refusals(tmp_path, capsys):
    out_path = tmp_path / "counter.json"
    code, out = _cli(
        capsys, "synthesize", "--valuation", "evar", "--gamma", "4",
        "-o", str(out_path),
    )
    assert code == 0
    assert "counterexample: m=2 (3x3 game)" in out
    doc = json.loads(out_path.read_text())
    assert len(doc["cells"]) == 3

    code, out = _cli(capsys, "synthesize", "--valuation", "esd", "--gamma", "1")
    assert code == 1
    assert "refusal: F(1/2)=b" in out

    code, out = _cli(capsys, "synthesize", "--valuation", "expectation")
    assert code == 1
    assert "refusal: x0=0" in out


def test_scan_regime_lines(capsys):
    code, out = _cli(capsys, "scan", "--valuation", "expectation")
    assert code == 0
    assert PPAD_LINE in out
    assert "x0=0" in out

    code, out = _cli(capsys, "scan", "--valuation", "esd", "--gamma", "1")
    assert code == 0
    assert EQUAL_LINE in out

    code, out = _cli(capsys, "--json", "scan", "--valuation", "evar", "--gamma", "4")
    assert code == 0
    doc = json.loads(out)
    assert doc["counterexample_m"] == 2
    assert doc["x0"] == "3/8"
    assert doc["x1"] == "3/4"


# --- winpair and the bench ------------------------------------------------


def test_winpair_emitted_profile_checks_out(tmp_path, capsys):
    cond = tmp_path / "fix.json"
    code, _ = _cli(capsys, "gen", "--family", "nis4", "--id", "1.1", "-o", str(cond))
    assert code == 0

    code, out = _cli(
        capsys, "--json", "winpair", "--condensed", str(cond), "--emit-profile"
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["outcome"] == "pair"
    assert doc["profile"] is not None

    # The half-half profile on the pair is an equilibrium whenever
    # F(1/2) = b; route it back through `check` to confirm.
    prof = tmp_path / "pair-profile.json"
    prof.write_text(json.dumps(doc["profile"]))
    code, out = _cli(
        capsys,
        "check",
        "--game", str(cond),
        "--profile", str(prof),
        "--valuation", "esd",
        "--gamma", "1",
    )
    assert code == 0
    assert "verdict: Equilibrium" in out


def test_winpair_human_output_lists_pair(tmp_path, capsys):
    cond = tmp_path / "rand.json"
    _cli(capsys, "gen", "--family", "random", "--n", "9", "--seed", "5", "-o", str(cond))
    code, out = _cli(capsys, "winpair", "--condensed", str(cond))
    assert code == 0
    assert out.startswith("outcome:")
    assert "scans:" in out


def test_winpair_bench_csv_header(capsys):
    code, out = _cli(
        capsys, "winpair-bench", "--nmin", "16", "--nmax", "32",
        "--seeds", "2", "--repeats", "1",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,seed,nanos,scans"
    assert len(lines) == 1 + 2 * 2  # two sizes x two seeds


def test_atlas_slice_summary(tmp_path, capsys):
    csv_path = tmp_path / "atlas.csv"
    code, out = _cli(
        capsys,
        "atlas",
        "--valuation", "esd",
        "--gamma", "1",
        "--limit", "512",
        "-o", str(csv_path),
    )
    assert code == 0
    assert "failures: 0" in out
    assert csv_path.read_text().splitlines()[0] == "game_id,solved,support_sizes,method"


# --- determinism and failure modes ----------------------------------------


def test_gen_output_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    _cli(capsys, "gen", "--family", "random", "--n", "30", "--seed", "7", "-o", str(a))
    _cli(capsys, "gen", "--family", "random", "--n", "30", "--seed", "7", "-o", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_solve_output_is_deterministic(tmp_path, capsys):
    game = tmp_path / "d4.json"
    _cli(capsys, "gen", "--family", "D", "--m", "4", "-o", str(game))
    args = ("--json", "solve", "--game", str(game), "--valuation", "evar", "--gamma", "2")
    _, first = _cli(capsys, *args)
    _, second = _cli(capsys, *args)
    assert first == second


def test_input_errors_exit_2(tmp_path, capsys):
    code, _ = _cli(capsys, "gen", "--family", "D")  # missing --m
    assert code == 2

    code, _ = _cli(
        capsys, "solve", "--game", str(tmp_path / "missing.json"),
        "--valuation", "expectation",
    )
    assert code == 2

    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _ = _cli(capsys, "solve", "--game", str(bad), "--valuation", "expectation")
    assert code == 2

    # three distinct costs cannot be coerced for an F(x) verb
    crw = tmp_path / "crawford.json"
    _cli(capsys, "gen", "--family", "crawford", "-o", str(crw))
    code, _ = _cli(
        capsys, "solve", "--game", str(crw), "--valuation", "evar", "--gamma", "2"
    )
    assert code == 2

    code, _ = _cli(capsys, "check", "--game", str(crw), "--profile", str(crw),
                   "--valuation", "evar")  # missing --gamma
    assert code == 2

    # a condensed game too large to expand must not be fed to dense verbs
    big = tmp_path / "big.json"
    _cli(capsys, "gen", "--family", "random", "--n", "8192", "--seed", "0",
         "-o", str(big))
    code, _ = _cli(
        capsys, "solve", "--game", str(big), "--valuation", "esd", "--gamma", "1"
    )
    assert code == 2


def test_console_script_is_installed():
    proc = subprocess.run(
        ["eqforge", "scan", "--valuation", "expectation"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
    assert PPAD_LINE in proc.stdout
