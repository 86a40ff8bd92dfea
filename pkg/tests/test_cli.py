import subprocess
import sys

import pytest

from shrinkca.cli import EXIT_AMBIGUOUS, EXIT_INPUT, EXIT_NO_KEY, main

SG = ["--poly1", "1+x^2+x^3", "--seed1", "100", "--poly2", "1+x+x^4", "--seed2", "1000"]
Z53 = "101000011001110011010011"
ATTACK53 = ["--poly1", "1+x^3+x^4", "--poly2", "1+x+x^3+x^4+x^5"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize(
    "argv,want",
    [
        (["sg", *SG, "-n", "13"], "1010110110010"),
        (["ccsg", *SG, "--taps", "0", "-n", "12"], "110101011011"),
        (["sg", *SG, "-n", "0"], ""),
        (["lfsr", "--poly", "1+x+x^4", "--seed", "1000", "-n", "15"], "100010011010111"),
        (["charpoly", "--rules", "01111"], "1+x^2+x^5"),
        (["charpoly", "--rules", "0"], "x"),
        (["charpoly", "--rules", "8C0300C031", "--hex"], "1+x^8+x^16+x^32+x^40"),
        (["synthesize", "--poly", "1+x^2+x^5"], "01111 / 11110"),
    ],
)
def test_simple_commands(capsys, argv, want):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out.strip() == want


def test_linearize(capsys):
    code, out, _ = run(capsys, "linearize", "--l1", "4", "--poly2", "1+x+x^3+x^4+x^5")
    assert code == 0 and "8C0300C031" in out
    _, out, _ = run(capsys, "linearize", "--l1", "3", "--poly2", "1+x+x^2+x^4+x^5")
    assert "basepoly=1+x^2+x^5" in out and "cells=20" in out
    _, out, _ = run(capsys, "linearize", "--l1", "1", "--poly2", "1+x+x^4")
    assert "exponent=1" in out
    _, out, _ = run(capsys, "linearize", "--l1", "3", "--poly2", "1+x+x^4", "--taps", "0", "--poly1", "1+x^2+x^3")
    assert "exponent=11" in out


def test_attack(capsys, tmp_path):
    f = tmp_path / "z.txt"
    f.write_text(Z53 + "\n")
    code, out, _ = run(capsys, "attack", str(f), *ATTACK53)
    assert code == 0 and out.splitlines()[0] == "IS1=1001 IS2=10101"
    assert "reconstructed=32" in out
    f.write_text(Z53[:-1] + "0")
    code, _, err = run(capsys, "attack", str(f), *ATTACK53)
    assert code == EXIT_NO_KEY and "no consistent key" in err
    f.write_text("10")
    code, _, _ = run(capsys, "attack", str(f), "--poly1", "1+x+x^3", "--poly2", "1+x^2+x^5")
    assert code == EXIT_AMBIGUOUS


def test_attack_with_known_file(capsys, tmp_path):
    z = tmp_path / "z.txt"
    z.write_text(Z53[:8])
    k = tmp_path / "k.txt"
    full = subprocess.run(
        [sys.executable, "-m", "shrinkca", "sg", "--poly1", "1+x^3+x^4", "--seed1", "1001",
         "--poly2", "1+x+x^3+x^4+x^5", "--seed2", "10101", "-n", "248"],
        capture_output=True, text=True, check=True,
    ).stdout.strip()
    k.write_text("".join(f"{p}:{full[p]}\n" for p in range(100, 140)))
    code, out, _ = run(capsys, "attack", str(z), *ATTACK53, "--known", str(k), "--period")
    assert code == 0 and out.splitlines()[0] == "IS1=1001 IS2=10101"
    assert f"keystream={full}" in out


def test_errors(capsys, tmp_path):
    code, _, err = run(capsys, "sg", "--poly1", "1+x^2", "--seed1", "10", "--poly2", "1+x+x^4", "--seed2", "1000", "-n", "3")
    assert code == EXIT_INPUT and "error" in err
    code, _, _ = run(capsys, "attack", str(tmp_path / "missing"), *ATTACK53)
    assert code == EXIT_INPUT
    code, _, _ = run(capsys, "synthesize", "--poly", "1+x^2")
    assert code == EXIT_INPUT


def test_round_trip_smoke(capsys):
    from shrinkca.keystream import ShrinkGenSpec, align_to_output

    for seeds in (("011", "1101"), ("111", "0001"), ("100", "1000")):
        _, out, _ = run(capsys, "sg", "--poly1", "1+x+x^3", "--seed1", seeds[0], "--poly2", "1+x^3+x^4", "--seed2", seeds[1], "-n", "60")
        proc = subprocess.run(
            [sys.executable, "-m", "shrinkca", "attack", "-", "--poly1", "1+x+x^3", "--poly2", "1+x^3+x^4"],
            input=out, capture_output=True, text=True,
        )
        assert proc.returncode == 0
        al = align_to_output(ShrinkGenSpec.from_text("1+x+x^3", seeds[0], "1+x^3+x^4", seeds[1]))
        assert proc.stdout.splitlines()[0] == f"IS1={al.seed1} IS2={al.seed2}"
