import subprocess
import sys

import pytest

from pdlab.cli import EXIT_BUDGET, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, main


def kv(out):
    return dict(l.split("=", 1) for l in out.splitlines() if "=" in l and not l.startswith("p "))


@pytest.fixture
def order_files(tmp_path):
    # x = 1, z = 3; resolving z first then x, under {x} < {z}
    cnf = tmp_path / "f.cnf"
    cnf.write_text("p cnf 3 3\n1 3 0\n1 -3 0\n-1 0\n")
    bad = tmp_path / "bad.res"
    bad.write_text("p res 3 2\n4 1 2 3 1 0\n5 4 3 1 0\n")
    po = tmp_path / "po.txt"
    po.write_text("x 1 0\ny 3 0\n")
    return cnf, bad, po


def test_check_proof_violation(order_files, capsys):
    cnf, bad, po = order_files
    assert main(["check-proof", str(cnf), str(bad)]) == EXIT_OK
    capsys.readouterr()
    assert main(["check-proof", "--partial-order", str(po), str(cnf), str(bad)]) == EXIT_VIOLATION
    out = kv(capsys.readouterr().out)
    assert out["accepted"] == "0" and out["witness_path"] == "1 4 5"


def test_check_proof_compliant(tmp_path, capsys):
    cnf = tmp_path / "g.cnf"
    cnf.write_text("p cnf 3 3\n1 0\n-1 3 0\n-3 0\n")
    res = tmp_path / "g.res"
    res.write_text("p res 3 2\n4 1 2 1 3 0\n5 4 3 3 0\n")
    po = tmp_path / "po.txt"
    po.write_text("x 1 0\ny 3 0\n")
    assert main(["check-proof", "--partial-order", str(po), str(cnf), str(res)]) == EXIT_OK
    assert kv(capsys.readouterr().out)["accepted"] == "1"


def test_check_proof_rejects_bad_step(tmp_path, capsys):
    cnf = tmp_path / "f.cnf"
    cnf.write_text("p cnf 1 2\n1 0\n-1 0\n")
    res = tmp_path / "f.res"
    res.write_text("p res 2 1\n3 1 2 1 1 0\n")
    assert main(["check-proof", str(cnf), str(res)]) == EXIT_VIOLATION
    assert kv(capsys.readouterr().out)["step"] == "3"


def test_solve_engines(tmp_path, capsys):
    cnf = tmp_path / "f.cnf"
    cnf.write_text("p cnf 2 4\n1 2 0\n1 -2 0\n-1 2 0\n-1 -2 0\n")
    proof = tmp_path / "f.res"
    for engine in ("cdcl", "cachesat", "brute"):
        assert main(["solve", "--engine", engine, "--proof", str(proof), str(cnf)]) == EXIT_OK
        assert kv(capsys.readouterr().out)["status"] == "UNSAT"
    assert main(["check-proof", str(cnf), str(proof)]) == EXIT_OK
    sat = tmp_path / "s.cnf"
    sat.write_text("p cnf 2 1\n1 2 0\n")
    assert main(["solve", "--engine", "cachesat", "--model", str(sat)]) == EXIT_OK
    assert "v -1 2 0" in capsys.readouterr().out


def test_solve_budgets(tmp_path, capsys):
    big = tmp_path / "big.cnf"
    big.write_text("p cnf 30 1\n1 30 0\n")
    assert main(["solve", "--engine", "brute", str(big)]) == EXIT_BUDGET
    cnf = tmp_path / "f.cnf"
    cnf.write_text("p cnf 2 4\n1 2 0\n1 -2 0\n-1 2 0\n-1 -2 0\n")
    assert main(["solve", "--engine", "cdcl", "--budget", "1", str(cnf)]) == EXIT_BUDGET
    assert kv(capsys.readouterr().out)["status"] == "BUDGET_EXCEEDED"


def test_solve_with_order(tmp_path, capsys):
    cnf = tmp_path / "f.cnf"
    cnf.write_text("p cnf 2 1\n1 2 0\n")
    order = tmp_path / "o.txt"
    order.write_text("2 1\n")
    assert main(["solve", "--engine", "cachesat", "--model", "--order", str(order), str(cnf)]) == EXIT_OK
    assert "v 1 -2 0" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    [], ["bogus"], ["solve"], ["solve", "missing.cnf"], ["gen", "fp-miter", "--mantissa", "0", "--exponent", "2"],
    ["oracle", "min-dnf"], ["solve", "--budget", "-3", "x.cnf"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE


def test_malformed_dimacs_is_usage_error(tmp_path, capsys):
    cnf = tmp_path / "f.cnf"
    cnf.write_text("p cnf 2 2\n1 2 0\n")
    assert main(["solve", str(cnf)]) == EXIT_USAGE
    assert "declared 2, found 1" in capsys.readouterr().err


def test_fp_miter_verify_and_assemble(tmp_path, capsys):
    cnf, desc, wires = tmp_path / "fp.cnf", tmp_path / "fp.json", tmp_path / "fp.wires"
    out = tmp_path / "fp.res"
    assert main(["gen", "fp-miter", "--mantissa", "2", "--exponent", "2", "--cnf", str(cnf),
                 "--descriptor", str(desc), "--wires", str(wires)]) == EXIT_OK
    assert kv(capsys.readouterr().out)["vars"] == "192"
    assert "E_a[0] = " in wires.read_text()
    assert main(["verify-proofdoor", str(cnf), str(desc)]) == EXIT_OK
    assert kv(capsys.readouterr().out)["passed"] == "1"
    assert main(["assemble-refutation", "--out", str(out), str(cnf), str(desc)]) == EXIT_OK
    stats = kv(capsys.readouterr().out)
    assert stats["checked"] == "1" and stats["order_violations"] == "0"
    assert main(["check-proof", str(cnf), str(out)]) == EXIT_OK


def test_broken_descriptor(tmp_path, capsys):
    cnf = tmp_path / "f.cnf"
    cnf.write_text("p cnf 2 3\n1 0\n-1 2 0\n-2 0\n")
    desc = tmp_path / "d.json"
    desc.write_text('{"chunks": [[1, 2], [3]], "interpolants": [[[-2]]], "supports": [], '
                    '"params": {"c": 1, "w": 1, "s": 1}}')
    assert main(["verify-proofdoor", str(cnf), str(desc)]) == EXIT_VIOLATION
    assert "cond.entailment=FAIL" in capsys.readouterr().out
    assert main(["assemble-refutation", "--out", str(tmp_path / "x.res"), str(cnf), str(desc)]) == EXIT_VIOLATION
    desc.write_text('{"chunks": [[1, 2]], "interpolants": [], "supports": [], "params": {}}')
    assert main(["verify-proofdoor", str(cnf), str(desc)]) == EXIT_USAGE


def test_parity_extraction(tmp_path, capsys):
    cnf, part, proof = tmp_path / "p.cnf", tmp_path / "p.part", tmp_path / "p.res"
    assert main(["gen", "fn-encoding", "--fn", "parity", "--n", "3", "--cnf", str(cnf),
                 "--partition", str(part), "--proof", str(proof)]) == EXIT_OK
    capsys.readouterr()
    assert main(["extract-interpolant", "--partition", str(part), str(cnf), str(proof)]) == EXIT_OK
    out = capsys.readouterr().out
    stats = kv(out)
    assert stats["extracted"] == "1"
    assert int(stats["clauses"]) <= int(stats["proof_lines"])


def test_tree_miter_partition(tmp_path, capsys):
    part = tmp_path / "t.part"
    assert main(["gen", "tree-miter", "--expr1", "x*(w+y+z)", "--expr2", "x*w+(x*y+x*z)", "--bits", "1",
                 "--node", "2r", "--partition", str(part)]) == EXIT_OK
    stats = kv(capsys.readouterr().out)
    assert (stats["before"], stats["after"], stats["shared"]) == ("26", "5", "6")
    assert part.read_text().startswith("b ")


def test_mult_strips(tmp_path, capsys):
    assert main(["gen", "mult-strips", "--n", "2", "--delta", "4"]) == EXIT_OK
    stats = kv(capsys.readouterr().out)
    assert stats["k"] == "1" and stats["verified"] == "1"


def test_oracles(tmp_path, capsys):
    cnf = tmp_path / "c4.cnf"
    cnf.write_text("p cnf 4 4\n1 2 0\n2 3 0\n3 4 0\n4 1 0\n")
    assert main(["oracle", "pathwidth", str(cnf)]) == EXIT_OK
    assert kv(capsys.readouterr().out)["pathwidth"] == "2"
    assert main(["oracle", "sat", str(cnf)]) == EXIT_OK
    assert kv(capsys.readouterr().out)["status"] == "SAT"
    assert main(["oracle", "min-dnf", "--fn", "eq", "--n", "3"]) == EXIT_OK
    assert kv(capsys.readouterr().out)["min_dnf_size"] == "8"
    assert main(["oracle", "min-dnf", "--arity", "2", "6"]) == EXIT_OK
    assert kv(capsys.readouterr().out)["min_dnf_size"] == "2"
    assert main(["oracle", "min-dnf", "--arity", "9", "1"]) == EXIT_BUDGET


def test_bench_table(capsys):
    assert main(["bench", "proofdoor-family", "--family", "fp", "--sizes", "2"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split("\t") == ["size", "c", "w", "s", "dcsf", "conflicts", "proof_lines", "wall_time"]
    assert lines[1].split("\t")[0] == "2"


def test_console_entry_point(tmp_path):
    cnf = tmp_path / "f.cnf"
    cnf.write_text("p cnf 1 2\n1 0\n-1 0\n")
    r = subprocess.run([sys.executable, "-m", "pdlab.cli", "solve", str(cnf)], capture_output=True, text=True)
    assert r.returncode == 0 and "status=UNSAT" in r.stdout
