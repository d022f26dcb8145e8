import subprocess
import sys

import pytest

from heckeint.cli import main
from heckeint.fourier import parse_qexp


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cosets(capsys):
    code, out, _ = run(capsys, "cosets", "-n", "1", "-p", "2", "-d", "1", "-N", "1")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "# V n=1 p=2 delta=1 N=1 count=3"
    assert len(lines) == 4


def test_cosets_seed_keeps_invariants(capsys):
    a = run(capsys, "cosets", "-n", "2", "-p", "3", "-N", "2", "--invariants")[1]
    b = run(capsys, "cosets", "-n", "2", "-p", "3", "-N", "2", "--invariants", "--seed", "9")[1]
    assert a == b and a.startswith("# V n=2 p=3 delta=1 N=2 count=40")


def test_tj_listing(capsys):
    code, out, _ = run(capsys, "cosets", "-n", "2", "-p", "2", "--tj", "1", "--invariants")
    assert code == 0 and out.splitlines()[0] == "# T_1 n=2 p=2 N=1 count=30"


def test_certify_fixture(capsys, tmp_path):
    code, out, _ = run(capsys, "certify")
    assert code == 0
    assert "charpoly: X^2 - 2025X - 49176" in out and out.endswith("INTEGRAL: yes\n")
    # certificates are appended
    path = tmp_path / "cert.log"
    main(["certify", "-o", str(path)])
    main(["certify", "-o", str(path), "--seed", "3"])
    text = path.read_text()
    assert text.count("CERTIFICATE 1") == 2
    first, second = text.split("CERTIFICATE 1")[1:]
    assert first == second


def test_certify_theta(capsys):
    code, out, _ = run(capsys, "certify", "--fixture", "theta-e8", "--theta", "2")
    assert code == 0 and "charpoly: X - 45" in out


def test_gauss(capsys):
    code, out, _ = run(capsys, "gauss", "--S", "4 2 4", "--D", "2 0 0 2", "--brute")
    assert code == 0
    assert out == "value: 8\ndivisors: 2 2\nbrute: 8\n"


def test_apply_round_trip(capsys, tmp_path):
    src = tmp_path / "e4.qexp"
    assert main(["corpus", "e4", "--theta", "10", "-o", str(src)]) == 0
    dst = tmp_path / "t2.qexp"
    assert main(["apply", "-i", str(src), "-p", "2", "--theta", "5", "-o", str(dst)]) == 0
    f, g = parse_qexp(src.read_text()), parse_qexp(dst.read_text())
    assert all(g.coeffs[t][0] == 9 * f.coeffs[t][0] for t in g.coeffs)
    code, _, err = run(capsys, "apply", "-i", str(src), "-p", "2", "--theta", "9")
    assert code == 1 and "missing" in err


def test_corpus_theta(capsys):
    code, out, _ = run(capsys, "corpus", "theta-e8", "--degree", "2", "--theta", "2")
    assert code == 0
    assert "2 1 2 : 13440" in out and "mode=class" in out


def test_bounds(capsys):
    code, out, _ = run(capsys, "bounds", "count", "-M", "1", "--degree", "2")
    assert code == 0 and out == "#E(1,2) = 9 bound 65536\n"
    assert run(capsys, "bounds")[0] == 0


def test_hilbert(capsys, tmp_path):
    code, out, _ = run(capsys, "hilbert", "primes", "--field", "5", "--rational-prime", "11")
    assert out == "11 3 1 norm=11\n11 7 1 norm=11\n"
    code, out, _ = run(capsys, "hilbert", "commute", "--field", "5", "--prime", "2 0 2", "--other", "5 2 1")
    assert code == 0 and out.startswith("commute: yes")
    data = tmp_path / "q.txt"
    data.write_text("HILBERT 1\nd=1 k0=2 chi=trivial\n1 0 1 : 1\n2 0 1 : 5\n4 0 1 : 9\n")
    code, out, _ = run(capsys, "hilbert", "apply", "-i", str(data), "--prime", "2")
    assert code == 0 and out.endswith("2 0 1 : 11\n")


def test_exit_codes(capsys):
    assert run(capsys, "cosets", "-n", "1", "-p", "4")[0] == 1
    assert run(capsys, "cosets", "-n", "5", "-p", "2")[0] == 3
    assert run(capsys, "cosets", "-n", "2", "-p", "97", "-d", "3")[0] == 3
    assert run(capsys, "gauss", "--S", "1 2", "--D", "1")[0] == 1
    assert run(capsys, "apply", "-i", "/nonexistent")[0] == 1
    assert run(capsys, "hilbert", "commute", "--prime", "2 0 1", "--other", "3 0 3")[0] == 1
    with pytest.raises(SystemExit) as exc:
        main(["cosets", "--bogus"])
    assert exc.value.code == 1


def test_verify_all_fast_and_deterministic():
    cmd = [sys.executable, "-m", "heckeint.cli", "verify-all", "--fast"]
    a = subprocess.run(cmd, capture_output=True, text=True, timeout=600)
    assert a.returncode == 0, a.stdout + a.stderr
    assert a.stdout.splitlines()[-1] == "10/10 passed"
    b = subprocess.run(cmd, capture_output=True, text=True, timeout=600)
    assert a.stdout == b.stdout
