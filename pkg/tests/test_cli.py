import subprocess
import sys

import pytest

from nanophrase.cli import enumerate_phrases, gauss_words, main, tabulate
from nanophrase.errors import BudgetRefused
from nanophrase.hdt import HomotopyDataTriple

COMPOSITE = "alpha: a b c d; tau: a<->b c<->d; S: (a,b,a) (c,d,c)"
EMPTY_S = "alpha: a b; tau: a<->b"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_factor_lists_two_factors(capsys):
    code, out, _ = run(capsys, "factor", "-t", COMPOSITE)
    assert code == 0
    assert out.splitlines()[0] == "2 prime factors"
    assert "(a,b,a)" in out and "(c,d,c)" in out


def test_factor_tags_diagonal_kinds(capsys):
    code, out, _ = run(capsys, "factor", "-t", "alpha: a b c; tau: a<->b; S: diagonal",
                       "--format", "lines")
    assert code == 0
    kinds = sorted(ln.split("\t")[3] for ln in out.splitlines() if ln.startswith("factor\t"))
    assert kinds == ["F", "G"]


def test_decide_aa_against_trivial(capsys):
    code, out, _ = run(capsys, "decide", "-t", EMPTY_S, "-p", "A:a ; AA")
    assert code == 0
    assert out.splitlines()[0] == "homotopic: Yes"
    assert sum(1 for ln in out.splitlines() if "H1" in ln) == 1


def test_decide_no_and_component(capsys):
    code, out, _ = run(capsys, "decide", "-t", EMPTY_S, "-p", "A:a B:a ; ABAB", "-p", "; _")
    assert code == 1 and "obstruction" in out
    code, out, _ = run(capsys, "decide", "-t", "alpha: a b c", "-p", "A:a B:b C:c ; ABC|AC|B",
                       "--component", "1")
    assert code == 1


def test_decide_unknown_exit_code(capsys):
    code, out, _ = run(capsys, "decide", "-t", "alpha: a; S: diagonal", "-p", "A:a B:a ; ABAB",
                       "--component", "1", "--node-budget", "500")
    assert code == 2 and "Unknown" in out


def test_invariants_linking(capsys):
    code, out, _ = run(capsys, "invariants", "-t", "alpha: a b c", "-p", "A:a B:b C:c ; ABC|AC|B",
                       "--which", "linking")
    assert code == 0
    rows = [ln.split() for ln in out.splitlines()[2:]]
    assert rows == [["1", "a*c", "b"], ["a*c", "1", "1"], ["b", "1", "1"]]


def test_invariants_rejects_unknown_name(capsys):
    code, _, err = run(capsys, "invariants", "-t", "alpha: a", "-p", "A:a ; AA", "--which", "zz")
    assert code == 3 and "unknown invariant" in err


def test_decompose_and_reduce(capsys):
    code, out, _ = run(capsys, "decompose", "-t", "alpha: a b; S: diagonal",
                       "-p", "A:a B:a C:a D:b E:b ; ABCBDCAEDE", "--format", "lines")
    assert code == 0
    _, body, theta = out.strip().split("\t")
    assert body.endswith("ABCB|D|CA|EDE") and theta == "1 2 1 2"
    code, out, _ = run(capsys, "reduce", "-t", "alpha: a b c d; tau: a<->b c<->d",
                       "-p", "A:a B:c ; AABB", "--format", "lines")
    assert code == 0 and out.startswith("theta: ; cert: full")


def test_reduce_prime_refused(capsys):
    code, _, err = run(capsys, "reduce", "-t", EMPTY_S, "-p", "A:a ; AA")
    assert code == 4 and "refused" in err


def test_phrase_file_input(tmp_path, capsys):
    f = tmp_path / "phrases.txt"
    f.write_text("# two phrases\nA:a ; AA\nA:a B:a ; ABAB\n")
    t = tmp_path / "triple.txt"
    t.write_text("alpha: a b\ntau: a<->b\n")
    code, out, _ = run(capsys, "invariants", "-t", str(t), "-p", str(f), "--which", "parity")
    assert code == 0 and out.count("parity:") == 2


def test_usage_and_parse_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["tabulate", "--bogus"])
    assert exc.value.code == 3
    code, _, err = run(capsys, "decide", "-t", EMPTY_S, "-p", "A:a ; AB")
    assert code == 3
    code, _, _ = run(capsys, "decide", "-t", EMPTY_S, "-p", "A:z ; AA")
    assert code == 3
    code, _, _ = run(capsys, "factor")
    assert code == 3


def test_tabulate(capsys):
    code, out, _ = run(capsys, "tabulate", "-t", EMPTY_S, "--max-rank", "2", "--format", "lines")
    assert code == 0
    classes = [ln.split("\t") for ln in out.splitlines()]
    assert classes[0][2] == "; _"
    assert all(c[5] == "certified" for c in classes)
    code, _, err = run(capsys, "tabulate", "-t", EMPTY_S, "--max-rank", "9")
    assert code == 4


def test_tabulate_refuses_large_rank_without_force():
    with pytest.raises(BudgetRefused):
        tabulate(HomotopyDataTriple("a"), 6)


def test_census_helpers():
    assert sum(1 for _ in gauss_words(3)) == 15
    assert sum(1 for _ in gauss_words(0)) == 1
    t = HomotopyDataTriple("ab", {"a": "b"})
    assert sum(1 for _ in enumerate_phrases(t, 1, 1)) == 2


def test_tabulate_classes_over_empty_s():
    t = HomotopyDataTriple("ab", {"a": "b"})
    classes = tabulate(t, 2)
    reps = {c.representative.rank for c in classes}
    assert 0 in reps
    # every class has a distinct normal form, so no two representatives are homotopic
    assert all(not c.unresolved for c in classes)


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "nanophrase.cli", "factor", "-t", COMPOSITE],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "2 prime factors" in res.stdout
