import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsepmi import corpus, problemfile
from sparsepmi.cli import main
from sparsepmi.polyalg import (Exponent, MatrixPolynomial, Polynomial, ProblemInstance,
                               SparsityPattern)


def _same_problem(a: ProblemInstance, b: ProblemInstance):
    assert a.pattern.n == b.pattern.n
    assert [c.vars for c in a.pattern.cliques] == [c.vars for c in b.pattern.cliques]
    for f, g in zip(a.objectives, b.objectives):
        assert dict(f.items()) == dict(g.items())
    for F, G in zip(a.pmi_blocks, b.pmi_blocks):
        assert (F is None) == (G is None)
        if F is not None:
            assert F.size == G.size
            for s in range(F.size):
                for t in range(s, F.size):
                    assert dict(F[s, t].items()) == dict(G[s, t].items())
    for hs, ks in zip(a.equalities, b.equalities):
        assert [dict(h.items()) for h in hs] == [dict(k.items()) for k in ks]


# ---------------------------------------------------------------- problem files


@pytest.mark.parametrize("name", ["ex1_1", "ex6_4", "ex6_6", "ex6_h2"])
def test_problem_file_round_trip(name):
    P = getattr(corpus, name)()
    _same_problem(problemfile.loads(problemfile.dumps(P)), P)


coeff = st.floats(-1e6, 1e6, allow_nan=False).filter(lambda c: abs(c) > 1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), coeff), min_size=1,
                max_size=6))
def test_round_trip_is_exact_for_arbitrary_coefficients(terms):
    f = Polynomial({Exponent.from_dense([a, b]): c for a, b, c in terms}, 2)
    G = MatrixPolynomial(2, {(0, 0): f, (0, 1): f * 0.5, (1, 1): f + 1.0}, 2)
    P = ProblemInstance(SparsityPattern.from_lists(2, [[1, 2]]), (f,), (G,))
    _same_problem(problemfile.loads(problemfile.dumps(P)), P)


def test_truncated_file_reports_offset():
    text = problemfile.dumps(corpus.ex1_1())
    with pytest.raises(problemfile.ProblemFileError) as err:
        problemfile.loads(text[:200])
    assert err.value.offset is not None and err.value.offset <= 200


def test_wrong_format_rejected():
    with pytest.raises(problemfile.ProblemFileError):
        problemfile.loads(json.dumps({"format": "other", "version": 1}))


# ---------------------------------------------------------------- command line


@pytest.fixture
def ex_file(tmp_path):
    def write(name):
        path = tmp_path / f"{name}.json"
        problemfile.save(getattr(corpus, name)(), path)
        return str(path)
    return write


def test_solve_certified_exit_code(ex_file, capsys):
    assert main(["solve", ex_file("ex1_1")]) == 0
    out = capsys.readouterr().out
    assert "status: certified" in out and "minimizers (1," in out


def test_solve_json_report(ex_file, capsys):
    assert main(["solve", ex_file("ex4_4"), "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["status"] == "certified"
    assert len(rep["minimizers"]) == 2
    assert rep["bound"] == pytest.approx(-10 / np.sqrt(5), abs=1e-3)


def test_solve_uncertified_exit_code(ex_file):
    assert main(["solve", ex_file("ex4_4"), "--kmax", "2"]) == 2


def test_solve_infeasible_exit_code(ex_file):
    assert main(["solve", ex_file("ex6_5_plain"), "--kmax", "4"]) == 3


def test_truncated_file_exit_code(ex_file, tmp_path, capsys):
    src = ex_file("ex1_1")
    bad = tmp_path / "bad.json"
    bad.write_text(open(src).read()[:300])
    assert main(["solve", str(bad)]) == 1
    assert "byte" in capsys.readouterr().err


def test_missing_file_exit_code(tmp_path):
    assert main(["solve", str(tmp_path / "none.json")]) == 1


def test_certify_command(ex_file, capsys):
    assert main(["certify", ex_file("ex3_3"), "--k", "2"]) == 0
    assert "certificate: verified" in capsys.readouterr().out


def test_extract_command(ex_file, capsys):
    assert main(["extract", ex_file("ex4_4"), "--k", "3", "--t", "2"]) == 0
    out = capsys.readouterr().out
    assert "(2, 2)" in out


def test_generate_is_reproducible(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["generate", "--omega", "3", "--ell", "2", "--m", "3", "--seed", "5"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    P = problemfile.load(a)
    assert P.pattern.n == 7


def test_examples_list(capsys):
    assert main(["examples", "list"]) == 0
    out = capsys.readouterr().out
    for ex_id in corpus.EXAMPLES:
        assert ex_id in out


def test_examples_unknown_id():
    assert main(["examples", "run", "nope"]) == 1


def test_examples_run(capsys):
    assert main(["examples", "run", "ex4_4"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_examples_export(tmp_path):
    assert main(["examples", "export", "ex1_1", "ex6_1", "--out", str(tmp_path)]) == 0
    _same_problem(problemfile.load(tmp_path / "ex6_1.json"), corpus.ex6_1())
