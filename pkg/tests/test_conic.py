import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsepmi import conic, corpus
from sparsepmi.conic import (ConicProgram, PSDBlock, export_text, import_text, kkt_residuals,
                             lmi_block, smat, solve, svec, svec_dim)
from sparsepmi.relax import build_sparse_moment

BACKENDS = sorted(conic.BACKENDS)


def _trace_program():
    # x = svec(X) for 2x2 X; min <diag(1,2), X> s.t. tr X = 1, X >= 0
    c = svec(np.diag([1.0, 2.0]))
    A = sp.csr_matrix(svec(np.eye(2)).reshape(1, -1))
    blk = PSDBlock(2, sp.identity(3, format="csr"), np.zeros(3), ("X",))
    return ConicProgram(c, A, np.array([1.0]), [blk])


@pytest.mark.parametrize("backend", BACKENDS)
def test_smallest_eigenvalue_program(backend):
    sol = solve(_trace_program(), backend=backend)
    assert sol.status == "optimal"
    assert sol.objective_primal == pytest.approx(1.0, abs=1e-7)
    np.testing.assert_allclose(smat(sol.primal), np.diag([1.0, 0.0]), atol=1e-5)


@pytest.mark.parametrize("backend", BACKENDS)
def test_two_by_two_lmi(backend):
    blk = lmi_block(2, np.eye(2), [np.array([[0.0, 1.0], [1.0, 0.0]])])
    prog = ConicProgram(np.array([1.0]), sp.csr_matrix((0, 1)), np.zeros(0), [blk])
    sol = solve(prog, backend=backend)
    assert sol.status == "optimal"
    assert sol.primal[0] == pytest.approx(-1.0, abs=1e-6)
    assert abs(sol.objective_primal - sol.objective_dual) <= 1e-8 * (1 + 1)


def test_moment_program_of_first_example():
    prog, _ = build_sparse_moment(corpus.ex1_1(), 3)
    sol = solve(prog)
    assert sol.ok
    assert sol.objective_primal == pytest.approx(-1.0, abs=1e-3)


def test_optimal_solution_postconditions():
    prog, _ = build_sparse_moment(corpus.ex6_1(), 2)
    tol = 1e-8
    sol = solve(prog, tol=tol)
    assert sol.status == "optimal"
    res = kkt_residuals(prog, sol.primal, sol.dual_eq, sol.dual_cone)
    assert max(res["primal_feasibility"], res["dual_feasibility"], res["gap"]) <= tol
    for blk in prog.blocks:
        assert np.linalg.eigvalsh(blk.value(sol.primal))[0] >= -10 * tol * blk.size
    for Z in sol.dual_cone:
        assert np.array_equal(Z, Z.T)
        assert np.linalg.eigvalsh(Z)[0] >= -1e-8 * max(1.0, np.abs(Z).max())


def test_objective_scaling():
    prog, _ = build_sparse_moment(corpus.ex4_4(), 2)
    a = solve(prog)
    b = solve(prog.scaled(3.0))
    assert b.objective_primal == pytest.approx(3 * a.objective_primal, rel=1e-6)
    assert b.objective_dual == pytest.approx(3 * a.objective_dual, rel=1e-6)


def test_infeasible_program():
    # x >= 1 and x <= -1 via two 1x1 blocks
    blocks = [PSDBlock(1, sp.csr_matrix([[1.0]]), np.array([-1.0])),
              PSDBlock(1, sp.csr_matrix([[-1.0]]), np.array([-1.0]))]
    sol = solve(ConicProgram(np.array([1.0]), sp.csr_matrix((0, 1)), np.zeros(0), blocks))
    assert sol.status == "infeasible"
    assert not sol.ok


def test_unbounded_program():
    blocks = [PSDBlock(1, sp.csr_matrix([[-1.0]]), np.array([0.0]))]
    sol = solve(ConicProgram(np.array([1.0]), sp.csr_matrix((0, 1)), np.zeros(0), blocks))
    assert sol.status == "unbounded"


def test_inconsistent_equalities_caught_by_presolve():
    A = sp.csr_matrix([[1.0, 1.0], [2.0, 2.0]])
    blk = PSDBlock(1, sp.csr_matrix([[1.0, 0.0]]), np.zeros(1))
    sol = solve(ConicProgram(np.zeros(2), A, np.array([1.0, 3.0]), [blk]))
    assert sol.status == "infeasible"


def test_bad_arguments():
    with pytest.raises(ValueError):
        solve(_trace_program(), tol=0.0)
    with pytest.raises(ValueError):
        solve(_trace_program(), backend="nope")
    with pytest.raises(ValueError):
        ConicProgram(np.zeros(1), sp.csr_matrix((0, 1)), np.zeros(0),
                     [PSDBlock(2, sp.csr_matrix((2, 1)), np.zeros(3))])


def test_text_round_trip():
    prog, _ = build_sparse_moment(corpus.ex1_1(), 2)
    back = import_text(export_text(prog))
    np.testing.assert_array_equal(back.c, prog.c)
    np.testing.assert_array_equal(back.b, prog.b)
    assert (back.A != prog.A).nnz == 0
    for b1, b2 in zip(back.blocks, prog.blocks):
        assert b1.size == b2.size
        assert (b1.F != b2.F).nnz == 0
        np.testing.assert_array_equal(b1.F0, b2.F0)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2 ** 31))
def test_svec_preserves_inner_products(n, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, n))
    Y = rng.normal(size=(n, n))
    X, Y = X + X.T, Y + Y.T
    assert svec(X).shape == (svec_dim(n),)
    assert svec(X) @ svec(Y) == pytest.approx(np.sum(X * Y), rel=1e-12, abs=1e-12)
    np.testing.assert_allclose(smat(svec(X)), X, atol=1e-14)
