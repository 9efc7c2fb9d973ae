import math

import numpy as np
import pytest

from sparsepmi import corpus
from sparsepmi.moment import dirac_tms
from sparsepmi.polyalg import (Exponent, MatrixPolynomial, ProblemInstance, SparsityPattern,
                               variables)
from sparsepmi.relax import build_dense_moment, build_sparse_moment, solve_relaxation


def _hankel_instance():
    x1, = variables(1)
    pat = SparsityPattern.from_lists(1, [[1]])
    return ProblemInstance(pat, (x1 ** 2,), (MatrixPolynomial.identity(1, 1),))


def test_block_sizes_first_example():
    prog, vmap = build_sparse_moment(corpus.ex1_1(), 3)
    sizes = {(b.kind, b.clique): b.size for b in vmap.blocks}
    assert sizes[("moment", 0)] == 10 and sizes[("moment", 1)] == 10
    assert sizes[("localizing", 0)] == 12
    assert sizes[("localizing", 1)] == 18
    assert prog.block_sizes() == [b.size for b in vmap.blocks]


def test_dense_block_size():
    _, vmap = build_dense_moment(corpus.ex1_1(), 3)
    assert vmap.blocks[0].kind == "moment" and vmap.blocks[0].size == math.comb(6, 3)


def test_hankel_instance_sparse_equals_dense():
    P = _hankel_instance()
    s = solve_relaxation(P, 1)
    d = solve_relaxation(P, 1, dense=True)
    assert s.bound == pytest.approx(0.0, abs=1e-7)
    assert d.bound == pytest.approx(s.bound, abs=1e-9)
    ps, _ = build_sparse_moment(P, 1)
    pd, _ = build_dense_moment(P, 1)
    np.testing.assert_array_equal(ps.c, pd.c)


def test_objective_row_couples_shared_coordinate():
    P = corpus.ex4_4()
    prog, vmap = build_sparse_moment(P, 3)
    y = dirac_tms([0.3, -0.7, 1.1], vmap.index)
    assert prog.objective(y.values) == pytest.approx(P.evaluate([0.3, -0.7, 1.1]), abs=1e-12)
    pos = vmap.coordinates
    assert prog.c[pos[Exponent({2: 2})]] == -4.0


def test_dense_matches_sparse_on_star_pattern():
    s = solve_relaxation(corpus.ex6_1(), 2)
    d = solve_relaxation(corpus.ex6_1(), 2, dense=True)
    assert s.bound == pytest.approx(-2.8347, abs=1e-3)
    assert d.bound == pytest.approx(s.bound, abs=1e-3)
    assert s.bound <= d.bound + 1e-6


def test_bounds_of_examples():
    assert solve_relaxation(corpus.ex1_1(), 3).bound == pytest.approx(-1.0, abs=1e-3)
    assert solve_relaxation(corpus.ex4_4(), 3).bound == pytest.approx(-10 / math.sqrt(5),
                                                                      abs=1e-3)


def test_infeasible_relaxation():
    res = solve_relaxation(corpus.ex6_5_plain(), 4)
    assert res.infeasible
    assert res.bound == math.inf and res.tms is None


def test_dirac_of_feasible_points_is_feasible():
    P = corpus.ex6_2()
    prog, vmap = build_sparse_moment(P, 3)
    bound = solve_relaxation(P, 3).bound
    rng = np.random.default_rng(0)
    pts = [u for u in rng.uniform(-2.5, 2.5, size=(400, 3)) if P.is_feasible(u)]
    assert len(pts) >= 5
    for u in pts[:5]:
        y = dirac_tms(u, vmap.index).values
        np.testing.assert_allclose(prog.A @ y, prog.b, atol=1e-12)
        for blk in prog.blocks:
            V = blk.value(y)
            assert np.linalg.eigvalsh(V)[0] >= -1e-9 * max(1, np.abs(V).max())
        assert prog.objective(y) == pytest.approx(P.evaluate(u), abs=1e-9)
        assert bound <= P.evaluate(u) + 1e-6


def test_monotone_in_order():
    P = corpus.ex4_4()
    bounds = [solve_relaxation(P, k).bound for k in (1, 2, 3)]
    assert bounds[0] <= bounds[1] + 1e-6 and bounds[1] <= bounds[2] + 1e-6


def test_weak_duality():
    res = solve_relaxation(corpus.ex6_1(), 2)
    sol = res.solution
    assert sol.objective_dual <= sol.objective_primal + 1e-6


def test_equalities_enter_as_localizing_rows():
    P = corpus.ex6_h2()
    prog, vmap = build_sparse_moment(P, 1)
    tags = [t for t in vmap.eq_tags if t[0] == "equality"]
    assert tags, "Lyapunov equalities should produce rows"
    assert len(prog.b) == len(vmap.eq_tags)


def test_degree_too_high_for_order():
    with pytest.raises(ValueError):
        build_sparse_moment(corpus.ex6_2(), 1)
