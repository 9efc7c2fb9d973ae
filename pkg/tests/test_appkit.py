import numpy as np
import pytest

from sparsepmi import appkit, corpus
from sparsepmi.polyalg import gradient, hessian, poly_eval


def test_joint_block_at_stationary_point():
    P = corpus.ex6_4()
    u = np.array(corpus._joint_points()[0])
    for f, G, c in zip(P.objectives, P.pmi_blocks, P.pattern.cliques):
        M = G(u)
        assert M[0, 0] == 0.0
        np.testing.assert_allclose(M[0, 1:], 0.0, atol=1e-12)
        np.testing.assert_allclose(M[1:, 1:], hessian(f, c.vars)(u), atol=1e-12)
    assert P.is_feasible(u)


def test_joint_block_rejects_non_stationary_point():
    P = corpus.ex6_4()
    assert not P.is_feasible(np.zeros(7) + 0.1)


def test_regularized_joint_appends_slacks():
    P = corpus.ex6_5()
    assert P.pattern.n == 10
    assert P.metadata["slack_vars"] == [8, 9, 10]
    for i, c in enumerate(P.pattern.cliques):
        assert c.vars[-1] == 8 + i
    # a large slack makes any point feasible
    u = np.r_[np.full(7, 0.3), np.full(3, 50.0)]
    assert P.is_feasible(u)
    assert P.evaluate(u) == pytest.approx(150.0)


def test_joint_builder_checks_counts():
    fs, pat = corpus._joint_polys()
    with pytest.raises(ValueError):
        appkit.build_joint_minimizer(fs[:2], pat)


def test_center_point_objective():
    P = corpus.ex6_6()
    assert P.pattern.n == 12 and P.pattern.m == 3
    c = np.full(3, 0.8591)
    u = np.r_[c, c, c, c]
    assert P.evaluate(u) == pytest.approx(0.0)
    rng = np.random.default_rng(0)
    for _ in range(20):
        assert P.evaluate(rng.normal(size=12)) >= 0.0


def test_h2_instance_layout():
    P = corpus.ex6_h2()
    meta = P.metadata
    assert (meta["p"], meta["q"]) == (2, 2)
    assert P.pattern.n == 4 + 4 * 3
    x = np.arange(1, P.pattern.n + 1, dtype=float)
    K, Xs = appkit.h2_unpack(x, meta)
    np.testing.assert_array_equal(K, [[1, 2], [3, 4]])
    np.testing.assert_array_equal(Xs[0], [[5, 6], [6, 7]])
    assert all(np.array_equal(X, X.T) for X in Xs)


def test_h2_lyapunov_equalities_match_matrix_form():
    d = corpus.H2_DATA
    P = corpus.ex6_h2()
    rng = np.random.default_rng(4)
    x = rng.normal(size=P.pattern.n)
    K, Xs = appkit.h2_unpack(x, P.metadata)
    for i in range(4):
        A, B, C, E = (np.array(d[k][i], dtype=float) for k in "ABCE")
        Acl = A + C @ K @ E
        R = Acl @ Xs[i] + Xs[i] @ Acl.T + B @ B.T
        got = [poly_eval(h, x) for h in P.equalities[i]]
        np.testing.assert_allclose(got, R[np.triu_indices(2)], atol=1e-10)
        D = np.array(d["D"][i], dtype=float)
        assert P.objectives[i](x) == pytest.approx(np.trace(D @ Xs[i] @ D.T))


def test_h2_norm_cap_on_first_clique_only():
    P = corpus.ex6_h2()
    assert P.pmi_blocks[0].size == 4
    assert all(G.size == 2 for G in P.pmi_blocks[1:])


def test_h2_rejects_bad_dimensions():
    d = corpus.H2_DATA
    with pytest.raises(ValueError):
        appkit.build_h2_synthesis(d["A"], d["B"][:3], d["C"], d["D"], d["E"], 10.0)


def test_gen_random_is_deterministic():
    spec = appkit.RandomSpec(3, 2, 3, seed=7)
    a, b = appkit.gen_random(spec), appkit.gen_random(spec)
    for f, g in zip(a.objectives, b.objectives):
        assert f == g
    for F, G in zip(a.pmi_blocks, b.pmi_blocks):
        u = np.linspace(-1, 1, a.pattern.n)
        np.testing.assert_array_equal(F(u), G(u))
    c = appkit.gen_random(appkit.RandomSpec(3, 2, 3, seed=8))
    assert any(f != g for f, g in zip(a.objectives, c.objectives))


def test_gen_random_shape_and_origin():
    spec = appkit.RandomSpec(4, 3, 2, seed=1)
    P = appkit.gen_random(spec)
    assert P.pattern.n == spec.n == 7
    assert [c.vars for c in P.pattern.cliques] == [(1, 2, 3, 4), (4, 5, 6, 7)]
    # G_i(0) = C = C_hat^T C_hat is PSD, so the origin is feasible
    assert P.is_feasible(np.zeros(7))
    assert all(G.size == 3 for G in P.pmi_blocks)


def test_random_spec_validation():
    with pytest.raises(ValueError):
        appkit.RandomSpec(1, 2, 3)
    with pytest.raises(ValueError):
        appkit.RandomSpec(3, 2, 3, family="other")


def test_random_objective_has_linear_term():
    P = appkit.gen_random(appkit.RandomSpec(3, 2, 1, seed=0, family="nonconvex"))
    f = P.objectives[0]
    g = [poly_eval(p, np.zeros(3)) for p in gradient(f, (1, 2, 3))]
    # linear term p^T x gives the gradient at the origin
    assert np.linalg.norm(g) > 0
