import math

import numpy as np
import pytest

from sparsepmi import corpus
from sparsepmi.certify import (AtomSet, ExtractionError, HierarchyOptions, assemble_minimizers,
                               evaluate_rank, extract_atoms, flat_truncation_check,
                               recover_certificate, run_hierarchy, verify_certificate)
from sparsepmi.moment import MomentView, dirac_tms, monomial_vector, union_index
from sparsepmi.polyalg import MatrixPolynomial, ProblemInstance, SparsityPattern, variables
from sparsepmi.relax import solve_relaxation

# ---------------------------------------------------------------- rank


def test_rank_with_clear_gap():
    r, ev, gap = evaluate_rank(np.diag([1.760, 7.29e-8, 2.69e-8]))
    assert r == 1
    assert gap < 1e-3


def test_rank_of_identity():
    r, _, _ = evaluate_rank(np.eye(5))
    assert r == 5


def test_rank_with_moderate_spread():
    r, _, _ = evaluate_rank(np.diag([264.83, 66.48, 0.9137, 0.2302, 2.23e-6, 1e-7]))
    assert r == 4


def test_rank_is_scale_invariant():
    rng = np.random.default_rng(1)
    B = rng.normal(size=(6, 3))
    M = B @ B.T + 1e-9 * np.eye(6)
    for c in (1e-6, 3.0, 1e5):
        assert evaluate_rank(c * M)[0] == evaluate_rank(M)[0]


def test_rank_eps_override():
    M = np.diag([1.0, 1e-2])
    assert evaluate_rank(M, eps=1e-3)[0] == 2
    assert evaluate_rank(M, eps=0.1)[0] == 1


# ---------------------------------------------------------------- flat truncation


def test_flat_truncation_levels():
    P = corpus.ex4_4()
    res = solve_relaxation(P, 3)
    two = flat_truncation_check(res.tms, 2, P)
    three = flat_truncation_check(res.tms, 3, P)
    assert two.flat and two.ranks == (2, 2)
    assert not three.flat and three.ranks == (3, 3) and three.lower_ranks == (2, 2)


def test_flat_truncation_on_dirac():
    P = corpus.ex6_1()
    y = dirac_tms([0.5, -0.2, 0.1, 0.3], union_index(P.pattern, 3))
    for t in (1, 2, 3):
        rep = flat_truncation_check(y, t, P)
        assert rep.flat and set(rep.ranks) == {1}


def test_flat_truncation_ranks_quartic_example():
    P = corpus.ex6_2()
    res = solve_relaxation(P, 5)
    rep = flat_truncation_check(res.tms, 4, P)
    assert rep.flat and rep.ranks == (4, 2)


# ---------------------------------------------------------------- extraction


def _mixture_view(points, weights, vars, deg):
    vals = sum(w * monomial_vector(p, vars, deg) for p, w in zip(points, weights))
    return MomentView.from_sequence(vars, deg, vals)


def test_extract_two_atom_mixture():
    u, v = np.array([0.3, -1.0]), np.array([-0.7, 0.4])
    y = _mixture_view([u, v], [0.5, 0.5], (1, 2), 4)
    atoms = extract_atoms(y, 2, 2)
    got = sorted(map(tuple, np.round(atoms.points, 10)))
    assert np.allclose(got, sorted([tuple(u), tuple(v)]), atol=1e-8)
    np.testing.assert_allclose(atoms.weights, [0.5, 0.5], atol=1e-8)
    assert atoms.residual <= 1e-8


@pytest.mark.parametrize("seed", range(5))
def test_extraction_round_trip_random_mixtures(seed):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1, 1, size=(2, 3))
    w = rng.uniform(0.2, 1.0, 2)
    w /= w.sum()
    y = _mixture_view(pts, w, (1, 2, 3), 4)
    atoms = extract_atoms(y, 2, 2)
    recon = sum(wj * monomial_vector(p, (1, 2, 3), 4) for p, wj in zip(atoms.points,
                                                                       atoms.weights))
    assert np.abs(recon - y.vector(4)).max() <= 1e-8


def test_extract_dirac():
    y = _mixture_view([np.array([0.25, 2.0])], [1.0], (1, 2), 2)
    atoms = extract_atoms(y, 1, 1)
    np.testing.assert_allclose(atoms.points[0], [0.25, 2.0], atol=1e-12)
    np.testing.assert_allclose(atoms.weights, [1.0])


def test_extract_flat_example_clique():
    P = corpus.ex4_4()
    res = solve_relaxation(P, 3)
    atoms = extract_atoms(res.tms.view(0), 2, 2)
    s5 = 1 / math.sqrt(5)
    got = sorted(atoms.points.tolist(), key=lambda p: p[1])
    np.testing.assert_allclose(got, [[s5, -math.sqrt(2 * s5)], [s5, math.sqrt(2 * s5)]],
                               atol=1e-5)
    np.testing.assert_allclose(atoms.weights, [0.5, 0.5], atol=1e-4)


def test_extract_rejects_bad_rank():
    y = _mixture_view([np.array([0.1, 0.2])], [1.0], (1, 2), 2)
    with pytest.raises(ExtractionError):
        extract_atoms(y, 1, 2)


# ---------------------------------------------------------------- assembly


def _atoms(clique, vars, pts):
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    return AtomSet(clique, vars, 1, pts, np.full(len(pts), 1 / len(pts)), 0.0)


def test_assemble_cartesian_structure():
    pat = SparsityPattern.from_lists(5, [[1, 2], [2, 3, 4], [4, 5]])
    sets = [_atoms(0, (1, 2), [[1, 0.5], [-1, 0.5]]),
            _atoms(1, (2, 3, 4), [[0.5, 0.0, 2.0]]),
            _atoms(2, (4, 5), [[2.0, 3.0], [2.0, -3.0]])]
    found = assemble_minimizers(sets, pat)
    assert len(found) == 4


def test_assemble_single_clique():
    pat = SparsityPattern.from_lists(2, [[1, 2]])
    found = assemble_minimizers([_atoms(0, (1, 2), [[1, 2], [3, 4]])], pat)
    assert sorted(map(tuple, found.points)) == [(1, 2), (3, 4)]


def test_assemble_conflicting_overlap():
    pat = SparsityPattern.from_lists(3, [[1, 2], [2, 3]])
    sets = [_atoms(0, (1, 2), [[0.0, 1.0]]), _atoms(1, (2, 3), [[2.0, 0.0]])]
    assert len(assemble_minimizers(sets, pat)) == 0


def test_assemble_joint_minimizers():
    P = corpus.ex6_4()
    res = run_hierarchy(P, options=HierarchyOptions(k_start=3, k_max=4))
    assert res.certified
    pts = np.array(res.minimizers.points)
    assert pts.shape == (4, 7)
    np.testing.assert_allclose(np.abs(pts), 0.25, atol=1e-3)
    # every minimizer has f = 2 f_1 + f_2 = 2 (-1/32) - 1/256
    assert res.bound == pytest.approx(-17 / 256, abs=1e-5)


# ---------------------------------------------------------------- hierarchy


def test_hierarchy_first_example():
    res = run_hierarchy(corpus.ex1_1())
    assert res.certified
    assert res.bound == pytest.approx(-1.0, abs=1e-3)
    np.testing.assert_allclose(res.minimizers.points[0], [1, 1, 1], atol=1e-3)


def test_hierarchy_star_example():
    res = run_hierarchy(corpus.ex6_1())
    assert res.certified and res.k == 2
    assert res.bound == pytest.approx(-2.8347, abs=1e-3)
    np.testing.assert_allclose(res.minimizers.points[0], [0.7746, -0.3997, -0.7746, -1.0],
                               atol=2e-3)
    assert res.flat_reports[2, 1].ranks == (1, 1, 1)


def test_hierarchy_sos_convex_example():
    res = run_hierarchy(corpus.ex6_3())
    assert res.certified and res.k == 3
    assert res.bound == pytest.approx(-1.0342, abs=1e-3)
    np.testing.assert_allclose(res.minimizers.points[0], [0.0, 0.4421, 0.2586, 0.5207],
                               atol=2e-3)


def test_hierarchy_reports_infeasible():
    res = run_hierarchy(corpus.ex6_5_plain(), options=HierarchyOptions(k_start=4, k_max=4))
    assert res.status == "infeasible" and res.bound == math.inf


def test_hierarchy_uncertified_keeps_bound():
    res = run_hierarchy(corpus.ex4_4(), options=HierarchyOptions(k_max=2))
    assert res.status == "uncertified"
    assert res.bound <= -10 / math.sqrt(5) + 1e-6


# ---------------------------------------------------------------- certificates


def _cert(problem, k):
    res = solve_relaxation(problem, k)
    cert = recover_certificate(problem, res)
    return cert, verify_certificate(cert, problem)


@pytest.mark.parametrize("name,k", [("ex1_1", 3), ("ex6_1", 2), ("ex3_3", 2)])
def test_certificate_identities(name, k):
    P = getattr(corpus, name)()
    cert, chk = _cert(P, k)
    assert cert.verified and chk.passed
    fmax = max(abs(c) for _, c in P.objective.items())
    assert chk.coefficient_residual <= 1e-6 * (1 + fmax)
    assert chk.sum_residual <= 1e-6


def test_certificate_of_sos_instance():
    x1, = variables(1)
    P = ProblemInstance(SparsityPattern.from_lists(1, [[1]]), (x1 ** 2,),
                        (MatrixPolynomial.identity(1, 1),))
    cert, chk = _cert(P, 1)
    assert chk.passed
    assert cert.gamma == pytest.approx(0.0, abs=1e-7)
    assert max((abs(c) for _, c in cert.p[0].items()), default=0.0) <= 1e-6


def test_certificate_check_detects_tampering():
    P = corpus.ex6_1()
    cert, _ = _cert(P, 2)
    cert.gram_moment[0] = cert.gram_moment[0] + 0.1 * np.eye(cert.gram_moment[0].shape[0])
    chk = verify_certificate(cert, P)
    assert not chk.coefficient_ok and not chk.passed


def test_certificate_requires_dual():
    res = solve_relaxation(corpus.ex6_5_plain(), 4)
    with pytest.raises(ValueError):
        recover_certificate(corpus.ex6_5_plain(), res)
