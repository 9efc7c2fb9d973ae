import numpy as np
import pytest

from sparsepmi import appkit, corpus
from sparsepmi.certify import sos_convexity_test
from sparsepmi.polyalg import MatrixPolynomial, variables


def test_even_power_is_sos_convex():
    x, = variables(1)
    res = sos_convexity_test(x ** 4)
    assert res.certified
    assert res.residual <= 1e-7


def test_concave_quadratic_is_inconclusive():
    x, = variables(1)
    assert not sos_convexity_test(-x ** 2).certified


def test_odd_degree_is_inconclusive():
    x, = variables(1)
    res = sos_convexity_test(x ** 3)
    assert res.status == "inconclusive"


def test_affine_is_trivially_certified():
    x1, x2 = variables(2)
    assert sos_convexity_test(3 * x1 - x2 + 1).certified


def test_center_point_matrix_is_sos_convex():
    # F with identity - F(z - c) >= 0 describing an SOS-concave set
    F = MatrixPolynomial.identity(3, 3) - corpus._F_shifted(np.zeros(3))
    res = sos_convexity_test(F)
    assert res.certified
    assert res.margin >= -1e-7


def test_negated_matrix_is_not_certified():
    F = MatrixPolynomial.identity(3, 3) - corpus._F_shifted(np.zeros(3))
    assert not sos_convexity_test(F * -1.0).certified


def test_basis_overflow_raises():
    xs = variables(6)
    p = sum((v ** 6 for v in xs), xs[0] * 0)
    with pytest.raises(ValueError):
        sos_convexity_test(p, max_basis=10)


@pytest.mark.parametrize("seed", range(3))
def test_random_objectives_are_sos_convex(seed):
    P = appkit.gen_random(appkit.RandomSpec(3, 2, 3, seed=seed))
    for f in P.objectives:
        assert sos_convexity_test(f).certified
