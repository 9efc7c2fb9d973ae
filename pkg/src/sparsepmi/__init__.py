"""Sparse matrix moment relaxations for polynomial optimization with PMI constraints.

Typical use::

    from sparsepmi import corpus, run_hierarchy
    result = run_hierarchy(corpus.ex6_1())
    result.bound, result.minimizers.points
"""
from .certify import (HierarchyOptions, HierarchyResult, fooc_residual, recover_certificate,
                      run_hierarchy, second_order_check, sos_convexity_test,
                      verify_certificate)
from .polyalg import (Clique, MatrixPolynomial, Polynomial, ProblemInstance, SparsityPattern,
                      variables)
from .relax import solve_relaxation

__version__ = "0.1.0"

__all__ = [
    "Clique", "HierarchyOptions", "HierarchyResult", "MatrixPolynomial", "Polynomial",
    "ProblemInstance", "SparsityPattern", "fooc_residual", "recover_certificate",
    "run_hierarchy", "second_order_check", "solve_relaxation", "sos_convexity_test",
    "variables", "verify_certificate",
]
