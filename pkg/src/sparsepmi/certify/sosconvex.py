"""SOS-convexity test for polynomials and symmetric matrix polynomials.

``P`` is SOS-convex when ``z^T hess(xi^T P(x) xi) z`` is a sum of squares in
``(x, z, xi)``. The form is quadratic in ``z`` and in ``xi``, so a Gram
basis of monomials ``z_s xi_a x^alpha`` with ``|alpha| <= (deg P - 2) / 2``
suffices and the test is a single small SDP.
When that fails the form is retried with the multiplier ``|xi|^2``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .. import conic
from ..polyalg import MatrixPolynomial, Polynomial, monomials

PSD_SLACK = 1e-7
COEFF_TOL = 1e-7
MAX_BASIS = 2000


@dataclass
class SOSConvexityResult:
    """``status`` is ``"certified"`` or ``"inconclusive"``.

    ``margin`` is the largest ``lam`` with ``Q - lam I >= 0`` found by the
    solver (capped at 1) and ``residual`` the coefficient mismatch of the
    rounded Gram matrix, relative to the largest coefficient.
    """

    status: str
    margin: float = float("nan")
    residual: float = float("nan")
    gram: np.ndarray | None = field(default=None, repr=False)
    reason: str = ""

    @property
    def certified(self) -> bool:
        return self.status == "certified"


def _as_matrix(P) -> MatrixPolynomial:
    if isinstance(P, Polynomial):
        return MatrixPolynomial(1, {(0, 0): P}, P.num_vars)
    if isinstance(P, MatrixPolynomial):
        return P
    raise TypeError("expected a Polynomial or MatrixPolynomial")


def _target(P: MatrixPolynomial, vars, r: int):
    """Coefficients of ``|xi|^(2r) sum_{s,t,a,b} z_s z_t xi_a xi_b d2 P_ab / dx_s dx_t``.

    Keys are ``(alpha, (s, t), xi)`` with ``s <= t`` and ``xi`` the sorted
    multiset of ``xi`` indices.
    """
    mult = {(): 1.0}
    for _ in range(r):
        nxt: dict = {}
        for key, c in mult.items():
            for a in range(P.size):
                k2 = tuple(sorted(key + (a, a)))
                nxt[k2] = nxt.get(k2, 0.0) + c
        mult = nxt
    out: dict = {}
    nv = len(vars)
    for (a, b), p in P.upper_items():
        wab = 1.0 if a == b else 2.0
        for s in range(nv):
            ds = p.diff(vars[s])
            for t in range(s, nv):
                wst = 1.0 if s == t else 2.0
                for e, c in ds.diff(vars[t]).items():
                    for mk, mc in mult.items():
                        key = (e, (s, t), tuple(sorted(mk + (a, b))))
                        out[key] = out.get(key, 0.0) + wab * wst * c * mc
    return out


def _xi_monomials(ell: int, deg: int):
    return list(itertools.combinations_with_replacement(range(ell), deg))


def sos_convexity_test(P, tol: float = 1e-9, max_xi_degree: int = 1,
                       max_basis: int = MAX_BASIS) -> SOSConvexityResult:
    """Decide SOS-convexity of ``P`` numerically.

    The plain test asks for ``z^T hess(xi^T P xi) z`` to be SOS in
    ``(x, z, xi)``. Biquadratic forms can be PSD without being SOS, so when
    it fails the form is multiplied by ``|xi|^(2r)`` for ``r`` up to
    ``max_xi_degree``; an SOS product still gives, for each fixed ``xi``,
    an SOS matrix Hessian, which is the definition of SOS-convexity.

    ``certified`` means a Gram matrix was found that is PSD and reproduces
    the form within ``1e-7`` relative coefficient error after clipping its
    negative eigenvalues. Anything else is ``inconclusive``: ``P`` may still
    be SOS-convex. Raises ``ValueError`` when the Gram basis would exceed
    ``max_basis`` monomials.

    Examples
    --------
    >>> from sparsepmi.polyalg import variables
    >>> x, = variables(1)
    >>> sos_convexity_test(x ** 4).status
    'certified'
    >>> sos_convexity_test(-x ** 2).status
    'inconclusive'
    """
    P = _as_matrix(P)
    vars = sorted(P.support)
    if P.degree <= 1 or not vars:
        return SOSConvexityResult("certified", 0.0, 0.0, np.zeros((0, 0)),
                                  "affine in x, Hessian form vanishes")
    last = SOSConvexityResult("inconclusive")
    for r in range(0, max_xi_degree + 1 if P.size > 1 else 1):
        last = _gram_test(P, vars, r, tol, max_basis)
        if last.certified or last.reason == "odd degree Hessian form":
            return last
    return last


def _gram_test(P: MatrixPolynomial, vars, r: int, tol: float,
               max_basis: int) -> SOSConvexityResult:
    nv = len(vars)
    target = _target(P, vars, r)
    if (P.degree - 2) % 2:
        top = [k for k, c in target.items() if k[0].degree == P.degree - 2 and abs(c) > 0]
        if top:
            return SOSConvexityResult("inconclusive", reason="odd degree Hessian form")
    h = (P.degree - 2) // 2
    xb = monomials(vars, h)
    basis = [(s, a, e) for s in range(nv) for a in _xi_monomials(P.size, r + 1) for e in xb]
    nb = len(basis)
    if nb > max_basis:
        raise ValueError(f"Gram basis of {nb} monomials exceeds the limit {max_basis}")
    iu = np.triu_indices(nb)
    nq = len(iu[0])

    # row per monomial of the form; column per upper Gram entry, plus lam
    rows: dict = {}
    ri, ci, vals = [], [], []
    for col, (p, q) in enumerate(zip(*iu)):
        s1, a1, e1 = basis[p]
        s2, a2, e2 = basis[q]
        key = (e1 * e2, tuple(sorted((s1, s2))), tuple(sorted(a1 + a2)))
        ri.append(rows.setdefault(key, len(rows)))
        ci.append(col)
        vals.append(1.0 if p == q else 2.0)
    for key in target:
        if key not in rows:
            if abs(target[key]) > 0:
                return SOSConvexityResult("inconclusive", reason="term outside Gram support")
    nrow = len(rows)
    A = sp.csr_matrix((vals, (ri, ci)), shape=(nrow, nq + 1))
    b = np.zeros(nrow)
    for key, row in rows.items():
        b[row] = target.get(key, 0.0)
    scale = max(1.0, float(np.abs(b).max()))
    b = b / scale

    # Q - lam I >= 0 in svec form; Gram entries enter as Q_pq directly
    w = np.where(iu[0] == iu[1], 1.0, np.sqrt(2.0))
    F = sp.lil_matrix((nq, nq + 1))
    for col in range(nq):
        F[col, col] = w[col]
        if iu[0][col] == iu[1][col]:
            F[col, nq] = -1.0
    cap = sp.csr_matrix(([-1.0], ([0], [nq])), shape=(1, nq + 1))
    blocks = [conic.PSDBlock(nb, F.tocsr(), np.zeros(nq), ("gram",)),
              conic.PSDBlock(1, cap, np.array([1.0]), ("cap",))]
    c = np.zeros(nq + 1)
    c[nq] = -1.0
    sol = conic.solve(conic.ConicProgram(c, A, b, blocks), tol=tol)
    if not sol.ok:
        return SOSConvexityResult("inconclusive", reason=f"solver status {sol.status}")
    x = sol.primal
    Q = np.zeros((nb, nb))
    Q[iu] = x[:nq]
    Q = Q + np.triu(Q, 1).T
    ev, V = np.linalg.eigh(Q)
    Qc = (V * np.clip(ev, 0.0, None)) @ V.T
    resid = float(np.abs(A[:, :nq] @ Qc[iu] - b).max()) if nrow else 0.0
    margin = float(x[nq])
    gram = Qc * scale
    if margin >= -PSD_SLACK and resid <= COEFF_TOL:
        return SOSConvexityResult("certified", margin, resid, gram)
    return SOSConvexityResult("inconclusive", margin, resid, gram,
                              "no PSD Gram matrix within tolerance")
