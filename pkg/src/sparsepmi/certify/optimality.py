"""First and second order optimality conditions at a candidate minimizer.

At ``u`` the first order condition asks for ``Lambda_i >= 0`` with

    grad f(u) = sum_i grad G_i(u)^*[Lambda_i] + sum_ij mu_ij grad h_ij(u),
    <Lambda_i, G_i(u)> = 0,

where ``grad G(u)^*[X] = (<d G / d x_j, X>)_j``. The multipliers are found
by a small conic program that minimizes the stationarity norm plus the
complementarity gap, so the report is meaningful even when the
conditions fail.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .. import conic
from ..polyalg import ProblemInstance, gradient, hessian, poly_eval

FEAS_SLACK = 1e-4
PINV_CUTOFF = 1e-8
MULT_RANK_TOL = 1e-6


@dataclass
class FOOCReport:
    """Multipliers and residuals of the first order condition at ``point``.

    ``multipliers[i]`` is ``None`` for cliques without a PMI block;
    ``eq_multipliers[i]`` lists the free multipliers of the equalities.
    ``residual`` is the minimized value ``stationarity + sum complementarity``.
    """

    point: np.ndarray
    multipliers: list[np.ndarray | None]
    eq_multipliers: list[np.ndarray]
    stationarity: float
    complementarity: list[float]
    residual: float
    multiplier_min_eigs: list[float] = field(default_factory=list)
    status: str = ""

    def holds(self, tol: float = 1e-3) -> bool:
        return self.residual <= tol and all(e >= -tol for e in self.multiplier_min_eigs)


def _svec_basis(size: int):
    iu = np.triu_indices(size)
    return iu, np.where(iu[0] == iu[1], 1.0, math.sqrt(2.0))


def _block_derivatives(G, vars, u):
    return [G.diff(v)(u) for v in vars]


def fooc_residual(problem: ProblemInstance, u, tol: float = 1e-9) -> FOOCReport:
    """Best multipliers for the first order condition at ``u``.

    Raises ``ValueError`` when ``u`` violates a PMI block by more than
    ``1e-4`` (relative to the block scale).
    """
    u = np.asarray(u, dtype=float).ravel()
    n = problem.n
    if u.shape != (n,):
        raise ValueError(f"point has length {u.shape[0]}, expected {n}")
    for i, G in enumerate(problem.pmi_blocks):
        if G is None:
            continue
        Gu = G(u)
        if np.linalg.eigvalsh(Gu)[0] < -FEAS_SLACK * max(1.0, np.abs(Gu).max()):
            raise ValueError(f"point violates the PMI of clique {i}")
    all_vars = list(range(1, n + 1))
    g = np.array([poly_eval(p, u) for p in gradient(problem.objective, all_vars)])

    # columns: t, svec(Lambda_i) per PMI clique, mu per equality
    cols: list[tuple] = [("t",)]
    pmi = []
    for i, G in enumerate(problem.pmi_blocks):
        if G is None:
            continue
        iu, w = _svec_basis(G.size)
        start = len(cols)
        cols += [("lam", i, a) for a in range(len(iu[0]))]
        Gu = G(u)
        dG = _block_derivatives(G, all_vars, u)
        J = np.array([D[iu] * w for D in dG])  # n x svec
        pmi.append((i, G.size, start, iu, w, Gu, J))
    eqs = []
    for i, hs in enumerate(problem.equalities):
        for j, h in enumerate(hs):
            eqs.append((i, j, len(cols),
                        np.array([poly_eval(p, u) for p in gradient(h, all_vars)])))
            cols.append(("mu", i, j))
    N = len(cols)

    c = np.zeros(N)
    c[0] = 1.0
    # r = g - sum J' lam - sum mu grad h; norm cone as [[t, r'], [r, t I]]
    R = np.zeros((n, N))
    for i, size, start, iu, w, Gu, J in pmi:
        c[start:start + len(iu[0])] = Gu[iu] * w
        R[:, start:start + len(iu[0])] = -J
    for i, j, col, gh in eqs:
        R[:, col] = -gh
    size = n + 1
    const = np.zeros((size, size))
    const[0, 1:] = const[1:, 0] = g
    coefs = []
    for col in range(N):
        C = np.zeros((size, size))
        if col == 0:
            C[np.diag_indices(size)] = 1.0
        else:
            C[0, 1:] = C[1:, 0] = R[:, col]
        coefs.append(C)
    blocks = [conic.lmi_block(size, const, coefs, ("norm",))]
    cap = 1e4 * (1.0 + np.linalg.norm(g))
    for i, sz, start, iu, w, Gu, J in pmi:
        rows = np.arange(len(iu[0]))
        F = sp.csr_matrix((np.ones(len(rows)), (rows, start + rows)), shape=(len(rows), N))
        blocks.append(conic.PSDBlock(sz, F, np.zeros(len(rows)), ("multiplier", i)))
        # trace cap keeps the program bounded when G_i(u) is singular
        tr = np.zeros((1, N))
        tr[0, start:start + len(iu[0])] = -np.where(iu[0] == iu[1], 1.0, 0.0)
        blocks.append(conic.PSDBlock(1, sp.csr_matrix(tr), np.array([cap]), ("cap", i)))
    prog = conic.ConicProgram(c, sp.csr_matrix((0, N)), np.zeros(0), blocks)
    sol = conic.solve(prog, tol=tol)
    x = sol.primal if sol.ok else np.zeros(N)
    if sol.ok and pmi:
        # multipliers on ker G_i(u) may be free; pick the least trace among
        # (near) optimal ones so the second order data is well defined
        best = float(c @ x)
        trace = np.zeros(N)
        for i, sz, start, iu, w, Gu, J in pmi:
            trace[start:start + len(iu[0])] = np.where(iu[0] == iu[1], 1.0, 0.0)
        slack = best + 1e-7 * (1.0 + abs(best))
        gate = conic.PSDBlock(1, sp.csr_matrix(-c.reshape(1, -1)), np.array([slack]),
                              ("level",))
        sol2 = conic.solve(conic.ConicProgram(trace, prog.A, prog.b, blocks + [gate]), tol=tol)
        if sol2.ok:
            x = sol2.primal

    mults: list[np.ndarray | None] = [None] * problem.m
    min_eigs = []
    r = g.copy()
    for i, sz, start, iu, w, Gu, J in pmi:
        lam = conic.smat(x[start:start + len(iu[0])], sz)
        mults[i] = lam
        min_eigs.append(float(np.linalg.eigvalsh(lam)[0]))
        r -= J @ (lam[iu] * w)
    eq_mults = [np.zeros(len(hs)) for hs in problem.equalities]
    for i, j, col, gh in eqs:
        eq_mults[i][j] = x[col]
        r -= x[col] * gh
    comp = []
    for i, G in enumerate(problem.pmi_blocks):
        comp.append(0.0 if G is None else abs(float(np.sum(mults[i] * G(u)))))
    stat = float(np.linalg.norm(r))
    return FOOCReport(u, mults, eq_mults, stat, comp, stat + sum(comp), min_eigs, sol.status)


@dataclass
class CliqueSecondOrder:
    clique: int
    lagrangian_hessian: np.ndarray = field(repr=False)
    H: np.ndarray = field(repr=False)
    kernel: np.ndarray = field(repr=False)
    critical: np.ndarray = field(repr=False)
    restricted_min_eig: float
    objective_hessian_min_eig: float
    strict_complementarity: bool
    ndc: bool


@dataclass
class SecondOrderReport:
    cliques: list[CliqueSecondOrder]

    @property
    def sufficient(self) -> bool:
        """All hypotheses of the second order sufficiency test hold."""
        return all(c.restricted_min_eig > 0 and c.strict_complementarity and c.ndc
                   for c in self.cliques)

    @property
    def objective_hessians_pd(self) -> bool:
        return all(c.objective_hessian_min_eig > 0 for c in self.cliques)


def _null_space(M: np.ndarray, rel: float) -> np.ndarray:
    if M.size == 0 or not np.any(M):
        return np.eye(M.shape[1])
    return scipy.linalg.null_space(M, rcond=rel)


def _rank(M: np.ndarray, rel: float) -> int:
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > rel * s[0])) if s[0] > 0 else 0


def second_order_check(problem: ProblemInstance, u, multipliers=None,
                       rank_tol: float = PINV_CUTOFF) -> SecondOrderReport:
    """Second order data of every clique at ``u``.

    ``multipliers`` is a :class:`FOOCReport` or a list of ``Lambda_i``
    (``None`` for cliques without a PMI). When omitted they are computed
    with :func:`fooc_residual`. Singular values of ``G_i(u)`` below
    ``rank_tol`` times the largest count as zero, both for the
    pseudoinverse and for the kernel basis ``E``.
    """
    u = np.asarray(u, dtype=float).ravel()
    eq_mults = [np.zeros(len(hs)) for hs in problem.equalities]
    if multipliers is None:
        multipliers = fooc_residual(problem, u)
    if isinstance(multipliers, FOOCReport):
        eq_mults = multipliers.eq_multipliers
        multipliers = multipliers.multipliers
    out = []
    for i, clique in enumerate(problem.pattern.cliques):
        vars = list(clique.vars)
        nv = len(vars)
        hf = hessian(problem.objectives[i], vars)(u)
        L = hf.copy()
        for mu, h in zip(eq_mults[i], problem.equalities[i]):
            L -= mu * hessian(h, vars)(u)
        G = problem.pmi_blocks[i]
        lam = multipliers[i] if G is not None else None
        if G is None or lam is None:
            out.append(CliqueSecondOrder(i, L, np.zeros((nv, nv)), np.zeros((0, 0)),
                                         np.eye(nv), float(np.linalg.eigvalsh(L)[0]),
                                         float(np.linalg.eigvalsh(hf)[0]), True, True))
            continue
        Gu = G(u)
        dG = [G.diff(v) for v in vars]
        dGu = [D(u) for D in dG]
        for s in range(nv):
            for t in range(s, nv):
                val = float(np.sum(lam * dG[s].diff(vars[t])(u)))
                L[s, t] -= val
                if s != t:
                    L[t, s] -= val
        Gp = np.linalg.pinv(Gu, rcond=rank_tol, hermitian=True)
        H = np.array([[2.0 * float(np.sum(lam * (dGu[s] @ Gp @ dGu[t])))
                       for t in range(nv)] for s in range(nv)])
        H = 0.5 * (H + H.T)
        ev, evec = np.linalg.eigh(Gu)
        scale = max(np.abs(ev).max(), 1e-300)
        E = evec[:, np.abs(ev) <= rank_tol * scale]
        kappa = E.shape[1]
        if kappa:
            iu, w = _svec_basis(kappa)
            M = np.column_stack([(E.T @ D @ E)[iu] * w for D in dGu])
            Nsp = _null_space(M, rank_tol)
            ndc = _rank(M, rank_tol) == len(iu[0])
        else:
            Nsp = np.eye(nv)
            ndc = True
        if Nsp.shape[1]:
            restricted = float(np.linalg.eigvalsh(Nsp.T @ (L + H) @ Nsp)[0])
        else:
            restricted = math.inf
        strict = _rank(Gu, rank_tol) + _rank(lam, MULT_RANK_TOL) == G.size
        out.append(CliqueSecondOrder(i, L, H, E, Nsp, restricted,
                                     float(np.linalg.eigvalsh(hf)[0]), strict, ndc))
    return SecondOrderReport(out)
