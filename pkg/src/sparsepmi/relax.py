"""Sparse and dense moment relaxations as standard-form conic programs.

The decision vector is the truncated moment sequence itself: one
coordinate per exponent of the union index, so moments shared between
overlapping cliques are a single variable. Every PSD block is an affine
(here linear) image of that vector, built from the symbolic entries of
:func:`moment.localizing_entries`.

The SOS side is never assembled on its own. It is the conic dual of the
moment program and is read back from the dual blocks by
:mod:`sparsepmi.certify.certificate`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import conic
from .conic import ConicProgram, ConicSolution, PSDBlock, svec_dim, svec_index
from .moment import (TMS, DegreeError, UnionIndex, dense_index, index_set, localizing_entries,
                     localizing_order, union_index)
from .polyalg import Exponent, MatrixPolynomial, ProblemInstance

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class BlockInfo:
    """What a PSD block of the program realizes.

    ``kind`` is ``"moment"`` or ``"localizing"``; ``basis`` is the monomial
    vector ``[x]_{order}`` over ``vars`` that fills each ``(s, t)`` cell.
    """

    kind: str
    clique: int
    vars: tuple[int, ...]
    order: int
    size: int
    basis: tuple[Exponent, ...] = field(repr=False)
    matrix: MatrixPolynomial | None = field(default=None, repr=False)

    @property
    def ell(self) -> int:
        return self.size // max(1, len(self.basis))


@dataclass(frozen=True)
class VariableMap:
    """Bookkeeping that ties a conic program back to the moment problem.

    ``coordinates`` sends each exponent of ``index`` to its decision
    coordinate; blocks are stored as symmetric vectorizations with
    off-diagonal entries scaled by ``sqrt(2)`` (``svec`` convention of
    :mod:`sparsepmi.conic`).
    """

    kind: str
    k: int
    index: UnionIndex
    blocks: tuple[BlockInfo, ...]
    eq_tags: tuple[tuple, ...]
    scaling: str = "svec-sqrt2"

    @property
    def coordinates(self) -> dict:
        return self.index.positions

    def block_of(self, kind: str, clique: int) -> int | None:
        for j, b in enumerate(self.blocks):
            if b.kind == kind and b.clique == clique:
                return j
        return None


@dataclass
class RelaxationResult:
    bound: float
    tms: TMS | None
    dual: list[np.ndarray]
    dual_eq: np.ndarray
    status: str
    k: int
    kind: str = "sparse"
    program: ConicProgram | None = field(default=None, repr=False)
    vmap: VariableMap | None = field(default=None, repr=False)
    solution: ConicSolution | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return self.status in ("optimal", "inaccurate")

    @property
    def infeasible(self) -> bool:
        return self.status == "infeasible"


def _block(entries, size: int, positions: dict, ncols: int) -> sp.csr_matrix:
    rows, cols, vals = [], [], []
    for r, c, combo in entries:
        q = svec_index(r, c, size)
        w = 1.0 if r == c else SQRT2
        for e, coef in combo.items():
            if coef != 0.0:
                rows.append(q)
                cols.append(positions[e])
                vals.append(w * coef)
    return sp.csr_matrix((vals, (rows, cols)), shape=(svec_dim(size), ncols))


def _assemble(problem: ProblemInstance, k: int, index: UnionIndex, kind: str,
              scopes: list[tuple[int, ...]], moment_scopes: list[tuple[int, ...]]):
    """Shared assembly path.

    ``scopes[i]`` are the variables used for clique ``i``'s localizing block
    and equality multipliers; ``moment_scopes`` lists the moment blocks.
    """
    if k < problem.k0:
        raise DegreeError(f"order k={k} is below the minimal order k0={problem.k0}")
    pos = index.positions
    N = len(index)
    c = np.zeros(N)
    for f in problem.objectives:
        for e, coef in f.items():
            c[pos[e]] += coef

    blocks: list[PSDBlock] = []
    infos: list[BlockInfo] = []
    for i, vars in enumerate(moment_scopes):
        size, entries = localizing_entries(None, vars, k)
        F = _block(entries, size, pos, N)
        blocks.append(PSDBlock(size, F, np.zeros(svec_dim(size)), ("moment", i)))
        infos.append(BlockInfo("moment", i, vars, k, size, index_set(vars, k).members))
    for i, G in enumerate(problem.pmi_blocks):
        if G is None:
            continue
        vars = scopes[i]
        size, entries = localizing_entries(G, vars, k)
        F = _block(entries, size, pos, N)
        order = localizing_order(k, G.degree)
        blocks.append(PSDBlock(size, F, np.zeros(svec_dim(size)), ("localizing", i)))
        infos.append(BlockInfo("localizing", i, vars, order, size,
                               index_set(vars, order).members, G))

    rows, cols, vals, b, tags = [0], [pos[Exponent()]], [1.0], [1.0], [("mass",)]
    for i, hs in enumerate(problem.equalities):
        for j, h in enumerate(hs):
            budget = 2 * k - h.degree
            if budget < 0:
                raise DegreeError(f"equality {j} of clique {i} has degree {h.degree} > 2k")
            for beta in index_set(scopes[i], budget).members:
                r = len(b)
                for e, coef in h.items():
                    rows.append(r)
                    cols.append(pos[e * beta])
                    vals.append(coef)
                b.append(0.0)
                tags.append(("equality", i, j, beta))
    A = sp.csr_matrix((vals, (rows, cols)), shape=(len(b), N))
    prog = ConicProgram(c, A, np.array(b), blocks, 0.0, tags,
                        {"kind": kind, "k": k, "name": problem.name})
    vmap = VariableMap(kind, k, index, tuple(infos), tuple(tags))
    return prog, vmap


def build_sparse_moment(problem: ProblemInstance, k: int) -> tuple[ConicProgram, VariableMap]:
    """Order-``k`` sparse moment relaxation.

    Blocks: the moment matrix of each clique, then the localizing matrix of
    each clique that carries a PMI block. Rows: ``y_0 = 1`` followed by
    ``L(h * x^beta) = 0`` for every equality ``h`` and admissible ``beta``.
    """
    cl = [c.vars for c in problem.pattern.cliques]
    return _assemble(problem, k, union_index(problem.pattern, k), "sparse", cl, cl)


def build_dense_moment(problem: ProblemInstance, k: int) -> tuple[ConicProgram, VariableMap]:
    """Order-``k`` dense relaxation: one moment matrix over all variables."""
    n = problem.n
    full = tuple(range(1, n + 1))
    return _assemble(problem, k, dense_index(n, k), "dense", [full] * problem.m, [full])


def recover_result(program: ConicProgram, vmap: VariableMap,
                   solution: ConicSolution) -> RelaxationResult:
    """Read the moment vector and bound out of a conic solution.

    An infeasible program gets bound ``+inf`` and an unbounded one ``-inf``;
    in both cases no moment vector is returned.
    """
    common = dict(k=vmap.k, kind=vmap.kind, program=program, vmap=vmap, solution=solution)
    if solution.status == "infeasible":
        return RelaxationResult(math.inf, None, [], np.zeros(0), "infeasible", **common)
    if solution.status == "unbounded":
        return RelaxationResult(-math.inf, None, [], np.zeros(0), "unbounded", **common)
    x = solution.primal
    if x is None or not np.all(np.isfinite(x)):
        return RelaxationResult(math.nan, None, [], np.zeros(0), solution.status, **common)
    return RelaxationResult(program.objective(x), TMS(vmap.index, x), list(solution.dual_cone),
                            solution.dual_eq, solution.status, **common)


def solve_relaxation(problem: ProblemInstance, k: int, dense: bool = False,
                     tol: float = conic.DEFAULT_TOL, backend: str = "cvxopt",
                     max_iter: int = conic.DEFAULT_MAX_ITER) -> RelaxationResult:
    build = build_dense_moment if dense else build_sparse_moment
    prog, vmap = build(problem, k)
    sol = conic.solve(prog, tol=tol, max_iter=max_iter, backend=backend)
    return recover_result(prog, vmap, sol)
