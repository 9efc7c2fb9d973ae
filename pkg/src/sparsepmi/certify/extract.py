"""Atom extraction from flat moment matrices and cross-clique assembly.

Extraction follows the classical multiplication-matrix method: factor the
moment matrix, find a monomial basis by column echelon reduction, build
one shift matrix per variable and diagonalize a random combination of
them with a real Schur decomposition.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ..moment import MomentView, index_set, moment_matrix, monomial_vector
from ..polyalg import Exponent, ProblemInstance, SparsityPattern

PIVOT_TOL = 1e-6
MATCH_TOL = 1e-4
EXTRACTION_SEED = 0


class ExtractionError(RuntimeError):
    """The moment data does not yield a clean set of atoms."""


@dataclass(frozen=True)
class AtomSet:
    clique: int
    vars: tuple[int, ...]
    t: int
    points: np.ndarray
    weights: np.ndarray
    residual: float

    def __len__(self) -> int:
        return len(self.weights)


def _column_echelon(V: np.ndarray, tol: float) -> tuple[np.ndarray, list[int]]:
    """Reduced column echelon form ``U`` of ``V`` and its pivot rows.

    ``U[pivots]`` is the identity and ``V = U @ V[pivots]``.
    """
    U = V.copy()
    rows, r = U.shape
    pivots: list[int] = []
    col = 0
    for i in range(rows):
        if col == r:
            break
        j = col + int(np.argmax(np.abs(U[i, col:])))
        if abs(U[i, j]) <= tol:
            U[i, col:] = 0.0
            continue
        U[:, [col, j]] = U[:, [j, col]]
        U[:, col] /= U[i, col]
        for jj in range(r):
            if jj != col:
                U[:, jj] -= U[i, jj] * U[:, col]
        pivots.append(i)
        col += 1
    if col < r:
        raise ExtractionError(f"found only {col} independent monomials, expected {r}")
    return U, pivots


def extract_atoms(y: MomentView, t: int, r: int, clique: int = 0,
                  seed: int = EXTRACTION_SEED) -> AtomSet:
    """Recover ``r`` atoms and weights from the order-``t`` moment matrix of ``y``."""
    if r < 1:
        raise ExtractionError("rank must be positive")
    vars = y.vars
    basis = index_set(vars, t).members
    M = moment_matrix(y, t)
    mu, Q = np.linalg.eigh(M)
    mu, Q = mu[::-1][:r], Q[:, ::-1][:, :r]
    if mu[-1] <= 0:
        raise ExtractionError(f"moment matrix has fewer than {r} positive eigenvalues")
    V = Q * np.sqrt(mu)
    U, pivots = _column_echelon(V, PIVOT_TOL * np.abs(V).max())
    pos = {e: i for i, e in enumerate(basis)}
    piv_mons = [basis[p] for p in pivots]
    shifts = []
    for v in vars:
        xv = Exponent.unit(v)
        rows = []
        for b in piv_mons:
            e = b * xv
            if e not in pos:
                raise ExtractionError(f"shifted monomial {e!r} is beyond level {t}")
            rows.append(U[pos[e]])
        shifts.append(np.array(rows))

    rng = np.random.default_rng(seed)
    coef = rng.random(len(vars))
    coef /= coef.sum()
    N = sum(c * S for c, S in zip(coef, shifts))
    T, Z = scipy.linalg.schur(N, output="real")
    if r > 1 and np.any(np.abs(np.diag(T, -1)) > 1e-8 * max(1.0, np.abs(T).max())):
        raise ExtractionError("shift matrices have complex eigenvalues")
    points = np.array([[Z[:, a] @ S @ Z[:, a] for S in shifts] for a in range(r)])

    deg = min(2 * t, y.degree)
    target = y.vector(deg)
    A = np.column_stack([monomial_vector(p, vars, deg) for p in points])
    w, *_ = np.linalg.lstsq(A, target, rcond=None)
    if np.any(w <= 0):
        raise ExtractionError(f"nonpositive atom weights {w}")
    residual = float(np.abs(A @ w - target).max())
    return AtomSet(clique, tuple(vars), t, points, w, residual)


@dataclass
class MinimizerSet:
    points: list[np.ndarray]
    bound: float = math.nan
    values: list[float] = field(default_factory=list)
    margins: list[list[float]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def _match(u: float, v: float, tol: float) -> bool:
    return abs(u - v) <= tol * (1.0 + max(abs(u), abs(v)))


def assemble_minimizers(atom_sets, pattern: SparsityPattern, match_tol: float = MATCH_TOL,
                        problem: ProblemInstance | None = None,
                        bound: float = math.nan) -> MinimizerSet:
    """All full points whose clique projections are atoms on every clique.

    Coordinates shared by several cliques must agree within ``match_tol``
    (relative); the returned coordinate is their average.
    """
    if len(atom_sets) != pattern.m:
        raise ValueError("need one atom set per clique")
    n = pattern.n
    found: list[np.ndarray] = []

    def walk(i: int, acc: dict):
        if i == len(atom_sets):
            x = np.array([np.mean(acc[v]) for v in range(1, n + 1)])
            found.append(x)
            return
        aset = atom_sets[i]
        for p in aset.points:
            if all(_match(np.mean(acc[v]), p[a], match_tol)
                   for a, v in enumerate(aset.vars) if v in acc):
                nxt = {v: list(vals) for v, vals in acc.items()}
                for a, v in enumerate(aset.vars):
                    nxt.setdefault(v, []).append(p[a])
                walk(i + 1, nxt)

    walk(0, {})
    out = MinimizerSet(found, bound)
    if problem is not None:
        out.values = [problem.evaluate(x) for x in found]
        out.margins = [problem.feasibility_margins(x) for x in found]
    return out
