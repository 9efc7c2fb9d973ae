"""Numerical rank of moment matrices and the flat truncation test."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..moment import TMS, moment_matrix
from ..polyalg import ProblemInstance

DEFAULT_EPS = 1e-3


@dataclass(frozen=True)
class RankReport:
    clique: int
    t: int
    eigenvalues: np.ndarray = field(repr=False)
    rank: int
    gap: float
    eps: float


def evaluate_rank(M, eps: float = DEFAULT_EPS) -> tuple[int, np.ndarray, float]:
    """Rank by the largest relative eigenvalue drop.

    With eigenvalues ``mu_1 >= mu_2 >= ...`` clamped at zero, the rank is
    the smallest ``r`` with ``mu_{r+1} < eps * mu_r``; when no such drop
    exists it is the number of positive eigenvalues. Returns
    ``(rank, eigenvalues, mu_{r+1} / mu_r)`` with gap 0 when ``r`` is full.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    M = np.asarray(M, dtype=float)
    mu = np.linalg.eigvalsh(0.5 * (M + M.T))[::-1]
    mu = np.maximum(mu, 0.0)
    for r in range(1, len(mu)):
        if mu[r - 1] > 0 and mu[r] < eps * mu[r - 1]:
            return r, mu, float(mu[r] / mu[r - 1])
    r = int(np.count_nonzero(mu > 0))
    gap = float(mu[r] / mu[r - 1]) if 0 < r < len(mu) else 0.0
    return r, mu, gap


@dataclass(frozen=True)
class FlatReport:
    t: int
    ranks: tuple[int, ...]
    lower_ranks: tuple[int, ...]
    holds: tuple[bool, ...]
    reports: tuple[RankReport, ...] = field(repr=False)

    @property
    def flat(self) -> bool:
        return all(self.holds)


def flat_shift(problem: ProblemInstance, i: int) -> int:
    """Degree drop used for clique ``i``: ``d_i``, but at least 1.

    With ``d_i = 0`` the rank comparison would be vacuous.
    """
    return max(problem.d[i], 1)


def flat_truncation_check(y: TMS, t: int, problem: ProblemInstance,
                          eps: float = DEFAULT_EPS, shift: int | None = None) -> FlatReport:
    """Compare ``rank M^(t)`` with ``rank M^(t - d_i)`` on every clique.

    ``shift`` replaces ``d_i`` on all cliques; ``shift=1`` is the plain flat
    extension test, which is enough for extraction but, unlike the
    ``d_i`` version, says nothing about feasibility of the atoms.
    """
    k = y.index.k
    if t > k:
        raise ValueError(f"level t={t} exceeds the relaxation order k={k}")
    ranks, lower, holds, reports = [], [], [], []
    for i in range(problem.m):
        s = flat_shift(problem, i) if shift is None else shift
        if t - s < 0:
            raise ValueError(f"level t={t} is below the shift {s} of clique {i}")
        view = y.view(i)
        r, mu, gap = evaluate_rank(moment_matrix(view, t), eps)
        rl, _, _ = evaluate_rank(moment_matrix(view, t - s), eps)
        ranks.append(r)
        lower.append(rl)
        holds.append(r == rl)
        reports.append(RankReport(i, t, mu, r, gap, eps))
    return FlatReport(t, tuple(ranks), tuple(lower), tuple(holds), tuple(reports))
