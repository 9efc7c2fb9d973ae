"""Builders that turn applications into :class:`ProblemInstance` values.

Covers joint local minimizers (plain and regularized), center points of
PMI-defined sets, multisystem static H2 controller synthesis, and two
families of random quadratic PMI problems.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .polyalg import (Clique, MatrixPolynomial, Polynomial, ProblemInstance, SparsityPattern,
                      gradient, hessian, restrict_support, variables)


def _joint_block(f: Polynomial, vars, corner, shift) -> MatrixPolynomial:
    """``[[corner, grad^T], [grad, shift * I + hess]]`` over ``vars``."""
    n = f.num_vars
    g = gradient(f, vars)
    H = hessian(f, vars)
    size = len(vars) + 1
    entries = {(0, 0): corner}
    for a, ga in enumerate(g):
        entries[0, a + 1] = ga
        for b in range(a, len(vars)):
            h = H[a, b]
            entries[a + 1, b + 1] = h + shift if a == b else h
    return MatrixPolynomial(size, entries, n)


def build_joint_minimizer(f_list: Sequence[Polynomial],
                          pattern: SparsityPattern) -> ProblemInstance:
    """Minimize ``sum f_i`` subject to ``[[0, grad f_i^T], [grad f_i, hess f_i]] >= 0``.

    The PMI forces each gradient to vanish and each Hessian to be PSD, so
    feasible points are candidate joint local minimizers.
    """
    if len(f_list) != pattern.m:
        raise ValueError("need one polynomial per clique")
    n = pattern.n
    blocks = []
    for f, c in zip(f_list, pattern.cliques):
        restrict_support(f, c)
        blocks.append(_joint_block(f, c.vars, Polynomial.zero(n), 0.0))
    return ProblemInstance(pattern, tuple(f_list), tuple(blocks), name="joint-minimizer")


def build_regularized_joint(f_list: Sequence[Polynomial],
                            pattern: SparsityPattern) -> ProblemInstance:
    """Joint-minimizer problem relaxed by one slack ``z_i`` per clique.

    Variables are ``(x_1..x_n, z_1..z_m)``; clique ``i`` becomes
    ``Delta_i + {z_i}``, the objective is ``sum z_i`` and the PMI reads
    ``[[z_i, grad f_i^T], [grad f_i, z_i I + hess f_i]] >= 0``.
    """
    if len(f_list) != pattern.m:
        raise ValueError("need one polynomial per clique")
    n, m = pattern.n, pattern.m
    N = n + m
    cliques, objs, blocks = [], [], []
    for i, (f, c) in enumerate(zip(f_list, pattern.cliques)):
        restrict_support(f, c)
        z = Polynomial.variable(n + i + 1, N)
        fl = f.lift(N)
        cliques.append(Clique(i, c.vars + (n + i + 1,)))
        objs.append(z)
        blocks.append(_joint_block(fl, c.vars, z, z))
    pat = SparsityPattern(N, tuple(cliques))
    return ProblemInstance(pat, tuple(objs), tuple(blocks), name="regularized-joint",
                           metadata={"num_x": n, "slack_vars": list(range(n + 1, N + 1))})


def build_center_point(G_list: Sequence[MatrixPolynomial]) -> ProblemInstance:
    """Point ``v`` minimizing the sum of squared distances to ``{z : G_i(z) >= 0}``.

    Variables are ``(z^(1), ..., z^(m), v)`` with every block in ``R^p``;
    clique ``i`` holds ``z^(i)`` and ``v``.
    """
    if not G_list:
        raise ValueError("need at least one set")
    p = G_list[0].num_vars
    if any(G.num_vars != p for G in G_list):
        raise ValueError("all matrix polynomials must live in the same space")
    m = len(G_list)
    N = (m + 1) * p
    xs = variables(N)
    vvars = tuple(range(m * p + 1, N + 1))
    cliques, objs, blocks = [], [], []
    for i, G in enumerate(G_list):
        zvars = tuple(range(i * p + 1, (i + 1) * p + 1))
        cliques.append(Clique(i, zvars + vvars))
        f = Polynomial.zero(N)
        for a, b in zip(zvars, vvars):
            f = f + (xs[a - 1] - xs[b - 1]) ** 2
        objs.append(f)
        blocks.append(G.remap({j + 1: zvars[j] for j in range(p)}, N))
    pat = SparsityPattern(N, tuple(cliques))
    return ProblemInstance(pat, tuple(objs), tuple(blocks), name="center-point",
                           metadata={"dim": p, "center_vars": list(vvars)})


def _upper_pairs(a: int) -> list[tuple[int, int]]:
    return [(s, t) for s in range(a) for t in range(s, a)]


def build_h2_synthesis(A, B, C, D, E, xi: float) -> ProblemInstance:
    """Multisystem static H2 synthesis as a sparse PMI problem.

    Variables are ``z_0 = vec(K)`` (row-major, ``K`` is ``p x q``) followed
    by the upper triangle of each Lyapunov matrix ``X_i`` (row-major).
    Clique ``i`` is ``z_0`` plus ``z_i``. The Lyapunov equations enter as
    equality polynomials; the norm cap ``xi I - K K^T >= 0`` is attached to
    the first clique only.
    """
    A = [np.atleast_2d(np.asarray(a, dtype=float)) for a in A]
    B = [np.atleast_2d(np.asarray(b, dtype=float)) for b in B]
    C = [np.atleast_2d(np.asarray(c, dtype=float)) for c in C]
    D = [np.atleast_2d(np.asarray(d, dtype=float)) for d in D]
    E = [np.atleast_2d(np.asarray(e, dtype=float)) for e in E]
    m = len(A)
    if not (len(B) == len(C) == len(D) == len(E) == m) or m == 0:
        raise ValueError("need the same positive number of A, B, C, D, E matrices")
    p, q = C[0].shape[1], E[0].shape[0]
    for i in range(m):
        a = A[i].shape[0]
        if A[i].shape != (a, a) or B[i].shape[0] != a or C[i].shape != (a, p) \
                or D[i].shape[1] != a or E[i].shape != (q, a):
            raise ValueError(f"system {i + 1} has inconsistent dimensions")
    sizes = [A[i].shape[0] for i in range(m)]
    N = p * q + sum(a * (a + 1) // 2 for a in sizes)
    xs = variables(N)
    zero = Polynomial.zero(N)
    K = [[xs[j * q + k] for k in range(q)] for j in range(p)]
    k_vars = tuple(range(1, p * q + 1))

    cliques, objs, blocks, eqs = [], [], [], []
    off = p * q
    for i in range(m):
        a = sizes[i]
        pairs = _upper_pairs(a)
        xv = {st: off + r + 1 for r, st in enumerate(pairs)}
        X = [[xs[xv[min(s, t), max(s, t)] - 1] for t in range(a)] for s in range(a)]
        # closed loop A + C K E
        CK = [[sum((K[j][k] * C[i][s, j] for j in range(p)), zero) for k in range(q)]
              for s in range(a)]
        Acl = [[sum((CK[s][k] * E[i][k, t] for k in range(q)), zero) + A[i][s, t]
                for t in range(a)] for s in range(a)]
        BB = B[i] @ B[i].T
        lyap = []
        for s, t in pairs:
            e = sum((Acl[s][r] * X[r][t] + X[s][r] * Acl[t][r] for r in range(a)), zero)
            lyap.append(e + BB[s, t])
        DD = D[i].T @ D[i]
        f = sum((X[s][t] * DD[s, t] for s in range(a) for t in range(a)), zero)
        Xi = MatrixPolynomial.from_rows(X, N)
        if i == 0:
            KK = [[sum((K[s][k] * K[t][k] for k in range(q)), zero) * -1.0
                   + (xi if s == t else 0.0) for t in range(p)] for s in range(p)]
            Xi = MatrixPolynomial.block_diag([Xi, MatrixPolynomial.from_rows(KK, N)])
        cliques.append(Clique(i, k_vars + tuple(xv[st] for st in pairs)))
        objs.append(f)
        blocks.append(Xi)
        eqs.append(tuple(lyap))
        off += len(pairs)
    pat = SparsityPattern(N, tuple(cliques))
    meta = {"p": p, "q": q, "sizes": sizes, "xi": float(xi)}
    return ProblemInstance(pat, tuple(objs), tuple(blocks), tuple(eqs), name="h2-synthesis",
                           metadata=meta)


def h2_unpack(x, meta: dict) -> tuple[np.ndarray, list[np.ndarray]]:
    """Split a point of an H2 instance into ``K`` and the ``X_i``."""
    x = np.asarray(x, dtype=float)
    p, q = meta["p"], meta["q"]
    K = x[:p * q].reshape(p, q)
    Xs, off = [], p * q
    for a in meta["sizes"]:
        X = np.zeros((a, a))
        for s, t in _upper_pairs(a):
            X[s, t] = X[t, s] = x[off]
            off += 1
        Xs.append(X)
    return K, Xs


# ---------------------------------------------------------------- random families

FAMILIES = ("sos-convex", "nonconvex")


@dataclass(frozen=True)
class RandomSpec:
    """Parameters of a random quadratic PMI instance.

    Cliques are windows of ``omega`` consecutive variables overlapping in
    one variable, so ``n = (omega - 1) * m + 1``.
    """

    omega: int
    ell: int
    m: int
    seed: int = 0
    family: str = "sos-convex"

    def __post_init__(self):
        if self.omega < 2 or self.ell < 1 or self.m < 1:
            raise ValueError("need omega >= 2, ell >= 1, m >= 1")
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")

    @property
    def n(self) -> int:
        return (self.omega - 1) * self.m + 1


def random_cliques(omega: int, m: int) -> list[tuple[int, ...]]:
    return [tuple(range((omega - 1) * i + 1, (omega - 1) * i + omega + 1)) for i in range(m)]


def gen_random(spec: RandomSpec) -> ProblemInstance:
    """Draw an instance of the random quadratic PMI family.

    ``f_i = (x^[2])^T D x^[2] + x^T Q x + p^T x`` on each window and
    ``G_i = C + sum_s B_s x_s - (x kron I)^T A (x kron I)``. The generator
    is Philox seeded with ``spec.seed``, so draws do not depend on the
    platform; per clique the draw order is D, Q, p, C, A, then B_s.
    """
    rng = np.random.Generator(np.random.Philox(spec.seed))
    w, ell, n = spec.omega, spec.ell, spec.n
    xs = variables(n)
    zero = Polynomial.zero(n)
    cl = random_cliques(w, spec.m)
    objs, blocks = [], []
    for vars in cl:
        if spec.family == "sos-convex":
            Dh = rng.random((w, w))
            Dm = Dh.T @ Dh
        else:
            Dh = rng.standard_normal((w, w))
            Dm = Dh + Dh.T
        Qh = rng.standard_normal((w, w))
        Q = Qh.T @ Qh
        p = rng.standard_normal(w)
        Ch = rng.standard_normal((ell, ell))
        Cm = Ch.T @ Ch
        Ah = rng.standard_normal((ell * w, ell * w))
        Am = Ah.T @ Ah
        Bs = []
        for _ in range(w):
            Bh = rng.standard_normal((ell, ell))
            Bs.append(Bh + Bh.T)
        x = [xs[v - 1] for v in vars]
        sq = [xv * xv for xv in x]
        f = sum((sq[a] * sq[b] * Dm[a, b] for a in range(w) for b in range(w)), zero)
        f = f + sum((x[a] * x[b] * Q[a, b] for a in range(w) for b in range(w)), zero)
        f = f + sum((x[a] * p[a] for a in range(w)), zero)
        entries = {}
        for s in range(ell):
            for t in range(s, ell):
                g = zero + Cm[s, t]
                g = g + sum((x[a] * Bs[a][s, t] for a in range(w)), zero)
                g = g - sum((x[a] * x[b] * Am[a * ell + s, b * ell + t]
                             for a in range(w) for b in range(w)), zero)
                entries[s, t] = g
        objs.append(f)
        blocks.append(MatrixPolynomial(ell, entries, n))
    pat = SparsityPattern.from_lists(n, cl)
    return ProblemInstance(pat, tuple(objs), tuple(blocks),
                           name=f"random-{spec.family}-w{w}-l{ell}-m{spec.m}-s{spec.seed}",
                           metadata={"omega": w, "ell": ell, "m": spec.m, "seed": spec.seed,
                                     "family": spec.family})
