"""Standard-form semidefinite programs in linear-matrix-inequality form.

A :class:`ConicProgram` is::

    minimize    c @ x + c0
    subject to  A @ x == b
                F0_j + F_j @ x  in  S^{size_j}_+     (svec form, one per block)

with ``x`` free. Blocks are stored as symmetric vectorizations: upper
triangle, row-major, off-diagonal entries scaled by ``sqrt(2)`` so that
``svec(X) @ svec(Y) == trace(X @ Y)``.

Duals follow the Lagrangian ``c @ x - sum <Z_j, block_j(x)> - lam @ (A x - b)``:
a dual feasible pair satisfies ``c == sum F_j.T @ svec(Z_j) + A.T @ lam`` with
``Z_j`` PSD and has objective ``b @ lam - sum <F0_j, Z_j> + c0``.
"""
from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp

log = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 200


def svec_dim(size: int) -> int:
    return size * (size + 1) // 2


def svec_index(i: int, j: int, size: int) -> int:
    """Position of entry ``(i, j)`` (any order) in the svec of a ``size x size`` matrix."""
    if i > j:
        i, j = j, i
    return i * size - i * (i - 1) // 2 + (j - i)


def svec(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    iu = np.triu_indices(X.shape[0])
    v = X[iu].copy()
    v[iu[0] != iu[1]] *= SQRT2
    return v


def smat(v: np.ndarray, size: int | None = None) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if size is None:
        size = int(round((math.sqrt(8 * len(v) + 1) - 1) / 2))
    iu = np.triu_indices(size)
    X = np.zeros((size, size))
    vals = v.copy()
    vals[iu[0] != iu[1]] /= SQRT2
    X[iu] = vals
    return X + np.triu(X, 1).T


@dataclass
class PSDBlock:
    size: int
    F: sp.csr_matrix
    F0: np.ndarray
    tag: tuple = ()

    def value(self, x: np.ndarray) -> np.ndarray:
        return smat(self.F0 + self.F @ x, self.size)


@dataclass
class ConicProgram:
    c: np.ndarray
    A: sp.csr_matrix
    b: np.ndarray
    blocks: list[PSDBlock]
    c0: float = 0.0
    eq_tags: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        self.A = sp.csr_matrix(self.A, shape=(len(self.b), len(self.c)))
        n = len(self.c)
        for blk in self.blocks:
            blk.F = sp.csr_matrix(blk.F)
            blk.F0 = np.asarray(blk.F0, dtype=float)
            if blk.F.shape != (svec_dim(blk.size), n) or blk.F0.shape != (svec_dim(blk.size),):
                raise ValueError(f"block {blk.tag} has inconsistent dimensions")
        if self.eq_tags and len(self.eq_tags) != len(self.b):
            raise ValueError("eq_tags must label every equality row")

    @property
    def num_vars(self) -> int:
        return len(self.c)

    def objective(self, x) -> float:
        return float(self.c @ x + self.c0)

    def block_sizes(self) -> list[int]:
        return [blk.size for blk in self.blocks]

    def scaled(self, lam: float) -> "ConicProgram":
        return ConicProgram(self.c * lam, self.A, self.b, self.blocks, self.c0 * lam,
                            list(self.eq_tags), dict(self.meta))


@dataclass
class ConicSolution:
    primal: np.ndarray
    dual_eq: np.ndarray
    dual_cone: list[np.ndarray]
    objective_primal: float
    objective_dual: float
    status: str
    residuals: dict
    iterations: int = 0
    backend: str = ""
    ray: dict | None = None

    @property
    def ok(self) -> bool:
        return self.status in ("optimal", "inaccurate")


# ---------------------------------------------------------------- presolve


@dataclass
class _Presolved:
    program: ConicProgram
    keep_cols: np.ndarray
    fixed: list  # (col, value, row, coeff) in fixing order
    keep_rows: np.ndarray
    infeasible: bool = False


def _presolve(prog: ConicProgram) -> _Presolved:
    A = prog.A.tocsc().astype(float)
    b = prog.b.copy()
    n = prog.num_vars
    col_alive = np.ones(n, dtype=bool)
    row_alive = np.ones(len(b), dtype=bool)
    values = np.zeros(n)
    fixed = []
    Ar = prog.A.tocsr()
    changed = True
    while changed:
        changed = False
        for r in np.flatnonzero(row_alive):
            lo, hi = Ar.indptr[r], Ar.indptr[r + 1]
            cols, vals = Ar.indices[lo:hi], Ar.data[lo:hi]
            live = [(j, a) for j, a in zip(cols, vals) if col_alive[j] and a != 0.0]
            rhs = b[r] - sum(a * values[j] for j, a in zip(cols, vals) if not col_alive[j])
            if not live:
                if abs(rhs) > 1e-9 * (1 + abs(b[r])):
                    return _Presolved(prog, np.flatnonzero(col_alive), fixed,
                                      np.flatnonzero(row_alive), infeasible=True)
                row_alive[r] = False
                changed = True
            elif len(live) == 1:
                j, a = live[0]
                values[j] = rhs / a
                col_alive[j] = False
                row_alive[r] = False
                fixed.append((int(j), values[j], int(r), a))
                changed = True
    keep_cols = np.flatnonzero(col_alive)
    rows = np.flatnonzero(row_alive)
    fixed_cols = np.flatnonzero(~col_alive)
    b_red = b[rows] - (A[rows][:, fixed_cols] @ values[fixed_cols] if len(fixed_cols) else 0.0)
    A_red = A[rows][:, keep_cols]
    # linearly dependent rows
    if len(rows) and A_red.shape[1]:
        dense = A_red.toarray()
        scale = np.maximum(np.abs(dense).max(axis=1), 1e-300)
        dense = dense / scale[:, None]
        _, R, piv = scipy.linalg.qr(dense.T, mode="economic", pivoting=True)
        diag = np.abs(np.diag(R))
        rank = int(np.sum(diag > 1e-10 * max(diag[0] if len(diag) else 0.0, 1.0)))
        sel = np.sort(piv[:rank])
        if rank < len(rows):
            lhs = dense[sel]
            sol, *_ = np.linalg.lstsq(lhs, (b_red / scale)[sel], rcond=None)
            resid = dense @ sol - b_red / scale
            if np.max(np.abs(resid)) > 1e-7 * (1 + np.max(np.abs(b_red / scale))):
                return _Presolved(prog, keep_cols, fixed, rows, infeasible=True)
        rows, b_red, A_red = rows[sel], b_red[sel], A_red[sel]
    elif len(rows):
        if np.max(np.abs(b_red)) > 1e-9:
            return _Presolved(prog, keep_cols, fixed, rows, infeasible=True)
        rows = rows[:0]
        b_red = b_red[:0]
        A_red = A_red[:0]
    blocks = []
    for blk in prog.blocks:
        Fc = blk.F.tocsc()
        F0 = blk.F0 + (Fc[:, fixed_cols] @ values[fixed_cols] if len(fixed_cols) else 0.0)
        blocks.append(PSDBlock(blk.size, Fc[:, keep_cols].tocsr(), F0, blk.tag))
    c0 = prog.c0 + float(prog.c[fixed_cols] @ values[fixed_cols]) if len(fixed_cols) else prog.c0
    red = ConicProgram(prog.c[keep_cols], A_red, b_red, blocks, c0)
    return _Presolved(red, keep_cols, fixed, rows)


def _postsolve(prog: ConicProgram, pre: _Presolved, x_red, lam_red, Z) -> tuple:
    n = prog.num_vars
    x = np.zeros(n)
    x[pre.keep_cols] = x_red
    for j, v, _, _ in pre.fixed:
        x[j] = v
    lam = np.zeros(len(prog.b))
    lam[pre.keep_rows] = lam_red
    if pre.fixed:
        # c_j = (F^T Z)_j + sum_r A_rj lam_r must hold on every fixed column
        FtZ = np.zeros(n)
        for blk, Zj in zip(prog.blocks, Z):
            FtZ += blk.F.T @ svec(Zj)
        Ac = prog.A.tocsc()
        for j, _, r, a in reversed(pre.fixed):
            lo, hi = Ac.indptr[j], Ac.indptr[j + 1]
            other = sum(Ac.data[q] * lam[Ac.indices[q]]
                        for q in range(lo, hi) if Ac.indices[q] != r)
            lam[r] = (prog.c[j] - FtZ[j] - other) / a
    return x, lam


# ---------------------------------------------------------------- residuals


def _maxabs(v) -> float:
    return float(np.max(np.abs(v))) if len(v) else 0.0


def kkt_residuals(prog: ConicProgram, x, lam, Z) -> dict:
    """Relative primal/dual infeasibility and duality gap of a candidate pair."""
    bnorm = 1.0 + _maxabs(prog.b)
    cnorm = 1.0 + _maxabs(prog.c)
    peq = _maxabs(prog.A @ x - prog.b)
    pcone = 0.0
    dcone = 0.0
    grad = prog.A.T @ lam if len(prog.b) else np.zeros(prog.num_vars)
    dobj = float(prog.b @ lam) + prog.c0
    for blk, Zj in zip(prog.blocks, Z):
        S = blk.value(x)
        scale = 1.0 + np.abs(S).max()
        pcone = max(pcone, max(0.0, -np.linalg.eigvalsh(S)[0]) / scale)
        dcone = max(dcone, max(0.0, -np.linalg.eigvalsh(Zj)[0]) / (1.0 + np.abs(Zj).max()))
        zv = svec(Zj)
        grad = grad + blk.F.T @ zv
        dobj -= float(blk.F0 @ zv)
    deq = _maxabs(prog.c - grad)
    pobj = prog.objective(x)
    return {
        "primal_feasibility": max(peq / bnorm, pcone),
        "dual_feasibility": max(deq / cnorm, dcone),
        "gap": abs(pobj - dobj) / (1.0 + abs(pobj)),
        "objective_primal": pobj,
        "objective_dual": dobj,
    }


# ---------------------------------------------------------------- backends


class _BlockOperator:
    """``G`` of cvxopt's ``Gx + s = h`` with blocks kept in svec form.

    cvxopt stores each ``s x s`` block as a full column-major matrix and only
    reads its lower triangle. ``G x = -mat(F x)`` and ``G' z = -F' svec(Z)``.
    """

    def __init__(self, prog: ConicProgram):
        self.n = prog.num_vars
        self.blocks = []
        off = 0
        for blk in prog.blocks:
            s = blk.size
            iu = np.triu_indices(s)
            w = np.where(iu[0] == iu[1], 1.0, SQRT2)
            lo = off + iu[1] + iu[0] * s
            up = off + iu[0] + iu[1] * s
            F = blk.F.tocsr()
            Ft = F.T.tocsr()
            support = np.unique(F.indices)
            self.blocks.append((s, iu, w, lo, up, F, Ft, support))
            off += s * s
        self.dim = off

    def h(self, prog: ConicProgram) -> np.ndarray:
        out = np.zeros(self.dim)
        for (s, iu, w, lo, up, *_), blk in zip(self.blocks, prog.blocks):
            out[lo] = blk.F0 / w
            out[up] = blk.F0 / w
        return out

    def apply(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros(self.dim)
        for s, iu, w, lo, up, F, *_ in self.blocks:
            v = -(F @ x) / w
            out[lo] = v
            out[up] = v
        return out

    def apply_t(self, z: np.ndarray) -> np.ndarray:
        out = np.zeros(self.n)
        for s, iu, w, lo, up, F, Ft, _ in self.blocks:
            out -= Ft @ (z[lo] * w)
        return out

    def __call__(self, x, y, alpha=1.0, beta=0.0, trans="N"):
        xv = np.frombuffer(x, dtype=float)
        yv = np.frombuffer(y, dtype=float)
        r = self.apply(xv) if trans == "N" else self.apply_t(xv)
        yv *= beta
        yv += alpha * r


def _sym_from_lower(v: np.ndarray, s: int) -> np.ndarray:
    M = v.reshape((s, s), order="F")
    L = np.tril(M)
    return L + np.tril(L, -1).T


class _NormalKKT:
    """KKT solver for cvxopt's conelp via the reduced normal equations.

    With NT scaling ``W`` the Newton system reduces to
    ``H ux + A' uy = bx + G' (W'W)^{-1} bz`` and ``A ux = by`` where
    ``H = sum_j Y_j' Y_j`` and ``Y_j`` holds ``svec(rti' F_p rti)`` for the
    columns ``p`` that block ``j`` touches. ``H`` is factored by Cholesky;
    residuals are measured with the ``Y_j`` themselves, which are not
    squared, and refined. When refinement stalls (late iterations, where
    ``H`` is nearly singular) the factor is recomputed from a QR
    decomposition of the stacked ``Y_j`` instead.
    """

    refine_steps = 3
    refine_tol = 1e-12

    def __init__(self, op: _BlockOperator, A: sp.csr_matrix):
        self.op = op
        self.A = A.toarray()
        self.mats = []
        self.use_qr = False
        for s, iu, w, lo, up, F, Ft, support in op.blocks:
            sub = F[:, support].toarray().T / w
            M = np.zeros((len(support), s, s))
            M[:, iu[0], iu[1]] = sub
            M[:, iu[1], iu[0]] = sub
            self.mats.append(M)

    def _scaled_columns(self, rtis):
        Ys = []
        for (s, iu, w, *_, support), M, rti in zip(self.op.blocks, self.mats, rtis):
            k = len(support)
            if k == 0:
                Ys.append(np.zeros((0, 0)))
                continue
            T = (M.reshape(k * s, s) @ rti).reshape(k, s, s)
            Y = np.ascontiguousarray(T.transpose(0, 2, 1)).reshape(k * s, s) @ rti
            Ys.append(Y.reshape(k, s, s)[:, iu[0], iu[1]] * w)
        return Ys

    def _qr_factor(self, Ys):
        n = self.op.n
        parts = []
        for (*_, support), Y in zip(self.op.blocks, Ys):
            if len(support) == 0:
                continue
            R = scipy.linalg.qr(Y.T, mode="r", check_finite=False)[0]
            R = R[:min(R.shape)]
            P = np.zeros((R.shape[0], n))
            P[:, support] = R
            parts.append(P)
        R = scipy.linalg.qr(np.vstack(parts), mode="r", overwrite_a=True,
                            check_finite=False)[0][:n]
        if np.any(np.abs(np.diag(R)) <= 1e-300):
            raise ArithmeticError("singular KKT system")
        return R

    def __call__(self, W):
        op, n = self.op, self.op.n
        rtis = [np.array(r) for r in W["rti"]]
        Ys = self._scaled_columns(rtis)
        A = self.A
        p = A.shape[0]
        blocks = [(b[-1], Y) for b, Y in zip(op.blocks, Ys) if len(b[-1])]

        def hmul(u):
            out = np.zeros(n)
            for support, Y in blocks:
                out[support] += Y @ (Y.T @ u[support])
            return out

        def factor(use_qr):
            if use_qr:
                R = self._qr_factor(Ys)
                hsolve = lambda r: scipy.linalg.solve_triangular(
                    R, scipy.linalg.solve_triangular(R, r, trans="T", check_finite=False),
                    check_finite=False)
            else:
                H = np.zeros((n, n))
                for support, Y in blocks:
                    H[np.ix_(support, support)] += Y @ Y.T
                try:
                    cf = scipy.linalg.cho_factor(H, lower=True, check_finite=False)
                except np.linalg.LinAlgError:
                    return None
                hsolve = lambda r: scipy.linalg.cho_solve(cf, r, check_finite=False)
            if not p:
                return hsolve, None, None
            X = hsolve(A.T)
            try:
                sf = scipy.linalg.cho_factor(A @ X, lower=True, check_finite=False)
            except np.linalg.LinAlgError:
                return None
            return hsolve, X, sf

        def direct(fac, rx, ry):
            hsolve, X, sf = fac
            u = hsolve(rx)
            if not p:
                return u, np.zeros(0)
            uy = scipy.linalg.cho_solve(sf, A @ u - ry, check_finite=False)
            return u - X @ uy, uy

        def saddle(fac, rx, ry):
            u, uy = direct(fac, rx, ry)
            scale = max(np.abs(rx).max(initial=0.0), np.abs(ry).max(initial=0.0), 1e-300)
            err = math.inf
            for _ in range(self.refine_steps):
                ex = rx - hmul(u) - (A.T @ uy if p else 0.0)
                ey = ry - A @ u if p else np.zeros(0)
                err = max(np.abs(ex).max(initial=0.0), np.abs(ey).max(initial=0.0)) / scale
                if err <= self.refine_tol:
                    break
                du, duy = direct(fac, ex, ey)
                u, uy = u + du, uy + duy
            return u, uy, err

        fac = None if self.use_qr else factor(False)
        state = {"fac": fac}
        if fac is None:
            self.use_qr = True
            state["fac"] = factor(True)
            if state["fac"] is None:
                raise ArithmeticError("singular KKT system")

        def solve(x, y, z):
            xv = np.frombuffer(x, dtype=float)
            yv = np.frombuffer(y, dtype=float)
            zv = np.frombuffer(z, dtype=float)
            # everything below stays in the scaled space: forming R B R or
            # G u in the original coordinates cancels badly once W is skewed
            rhs = xv.copy()
            sbz = []
            off = 0
            for (s, iu, w, *_, support), rti, Y in zip(op.blocks, rtis, Ys):
                B = _sym_from_lower(zv[off:off + s * s], s)
                v = (rti.T @ B @ rti)[iu] * w
                sbz.append(v)
                if len(support):
                    rhs[support] -= Y @ v
                off += s * s
            ry = yv.copy()
            u, uy, err = saddle(state["fac"], rhs, ry)
            if err > 1e-9 and not self.use_qr:
                log.debug("normal equations lost accuracy (%.1e); switching to QR", err)
                self.use_qr = True
                fac = factor(True)
                if fac is not None:
                    state["fac"] = fac
                    u, uy, err = saddle(fac, rhs, ry)
            xv[:] = u
            yv[:] = uy
            off = 0
            for (s, iu, w, *_, support), v, Y in zip(op.blocks, sbz, Ys):
                if len(support):
                    v = v + Y.T @ u[support]
                M = np.zeros((s, s))
                M[iu] = -v / w
                M = M + np.triu(M, 1).T
                zv[off:off + s * s] = M.ravel(order="F")
                off += s * s

        return solve


def _solve_cvxopt(prog: ConicProgram, tol: float, max_iter: int, verbose: bool):
    import cvxopt
    from cvxopt import solvers

    op = _BlockOperator(prog)
    cv_h = cvxopt.matrix(op.h(prog))
    Ac = prog.A.tocoo()
    cv_A = cvxopt.spmatrix(Ac.data.tolist(), Ac.row.tolist(), Ac.col.tolist(), size=Ac.shape)
    cv_b = cvxopt.matrix(prog.b)
    cv_c = cvxopt.matrix(prog.c)
    dims = {"l": 0, "q": [], "s": [blk.size for blk in prog.blocks]}
    opts = {"show_progress": verbose, "maxiters": max_iter, "abstol": tol * 1e-1,
            "reltol": tol, "feastol": tol, "refinement": 1}
    kkt = _NormalKKT(op, prog.A)
    try:
        sol = solvers.conelp(cv_c, op, cv_h, dims, cv_A, cv_b, kktsolver=kkt, options=opts)
    except (ArithmeticError, ValueError) as err:
        # breakdown of the scaling update, typically on programs without
        # a strict interior
        log.info("cvxopt stopped: %s", err)
        return None, None, [], "failed", 0
    raw = sol["status"]
    z = np.array(sol["z"]).ravel() if sol["z"] is not None else None
    y = np.array(sol["y"]).ravel() if sol["y"] is not None else np.zeros(len(prog.b))
    x = np.array(sol["x"]).ravel() if sol["x"] is not None else None
    Z = []
    if z is not None:
        off = 0
        for blk in prog.blocks:
            s = blk.size
            Z.append(_sym_from_lower(z[off:off + s * s], s))
            off += s * s
    status = {"optimal": "optimal", "primal infeasible": "infeasible",
              "dual infeasible": "unbounded"}.get(raw, "inaccurate")
    lam = -y if y is not None else None
    return x, lam, Z, status, int(sol.get("iterations", 0))


def _solve_clarabel(prog: ConicProgram, tol: float, max_iter: int, verbose: bool):
    import clarabel

    n = prog.num_vars
    rows, rhs, cones = [], [], []
    if prog.A.shape[0]:
        rows.append(prog.A)
        rhs.append(prog.b)
        cones.append(clarabel.ZeroConeT(prog.A.shape[0]))
    perms = []
    for blk in prog.blocks:
        s = blk.size
        # clarabel wants the upper triangle in column-major order
        order = [svec_index(i, j, s) for j in range(s) for i in range(j + 1)]
        perms.append(np.array(order))
        rows.append(-blk.F[order])
        rhs.append(blk.F0[order])
        cones.append(clarabel.PSDTriangleConeT(s))
    Amat = sp.vstack(rows).tocsc() if rows else sp.csc_matrix((0, n))
    bvec = np.concatenate(rhs) if rhs else np.zeros(0)
    P = sp.csc_matrix((n, n))
    settings = clarabel.DefaultSettings()
    settings.verbose = verbose
    settings.max_iter = max_iter
    # clarabel measures gaps differently from kkt_residuals; aim lower
    settings.tol_gap_abs = 0.1 * tol
    settings.tol_gap_rel = 0.1 * tol
    settings.tol_feas = 0.1 * tol
    settings.tol_ktratio = 1e-7
    solver = clarabel.DefaultSolver(P, prog.c, Amat, bvec, cones, settings)
    sol = solver.solve()
    raw = str(sol.status)
    x = np.array(sol.x)
    z = np.array(sol.z)
    p = prog.A.shape[0]
    lam = -z[:p]
    Z = []
    off = p
    for blk, order in zip(prog.blocks, perms):
        d = svec_dim(blk.size)
        v = np.empty(d)
        v[order] = z[off:off + d]
        Z.append(smat(v, blk.size))
        off += d
    if raw == "Solved":
        status = "optimal"
    elif raw in ("PrimalInfeasible", "AlmostPrimalInfeasible"):
        status = "infeasible"
    elif raw in ("DualInfeasible", "AlmostDualInfeasible"):
        status = "unbounded"
    else:
        status = "inaccurate"
    return x, lam, Z, status, int(sol.iterations)


BACKENDS = {"cvxopt": _solve_cvxopt, "clarabel": _solve_clarabel}


def solve(program: ConicProgram, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
          backend: str = "cvxopt", verbose: bool = False) -> ConicSolution:
    """Solve ``program`` with a primal-dual interior-point backend.

    The objective is normalized before the call and all outputs are mapped
    back to the original program, including duals of rows removed by
    presolve. Status is ``optimal`` only when the recomputed residuals are
    within ``tol``; a backend that stops early yields ``inaccurate`` with
    its last iterate.
    """
    if not 0 < tol <= 1e-2:
        raise ValueError("tol must lie in (0, 1e-2]")
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; choose from {sorted(BACKENDS)}")
    pre = _presolve(program)
    empty_Z = [np.zeros((blk.size, blk.size)) for blk in program.blocks]
    if pre.infeasible:
        return ConicSolution(np.full(program.num_vars, np.nan), np.zeros(len(program.b)),
                             empty_Z, math.inf, math.inf, "infeasible",
                             {"reason": "inconsistent linear equalities"}, backend="presolve")
    red = pre.program
    cscale = max(1.0, float(np.abs(red.c).max())) if red.num_vars else 1.0
    scaled = ConicProgram(red.c / cscale, red.A, red.b, red.blocks, red.c0 / cscale)
    if red.num_vars == 0:
        x_red, lam_red, Z, status, iters = np.zeros(0), np.zeros(len(red.b)), \
            [np.zeros((b.size, b.size)) for b in red.blocks], "optimal", 0
    else:
        x_red, lam_red, Z, status, iters = BACKENDS[backend](scaled, tol, max_iter, verbose)
    if status in ("infeasible", "unbounded"):
        ray = {"dual_eq": lam_red, "dual_cone": Z} if status == "infeasible" else {"primal": x_red}
        obj = math.inf if status == "infeasible" else -math.inf
        x_full = np.full(program.num_vars, np.nan)
        return ConicSolution(x_full, np.zeros(len(program.b)), empty_Z, obj, obj, status,
                             {}, iters, backend, ray)
    if x_red is None:
        return ConicSolution(np.full(program.num_vars, np.nan), np.zeros(len(program.b)),
                             empty_Z, math.nan, math.nan, "failed", {}, iters, backend)
    lam_red = lam_red * cscale
    Z = [Zj * cscale for Zj in Z]
    x, lam = _postsolve(program, pre, x_red, lam_red, Z)
    res = kkt_residuals(program, x, lam, Z)
    worst = max(res["primal_feasibility"], res["dual_feasibility"], res["gap"])
    if status == "optimal" and worst > tol:
        status = "inaccurate"
    elif status == "inaccurate" and worst <= tol:
        status = "optimal"
    log.debug("conic solve: %s after %d iterations, residuals %s", status, iters, res)
    return ConicSolution(x, lam, Z, res["objective_primal"], res["objective_dual"], status,
                         res, iters, backend)


# ---------------------------------------------------------------- text format

TEXT_HEADER = "SPARSEPMI-CONIC 1"


def export_text(prog: ConicProgram) -> str:
    """Plain-text dump: objective, equality triplets, then block triplets.

    Floats use ``repr`` so parsing reproduces the program exactly.
    """
    out = io.StringIO()
    A = prog.A.tocoo()
    out.write(f"{TEXT_HEADER}\n")
    out.write(f"vars {prog.num_vars}\n")
    out.write(f"c0 {float(prog.c0)!r}\n")
    nz = np.flatnonzero(prog.c)
    out.write(f"objective {len(nz)}\n")
    for j in nz:
        out.write(f"{j} {float(prog.c[j])!r}\n")
    out.write(f"equalities {len(prog.b)} {A.nnz}\n")
    for r, v in enumerate(prog.b):
        out.write(f"b {r} {float(v)!r}\n")
    for r, j, v in zip(A.row, A.col, A.data):
        out.write(f"a {r} {j} {float(v)!r}\n")
    out.write(f"blocks {len(prog.blocks)}\n")
    for blk in prog.blocks:
        F = blk.F.tocoo()
        f0 = np.flatnonzero(blk.F0)
        out.write(f"block {blk.size} {len(f0)} {F.nnz}\n")
        for q in f0:
            out.write(f"f0 {q} {float(blk.F0[q])!r}\n")
        for q, j, v in zip(F.row, F.col, F.data):
            out.write(f"f {q} {j} {float(v)!r}\n")
    return out.getvalue()


def import_text(text: str) -> ConicProgram:
    lines = iter(line.split() for line in text.splitlines() if line.strip())
    head = next(lines)
    if " ".join(head) != TEXT_HEADER:
        raise ValueError("not a sparsepmi conic file")
    n = int(next(lines)[1])
    c0 = float(next(lines)[1])
    c = np.zeros(n)
    for _ in range(int(next(lines)[1])):
        j, v = next(lines)
        c[int(j)] = float(v)
    _, p, nnz = next(lines)
    p, nnz = int(p), int(nnz)
    b = np.zeros(p)
    for _ in range(p):
        _, r, v = next(lines)
        b[int(r)] = float(v)
    rows, cols, vals = [], [], []
    for _ in range(nnz):
        _, r, j, v = next(lines)
        rows.append(int(r)); cols.append(int(j)); vals.append(float(v))
    A = sp.csr_matrix((vals, (rows, cols)), shape=(p, n))
    blocks = []
    for _ in range(int(next(lines)[1])):
        _, size, nf0, fnz = next(lines)
        size = int(size)
        F0 = np.zeros(svec_dim(size))
        for _ in range(int(nf0)):
            _, q, v = next(lines)
            F0[int(q)] = float(v)
        fr, fc, fv = [], [], []
        for _ in range(int(fnz)):
            _, q, j, v = next(lines)
            fr.append(int(q)); fc.append(int(j)); fv.append(float(v))
        F = sp.csr_matrix((fv, (fr, fc)), shape=(svec_dim(size), n))
        blocks.append(PSDBlock(size, F, F0))
    return ConicProgram(c, A, b, blocks, c0)


def lmi_block(size: int, constant: np.ndarray, coefficients: Sequence[np.ndarray],
              tag: tuple = ()) -> PSDBlock:
    """Block ``constant + sum_j x_j * coefficients[j]`` from dense symmetric matrices."""
    F0 = svec(constant)
    cols = [svec(Cj) for Cj in coefficients]
    F = sp.csr_matrix(np.column_stack(cols)) if cols else sp.csr_matrix((svec_dim(size), 0))
    return PSDBlock(size, F, F0, tag)
