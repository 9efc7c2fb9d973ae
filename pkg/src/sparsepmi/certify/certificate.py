"""SOS certificates read from the dual of the moment relaxation.

Dual feasibility of the moment program says, coefficient by coefficient,

    f = gamma + sum_i ( <S_i, [x]_k [x]_k^T> + <W_i, G_i kron [x][x]^T> + sum_j q_ij h_ij )

where ``S_i``, ``W_i`` are the PSD dual blocks, ``gamma`` is the multiplier
of ``y_0 = 1`` and ``q_ij`` collects the multipliers of the equality rows.
Grouping the clique-``i`` terms into ``sigma_i`` gives the splitting
``f_i + p_i = sigma_i`` with ``p_i = sigma_i - f_i`` and ``sum p_i + gamma = 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..polyalg import Exponent, Polynomial, ProblemInstance, poly_eval
from ..relax import BlockInfo, RelaxationResult

PSD_SLACK = 1e-7
COEFF_TOL = 1e-6


@dataclass
class Certificate:
    """Gram data and derived polynomials of a sparse SOS certificate.

    ``gram_moment[i]`` and ``gram_pmi[i]`` (``None`` without a PMI block)
    belong to clique ``i``. Residuals are measured, never assumed zero.
    """

    gamma: float
    k: int
    gram_moment: list[np.ndarray]
    gram_pmi: list[np.ndarray | None]
    blocks: list[tuple[BlockInfo, BlockInfo | None]] = field(repr=False)
    eq_multipliers: list[list[Polynomial]] = field(repr=False)
    sigma: list[Polynomial] = field(repr=False)
    p: list[Polynomial] = field(repr=False)
    coefficient_residual: float = math.nan
    sum_residual: float = math.nan
    verified: bool = False


def gram_polynomial(S: np.ndarray, info: BlockInfo, num_vars: int) -> Polynomial:
    """``<S, G kron [x][x]^T>`` (``G = 1`` for a moment block) as a polynomial."""
    basis = info.basis
    nb = len(basis)
    acc: dict[Exponent, float] = {}
    if info.kind == "moment":
        cells = [((0, 0), Polynomial.constant(1.0, num_vars))]
    else:
        cells = list(info.matrix.upper_items())
    for (s, t), g in cells:
        blk = S[s * nb:(s + 1) * nb, t * nb:(t + 1) * nb]
        w = 1.0 if s == t else 2.0
        for a in range(nb):
            for b in range(nb):
                c = w * blk[a, b]
                if c == 0.0:
                    continue
                ab = basis[a] * basis[b]
                for e, gc in g.items():
                    key = e * ab
                    acc[key] = acc.get(key, 0.0) + c * gc
    return Polynomial(acc, num_vars)


def _coef_max(p: Polynomial) -> float:
    return max((abs(c) for _, c in p.items()), default=0.0)


def _fnorm(problem: ProblemInstance) -> float:
    return _coef_max(problem.objective)


def recover_certificate(problem: ProblemInstance, result: RelaxationResult) -> Certificate:
    """Assemble the certificate from the dual blocks of a solved relaxation."""
    if result.vmap is None or not result.dual:
        raise ValueError("relaxation result carries no dual solution")
    vmap = result.vmap
    n = problem.n
    m = problem.m
    tags = list(vmap.eq_tags)
    lam = np.asarray(result.dual_eq, dtype=float)
    gamma = float(lam[tags.index(("mass",))])

    dense = vmap.kind == "dense"
    moment_info = {b.clique: (j, b) for j, b in enumerate(vmap.blocks) if b.kind == "moment"}
    pmi_info = {b.clique: (j, b) for j, b in enumerate(vmap.blocks) if b.kind == "localizing"}

    eq_mult: list[list[Polynomial]] = [[Polynomial.zero(n) for _ in hs]
                                       for hs in problem.equalities]
    eq_terms: list[dict] = [dict() for _ in range(m)]
    for r, tag in enumerate(tags):
        if tag[0] == "equality":
            _, i, j, beta = tag
            eq_terms[i].setdefault(j, {})[beta] = lam[r]
    for i in range(m):
        for j, terms in eq_terms[i].items():
            eq_mult[i][j] = Polynomial(terms, n)

    grams_m, grams_p, infos, sigma = [], [], [], []
    for i in range(m):
        if dense and i > 0:
            S, mi = np.zeros((0, 0)), None
            sig = Polynomial.zero(n)
        else:
            jm, mi = moment_info[0 if dense else i]
            S = result.dual[jm]
            sig = gram_polynomial(S, mi, n)
        if i in pmi_info:
            jp, pi = pmi_info[i]
            W = result.dual[jp]
            sig = sig + gram_polynomial(W, pi, n)
        else:
            W, pi = None, None
        for q, h in zip(eq_mult[i], problem.equalities[i]):
            sig = sig + q * h
        grams_m.append(S)
        grams_p.append(W)
        infos.append((mi, pi))
        sigma.append(sig)

    p = [s - f for s, f in zip(sigma, problem.objectives)]
    total = Polynomial.zero(n)
    for s in sigma:
        total = total + s
    coef_res = _coef_max(problem.objective - gamma - total)
    psum = Polynomial.constant(gamma, n)
    for pi_ in p:
        psum = psum + pi_
    cert = Certificate(gamma, vmap.k, grams_m, grams_p, infos, eq_mult, sigma, p,
                       coef_res, _coef_max(psum))
    cert.verified = cert.coefficient_residual <= COEFF_TOL * (1 + _fnorm(problem)) \
        and cert.sum_residual <= COEFF_TOL
    return cert


@dataclass
class CertificateCheck:
    min_eigs: list[float]
    psd_ok: bool
    coefficient_residual: float
    coefficient_ok: bool
    sum_residual: float
    sum_ok: bool
    pointwise_residual: float
    pointwise_ok: bool

    @property
    def passed(self) -> bool:
        return self.psd_ok and self.coefficient_ok and self.sum_ok and self.pointwise_ok


def verify_certificate(cert: Certificate, problem: ProblemInstance, n_samples: int = 20,
                       seed: int = 0) -> CertificateCheck:
    """Recompute every identity of ``cert`` from its Gram blocks.

    ``sigma_i`` is rebuilt from ``S_i``, ``W_i`` and the equality
    multipliers, so edits to the Gram matrices show up in all residuals.
    """
    n = problem.n
    eigs = []
    for G in [*cert.gram_moment, *cert.gram_pmi]:
        if G is None or G.size == 0:
            continue
        scale = max(1.0, float(np.abs(G).max()))
        eigs.append(float(np.linalg.eigvalsh(0.5 * (G + G.T))[0]) / scale)
    psd_ok = all(e >= -PSD_SLACK for e in eigs)

    sigma = []
    for i, (mi, pi) in enumerate(cert.blocks):
        s = Polynomial.zero(n)
        if mi is not None:
            s = s + gram_polynomial(cert.gram_moment[i], mi, n)
        if pi is not None:
            s = s + gram_polynomial(cert.gram_pmi[i], pi, n)
        for q, h in zip(cert.eq_multipliers[i], problem.equalities[i]):
            s = s + q * h
        sigma.append(s)
    total = Polynomial.zero(n)
    for s in sigma:
        total = total + s
    fnorm = _fnorm(problem)
    resid = problem.objective - cert.gamma - total
    coef = _coef_max(resid)
    psum = Polynomial.constant(cert.gamma, n)
    for s, f in zip(sigma, problem.objectives):
        psum = psum + (s - f)
    ssum = _coef_max(psum)

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_samples):
        u = rng.uniform(-1.0, 1.0, n)
        mags = sum(abs(c) * abs(poly_eval(Polynomial({e: 1.0}, n), u))
                   for poly in (problem.objective, total) for e, c in poly.items())
        err = abs(poly_eval(resid, u)) / (1.0 + mags)
        worst = max(worst, err)
    return CertificateCheck(eigs, psd_ok, coef, coef <= COEFF_TOL * (1 + fnorm), ssum,
                            ssum <= COEFF_TOL, worst, worst <= COEFF_TOL)
