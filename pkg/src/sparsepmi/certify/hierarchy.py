"""Driver for the sparse moment hierarchy with flat-truncation stopping."""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field


from .. import conic
from ..polyalg import ProblemInstance
from ..relax import RelaxationResult, solve_relaxation
from .extract import (EXTRACTION_SEED, MATCH_TOL, ExtractionError, MinimizerSet,
                      assemble_minimizers, extract_atoms)
from .rank import DEFAULT_EPS, FlatReport, flat_shift, flat_truncation_check

log = logging.getLogger(__name__)


@dataclass
class HierarchyOptions:
    """Tolerances of the hierarchy loop.

    ``bound_tol`` gates ``f_t == f_k`` (relative to ``1 + |f_k|``);
    ``accept_tol`` and ``feas_tol`` validate extracted points.
    ``weak_flat`` allows a last pass at each order with the rank drop
    taken as 1 instead of ``d_i``; points found that way are only kept
    after the same explicit validation.
    """

    k_max: int = 6
    eps_rank: float = DEFAULT_EPS
    tol: float = conic.DEFAULT_TOL
    backend: str = "cvxopt"
    bound_tol: float = 1e-5
    accept_tol: float = 1e-3
    feas_tol: float = 1e-3
    match_tol: float = MATCH_TOL
    dense: bool = False
    seed: int = EXTRACTION_SEED
    k_start: int | None = None
    weak_flat: bool = True


@dataclass
class HierarchyResult:
    """Outcome of :func:`run_hierarchy`.

    ``status`` is ``certified`` (minimizers extracted and validated),
    ``uncertified`` (``k_max`` reached; ``bound`` is still a valid lower
    bound) or ``infeasible`` (some relaxation was infeasible, hence so is
    the problem). ``gate`` names the test that accepted the minimizers:
    ``"bound"`` when ``f_t == f_k``, ``"attained"`` when only
    ``f(x*) == f_k`` was verified.
    """

    status: str
    bound: float
    k: int | None
    t: int | None = None
    minimizers: MinimizerSet | None = None
    bounds: dict[int, float] = field(default_factory=dict)
    flat_reports: dict[tuple[int, int], FlatReport] = field(default_factory=dict)
    relaxation: RelaxationResult | None = field(default=None, repr=False)
    gate: str | None = None
    timings: dict[int, float] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.status == "certified"


def _validate(problem: ProblemInstance, points, bound: float, opts: HierarchyOptions):
    keep = []
    for x in points:
        margin = min(problem.feasibility_margins(x), default=math.inf)
        eq = max(problem.equality_residuals(x), default=0.0)
        gap = abs(problem.evaluate(x) - bound)
        if margin >= -opts.feas_tol and eq <= opts.feas_tol \
                and gap <= opts.accept_tol * (1 + abs(bound)):
            keep.append(x)
    return keep


def try_extract(problem: ProblemInstance, res: RelaxationResult, t: int,
                flat: FlatReport, opts: HierarchyOptions) -> MinimizerSet | None:
    """Extract atoms at level ``t`` on each clique and assemble full points."""
    try:
        sets = [extract_atoms(res.tms.view(i), t, flat.ranks[i], i, opts.seed)
                for i in range(problem.m)]
    except ExtractionError as err:
        log.info("extraction at k=%d, t=%d failed: %s", res.k, t, err)
        return None
    return assemble_minimizers(sets, problem.pattern, opts.match_tol, problem, res.bound)


def _extract_valid(problem, res, t, flat, opts) -> MinimizerSet | None:
    found = try_extract(problem, res, t, flat, opts)
    if found is None:
        return None
    kept = _validate(problem, found.points, res.bound, opts)
    if not kept:
        return None
    return MinimizerSet(kept, res.bound, [problem.evaluate(x) for x in kept],
                        [problem.feasibility_margins(x) for x in kept])


def run_hierarchy(problem: ProblemInstance, k_max: int | None = None,
                  options: HierarchyOptions | None = None) -> HierarchyResult:
    """Solve relaxations of increasing order until minimizers are certified.

    For each ``k`` the loop scans ``t = d, ..., k`` with ``d = max d_i``.
    At a flat level the atoms are extracted, assembled across cliques and
    kept if feasible with ``f(x*)`` matching ``f_k``. They are accepted when
    ``f_t == f_k`` (lower-order values are solved once and cached) or, if
    that gate cannot be met, when the kept points attain ``f_k``: as
    ``f_k <= f_min <= f(x*)`` this also proves global optimality. The
    same reasoning covers the optional ``weak_flat`` pass.
    """
    opts = options or HierarchyOptions()
    k_max = opts.k_max if k_max is None else k_max
    k0 = problem.k0
    kstart = max(k0, opts.k_start or k0)
    out = HierarchyResult("uncertified", -math.inf, None)
    cache: dict[int, RelaxationResult] = {}

    def relax(k: int) -> RelaxationResult:
        if k not in cache:
            t0 = time.perf_counter()
            cache[k] = solve_relaxation(problem, k, dense=opts.dense, tol=opts.tol,
                                        backend=opts.backend)
            out.timings[k] = time.perf_counter() - t0
            out.bounds[k] = cache[k].bound
        return cache[k]

    d = max(flat_shift(problem, i) for i in range(problem.m))
    for k in range(kstart, k_max + 1):
        res = relax(k)
        out.relaxation, out.k = res, k
        if res.infeasible:
            out.status, out.bound = "infeasible", math.inf
            out.notes.append(f"relaxation of order {k} is infeasible")
            return out
        if res.tms is None:
            out.notes.append(f"order {k}: solver returned {res.status}")
            continue
        out.bound = res.bound
        if res.status != "optimal":
            out.notes.append(f"order {k}: solver status {res.status}")
        fallback = None
        for t in range(d, k + 1):
            flat = flat_truncation_check(res.tms, t, problem, opts.eps_rank)
            out.flat_reports[k, t] = flat
            if not flat.flat:
                continue
            found = _extract_valid(problem, res, t, flat, opts)
            if found is None:
                continue
            if t >= k0 and t < k:
                ft = relax(t).bound
                same = abs(ft - res.bound) <= opts.bound_tol * (1 + abs(res.bound))
            else:
                same = t == k
            if same:
                out.status, out.t, out.minimizers, out.gate = "certified", t, found, "bound"
                return out
            if fallback is None:
                fallback = (t, found)
        if fallback is None and opts.weak_flat and d > 1:
            for t in range(1, k + 1):
                flat = flat_truncation_check(res.tms, t, problem, opts.eps_rank, shift=1)
                if not flat.flat:
                    continue
                found = _extract_valid(problem, res, t, flat, opts)
                if found is not None:
                    fallback = (t, found)
                    out.notes.append(f"order {k}: rank M_{t} = rank M_{t - 1} "
                                     "(flat extension), points validated directly")
                    break
        if fallback is not None:
            t, found = fallback
            out.status, out.t, out.minimizers, out.gate = "certified", t, found, "attained"
            return out
    out.notes.append(f"no certificate up to order {k_max}")
    return out
