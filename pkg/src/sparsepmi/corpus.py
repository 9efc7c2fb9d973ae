"""Built-in collection of worked examples with their reference values.

Each entry builds a :class:`ProblemInstance` and lists the expected
bound and minimizers; :func:`run_example` solves it and compares.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import appkit
from .certify.hierarchy import HierarchyOptions, HierarchyResult, run_hierarchy
from .polyalg import MatrixPolynomial, ProblemInstance, SparsityPattern, variables


def _mp(rows, n):
    return MatrixPolynomial.from_rows(rows, n)


def ex1_1() -> ProblemInstance:
    x1, x2, x3 = variables(3)
    G1 = _mp([[x1, x1 * x2], [x1 * x2, x2 ** 2]], 3)
    G2 = _mp([[x2 + x3, x2, 0], [x2, x2, 0], [0, 0, 1 - x2]], 3)
    pat = SparsityPattern.from_lists(3, [[1, 2], [2, 3]])
    return ProblemInstance(pat, (-x1 * x2, (x3 - x2) ** 2), (G1, G2), name="ex1_1")


def ex3_3() -> ProblemInstance:
    """Tight with an attained certificate: ``f = x1 - x3``, ``f_min = 0``."""
    x1, x2, x3 = variables(3)
    G1 = _mp([[0, x1 - x2], [x1 - x2, x2 ** 2 - x1 ** 2]], 3)
    G2 = _mp([[0, x2 - x3], [x2 - x3, x3 ** 2 - x2 ** 2]], 3)
    pat = SparsityPattern.from_lists(3, [[1, 2], [2, 3]])
    return ProblemInstance(pat, (x1, -x3), (G1, G2), name="ex3_3")


def ex3_5() -> ProblemInstance:
    """Tight bound 0 that the SOS side approaches but does not attain."""
    x1, x2, x3 = variables(3)
    xs = [x1, x2, x3]
    blocks = []
    for i in range(2):
        s = xs[i] ** 2 + xs[i + 1] ** 2
        blocks.append(_mp([[0, s], [s, s]], 3))
    pat = SparsityPattern.from_lists(3, [[1, 2], [2, 3]])
    return ProblemInstance(pat, (x1, -x3), tuple(blocks), name="ex3_5")


def ex4_4() -> ProblemInstance:
    x1, x2, x3 = variables(3)
    G1 = _mp([[1 + x1, x2 ** 2], [x2 ** 2, 1 - x1]], 3)
    G2 = _mp([[1 + x3, x2 ** 2], [x2 ** 2, 1 - x3]], 3)
    pat = SparsityPattern.from_lists(3, [[1, 2], [2, 3]])
    return ProblemInstance(pat, (-x1 - 4 * x2 ** 2, -x3), (G1, G2), name="ex4_4")


def ex5_3() -> ProblemInstance:
    xs = variables(4)
    objs, blocks = [], []
    for i in range(2):
        a, b, c = xs[i], xs[i + 1], xs[i + 2]
        objs.append(a ** 4 + 2 * b ** 4 + c ** 4 + 2 * b ** 2 * (a ** 2 + c ** 2) + a + b + c)
        blocks.append(_mp([[1 - a ** 2 - c ** 2, a * b, a * c],
                           [a * b, 1 - b ** 2 - a ** 2, b * c],
                           [a * c, b * c, 1 - c ** 2 - b ** 2]], 4))
    pat = SparsityPattern.from_lists(4, [[1, 2, 3], [2, 3, 4]])
    return ProblemInstance(pat, tuple(objs), tuple(blocks), name="ex5_3")


def ex6_1() -> ProblemInstance:
    xs = variables(4)
    x1 = xs[0]
    objs = (-xs[1] + (x1 - 0.4) ** 2, 2 * x1 * xs[2] + xs[2] ** 2, xs[3] + x1 * xs[3] - xs[3] ** 2)
    blocks = []
    for i in range(3):
        y = xs[i + 1]
        top = _mp([[2 + 3 * x1 ** 2 - y, 2 - 3 * x1], [2 - 3 * x1, 1 - x1 * (x1 + 1) - y]], 4)
        g = [(x1 - 0.4) ** 2 + (y - 0.2) ** 2 - 0.5, 1 - x1 ** 2, 1 - y ** 2]
        diag = MatrixPolynomial(3, {(j, j): g[j] for j in range(3)}, 4)
        blocks.append(MatrixPolynomial.block_diag([top, diag]))
    pat = SparsityPattern.from_lists(4, [[1, 2], [1, 3], [1, 4]])
    return ProblemInstance(pat, objs, tuple(blocks), name="ex6_1")


def ex6_2() -> ProblemInstance:
    """Second clique is taken as ``{2, 3}``, the support of ``f_2`` and ``G_2``."""
    x1, x2, x3 = variables(3)
    G1 = _mp([[1 - 4 * x1 ** 2 * x2 ** 2, x1], [x1, 4 - x1 ** 2 - x2 ** 2]], 3)
    G2 = _mp([[1 - 4 * x2 ** 2 * x3 ** 2, x3], [x3, 4 - x2 ** 2 - x3 ** 2]], 3)
    pat = SparsityPattern.from_lists(3, [[1, 2], [2, 3]])
    return ProblemInstance(pat, (-x1 ** 2 - x2 ** 2, -x2 ** 2 - x3), (G1, G2), name="ex6_2")


def ex6_3() -> ProblemInstance:
    xs = variables(4)
    x1, x2, x3, x4 = xs
    f1 = x1 ** 6 + x2 ** 6 + x3 ** 6 + x1 ** 2 * x2 ** 4 + x2 ** 2 * x3 ** 4 + x3 ** 2 * x1 ** 4
    f2 = (x2 * (x2 ** 3 - 1) + x3 * (x3 ** 3 - 1) + x4 * (x4 ** 3 - 1)
          + 2 * x2 ** 2 * x3 ** 2 + 2 * x3 ** 2 * x4 ** 2)
    blocks = []
    for i in range(2):
        a, b, c = xs[i], xs[i + 1], xs[i + 2]
        blocks.append(_mp([[2 - a ** 2 - 2 * c ** 2, 1 + a * b, a * c],
                           [1 + a * b, 2 - b ** 2 - 2 * a ** 2, 1 + b * c],
                           [a * c, 1 + b * c, 2 - c ** 2 - 2 * b ** 2]], 4))
    pat = SparsityPattern.from_lists(4, [[1, 2, 3], [2, 3, 4]])
    return ProblemInstance(pat, (f1, f2), tuple(blocks), name="ex6_3")


def _joint_polys(regular_f2: bool = True):
    xs = variables(7)
    x1, x2, x3, x4, x5, x6, x7 = xs
    f1 = x1 ** 4 + x2 ** 4 + x3 ** 3 - (2 * x1 * x2 + x3 ** 2 + x3) / 8
    f2 = x3 ** 4 + x4 ** 4 + x5 ** 4
    if regular_f2:
        f2 = f2 - x3 * x4 * x5
    f3 = x5 ** 3 + x6 ** 4 + x7 ** 4 - (x5 ** 2 + x5 - 2 * x6 * x7) / 8
    pat = SparsityPattern.from_lists(7, [[1, 2, 3], [3, 4, 5], [5, 6, 7]])
    return [f1, f2, f3], pat


def ex6_4() -> ProblemInstance:
    fs, pat = _joint_polys(True)
    inst = appkit.build_joint_minimizer(fs, pat)
    return _rename(inst, "ex6_4")


def ex6_5_plain() -> ProblemInstance:
    fs, pat = _joint_polys(False)
    return _rename(appkit.build_joint_minimizer(fs, pat), "ex6_5_plain")


def ex6_5() -> ProblemInstance:
    fs, pat = _joint_polys(False)
    return _rename(appkit.build_regularized_joint(fs, pat), "ex6_5")


def _F_shifted(c) -> MatrixPolynomial:
    z1, z2, z3 = variables(3)
    F = _mp([[z1 ** 2 + z3 ** 2, -z1 * z2, -z1 * z3],
             [-z1 * z2, z2 ** 2 + z1 ** 2, -z2 * z3],
             [-z1 * z3, -z2 * z3, z3 ** 2 + z2 ** 2]], 3)
    return MatrixPolynomial.identity(3, 3) - F.compose_shift(c)


def ex6_6() -> ProblemInstance:
    Gs = [_F_shifted(2.0 * np.eye(3)[i]) for i in range(3)]
    return _rename(appkit.build_center_point(Gs), "ex6_6")


def ex6_7() -> ProblemInstance:
    z1, z2, z3 = variables(3)
    Gs = [_mp([[z1 / 2, z1 ** 2 + 1], [z1 ** 2 + 1, z2 / 2]], 3),
          _mp([[z2 / 2, z2 ** 2 + 1], [z2 ** 2 + 1, z3 / 2]], 3),
          _mp([[z1 / 2, z3 ** 2 + 1], [z3 ** 2 + 1, z3 / 2]], 3)]
    return _rename(appkit.build_center_point(Gs), "ex6_7")


H2_DATA = {
    "A": [[[-2, 2], [2, 1]], [[1, -3], [1, -2]], [[1, -1], [3, -2]], [[0, -1], [2, -2]]],
    "B": [[[-4, 2], [-3, 2]], [[-3, -4, -1], [-2, -1, 0]], [[0, 3, -1], [1, 0, 2]],
          [[-1, -2, 1], [-1, 1, -2]]],
    "C": [[[2, -1], [0, 1]], [[2, -1], [-2, 3]], [[0, 1], [1, 0]], [[0, 1], [1, -1]]],
    "D": [[[2, -2], [2, 2], [-1, -1]], [[2, -1], [3, -1]], [[1, -3], [-1, 2], [3, 3]],
          [[2, -2], [0, 1], [-2, -2]]],
    "E": [[[1, 3], [2, 2]], [[-1, 1], [2, 0]], [[3, -1], [1, 4]], [[0, -1], [3, 0]]],
    "xi": 10.0,
}
H2_K = [[-0.3826, -1.5343], [-1.3829, -0.7662]]
H2_X = [[[1.5084, 1.2904], [1.2904, 1.1362]], [[2.0957, 1.7426], [1.7426, 2.3817]],
        [[1.4175, -0.2049], [-0.2049, 0.3140]], [[1.2119, -0.5593], [-0.5593, 1.0566]]]


def ex6_h2() -> ProblemInstance:
    d = H2_DATA
    return _rename(appkit.build_h2_synthesis(d["A"], d["B"], d["C"], d["D"], d["E"], d["xi"]),
                   "ex6_h2")


def _rename(inst: ProblemInstance, name: str) -> ProblemInstance:
    return ProblemInstance(inst.pattern, inst.objectives, inst.pmi_blocks, inst.equalities,
                           name, dict(inst.metadata))


# ---------------------------------------------------------------- expectations


@dataclass(frozen=True)
class Expected:
    """Reference data for one example.

    ``minimizers`` lists points compared on ``coords`` (all coordinates
    when ``None``); ``bound_only`` skips minimizer checks.
    """

    bound: float
    k: int
    bound_tol: float = 1e-3
    minimizers: tuple = ()
    point_tol: float = 2e-3
    coords: tuple[int, ...] | None = None
    bound_only: bool = False
    k_max: int | None = None
    note: str = ""


@dataclass(frozen=True)
class Example:
    id: str
    title: str
    build: Callable[[], ProblemInstance]
    expected: Expected


def _pm(values):
    """Cartesian product: tuple entries list alternatives, scalars are fixed."""
    out = [[]]
    for v in values:
        if isinstance(v, tuple):
            out = [p + [s] for p in out for s in v]
        else:
            out = [p + [v] for p in out]
    return tuple(tuple(p) for p in out)


_Q = 0.25


def _regularized_points() -> tuple:
    z = (0.0007, 0.0069, 0.0007)
    return tuple((a, a, 0.2260, 0.0, 0.2260, b, -b) + z for a in (-0.25, 0.25)
                 for b in (-0.25, 0.25))


def _joint_points() -> tuple:
    pts = []
    for a in (-_Q, _Q):
        for b in (-_Q, _Q):
            pts.append((a, a, _Q, _Q, _Q, b, -b))
    return tuple(pts)


_S5 = 1 / math.sqrt(5)

EXAMPLES: dict[str, Example] = {e.id: e for e in [
    Example("ex1_1", "two cliques, rank-deficient PMI", ex1_1,
            Expected(-1.0, 3, minimizers=((1.0, 1.0, 1.0),), point_tol=1e-3)),
    Example("ex3_3", "attained sparse certificate", ex3_3,
            Expected(0.0, 2, bound_only=True, note="minimizers form a line")),
    Example("ex3_5", "tight bound without attained certificate", ex3_5,
            Expected(0.0, 2, bound_only=True)),
    Example("ex4_4", "flat truncation at t=2 but not t=3", ex4_4,
            Expected(-10 / math.sqrt(5), 3,
                     minimizers=_pm([_S5, (math.sqrt(2 * _S5), -math.sqrt(2 * _S5)), _S5]),
                     point_tol=1e-3)),
    Example("ex5_3", "SOS-convex objective, SOS-concave PMI", ex5_3,
            Expected(-2.0731, 2, minimizers=((-0.5361, -0.4230, -0.4230, -0.5361),))),
    Example("ex6_1", "quadratic SDP on a star pattern", ex6_1,
            Expected(-2.8347, 2, minimizers=((0.7746, -0.3997, -0.7746, -1.0000),))),
    Example("ex6_2", "quartic PMI with four minimizers", ex6_2,
            Expected(-8.0683, 5, minimizers=_pm([(0.1172, -0.1172), (1.9922, -1.9922), 0.1172]))),
    Example("ex6_3", "SOS-convex sextic objective", ex6_3,
            Expected(-1.0342, 3, minimizers=((0.0000, 0.4421, 0.2586, 0.5207),))),
    Example("ex6_4", "joint local minimizers", ex6_4,
            Expected(-0.0703, 3, minimizers=_joint_points(), point_tol=1e-3, k_max=4)),
    Example("ex6_5", "regularized joint minimizers", ex6_5,
            Expected(0.0017, 4, bound_tol=5e-4, minimizers=_regularized_points(),
                     point_tol=5e-4)),
    Example("ex6_6", "center point of three SOS-concave sets", ex6_6,
            Expected(1.4291, 1, bound_tol=1e-2, minimizers=((0.8591,) * 3,), point_tol=1e-2,
                     coords=(10, 11, 12))),
    Example("ex6_7", "center point of pairwise intersecting sets", ex6_7,
            Expected(206.3980, 1, bound_tol=1e-2, minimizers=((6.4613,) * 3,), point_tol=1e-2,
                     coords=(10, 11, 12))),
    Example("ex6_h2", "multisystem static H2 synthesis", ex6_h2,
            Expected(81.0282, 2, bound_tol=1e-2,
                     minimizers=(tuple(np.ravel(H2_K)),), point_tol=5e-3, coords=(1, 2, 3, 4))),
]}


# ---------------------------------------------------------------- running


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}: {self.name}" + \
            (f" ({self.detail})" if self.detail else "")


@dataclass
class ExampleReport:
    id: str
    checks: list[Check]
    result: HierarchyResult | None = None
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def match_points(found, expected, tol: float, coords=None) -> tuple[bool, float]:
    """One-to-one match of ``found`` against ``expected`` within ``tol`` (max norm)."""
    exp = [np.asarray(p, dtype=float) for p in expected]
    got = [np.asarray(x, dtype=float) for x in found]
    if coords is not None:
        idx = [c - 1 for c in coords]
        got = [x[idx] for x in got]
    if len(got) != len(exp):
        return False, math.inf
    used = set()
    worst = 0.0
    for e in exp:
        best, bj = math.inf, None
        for j, g in enumerate(got):
            if j in used:
                continue
            err = float(np.abs(g - e).max())
            if err < best:
                best, bj = err, j
        if bj is None or best > tol:
            return False, best
        used.add(bj)
        worst = max(worst, best)
    return True, worst


def run_example(ex_id: str, options: HierarchyOptions | None = None) -> ExampleReport:
    if ex_id not in EXAMPLES:
        raise KeyError(f"unknown example {ex_id!r}; known: {', '.join(EXAMPLES)}")
    ex = EXAMPLES[ex_id]
    exp = ex.expected
    opts = options or HierarchyOptions()
    opts = HierarchyOptions(**{**opts.__dict__, "k_max": exp.k_max or exp.k, "k_start": exp.k})
    problem = ex.build()
    checks: list[Check] = []
    extra: dict = {}
    if ex_id == "ex6_5":
        from .relax import solve_relaxation
        plain = solve_relaxation(ex6_5_plain(), 4, tol=opts.tol, backend=opts.backend)
        checks.append(Check("unregularized relaxation infeasible at k=4", plain.infeasible,
                            plain.status))
    if exp.bound_only:
        from .relax import solve_relaxation
        res = solve_relaxation(problem, exp.k, tol=opts.tol, backend=opts.backend)
        ok = res.ok and abs(res.bound - exp.bound) <= exp.bound_tol
        checks.append(Check(f"bound {exp.bound:.4f} at k={exp.k}", ok, f"got {res.bound:.6f}"))
        return ExampleReport(ex_id, checks, None, {"relaxation": res})
    result = run_hierarchy(problem, options=opts)
    ok = result.certified and abs(result.bound - exp.bound) <= exp.bound_tol
    checks.append(Check(f"certified bound {exp.bound:.4f}", ok,
                        f"status {result.status}, bound {result.bound:.6f} at k={result.k}"))
    if exp.minimizers:
        pts = result.minimizers.points if result.minimizers else []
        good, err = match_points(pts, exp.minimizers, exp.point_tol, exp.coords)
        checks.append(Check(f"{len(exp.minimizers)} minimizer(s) matched", good,
                            f"found {len(pts)}, max error {err:.2e}"))
    return ExampleReport(ex_id, checks, result, extra)
