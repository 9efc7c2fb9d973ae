"""Command-line front end.

Exit codes: 0 certified (or check passed), 2 uncertified bound or failed
check, 3 infeasible, 1 bad input.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import conic, problemfile
from .certify import (HierarchyOptions, flat_truncation_check, recover_certificate,
                      run_hierarchy, verify_certificate)
from .certify.extract import (EXTRACTION_SEED, ExtractionError, assemble_minimizers,
                              extract_atoms)
from .certify.rank import DEFAULT_EPS
from .relax import solve_relaxation

EXIT_OK, EXIT_INPUT, EXIT_UNCERTIFIED, EXIT_INFEASIBLE = 0, 1, 2, 3


def _fmt(x) -> str:
    return "(" + ", ".join(f"{v:.6f}" for v in np.asarray(x).ravel()) + ")"


def _load(path: str):
    try:
        return problemfile.load(path)
    except OSError as err:
        raise problemfile.ProblemFileError(f"cannot read {path}: {err.strerror}") from None


def _emit(args, payload: dict, lines: list[str]) -> None:
    if getattr(args, "json", False):
        print(json.dumps(problemfile._jsonable(payload), indent=1))
    else:
        print("\n".join(lines))


# ---------------------------------------------------------------- solve


def cmd_solve(args) -> int:
    problem = _load(args.file)
    opts = HierarchyOptions(k_max=args.kmax, tol=args.tol, eps_rank=args.eps_rank,
                            dense=args.dense, backend=args.backend)
    t0 = time.perf_counter()
    res = run_hierarchy(problem, options=opts)
    wall = time.perf_counter() - t0
    lines = [f"problem {problem.name or args.file}: n={problem.n}, m={problem.m}, "
             f"k0={problem.k0}"]
    for k, b in sorted(res.bounds.items()):
        lines.append(f"  order {k}: bound {b:.8g} ({res.timings.get(k, 0.0):.2f} s)")
    for (k, t), fr in sorted(res.flat_reports.items()):
        mark = "flat" if fr.flat else "not flat"
        lines.append(f"  k={k} t={t}: ranks {fr.ranks} vs {fr.lower_ranks} {mark}")
    lines += [f"  note: {n}" for n in res.notes]
    lines.append(f"status: {res.status}")
    lines.append(f"bound: {res.bound:.8g}")
    if res.minimizers:
        lines.append(f"minimizers ({len(res.minimizers)}, k={res.k}, t={res.t}, gate {res.gate}):")
        lines += [f"  {_fmt(x)}  f={v:.8g}"
                  for x, v in zip(res.minimizers.points, res.minimizers.values)]
    lines.append(f"wall time: {wall:.2f} s")
    payload = {
        "status": res.status, "bound": res.bound, "k": res.k, "t": res.t, "gate": res.gate,
        "bounds": {str(k): b for k, b in res.bounds.items()},
        "ranks": {f"{k},{t}": {"ranks": fr.ranks, "lower": fr.lower_ranks, "flat": fr.flat}
                  for (k, t), fr in res.flat_reports.items()},
        "minimizers": [list(x) for x in res.minimizers.points] if res.minimizers else [],
        "residuals": (res.relaxation.solution.residuals
                      if res.relaxation is not None and res.relaxation.solution else {}),
        "timings": {str(k): v for k, v in res.timings.items()}, "wall": wall,
        "notes": res.notes,
    }
    _emit(args, payload, lines)
    if res.status == "certified":
        return EXIT_OK
    return EXIT_INFEASIBLE if res.status == "infeasible" else EXIT_UNCERTIFIED


# ---------------------------------------------------------------- certify


def cmd_certify(args) -> int:
    problem = _load(args.file)
    res = solve_relaxation(problem, args.k, tol=args.tol, backend=args.backend)
    if res.infeasible:
        _emit(args, {"status": "infeasible"}, [f"order {args.k} relaxation is infeasible"])
        return EXIT_INFEASIBLE
    if not res.ok:
        _emit(args, {"status": res.status}, [f"solver status {res.status}"])
        return EXIT_UNCERTIFIED
    cert = recover_certificate(problem, res)
    chk = verify_certificate(cert, problem)
    lines = [f"order {args.k}: gamma = {cert.gamma:.8g} (solver {res.status})",
             f"  Gram min eigenvalues (scaled): {min(chk.min_eigs, default=0.0):.2e}",
             f"  coefficient residual: {chk.coefficient_residual:.2e}",
             f"  sum p_i + gamma residual: {chk.sum_residual:.2e}",
             f"  pointwise residual: {chk.pointwise_residual:.2e}",
             f"certificate: {'verified' if chk.passed else 'NOT verified'}"]
    payload = {"status": "verified" if chk.passed else "unverified", "gamma": cert.gamma,
               "k": args.k, "min_eig": min(chk.min_eigs, default=0.0),
               "residuals": {"coefficient": chk.coefficient_residual,
                             "sum": chk.sum_residual, "pointwise": chk.pointwise_residual}}
    _emit(args, payload, lines)
    return EXIT_OK if chk.passed else EXIT_UNCERTIFIED


# ---------------------------------------------------------------- extract


def cmd_extract(args) -> int:
    problem = _load(args.file)
    res = solve_relaxation(problem, args.k, tol=args.tol, backend=args.backend)
    if res.infeasible:
        _emit(args, {"status": "infeasible"}, [f"order {args.k} relaxation is infeasible"])
        return EXIT_INFEASIBLE
    if res.tms is None:
        _emit(args, {"status": res.status}, [f"solver status {res.status}"])
        return EXIT_UNCERTIFIED
    flat = flat_truncation_check(res.tms, args.t, problem, args.eps_rank)
    lines = [f"order {args.k}: bound {res.bound:.8g}",
             f"t={args.t}: ranks {flat.ranks} vs {flat.lower_ranks}, "
             f"{'flat' if flat.flat else 'not flat'}"]
    payload = {"bound": res.bound, "ranks": flat.ranks, "lower": flat.lower_ranks,
               "flat": flat.flat, "atoms": [], "minimizers": []}
    try:
        sets = [extract_atoms(res.tms.view(i), args.t, flat.ranks[i], i, EXTRACTION_SEED)
                for i in range(problem.m)]
    except ExtractionError as err:
        lines.append(f"extraction failed: {err}")
        payload["status"] = "failed"
        _emit(args, payload, lines)
        return EXIT_UNCERTIFIED
    for s in sets:
        lines.append(f"clique {s.clique + 1} on x{list(s.vars)}: {len(s)} atom(s), "
                     f"residual {s.residual:.1e}")
        lines += [f"  {_fmt(p)} weight {w:.6f}" for p, w in zip(s.points, s.weights)]
        payload["atoms"].append({"clique": s.clique, "points": s.points, "weights": s.weights,
                                 "residual": s.residual})
    found = assemble_minimizers(sets, problem.pattern, problem=problem, bound=res.bound)
    pts = found.points if found else []
    lines.append(f"assembled points: {len(pts)}")
    lines += [f"  {_fmt(x)}  f={problem.evaluate(x):.8g}" for x in pts]
    payload["minimizers"] = [list(x) for x in pts]
    payload["status"] = "extracted" if pts else "failed"
    _emit(args, payload, lines)
    return EXIT_OK if pts else EXIT_UNCERTIFIED


# ---------------------------------------------------------------- generate


def cmd_generate(args) -> int:
    from .appkit import RandomSpec, gen_random
    try:
        spec = RandomSpec(args.omega, args.ell, args.m, args.seed, args.family)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    problem = gen_random(spec)
    text = problemfile.dumps(problem)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out} (n={problem.n}, m={problem.m})")
    return EXIT_OK


# ---------------------------------------------------------------- examples


def _run_one(ex_id: str, tol: float, backend: str):
    from .corpus import run_example
    rep = run_example(ex_id, HierarchyOptions(tol=tol, backend=backend))
    return ex_id, [c.line() for c in rep.checks], rep.passed


def cmd_examples(args) -> int:
    from .corpus import EXAMPLES
    if args.action == "list":
        for ex in EXAMPLES.values():
            print(f"{ex.id:8s} {ex.title} (expected bound {ex.expected.bound:g}, "
                  f"k={ex.expected.k})")
        return EXIT_OK
    ids = list(EXAMPLES) if args.ids == ["all"] else args.ids
    unknown = [i for i in ids if i not in EXAMPLES]
    if unknown or not ids:
        print(f"error: unknown example id(s) {unknown}; see 'examples list'", file=sys.stderr)
        return EXIT_INPUT
    if args.action == "export":
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for i in ids:
            problemfile.save(EXAMPLES[i].build(), out / f"{i}.json")
            print(f"wrote {out / (i + '.json')}")
        return EXIT_OK
    if args.jobs > 1 and len(ids) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            runs = list(pool.map(_run_one, ids, [args.tol] * len(ids),
                                 [args.backend] * len(ids)))
    else:
        runs = [_run_one(i, args.tol, args.backend) for i in ids]
    ok = True
    for ex_id, lines, passed in runs:
        print(f"[{ex_id}]")
        for line in lines:
            print(f"  {line}")
        ok &= passed
    return EXIT_OK if ok else EXIT_UNCERTIFIED


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sparsepmi",
                                description="Sparse moment hierarchy for PMI-constrained "
                                            "polynomial optimization.")
    p.add_argument("-v", "--verbose", action="store_true", help="log solver progress")
    sub = p.add_subparsers(dest="command", required=True)

    def solver_flags(q):
        q.add_argument("--tol", type=float, default=conic.DEFAULT_TOL)
        q.add_argument("--backend", choices=sorted(conic.BACKENDS), default="cvxopt")
        q.add_argument("--json", action="store_true", help="machine-readable report")

    q = sub.add_parser("solve", help="run the hierarchy until minimizers are certified")
    q.add_argument("file")
    q.add_argument("--kmax", type=int, default=6)
    q.add_argument("--eps-rank", type=float, default=DEFAULT_EPS)
    q.add_argument("--dense", action="store_true", help="use the dense relaxation")
    solver_flags(q)
    q.set_defaults(func=cmd_solve)

    q = sub.add_parser("certify", help="recover and verify the SOS certificate at order k")
    q.add_argument("file")
    q.add_argument("--k", type=int, required=True)
    solver_flags(q)
    q.set_defaults(func=cmd_certify)

    q = sub.add_parser("extract", help="solve order k and extract atoms at level t")
    q.add_argument("file")
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--t", type=int, required=True)
    q.add_argument("--eps-rank", type=float, default=DEFAULT_EPS)
    solver_flags(q)
    q.set_defaults(func=cmd_extract)

    q = sub.add_parser("generate", help="write a random instance")
    q.add_argument("--family", default="sos-convex")
    q.add_argument("--omega", type=int, required=True)
    q.add_argument("--ell", type=int, required=True)
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", default=None, help="output file (stdout when omitted)")
    q.set_defaults(func=cmd_generate)

    q = sub.add_parser("examples", help="list, run or export the embedded examples")
    q.add_argument("action", choices=["list", "run", "export"])
    q.add_argument("ids", nargs="*", default=["all"], help="example ids or 'all'")
    q.add_argument("--out", default=".", help="directory for export")
    q.add_argument("--jobs", type=int, default=1)
    q.add_argument("--tol", type=float, default=conic.DEFAULT_TOL)
    q.add_argument("--backend", choices=sorted(conic.BACKENDS), default="cvxopt")
    q.set_defaults(func=cmd_examples)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except problemfile.ProblemFileError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
