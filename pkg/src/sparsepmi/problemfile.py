"""JSON problem files with bit-exact coefficients.

Layout (version 1)::

    {"format": "sparsepmi-problem", "version": 1, "name": "...", "n": 3,
     "cliques": [{"vars": [1, 2],
                  "objective": [TERM, ...],
                  "pmi": [[CELL(0,0), CELL(0,1)], [CELL(1,1)]] or null,
                  "equalities": [[TERM, ...], ...]}],
     "metadata": {...}}

A term is ``{"exponents": {"1": 2}, "coeff": "0x1.8p+0", "value": 1.5}``;
``coeff`` is a hex float and ``value`` a decimal mirror that is ignored on
parse. Variable indices and clique ``vars`` are 1-based. ``pmi`` row ``s``
holds the upper-triangle cells ``(s, s), (s, s+1), ...``, each a term list.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .polyalg import (Clique, Exponent, MatrixPolynomial, Polynomial, ProblemInstance,
                      SparsityPattern)

FORMAT = "sparsepmi-problem"
VERSION = 1


class ProblemFileError(ValueError):
    """Malformed problem file. ``offset`` is a byte offset when known."""

    def __init__(self, message: str, offset: int | None = None, path: str = ""):
        self.offset = offset
        self.path = path
        where = f"byte {offset}" if offset is not None else (path or "document")
        super().__init__(f"{where}: {message}")


# ---------------------------------------------------------------- writing


def _terms(p: Polynomial) -> list[dict]:
    out = []
    for e, c in sorted(p.items(), key=lambda ec: (ec[0].degree, tuple(ec[0]))):
        out.append({"exponents": {str(v): k for v, k in e}, "coeff": float(c).hex(),
                    "value": float(c)})
    return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def to_dict(problem: ProblemInstance) -> dict:
    cliques = []
    for i, c in enumerate(problem.pattern.cliques):
        G = problem.pmi_blocks[i]
        pmi = None
        if G is not None:
            pmi = [[_terms(G[s, t]) for t in range(s, G.size)] for s in range(G.size)]
        cliques.append({"vars": list(c.vars), "objective": _terms(problem.objectives[i]),
                        "pmi": pmi, "equalities": [_terms(h) for h in problem.equalities[i]]})
    return {"format": FORMAT, "version": VERSION, "name": problem.name, "n": problem.n,
            "cliques": cliques, "metadata": _jsonable(problem.metadata)}


def dumps(problem: ProblemInstance) -> str:
    return json.dumps(to_dict(problem), indent=1) + "\n"


def save(problem: ProblemInstance, path) -> None:
    Path(path).write_text(dumps(problem), encoding="utf-8")


# ---------------------------------------------------------------- reading


def _need(obj, key, kind, path):
    if not isinstance(obj, dict) or key not in obj:
        raise ProblemFileError(f"missing field {key!r}", path=path)
    val = obj[key]
    if kind is not None and not isinstance(val, kind) or isinstance(val, bool) and kind is int:
        raise ProblemFileError(f"field {key!r} has the wrong type", path=f"{path}.{key}")
    return val


def _coeff(term, path) -> float:
    raw = _need(term, "coeff", (str, int, float), path)
    if isinstance(raw, str):
        try:
            return float.fromhex(raw)
        except ValueError:
            raise ProblemFileError(f"bad hex float {raw!r}", path=f"{path}.coeff") from None
    return float(raw)


def _poly(terms, n: int, path: str) -> Polynomial:
    if not isinstance(terms, list):
        raise ProblemFileError("expected a list of terms", path=path)
    acc = []
    for j, term in enumerate(terms):
        tp = f"{path}[{j}]"
        ex = _need(term, "exponents", dict, tp)
        try:
            e = Exponent({int(v): int(k) for v, k in ex.items()})
        except (TypeError, ValueError) as err:
            raise ProblemFileError(f"bad exponent: {err}", path=f"{tp}.exponents") from None
        if e and e[-1][0] > n:
            raise ProblemFileError(f"variable x{e[-1][0]} exceeds n={n}", path=tp)
        acc.append((e, _coeff(term, tp)))
    return Polynomial(acc, n)


def from_dict(doc) -> ProblemInstance:
    if not isinstance(doc, dict):
        raise ProblemFileError("top level must be an object")
    if doc.get("format") != FORMAT:
        raise ProblemFileError(f"format tag must be {FORMAT!r}", path="format")
    version = _need(doc, "version", int, "$")
    if version != VERSION:
        raise ProblemFileError(f"unsupported version {version}", path="version")
    n = _need(doc, "n", int, "$")
    raw = _need(doc, "cliques", list, "$")
    cliques, objs, blocks, eqs = [], [], [], []
    for i, c in enumerate(raw):
        cp = f"cliques[{i}]"
        vars = _need(c, "vars", list, cp)
        try:
            cliques.append(Clique(i, tuple(int(v) for v in vars)))
        except (TypeError, ValueError) as err:
            raise ProblemFileError(str(err), path=f"{cp}.vars") from None
        objs.append(_poly(_need(c, "objective", list, cp), n, f"{cp}.objective"))
        pmi = c.get("pmi")
        if pmi is None:
            blocks.append(None)
        else:
            if not isinstance(pmi, list):
                raise ProblemFileError("pmi must be a list of rows", path=f"{cp}.pmi")
            size = len(pmi)
            entries = {}
            for s, row in enumerate(pmi):
                if not isinstance(row, list) or len(row) != size - s:
                    raise ProblemFileError(f"row {s} must hold {size - s} cells",
                                           path=f"{cp}.pmi[{s}]")
                for off, cell in enumerate(row):
                    entries[s, s + off] = _poly(cell, n, f"{cp}.pmi[{s}][{off}]")
            blocks.append(MatrixPolynomial(size, entries, n))
        eqs.append(tuple(_poly(h, n, f"{cp}.equalities[{j}]")
                         for j, h in enumerate(c.get("equalities") or [])))
    try:
        pattern = SparsityPattern(n, tuple(cliques))
        return ProblemInstance(pattern, tuple(objs), tuple(blocks), tuple(eqs),
                               name=str(doc.get("name", "")),
                               metadata=dict(doc.get("metadata") or {}))
    except ValueError as err:
        raise ProblemFileError(str(err), path="cliques") from None


def loads(text: str | bytes) -> ProblemInstance:
    """Parse a problem file. Syntax errors carry the byte offset."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as err:
            raise ProblemFileError("invalid UTF-8", offset=err.start) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        offset = len(text[:err.pos].encode("utf-8"))
        raise ProblemFileError(err.msg, offset=offset) from None
    return from_dict(doc)


def load(path) -> ProblemInstance:
    return loads(Path(path).read_bytes())
