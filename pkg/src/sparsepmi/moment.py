"""Truncated moment sequences, Riesz functionals, moment and localizing matrices.

Matrix builders come in two flavours sharing one code path: the
``*_entries`` functions return, for every upper-triangular entry, the
linear combination of moments it equals (``{Exponent: coeff}``); the
numeric functions contract those combinations against a moment view.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable, Mapping, Sequence

import numpy as np

from .polyalg import (Clique, Exponent, MatrixPolynomial, Polynomial, SparsityPattern,
                      grlex_key, monomials)


class DegreeError(ValueError):
    """A moment of higher degree than available was requested."""


@dataclass(frozen=True)
class PowerIndexSet:
    """Exponents supported on ``vars`` with degree <= ``degree``, grlex ordered."""

    vars: tuple[int, ...]
    degree: int
    members: tuple[Exponent, ...] = field(repr=False)
    positions: dict = field(repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def index_set(clique: Clique | Sequence[int], d: int) -> PowerIndexSet:
    if d < 0:
        raise ValueError("degree must be nonnegative")
    vars = tuple(clique.vars) if isinstance(clique, Clique) else tuple(sorted(clique))
    members = tuple(monomials(vars, d))
    assert len(members) == comb(len(vars) + d, d)
    return PowerIndexSet(vars, d, members, {e: i for i, e in enumerate(members)})


@dataclass(frozen=True)
class UnionIndex:
    """The union ``U_k`` of the per-clique index sets of degree ``2k``.

    ``clique_positions[i]`` maps the members of clique ``i``'s set
    ``N^{Delta_i}_{2k}`` (in their own grlex order) into ``members``.
    """

    k: int
    pattern: SparsityPattern
    members: tuple[Exponent, ...] = field(repr=False)
    positions: dict = field(repr=False, compare=False)
    clique_sets: tuple[PowerIndexSet, ...] = field(repr=False, compare=False)
    clique_positions: tuple[np.ndarray, ...] = field(repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.members)


def union_index(pattern: SparsityPattern, k: int) -> UnionIndex:
    sets = tuple(index_set(c, 2 * k) for c in pattern.cliques)
    seen = set()
    for s in sets:
        seen.update(s.members)
    members = tuple(sorted(seen, key=grlex_key))
    pos = {e: i for i, e in enumerate(members)}
    maps = tuple(np.array([pos[e] for e in s.members], dtype=int) for s in sets)
    return UnionIndex(k, pattern, members, pos, sets, maps)


def dense_index(n: int, k: int) -> UnionIndex:
    """Index ``N^n_{2k}`` of the dense hierarchy (one clique holding every variable)."""
    return union_index(SparsityPattern(n, (Clique(0, tuple(range(1, n + 1))),)), k)


class MomentView:
    """Read access to the moments ``y_alpha`` of one clique up to some degree.

    ``lookup`` maps an exponent to its value and raises ``KeyError`` when the
    moment is unknown. Views into a :class:`TMS` share its storage.
    """

    __slots__ = ("vars", "degree", "_lookup")

    def __init__(self, vars: Sequence[int], degree: int,
                 lookup: Callable[[Exponent], float] | Mapping[Exponent, float]):
        self.vars = tuple(vars)
        self.degree = int(degree)
        if isinstance(lookup, Mapping):
            table = {Exponent(e): float(v) for e, v in lookup.items()}
            self._lookup = table.__getitem__
        else:
            self._lookup = lookup

    @classmethod
    def from_sequence(cls, vars: Sequence[int], degree: int, values) -> "MomentView":
        """Values listed in the grlex order of ``index_set(vars, degree)``."""
        idx = index_set(vars, degree)
        values = np.asarray(values, dtype=float)
        if values.shape != (len(idx),):
            raise ValueError(f"expected {len(idx)} moments, got {values.shape}")
        return cls(vars, degree, dict(zip(idx.members, values)))

    def __getitem__(self, e) -> float:
        e = Exponent(e)
        if e.degree > self.degree:
            raise DegreeError(f"moment {e!r} has degree {e.degree} > {self.degree}")
        if not set(e.support) <= set(self.vars):
            raise KeyError(f"moment {e!r} is outside variables {self.vars}")
        return self._lookup(e)

    def vector(self, d: int | None = None) -> np.ndarray:
        """Moments over ``N^{vars}_d`` in grlex order (the truncation ``y|_d``)."""
        d = self.degree if d is None else d
        return np.array([self[e] for e in index_set(self.vars, d).members])


class TMS:
    """Truncated moment sequence indexed by a :class:`UnionIndex`."""

    def __init__(self, index: UnionIndex, values):
        values = np.asarray(values, dtype=float)
        if values.shape != (len(index),):
            raise ValueError(f"expected {len(index)} values, got {values.shape}")
        self.index = index
        self.values = values

    @property
    def mass(self) -> float:
        return float(self.values[self.index.positions[Exponent()]])

    def __getitem__(self, e) -> float:
        return float(self.values[self.index.positions[Exponent(e)]])

    def view(self, i: int) -> MomentView:
        clique = self.index.pattern.cliques[i]
        pos = self.index.positions
        vals = self.values
        return MomentView(clique.vars, 2 * self.index.k, lambda e: vals[pos[e]])

    def first_moments(self) -> np.ndarray:
        """The point ``(y_{e_1}, ..., y_{e_n})``."""
        n = self.index.pattern.n
        return np.array([self[Exponent.unit(j)] for j in range(1, n + 1)])

    def __repr__(self) -> str:
        return f"TMS(k={self.index.k}, size={len(self.values)})"


def dirac_tms(u, index: UnionIndex) -> TMS:
    u = np.asarray(u, dtype=float).ravel()
    if u.shape[0] != index.pattern.n:
        raise ValueError(f"point has length {u.shape[0]}, expected {index.pattern.n}")
    vals = np.empty(len(index))
    for i, e in enumerate(index.members):
        v = 1.0
        for var, p in e:
            v *= u[var - 1] ** p
        vals[i] = v
    return TMS(index, vals)


def monomial_vector(u, vars: Sequence[int], d: int) -> np.ndarray:
    """``[u]_d``: monomials of degree <= d in the given coordinates, evaluated at u."""
    u = np.asarray(u, dtype=float).ravel()
    vals = dict(zip(vars, u)) if len(u) == len(vars) else {v: u[v - 1] for v in vars}
    out = []
    for e in index_set(vars, d).members:
        x = 1.0
        for var, p in e:
            x *= vals[var] ** p
        out.append(x)
    return np.array(out)


def riesz(p: Polynomial, y: MomentView) -> float:
    if not p.support <= set(y.vars):
        raise KeyError(f"polynomial support {sorted(p.support)} not within {y.vars}")
    if p.degree > y.degree:
        raise DegreeError(f"degree {p.degree} exceeds available {y.degree}")
    return float(sum(c * y[e] for e, c in p.items()))


def localizing_order(k: int, deg: int) -> int:
    """``floor(k - deg/2)``: half-degree of the monomial vector in a localizing matrix."""
    return (2 * k - deg) // 2


def localizing_entries(G: MatrixPolynomial | Polynomial | None, vars: Sequence[int],
                       k: int) -> tuple[int, list[tuple[int, int, dict]]]:
    """Symbolic localizing matrix of ``G`` at order ``k``.

    Returns ``(size, entries)`` where ``entries`` lists ``(r, c, {alpha: coeff})``
    for ``r <= c``. The block layout puts the matrix index ``(s, t)`` outside
    and monomials inside; ``G=None`` gives the moment matrix.
    """
    if G is None:
        G = MatrixPolynomial.identity(1, 0)
    elif isinstance(G, Polynomial):
        G = MatrixPolynomial(1, {(0, 0): G}, G.num_vars)
    deg = G.degree
    if deg > 2 * k:
        raise DegreeError(f"deg(G)={deg} exceeds 2k={2 * k}")
    kk = localizing_order(k, deg)
    basis = index_set(vars, kk).members
    nb = len(basis)
    prods = [[basis[a] * basis[b] for b in range(nb)] for a in range(nb)]
    out = []
    for (s, t), p in G.upper_items():
        terms = list(p.items())
        for a in range(nb):
            b0 = a if s == t else 0
            for b in range(b0, nb):
                ab = prods[a][b]
                combo: dict[Exponent, float] = {}
                for e, c in terms:
                    key = e * ab
                    combo[key] = combo.get(key, 0.0) + c
                out.append((s * nb + a, t * nb + b, combo))
    return G.size * nb, out


def _contract(size: int, entries, y: MomentView) -> np.ndarray:
    M = np.zeros((size, size))
    for r, c, combo in entries:
        val = sum(coef * y[e] for e, coef in combo.items())
        M[r, c] = val
        M[c, r] = val
    return M


def moment_matrix(y: MomentView, k: int) -> np.ndarray:
    if 2 * k > y.degree:
        raise DegreeError(f"moment matrix of order {k} needs degree {2 * k} > {y.degree}")
    size, entries = localizing_entries(None, y.vars, k)
    return _contract(size, entries, y)


def localizing_matrix(G: MatrixPolynomial | Polynomial, y: MomentView, k: int) -> np.ndarray:
    if not G.support <= set(y.vars):
        raise KeyError(f"support {sorted(G.support)} not within {y.vars}")
    if 2 * k > y.degree:
        raise DegreeError(f"localizing matrix of order {k} needs degree {2 * k} > {y.degree}")
    size, entries = localizing_entries(G, y.vars, k)
    return _contract(size, entries, y)


def gi_of_y(G: MatrixPolynomial, y: MomentView) -> np.ndarray:
    """``G[y]``: the matrix of Riesz values of the entries of ``G``."""
    if G.degree > y.degree:
        raise DegreeError(f"deg(G)={G.degree} exceeds available {y.degree}")
    out = np.zeros((G.size, G.size))
    for (s, t), p in G.upper_items():
        out[s, t] = out[t, s] = riesz(p, y)
    return out
