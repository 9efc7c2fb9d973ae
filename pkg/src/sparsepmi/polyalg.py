"""Sparse multivariate polynomials, symmetric matrix polynomials and
correlative sparsity patterns.

Variables are indexed from 1 to ``n``. Monomials are stored sparsely as
sorted ``(variable, power)`` pairs; coefficients are plain floats.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from numbers import Real
from typing import Iterable, Mapping, Sequence

import numpy as np

PRUNE_TOL = 1e-14


class SupportError(ValueError):
    """A polynomial uses a variable outside of its declared clique."""


class Exponent(tuple):
    """Monomial power ``alpha`` stored as sorted ``(var, power)`` pairs.

    Zero powers are never stored, so the empty exponent is the constant
    monomial. ``a * b`` is the exponent of the product monomial.
    """

    __slots__ = ()

    def __new__(cls, powers: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        if isinstance(powers, Exponent):
            return powers
        items = powers.items() if isinstance(powers, Mapping) else powers
        acc: dict[int, int] = {}
        for var, p in items:
            var, p = int(var), int(p)
            if var < 1:
                raise ValueError(f"variable index must be >= 1, got {var}")
            if p < 0:
                raise ValueError(f"negative power {p} for x{var}")
            if p:
                acc[var] = acc.get(var, 0) + p
        return super().__new__(cls, tuple(sorted(acc.items())))

    @classmethod
    def from_dense(cls, powers: Sequence[int]) -> "Exponent":
        return cls((j + 1, p) for j, p in enumerate(powers))

    @classmethod
    def unit(cls, var: int) -> "Exponent":
        return cls(((var, 1),))

    @property
    def degree(self) -> int:
        return sum(p for _, p in self)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self)

    def power(self, var: int) -> int:
        for v, p in self:
            if v == var:
                return p
        return 0

    def dense(self, n: int) -> tuple[int, ...]:
        out = [0] * n
        for v, p in self:
            out[v - 1] = p
        return tuple(out)

    def __mul__(self, other: "Exponent") -> "Exponent":  # type: ignore[override]
        if not self:
            return other
        if not other:
            return self
        acc = dict(self)
        for v, p in other:
            acc[v] = acc.get(v, 0) + p
        return tuple.__new__(Exponent, tuple(sorted(acc.items())))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return monomial_str(self)


def monomial_str(e: Exponent) -> str:
    if not e:
        return "1"
    return "*".join(f"x{v}" if p == 1 else f"x{v}^{p}" for v, p in e)


def grlex_key(e: Exponent):
    """Sort key for graded lexicographic order (x1 > x2 > ... within a degree)."""
    return (e.degree, tuple((v, -p) for v, p in e))


def monomials(vars: Sequence[int], d: int) -> list[Exponent]:
    """All exponents supported on ``vars`` with total degree <= d, in grlex order."""
    vars = tuple(sorted(vars))
    out = []
    for deg in range(d + 1):
        for combo in itertools.combinations_with_replacement(vars, deg):
            acc: dict[int, int] = {}
            for v in combo:
                acc[v] = acc.get(v, 0) + 1
            out.append(tuple.__new__(Exponent, tuple(sorted(acc.items()))))
    out.sort(key=grlex_key)
    return out


def _check_index(var: int, n: int):
    if not 1 <= var <= n:
        raise IndexError(f"variable index {var} out of range 1..{n}")


class Polynomial:
    """Real polynomial in ``num_vars`` variables.

    Instances are immutable. Coefficients with magnitude below ``1e-14``
    are dropped whenever a polynomial is built.
    """

    __slots__ = ("_terms", "num_vars", "_hash")

    def __init__(self, terms: Mapping | Iterable = (), num_vars: int = 0):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Exponent, float] = {}
        for e, c in items:
            e = Exponent(e)
            acc[e] = acc.get(e, 0.0) + float(c)
        n = int(num_vars)
        for e in acc:
            if e and e[-1][0] > n:
                raise ValueError(f"monomial {monomial_str(e)} exceeds num_vars={n}")
        self._terms = {e: c for e, c in acc.items() if abs(c) >= PRUNE_TOL}
        self.num_vars = n
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def constant(cls, c: float, num_vars: int) -> "Polynomial":
        return cls({Exponent(): c}, num_vars)

    @classmethod
    def zero(cls, num_vars: int) -> "Polynomial":
        return cls({}, num_vars)

    @classmethod
    def variable(cls, var: int, num_vars: int) -> "Polynomial":
        _check_index(var, num_vars)
        return cls({Exponent.unit(var): 1.0}, num_vars)

    @classmethod
    def _raw(cls, terms: dict, num_vars: int) -> "Polynomial":
        p = cls.__new__(cls)
        p._terms = {e: c for e, c in terms.items() if abs(c) >= PRUNE_TOL}
        p.num_vars = num_vars
        p._hash = None
        return p

    # -- inspection ---------------------------------------------------
    @property
    def terms(self) -> dict[Exponent, float]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, e) -> float:
        return self._terms.get(Exponent(e), 0.0)

    @property
    def degree(self) -> int:
        return max((e.degree for e in self._terms), default=0)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(v for e in self._terms for v, _ in e)

    def is_zero(self) -> bool:
        return not self._terms

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def __len__(self) -> int:
        return len(self._terms)

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.num_vars != self.num_vars:
                raise ValueError(
                    f"dimension mismatch: {self.num_vars} vs {other.num_vars} variables")
            return other
        if isinstance(other, Real):
            return Polynomial.constant(float(other), self.num_vars)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self._terms)
        for e, c in other._terms.items():
            acc[e] = acc.get(e, 0.0) + c
        return Polynomial._raw(acc, self.num_vars)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({e: -c for e, c in self._terms.items()}, self.num_vars)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Real):
            return Polynomial._raw({e: c * other for e, c in self._terms.items()},
                                   self.num_vars)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc: dict[Exponent, float] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = e1 * e2
                acc[e] = acc.get(e, 0.0) + c1 * c2
        return Polynomial._raw(acc, self.num_vars)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Real):
            return NotImplemented
        return self * (1.0 / other)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers are supported")
        out = Polynomial.constant(1.0, self.num_vars)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, Real):
            other = Polynomial.constant(float(other), self.num_vars)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.num_vars == other.num_vars and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num_vars, frozenset(self._terms.items())))
        return self._hash

    # -- calculus and evaluation --------------------------------------
    def __call__(self, u) -> float:
        return poly_eval(self, u)

    def diff(self, var: int) -> "Polynomial":
        return poly_diff(self, var)

    def lift(self, num_vars: int) -> "Polynomial":
        """Same polynomial viewed in a larger ambient space."""
        if num_vars < self.num_vars:
            for e in self._terms:
                if e and e[-1][0] > num_vars:
                    raise ValueError("cannot drop variables that are used")
        return Polynomial._raw(dict(self._terms), num_vars)

    def remap(self, mapping: Mapping[int, int], num_vars: int) -> "Polynomial":
        """Rename variables ``x_j -> x_{mapping[j]}`` in a space of ``num_vars``."""
        acc: dict[Exponent, float] = {}
        for e, c in self._terms.items():
            ne = Exponent((mapping[v], p) for v, p in e)
            acc[ne] = acc.get(ne, 0.0) + c
        return Polynomial(acc, num_vars)

    def substitute(self, values: Mapping[int, "Polynomial"]) -> "Polynomial":
        """Replace selected variables by polynomials (same ambient space)."""
        out = Polynomial.zero(self.num_vars)
        for e, c in self._terms.items():
            term = Polynomial.constant(c, self.num_vars)
            rest = []
            for v, p in e:
                if v in values:
                    term = term * values[v] ** p
                else:
                    rest.append((v, p))
            if rest:
                term = term * Polynomial({Exponent(rest): 1.0}, self.num_vars)
            out = out + term
        return out

    def compose_shift(self, c) -> "Polynomial":
        return compose_shift(self, c)

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e in sorted(self._terms, key=grlex_key):
            c = self._terms[e]
            parts.append(f"{c:+.6g}" if not e else f"{c:+.6g}*{monomial_str(e)}")
        return " ".join(parts)


def variables(n: int) -> list[Polynomial]:
    """The coordinate polynomials ``x1, ..., xn``."""
    return [Polynomial.variable(j, n) for j in range(1, n + 1)]


def poly_eval(p: Polynomial, u) -> float:
    u = np.asarray(u, dtype=float).ravel()
    if u.shape[0] != p.num_vars:
        raise ValueError(f"point has length {u.shape[0]}, expected {p.num_vars}")
    total = 0.0
    for e, c in p.items():
        term = c
        for v, k in e:
            term *= u[v - 1] ** k
        total += term
    return float(total)


def poly_diff(p: Polynomial, var: int) -> Polynomial:
    _check_index(var, p.num_vars)
    acc: dict[Exponent, float] = {}
    for e, c in p.items():
        k = e.power(var)
        if k == 0:
            continue
        ne = Exponent((v, q - 1 if v == var else q) for v, q in e)
        acc[ne] = acc.get(ne, 0.0) + c * k
    return Polynomial._raw(acc, p.num_vars)


def gradient(p: Polynomial, vars: Sequence[int] | None = None) -> list[Polynomial]:
    vars = range(1, p.num_vars + 1) if vars is None else vars
    return [poly_diff(p, v) for v in vars]


def hessian(p: Polynomial, vars: Sequence[int] | None = None) -> "MatrixPolynomial":
    vars = list(range(1, p.num_vars + 1) if vars is None else vars)
    grad = [poly_diff(p, v) for v in vars]
    entries = {}
    for s in range(len(vars)):
        for t in range(s, len(vars)):
            entries[s, t] = poly_diff(grad[s], vars[t])
    return MatrixPolynomial(len(vars), entries, p.num_vars)


def add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def scale(p: Polynomial, c: float) -> Polynomial:
    return p * float(c)


def multiply(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


def compose_shift(p: Polynomial, c) -> Polynomial:
    """Substitute ``x <- x - c``."""
    c = np.asarray(c, dtype=float).ravel()
    if c.shape[0] != p.num_vars:
        raise ValueError(f"shift has length {c.shape[0]}, expected {p.num_vars}")
    xs = variables(p.num_vars)
    shifted = {v: xs[v - 1] - c[v - 1] for v in p.support if c[v - 1] != 0.0}
    return p.substitute(shifted) if shifted else p


def restrict_support(p: Polynomial, clique: "Clique | Iterable[int]") -> Polynomial:
    """Return ``p`` after checking it only involves variables of ``clique``."""
    allowed = set(clique.vars if isinstance(clique, Clique) else clique)
    extra = p.support - allowed
    if extra:
        raise SupportError(f"polynomial uses x{sorted(extra)} outside clique {sorted(allowed)}")
    return p


class MatrixPolynomial:
    """Symmetric ``size x size`` matrix whose entries are polynomials.

    Only the upper triangle is stored; ``G[t, s]`` reads ``G[s, t]``.
    """

    __slots__ = ("size", "_entries", "num_vars")

    def __init__(self, size: int, entries: Mapping[tuple[int, int], Polynomial],
                 num_vars: int):
        self.size = int(size)
        self.num_vars = int(num_vars)
        store = {}
        for (s, t), p in entries.items():
            if not (0 <= s < size and 0 <= t < size):
                raise IndexError(f"entry ({s},{t}) outside {size}x{size}")
            if s > t:
                s, t = t, s
            if isinstance(p, Real):
                p = Polynomial.constant(float(p), num_vars)
            if p.num_vars != num_vars:
                raise ValueError("entry dimension mismatch")
            if not p.is_zero():
                store[s, t] = p
        self._entries = store

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], num_vars: int,
                  check_symmetric: bool = True) -> "MatrixPolynomial":
        size = len(rows)
        entries = {}
        for s in range(size):
            if len(rows[s]) != size:
                raise ValueError("matrix polynomial must be square")
            for t in range(size):
                val = rows[s][t]
                if isinstance(val, Real):
                    val = Polynomial.constant(float(val), num_vars)
                if t >= s:
                    entries[s, t] = val
                elif check_symmetric:
                    upper = rows[t][s]
                    if isinstance(upper, Real):
                        upper = Polynomial.constant(float(upper), num_vars)
                    if upper != val:
                        raise ValueError(f"entries ({s},{t}) and ({t},{s}) differ")
        return cls(size, entries, num_vars)

    @classmethod
    def constant(cls, mat, num_vars: int) -> "MatrixPolynomial":
        mat = np.asarray(mat, dtype=float)
        size = mat.shape[0]
        return cls(size, {(s, t): Polynomial.constant(mat[s, t], num_vars)
                          for s in range(size) for t in range(s, size)}, num_vars)

    @classmethod
    def identity(cls, size: int, num_vars: int) -> "MatrixPolynomial":
        return cls.constant(np.eye(size), num_vars)

    @classmethod
    def block_diag(cls, blocks: Sequence["MatrixPolynomial"]) -> "MatrixPolynomial":
        num_vars = blocks[0].num_vars
        entries = {}
        off = 0
        for B in blocks:
            if B.num_vars != num_vars:
                raise ValueError("blocks must share the ambient dimension")
            for (s, t), p in B._entries.items():
                entries[off + s, off + t] = p
            off += B.size
        return cls(off, entries, num_vars)

    def __getitem__(self, st: tuple[int, int]) -> Polynomial:
        s, t = st
        if s > t:
            s, t = t, s
        if not (0 <= s and t < self.size):
            raise IndexError(st)
        return self._entries.get((s, t)) or Polynomial.zero(self.num_vars)

    def upper_items(self):
        """Nonzero ``((s, t), entry)`` pairs with ``s <= t``."""
        return self._entries.items()

    @property
    def degree(self) -> int:
        return max((p.degree for p in self._entries.values()), default=0)

    @property
    def support(self) -> frozenset[int]:
        out: set[int] = set()
        for p in self._entries.values():
            out |= p.support
        return frozenset(out)

    def rows(self) -> list[list[Polynomial]]:
        return [[self[s, t] for t in range(self.size)] for s in range(self.size)]

    def map(self, fn) -> "MatrixPolynomial":
        return MatrixPolynomial(self.size, {st: fn(p) for st, p in self._entries.items()},
                                self.num_vars)

    def lift(self, num_vars: int) -> "MatrixPolynomial":
        return MatrixPolynomial(self.size, {st: p.lift(num_vars)
                                            for st, p in self._entries.items()}, num_vars)

    def remap(self, mapping: Mapping[int, int], num_vars: int) -> "MatrixPolynomial":
        return MatrixPolynomial(self.size, {st: p.remap(mapping, num_vars)
                                            for st, p in self._entries.items()}, num_vars)

    def diff(self, var: int) -> "MatrixPolynomial":
        _check_index(var, self.num_vars)
        return self.map(lambda p: poly_diff(p, var))

    def compose_shift(self, c) -> "MatrixPolynomial":
        return self.map(lambda p: compose_shift(p, c))

    def __add__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        if not isinstance(other, MatrixPolynomial):
            return NotImplemented
        if other.size != self.size or other.num_vars != self.num_vars:
            raise ValueError("matrix polynomial shape mismatch")
        keys = set(self._entries) | set(other._entries)
        return MatrixPolynomial(self.size, {k: self[k] + other[k] for k in keys}, self.num_vars)

    def __neg__(self) -> "MatrixPolynomial":
        return self.map(lambda p: -p)

    def __sub__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        return self + (-other)

    def __mul__(self, c) -> "MatrixPolynomial":
        if isinstance(c, Real):
            return self.map(lambda p: p * float(c))
        if isinstance(c, Polynomial):
            return self.map(lambda p: p * c)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixPolynomial):
            return NotImplemented
        return (self.size == other.size and self.num_vars == other.num_vars
                and self._entries == other._entries)

    __hash__ = None  # type: ignore[assignment]

    def __call__(self, u) -> np.ndarray:
        return matpoly_eval(self, u)

    def __repr__(self) -> str:
        return f"MatrixPolynomial({self.size}x{self.size}, deg={self.degree}, n={self.num_vars})"


def matpoly_eval(G: MatrixPolynomial, u) -> np.ndarray:
    u = np.asarray(u, dtype=float).ravel()
    if u.shape[0] != G.num_vars:
        raise ValueError(f"point has length {u.shape[0]}, expected {G.num_vars}")
    out = np.zeros((G.size, G.size))
    for (s, t), p in G.upper_items():
        out[s, t] = out[t, s] = poly_eval(p, u)
    return out


def min_eig(G: MatrixPolynomial, u) -> float:
    return float(np.linalg.eigvalsh(matpoly_eval(G, u))[0])


@dataclass(frozen=True)
class Clique:
    index: int
    vars: tuple[int, ...]

    def __post_init__(self):
        vs = tuple(int(v) for v in self.vars)
        if not vs:
            raise ValueError("clique must be nonempty")
        if list(vs) != sorted(set(vs)):
            raise ValueError(f"clique variables must be sorted and distinct: {vs}")
        object.__setattr__(self, "vars", vs)

    def __len__(self) -> int:
        return len(self.vars)

    def __iter__(self):
        return iter(self.vars)


@dataclass(frozen=True)
class SparsityPattern:
    n: int
    cliques: tuple[Clique, ...]

    def __post_init__(self):
        cl = tuple(c if isinstance(c, Clique) else Clique(i, tuple(sorted(c)))
                   for i, c in enumerate(self.cliques))
        object.__setattr__(self, "cliques", cl)
        covered = set().union(*(c.vars for c in cl)) if cl else set()
        if covered != set(range(1, self.n + 1)):
            raise ValueError(f"cliques cover {sorted(covered)}, expected 1..{self.n}")

    @classmethod
    def from_lists(cls, n: int, lists: Iterable[Iterable[int]]) -> "SparsityPattern":
        return cls(n, tuple(Clique(i, tuple(sorted(set(c)))) for i, c in enumerate(lists)))

    @property
    def m(self) -> int:
        return len(self.cliques)

    def __len__(self) -> int:
        return len(self.cliques)


def _rip_holds(sets: Sequence[frozenset]) -> bool:
    seen: set[int] = set()
    for i, s in enumerate(sets):
        if i:
            inter = s & seen
            if not any(inter <= sets[j] for j in range(i)):
                return False
        seen |= s
    return True


def rip_check(pattern: SparsityPattern) -> tuple[bool, list[int] | None]:
    """Decide whether some clique ordering has the running intersection property.

    Uses leaf elimination (GYO reduction), which is confluent, so a greedy
    choice of the removable clique never misses an ordering. Returns the
    witnessing ordering as a list of clique positions.
    """
    sets = {i: frozenset(c.vars) for i, c in enumerate(pattern.cliques)}
    removed: list[int] = []
    alive = dict(sets)
    while len(alive) > 1:
        for i in sorted(alive):
            others = [j for j in alive if j != i]
            rest = frozenset().union(*(alive[j] for j in others))
            inter = alive[i] & rest
            if any(inter <= alive[j] for j in others):
                removed.append(i)
                del alive[i]
                break
        else:
            return False, None
    order = list(alive) + removed[::-1]
    assert _rip_holds([sets[i] for i in order])
    return True, order


def ceil_half(d: int) -> int:
    return (d + 1) // 2


@dataclass(frozen=True)
class ProblemInstance:
    """Sparse polynomial optimization problem with PMI constraints.

    ``objectives[i]``, ``pmi_blocks[i]`` and ``equalities[i]`` belong to
    clique ``i`` and may only use its variables. A clique without a PMI
    block has ``pmi_blocks[i] = None``.
    """

    pattern: SparsityPattern
    objectives: tuple[Polynomial, ...]
    pmi_blocks: tuple[MatrixPolynomial | None, ...]
    equalities: tuple[tuple[Polynomial, ...], ...] = ()
    name: str = ""
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        m = self.pattern.m
        eqs = self.equalities or tuple(() for _ in range(m))
        object.__setattr__(self, "objectives", tuple(self.objectives))
        object.__setattr__(self, "pmi_blocks", tuple(self.pmi_blocks))
        object.__setattr__(self, "equalities", tuple(tuple(e) for e in eqs))
        if not (len(self.objectives) == len(self.pmi_blocks) == len(self.equalities) == m):
            raise ValueError("need one objective, PMI block and equality list per clique")
        n = self.pattern.n
        for i, c in enumerate(self.pattern.cliques):
            allowed = set(c.vars)
            polys = [self.objectives[i], *self.equalities[i]]
            for p in polys:
                if p.num_vars != n:
                    raise ValueError(f"clique {i}: polynomial has {p.num_vars} vars, expected {n}")
                restrict_support(p, allowed)
            G = self.pmi_blocks[i]
            if G is not None:
                if G.num_vars != n:
                    raise ValueError(f"clique {i}: PMI block has {G.num_vars} vars, expected {n}")
                if not G.support <= allowed:
                    raise SupportError(
                        f"PMI block {i} uses x{sorted(G.support - allowed)} outside clique")

    @property
    def n(self) -> int:
        return self.pattern.n

    @property
    def m(self) -> int:
        return self.pattern.m

    @property
    def objective(self) -> Polynomial:
        total = Polynomial.zero(self.n)
        for f in self.objectives:
            total = total + f
        return total

    def pmi_degree(self, i: int) -> int:
        G = self.pmi_blocks[i]
        return 0 if G is None else G.degree

    @property
    def d(self) -> tuple[int, ...]:
        """Per-clique ``ceil(deg G_i / 2)``."""
        return tuple(ceil_half(self.pmi_degree(i)) for i in range(self.m))

    @property
    def k0(self) -> int:
        degs = [ceil_half(self.objective.degree)] + list(self.d)
        degs += [ceil_half(h.degree) for hs in self.equalities for h in hs]
        return max(1, max(degs))

    def evaluate(self, u) -> float:
        return sum(poly_eval(f, u) for f in self.objectives)

    def feasibility_margins(self, u) -> list[float]:
        """Smallest eigenvalue of each PMI block at ``u`` (``inf`` when absent)."""
        u = np.asarray(u, dtype=float)
        out = []
        for G in self.pmi_blocks:
            out.append(math.inf if G is None else min_eig(G, u))
        return out

    def equality_residuals(self, u) -> list[float]:
        return [abs(poly_eval(h, u)) for hs in self.equalities for h in hs]

    def is_feasible(self, u, tol: float = 1e-6) -> bool:
        return (min(self.feasibility_margins(u), default=math.inf) >= -tol
                and max(self.equality_residuals(u), default=0.0) <= tol)

    def rip(self) -> tuple[bool, list[int] | None]:
        return rip_check(self.pattern)
