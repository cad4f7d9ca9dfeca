"""
Linear combinations of aromatic forests and the divergence calculus on them.

FormCombo holds exact Fraction coefficients over canonical forests. Operators
are computed forest by forest (cached) and extended linearly.
"""

from __future__ import annotations

import re
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations, product
from math import factorial
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Set, Tuple, Union

from core.errors import ForestSyntaxError, GradeError
from core.forest import (
    AromaticForest,
    MarkedForest,
    canonicalize,
    canonicalize_marked,
    detach_at,
    graft,
    has_one_loop,
    parse_forest,
    relabel,
    replace_covertex,
    replace_vertex,
    symmetry_order,
)

Number = Union[int, Fraction]
Terms = Tuple[Tuple[AromaticForest, Fraction], ...]


class _Combo:
    """Sparse map key -> Fraction without stored zeros."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: Dict = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for key, coeff in items:
                self.add_term(key, coeff)

    @staticmethod
    def _canon(key):
        raise NotImplementedError

    def add_term(self, key, coeff: Number):
        if not coeff:
            return
        key = self._canon(key)
        value = self.terms.get(key, Fraction(0)) + coeff
        if value:
            self.terms[key] = Fraction(value)
        else:
            self.terms.pop(key, None)

    def coeff(self, key) -> Fraction:
        return self.terms.get(self._canon(key), Fraction(0))

    def items(self) -> List[Tuple[object, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: str(kv[0]))

    def __iter__(self) -> Iterator:
        return iter(self.items())

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)) and other == 0:
            return not self.terms
        return type(self) is type(other) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def _new(self, terms: Dict):
        out = type(self)()
        out.terms = terms
        return out

    def __add__(self, other):
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            value = out.get(key, Fraction(0)) + coeff
            if value:
                out[key] = value
            else:
                out.pop(key, None)
        return self._new(out)

    def __neg__(self):
        return self._new({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar: Number):
        if not scalar:
            return self._new({})
        return self._new({k: v * scalar for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar: Number):
        return self * (Fraction(1) / Fraction(scalar))

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{coeff} * {key}" for key, coeff in self.items())

    def to_records(self) -> List[Dict[str, str]]:
        return [{"forest": str(key), "coeff": str(coeff)} for key, coeff in self.items()]

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_text()!r})"


class FormCombo(_Combo):
    """Element of Span(F_{n,p}) with canonical forest keys."""

    __slots__ = ()

    @staticmethod
    def _canon(key):
        if isinstance(key, str):
            return parse_forest(key)
        return canonicalize(key)

    @classmethod
    def of(cls, forest: Union[str, AromaticForest], coeff: Number = 1) -> "FormCombo":
        return cls([(forest, coeff)])

    @property
    def grades(self) -> Set[Tuple[int, int]]:
        return {f.grade for f in self.terms}

    def grade(self) -> Optional[Tuple[int, int]]:
        """The common (n, p) of all terms, None for the zero combo."""
        grades = self.grades
        if len(grades) > 1:
            raise GradeError(f"mixed grades {sorted(grades)} in {self.to_text()}")
        return next(iter(grades)) if grades else None

    @property
    def orders(self) -> List[int]:
        return sorted({f.order for f in self.terms})

    def homogeneous(self, N: int) -> "FormCombo":
        return self._new({f: a for f, a in self.terms.items() if f.order == N})

    def map_forests(self, op: Callable[[AromaticForest], Iterable[Tuple[AromaticForest, Number]]]) -> "FormCombo":
        """Linear extension of a forest-level operator."""
        acc: Dict[AromaticForest, Fraction] = defaultdict(Fraction)
        for f, a in self.terms.items():
            for g, b in op(f):
                acc[canonicalize(g)] += a * b
        return self._new({g: v for g, v in acc.items() if v})


class MarkedCombo(_Combo):
    """Linear combination of canonical marked forests."""

    __slots__ = ()

    @staticmethod
    def _canon(key):
        return canonicalize_marked(key)

    def map_marked(self, op: Callable[[MarkedForest], Iterable[Tuple[MarkedForest, Number]]]) -> "MarkedCombo":
        acc: Dict[MarkedForest, Fraction] = defaultdict(Fraction)
        for mf, a in self.terms.items():
            for g, b in op(mf):
                acc[canonicalize_marked(g)] += a * b
        return self._new({g: v for g, v in acc.items() if v})


_TERM_SPLIT = re.compile(r"\s+([+-])\s+")


def parse_combo(text: str) -> FormCombo:
    """Parse ``coeff * forest`` terms joined by ``+``/``-``; a bare forest has coefficient 1."""
    text = text.strip()
    if text in ("", "0"):
        return FormCombo()
    pieces = _TERM_SPLIT.split(text)
    signs = [1] + [1 if s == "+" else -1 for s in pieces[1::2]]
    combo = FormCombo()
    for sign, term in zip(signs, pieces[0::2]):
        if "*" in term:
            raw_coeff, forest = term.split("*", 1)
            try:
                coeff = Fraction(raw_coeff.strip())
            except (ValueError, ZeroDivisionError):
                raise ForestSyntaxError(f"bad coefficient {raw_coeff.strip()!r}", text.find(term))
        else:
            forest, coeff = term, Fraction(1)
            if forest.startswith("-"):
                forest, coeff = forest[1:], Fraction(-1)
        combo.add_term(parse_forest(forest.strip()), sign * coeff)
    return combo


def as_combo(value: Union[str, AromaticForest, FormCombo]) -> FormCombo:
    if isinstance(value, FormCombo):
        return value
    if isinstance(value, str):
        return parse_combo(value)
    return FormCombo.of(value)


# --- Wedge ------------------------------------------------------------------


def permutation_sign(perm: Tuple[int, ...]) -> int:
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


@lru_cache(maxsize=1 << 16)
def _wedge_forest(f: AromaticForest) -> Terms:
    n, p = f.grade
    norm = Fraction(1, factorial(n) * factorial(p))
    acc: Dict[AromaticForest, Fraction] = defaultdict(Fraction)
    for sigma in permutations(range(n)):
        root_sign = permutation_sign(sigma)
        for tau in permutations(range(1, p + 1)):
            label_map = {k + 1: tau[k] for k in range(p)}
            g = canonicalize(relabel(f, sigma, label_map))
            acc[g] += root_sign * permutation_sign(tau) * norm
    return tuple((g, a) for g, a in acc.items() if a)


def wedge(c: FormCombo) -> FormCombo:
    c.grade()
    return c.map_forests(_wedge_forest)


# --- Derivatives ------------------------------------------------------------


def _require(c: FormCombo, test: Callable[[int, int], bool], message: str):
    for f in c.terms:
        n, p = f.grade
        if not test(n, p):
            raise GradeError(f"{message}: got n={n}, p={p} in {f.text}")


@lru_cache(maxsize=1 << 16)
def _dH_forest(f: AromaticForest) -> Terms:
    r = f.roots[-1]
    return tuple((graft(f, r, u), Fraction(1)) for u in range(f.order))


def d_H(c: FormCombo) -> FormCombo:
    """Graft the last root onto every node, then wedge."""
    _require(c, lambda n, p: n >= 1, "d_H needs at least one root")
    return wedge(c.map_forests(_dH_forest))


@lru_cache(maxsize=1 << 16)
def _dV_forest(f: AromaticForest) -> Terms:
    k = f.n_covertices + 1
    return tuple((replace_vertex(f, v, k), Fraction(1)) for v in f.vertices)


def d_V(c: FormCombo) -> FormCombo:
    """Replace each vertex in turn by the next covertex, then wedge."""
    return wedge(c.map_forests(_dV_forest))


def _trace_forest(f: AromaticForest):
    g = graft(f, f.roots[0], f.covertex(1))
    return ((replace_covertex(g, 1), 1),)


def trace(c: FormCombo) -> FormCombo:
    _require(c, lambda n, p: n == 1 and p == 1, "trace is defined on one root and one covertex")
    return c.map_forests(_trace_forest)


def drop_one_loops(c: FormCombo) -> FormCombo:
    return c._new({f: a for f, a in c.terms.items() if not has_one_loop(f)})


def symmetry_scale(c: FormCombo) -> FormCombo:
    """A_sigma: divide each term by the symmetry order of its forest."""
    return c._new({f: a / symmetry_order(f) for f, a in c.terms.items()})


# --- Grafting calculus on marked forests ------------------------------------


def _graft_subsets(mf: MarkedForest, q: int, targets: List[int]) -> Iterator[MarkedForest]:
    for subset in combinations(mf.detached, q):
        rest = tuple(r for r in mf.detached if r not in subset)
        for choice in product(targets, repeat=q):
            g = mf.base
            for r, u in zip(subset, choice):
                g = graft(g, r, u)
            yield MarkedForest(g, mf.marked, rest)


def graft_detached(mc: MarkedCombo, q: int) -> MarkedCombo:
    """D^q while marked: q detached roots onto every node except the marked one."""

    def op(mf: MarkedForest):
        targets = [u for u in range(mf.base.order) if u != mf.marked]
        return ((g, 1) for g in _graft_subsets(mf, q, targets))

    return mc.map_marked(op)


def graft_detached_anywhere(mc: MarkedCombo, q: int) -> MarkedCombo:
    """D^q after the mark is lifted: the marked node is a valid target."""

    def op(mf: MarkedForest):
        return ((g, 1) for g in _graft_subsets(mf, q, list(range(mf.base.order))))

    return mc.map_marked(op)


def graft_detached_onto_mark(mc: MarkedCombo, k: int) -> MarkedCombo:
    """D^{k->v}: every k-subset of the detached roots grafted onto the marked node."""

    def op(mf: MarkedForest):
        return ((g, 1) for g in _graft_subsets(mf, k, [mf.marked]))

    return mc.map_marked(op)


def unmark(mc: MarkedCombo) -> FormCombo:
    out = FormCombo()
    for mf, a in mc.terms.items():
        out.add_term(mf.base, a)
    return out


def marked(f: Union[str, AromaticForest], v: int) -> MarkedCombo:
    if isinstance(f, str):
        f = parse_forest(f)
    return MarkedCombo([(detach_at(f, v), 1)])


@lru_cache(maxsize=1 << 15)
def _graft_trailing_forest(f: AromaticForest, q: int, k: int) -> Terms:
    if k > f.n_roots or q > k:
        return ()
    trailing = f.roots[f.n_roots - k:]
    acc: Dict[AromaticForest, Fraction] = defaultdict(Fraction)
    for g in _graft_subsets(MarkedForest(f, -1, trailing), q, list(range(f.order))):
        acc[canonicalize(g.base)] += 1
    return tuple(acc.items())


def graft_trailing(c: FormCombo, q: int, k: int) -> FormCombo:
    """D^q over the last k roots of each term, onto any node."""
    return c.map_forests(lambda f: _graft_trailing_forest(f, q, k))


# --- Euler operators --------------------------------------------------------


def all_nodes(f: AromaticForest) -> Iterable[int]:
    return range(f.order)


def last_root(f: AromaticForest) -> Iterable[int]:
    return f.roots[-1:]


def top_covertex(f: AromaticForest) -> Iterable[int]:
    p = f.n_covertices
    return (f.covertex(p),) if p else ()


@lru_cache(maxsize=1 << 17)
def euler_terms_at(f: AromaticForest, v: int, q: int) -> Terms:
    """E^q_v f as raw terms; q detached roots stay appended after the roots of f."""
    mf = detach_at(f, v)
    k = len(mf.detached)
    if q > k:
        return ()
    sign = -1 if (k - q) % 2 else 1
    targets = [u for u in range(f.order) if u != v]
    acc: Dict[AromaticForest, Fraction] = defaultdict(Fraction)
    for g in _graft_subsets(mf, k - q, targets):
        acc[canonicalize(g.base)] += sign
    return tuple((g, a) for g, a in acc.items() if a)


def euler_Eq(c: FormCombo, q: int, at: Callable[[AromaticForest], Iterable[int]] = all_nodes) -> FormCombo:
    """Higher Euler operator E^q summed over the nodes picked by `at`."""
    if q < 0:
        raise GradeError(f"Euler order must be non-negative, got {q}")

    def op(f: AromaticForest):
        for v in at(f):
            yield from euler_terms_at(f, v, q)

    return c.map_forests(op)


def euler_E(c: FormCombo) -> FormCombo:
    return euler_Eq(c, 0)


def euler_E_at(c: FormCombo, at: Callable[[AromaticForest], Iterable[int]]) -> FormCombo:
    return euler_Eq(c, 0, at)


def euler_Estar(c: FormCombo) -> FormCombo:
    """E°: each node becomes covertex 1 and is regrafted like E_v."""
    _require(c, lambda n, p: n == 0 and p == 0, "E° is defined on scalars without covertices")

    def op(f: AromaticForest):
        for v in range(f.order):
            yield from euler_terms_at(replace_vertex(f, v, 1), v, 0)

    return c.map_forests(op)


def interior_euler_I(c: FormCombo) -> FormCombo:
    """I = wedge of E at the covertex with the highest label."""
    _require(c, lambda n, p: p >= 1, "the interior Euler operator needs a covertex")
    return wedge(euler_Eq(c, 0, top_covertex))


def delta_V(c: FormCombo) -> FormCombo:
    return interior_euler_I(d_V(c))
