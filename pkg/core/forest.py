"""
Aromatic forests: functional graphs with numbered roots and covertices.

A forest is stored as three tuples. ``labels[v]`` is 0 for a vertex and k for
the covertex numbered k, ``succ[v]`` is the successor of v (-1 on roots) and
``roots`` lists the roots in root order. Every structural edit returns a raw
forest; ``canonicalize`` maps it to the unique representative of its
isomorphism class (root and covertex numbering preserved).

Text grammar::

    forest    := "1" | component { " " component }
    component := aroma | tree
    aroma     := "<" node { "," node } ">"
    tree      := node
    node      := ("b" | "o" INT) [ "[" node { "," node } "]" ]

Inside an aroma each listed node points to the next one, the last to the first.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations_with_replacement, permutations, product
from math import factorial
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from core.errors import ForestLabelError, ForestSyntaxError, GradeError, PreconditionError

VERTEX = 0
EMPTY_TEXT = "1"


@dataclass(frozen=True, repr=False)
class AromaticForest:
    """
    Aromatic forest with numbered roots and covertices

    Args:
        labels: Kind of each node (0 = vertex, k = covertex k)
        succ: Successor of each node, -1 exactly on roots
        roots: Roots in root order
    """

    labels: Tuple[int, ...]
    succ: Tuple[int, ...]
    roots: Tuple[int, ...]

    def __repr__(self) -> str:
        return f"AromaticForest({self.text!r})"

    def __str__(self) -> str:
        return self.text

    @property
    def order(self) -> int:
        return len(self.labels)

    @property
    def n_roots(self) -> int:
        return len(self.roots)

    @property
    def n_covertices(self) -> int:
        return sum(1 for label in self.labels if label)

    @property
    def grade(self) -> Tuple[int, int]:
        return self.n_roots, self.n_covertices

    @property
    def vertices(self) -> List[int]:
        return [v for v, label in enumerate(self.labels) if label == VERTEX]

    def covertex(self, k: int) -> int:
        """Node carrying covertex label k."""
        for v, label in enumerate(self.labels):
            if label == k:
                return v
        raise ForestLabelError(f"covertex o{k} not present in {self.text}")

    @cached_property
    def predecessors(self) -> Tuple[Tuple[int, ...], ...]:
        preds: List[List[int]] = [[] for _ in self.labels]
        for v, s in enumerate(self.succ):
            if s >= 0:
                preds[s].append(v)
        return tuple(tuple(p) for p in preds)

    @cached_property
    def cycle_nodes(self) -> frozenset:
        on_cycle = set()
        n = len(self.succ)
        for v in range(n):
            w = self.succ[v]
            for _ in range(n):
                if w < 0:
                    break
                if w == v:
                    on_cycle.add(v)
                    break
                w = self.succ[w]
        return frozenset(on_cycle)

    @cached_property
    def text(self) -> str:
        return print_forest(self)


@dataclass(frozen=True)
class MarkedForest:
    """
    Forest with one marked node and an ordered set of detached roots

    Args:
        base: Underlying forest; detached roots are roots of it
        marked: The marked node
        detached: Detached roots R0, in root order
    """

    base: AromaticForest
    marked: int
    detached: Tuple[int, ...]

    def __str__(self) -> str:
        positions = [self.base.roots.index(r) + 1 for r in self.detached]
        return f"{print_forest(self.base, marked=self.marked)} | R0={positions}"


# --- Text encoding ----------------------------------------------------------


def _head(label: int) -> str:
    return "b" if label == VERTEX else f"o{label}"


def _node_codes(f: AromaticForest, marked: Optional[int] = None) -> List[str]:
    """Canonical encoding of the subtree hanging at every node (cycle edges excluded)."""
    preds = f.predecessors
    on_cycle = f.cycle_nodes
    codes: List[Optional[str]] = [None] * f.order

    def code(v: int) -> str:
        cached = codes[v]
        if cached is not None:
            return cached
        head = _head(f.labels[v])
        if v == marked:
            head += "*"
        kids = sorted(code(c) for c in preds[v] if c not in on_cycle)
        result = head + ("[" + ",".join(kids) + "]" if kids else "")
        codes[v] = result
        return result

    for v in range(f.order):
        code(v)
    return codes  # type: ignore[return-value]


def _cycles(f: AromaticForest) -> List[List[int]]:
    seen = set()
    cycles = []
    for v in sorted(f.cycle_nodes):
        if v in seen:
            continue
        cycle = [v]
        seen.add(v)
        w = f.succ[v]
        while w != v:
            cycle.append(w)
            seen.add(w)
            w = f.succ[w]
        cycles.append(cycle)
    return cycles


def _min_rotation(seq: Sequence[str]) -> Tuple[str, ...]:
    return min(tuple(seq[i:]) + tuple(seq[:i]) for i in range(len(seq)))


def _component_texts(f: AromaticForest, marked: Optional[int] = None) -> Tuple[List[str], List[str]]:
    codes = _node_codes(f, marked)
    aromas = sorted(
        "<" + ",".join(_min_rotation([codes[c] for c in cycle])) + ">" for cycle in _cycles(f)
    )
    return aromas, [codes[r] for r in f.roots]


def print_forest(f: AromaticForest, marked: Optional[int] = None) -> str:
    """Canonical text: aromas sorted, then trees in root order."""
    aromas, trees = _component_texts(f, marked)
    parts = aromas + trees
    return " ".join(parts) if parts else EMPTY_TEXT


class _Parser:
    """Recursive descent over the forest grammar."""

    def __init__(self, text: str, allow_mark: bool = False, check_labels: bool = True):
        self.text = text
        self.pos = 0
        self.allow_mark = allow_mark
        self.check_labels = check_labels
        self.labels: List[int] = []
        self.succ: List[int] = []
        self.roots: List[int] = []
        self.marked: Optional[int] = None

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> Tuple[AromaticForest, Optional[int]]:
        if self.text.strip() == EMPTY_TEXT:
            return AromaticForest((), (), ()), None
        self._skip_spaces()
        if not self.peek():
            raise ForestSyntaxError("empty input", self.pos)
        while self.peek():
            if self.peek() == "<":
                self._aroma()
            else:
                self.roots.append(self._node())
            if self.peek() and self.peek() != " ":
                raise ForestSyntaxError(f"unexpected {self.peek()!r}", self.pos)
            self._skip_spaces()
        if self.check_labels:
            self._validate_labels()
        forest = AromaticForest(tuple(self.labels), tuple(self.succ), tuple(self.roots))
        return forest, self.marked

    def _skip_spaces(self):
        while self.peek() == " ":
            self.pos += 1

    def _new_node(self, label: int) -> int:
        self.labels.append(label)
        self.succ.append(-1)
        return len(self.labels) - 1

    def _node(self) -> int:
        ch = self.peek()
        if ch == "b":
            self.pos += 1
            v = self._new_node(VERTEX)
        elif ch == "o":
            self.pos += 1
            start = self.pos
            while self.peek().isdigit():
                self.pos += 1
            if start == self.pos:
                raise ForestSyntaxError("covertex needs a label", self.pos)
            label = int(self.text[start:self.pos])
            if label < 1:
                raise ForestLabelError(f"covertex label must be positive, got o{label}")
            v = self._new_node(label)
        else:
            raise ForestSyntaxError(f"expected 'b' or 'o<k>', found {ch or 'end of input'!r}", self.pos)

        if self.peek() == "*":
            if not self.allow_mark or self.marked is not None:
                raise ForestSyntaxError("unexpected mark", self.pos)
            self.marked = v
            self.pos += 1

        if self.peek() == "[":
            self.pos += 1
            while True:
                child = self._node()
                self.succ[child] = v
                if self.peek() == ",":
                    self.pos += 1
                elif self.peek() == "]":
                    self.pos += 1
                    break
                else:
                    raise ForestSyntaxError("expected ',' or ']'", self.pos)
        return v

    def _aroma(self):
        self.pos += 1
        cycle = []
        while True:
            cycle.append(self._node())
            if self.peek() == ",":
                self.pos += 1
            elif self.peek() == ">":
                self.pos += 1
                break
            else:
                raise ForestSyntaxError("expected ',' or '>'", self.pos)
        for i, v in enumerate(cycle):
            self.succ[v] = cycle[(i + 1) % len(cycle)]

    def _validate_labels(self):
        used = [label for label in self.labels if label]
        counts = Counter(used)
        duplicates = sorted(k for k, m in counts.items() if m > 1)
        if duplicates:
            raise ForestLabelError(f"duplicate covertex label o{duplicates[0]}")
        if sorted(used) != list(range(1, len(used) + 1)):
            raise ForestLabelError(f"covertex labels {sorted(used)} do not form 1..{len(used)}")


def parse_forest(text: str) -> AromaticForest:
    """Parse the grammar and return the canonical forest."""
    forest, _ = _Parser(text).parse()
    return canonicalize(forest)


@lru_cache(maxsize=1 << 17)
def canonicalize(f: AromaticForest) -> AromaticForest:
    forest, _ = _Parser(print_forest(f), check_labels=False).parse()
    return forest


@lru_cache(maxsize=1 << 17)
def canonicalize_marked(mf: MarkedForest) -> MarkedForest:
    positions = sorted(mf.base.roots.index(r) for r in mf.detached)
    forest, marked = _Parser(print_forest(mf.base, mf.marked), allow_mark=True, check_labels=False).parse()
    return MarkedForest(forest, marked, tuple(forest.roots[i] for i in positions))


# --- Symmetry ---------------------------------------------------------------


def symmetry_order(f: AromaticForest) -> int:
    """Number of automorphisms fixing kinds, edges, root numbers and covertex labels."""
    preds = f.predecessors
    on_cycle = f.cycle_nodes
    codes = _node_codes(f)

    def sym(v: int) -> int:
        kids = [c for c in preds[v] if c not in on_cycle]
        total = 1
        for c in kids:
            total *= sym(c)
        for m in Counter(codes[c] for c in kids).values():
            total *= factorial(m)
        return total

    total = 1
    aroma_texts = []
    for cycle in _cycles(f):
        seq = [codes[c] for c in cycle]
        rotations = sum(1 for i in range(len(seq)) if seq[i:] + seq[:i] == seq)
        total *= rotations
        for c in cycle:
            total *= sym(c)
        aroma_texts.append("<" + ",".join(_min_rotation(seq)) + ">")
    for m in Counter(aroma_texts).values():
        total *= factorial(m)
    for r in f.roots:
        total *= sym(r)
    return total


# --- Raw edits --------------------------------------------------------------


def graft(f: AromaticForest, r: int, u: int) -> AromaticForest:
    """Add the edge r -> u and drop r from the roots."""
    if r not in f.roots:
        raise PreconditionError(f"node {r} is not a root of {f.text}")
    succ = list(f.succ)
    succ[r] = u
    return AromaticForest(f.labels, tuple(succ), tuple(x for x in f.roots if x != r))


def redirect(f: AromaticForest, v: int, u: int) -> AromaticForest:
    succ = list(f.succ)
    succ[v] = u
    return AromaticForest(f.labels, tuple(succ), f.roots)


def cut_edge(f: AromaticForest, v: int) -> AromaticForest:
    """Remove the edge leaving v; v becomes the last root."""
    if f.succ[v] < 0:
        raise PreconditionError(f"node {v} is already a root of {f.text}")
    succ = list(f.succ)
    succ[v] = -1
    return AromaticForest(f.labels, tuple(succ), f.roots + (v,))


def detach_at(f: AromaticForest, v: int) -> MarkedForest:
    """Cut every edge pointing to v and mark v.

    The former predecessors are appended to the roots in canonical-encoding
    order. A node on a 1-loop is its own predecessor and becomes a detached
    root itself.
    """
    preds = f.predecessors[v]
    succ = list(f.succ)
    for c in preds:
        succ[c] = -1
    cut = AromaticForest(f.labels, tuple(succ), f.roots)
    codes = _node_codes(cut)
    new_roots = tuple(sorted(preds, key=lambda c: (codes[c], c)))
    return MarkedForest(AromaticForest(f.labels, tuple(succ), f.roots + new_roots), v, new_roots)


def replace_vertex(f: AromaticForest, v: int, k: int) -> AromaticForest:
    if f.labels[v] != VERTEX:
        raise ForestLabelError(f"node {v} of {f.text} is already a covertex")
    if k in f.labels:
        raise ForestLabelError(f"covertex label o{k} already used in {f.text}")
    labels = list(f.labels)
    labels[v] = k
    return AromaticForest(tuple(labels), f.succ, f.roots)


def replace_covertex(f: AromaticForest, k: int) -> AromaticForest:
    v = f.covertex(k)
    labels = list(f.labels)
    labels[v] = VERTEX
    return AromaticForest(tuple(labels), f.succ, f.roots)


def relabel(f: AromaticForest, root_order: Sequence[int], label_map: Dict[int, int]) -> AromaticForest:
    """Reorder the roots (positions into f.roots) and rename covertex labels."""
    labels = tuple(label_map.get(label, label) if label else VERTEX for label in f.labels)
    return AromaticForest(labels, f.succ, tuple(f.roots[i] for i in root_order))


# --- Structure --------------------------------------------------------------


def one_loop_nodes(f: AromaticForest) -> List[int]:
    return [v for v, s in enumerate(f.succ) if s == v]


def has_one_loop(f: AromaticForest) -> bool:
    return any(s == v for v, s in enumerate(f.succ))


def self_loop_types(f: AromaticForest) -> Dict[str, int]:
    """Tree code hanging at each 1-loop node -> smallest such node, in code order."""
    codes = _node_codes(f)
    types: Dict[str, int] = {}
    for v in one_loop_nodes(f):
        types.setdefault(codes[v], v)
    return dict(sorted(types.items()))


def components(f: AromaticForest) -> List[List[int]]:
    """Node sets of the connected components, in node order."""
    parent = list(range(f.order))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for v, s in enumerate(f.succ):
        if s >= 0:
            parent[find(v)] = find(s)
    groups: Dict[int, List[int]] = {}
    for v in range(f.order):
        groups.setdefault(find(v), []).append(v)
    return sorted(groups.values())


def orbit_key(f: AromaticForest) -> str:
    """Text of the smallest forest obtained by reordering roots and renaming covertices."""
    p = f.n_covertices
    best = None
    for perm in permutations(range(1, p + 1)):
        g = relabel(f, range(f.n_roots), {k + 1: perm[k] for k in range(p)})
        aromas, trees = _component_texts(g)
        key = " ".join(aromas + sorted(trees)) or EMPTY_TEXT
        if best is None or key < best:
            best = key
    return best  # type: ignore[return-value]


def bamboo(N: int) -> AromaticForest:
    """The chain tree b[b[...]] with N nodes."""
    if N < 1:
        raise PreconditionError(f"bamboo needs at least one node, got {N}")
    return parse_forest("b[" * (N - 1) + "b" + "]" * (N - 1))


def is_bamboo(f: AromaticForest) -> bool:
    return f.n_roots == 1 and f.order >= 1 and f.text == bamboo(f.order).text


# --- Generation -------------------------------------------------------------


@lru_cache(maxsize=None)
def _partitions(n: int) -> Tuple[Tuple[int, ...], ...]:
    """Partitions of n into non-increasing parts."""
    if n == 0:
        return ((),)
    result = []
    for first in range(n, 0, -1):
        for rest in _partitions(n - first):
            if not rest or first >= rest[0]:
                result.append((first,) + rest)
    return tuple(result)


def _compositions(n: int, k: int) -> Iterable[Tuple[int, ...]]:
    if k == 0:
        if n == 0:
            yield ()
        return
    for first in range(1, n - k + 2):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def rooted_tree_codes(n: int) -> Tuple[str, ...]:
    """Canonical codes of all unlabelled rooted trees with n vertices."""
    if n == 1:
        return ("b",)
    codes = set()
    for partition in _partitions(n - 1):
        choices = [
            list(combinations_with_replacement(rooted_tree_codes(size), count))
            for size, count in Counter(partition).items()
        ]
        for selection in product(*choices):
            kids = sorted(code for group in selection for code in group)
            codes.add("b[" + ",".join(kids) + "]")
    return tuple(sorted(codes))


@lru_cache(maxsize=None)
def aroma_texts(n: int) -> Tuple[str, ...]:
    """Connected aromas with n vertices: necklaces of rooted trees."""
    texts = set()
    for length in range(1, n + 1):
        for sizes in _compositions(n, length):
            for seq in product(*(rooted_tree_codes(s) for s in sizes)):
                if tuple(seq) == _min_rotation(seq):
                    texts.add("<" + ",".join(seq) + ">")
    return tuple(sorted(texts))


@lru_cache(maxsize=None)
def _scalar_multisets(n: int, smallest: Tuple[int, str]) -> Tuple[Tuple[str, ...], ...]:
    """Multisets of aromas of total size n, each aroma not below `smallest`."""
    if n == 0:
        return ((),)
    result = []
    for size in range(smallest[0], n + 1):
        for text in aroma_texts(size):
            if (size, text) < smallest:
                continue
            for rest in _scalar_multisets(n - size, (size, text)):
                result.append((text,) + rest)
    return tuple(result)


def scalar_texts(n: int) -> List[str]:
    return [" ".join(sorted(m)) for m in _scalar_multisets(n, (1, ""))]


@lru_cache(maxsize=None)
def generate(N: int, n: int, p: int = 0, divfree: bool = False) -> Tuple[AromaticForest, ...]:
    """All forests of F_{n,p}^N (1-loop free ones when divfree), sorted by text."""
    if min(N, n, p) < 0 or p > N:
        raise GradeError(f"invalid grade N={N}, n={n}, p={p}")
    if n > N:
        return ()
    plain = set()
    for m in range(0, N - n + 1):
        if n == 0 and m != N:
            continue
        for scalar in scalar_texts(m):
            for sizes in _compositions(N - m, n):
                for trees in product(*(rooted_tree_codes(s) for s in sizes)):
                    parts = ([scalar] if scalar else []) + list(trees)
                    plain.add(canonicalize(_Parser(" ".join(parts) or EMPTY_TEXT).parse()[0]))
    if p == 0:
        forests = plain
    else:
        forests = set()
        for f in plain:
            for nodes in permutations(range(N), p):
                labels = list(f.labels)
                for k, v in enumerate(nodes, start=1):
                    labels[v] = k
                forests.add(canonicalize(AromaticForest(tuple(labels), f.succ, f.roots)))
    if divfree:
        forests = {f for f in forests if not has_one_loop(f)}
    return tuple(sorted(forests, key=lambda f: f.text))
