"""
Exact linear algebra over the forest bases.

A SpaceBasis holds one representative per root/covertex relabelling orbit with
a nonvanishing wedge; its elements are the forms ∧γ. Operators become
SparseRationalMatrix columns through BasisMap. Everything is cached per grade.
"""

from __future__ import annotations

from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations, product
from typing import Callable, Dict, List, Literal, Mapping, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel

from core.algebra import (
    FormCombo,
    _wedge_forest,
    d_H,
    d_V,
    delta_V,
    drop_one_loops,
    interior_euler_I,
    symmetry_scale,
    wedge,
)
from core.errors import GradeError, InconsistentSystemError, PreconditionError
from core.forest import (
    AromaticForest,
    bamboo,
    canonicalize,
    cut_edge,
    generate,
    has_one_loop,
    one_loop_nodes,
    orbit_key,
    parse_forest,
    redirect,
    self_loop_types,
)
from core.linalg import Row, SparseRationalMatrix, kernel, pairing, rank, solve

# --- Bases ------------------------------------------------------------------


@dataclass(frozen=True)
class SpaceBasis:
    """
    Basis {∧γ} of Ω_{n,p}^N (or of its 1-loop free quotient)

    Args:
        N: Order
        n: Number of roots
        p: Number of covertices
        divfree: Whether forests with a 1-loop are quotiented out
        representatives: One canonical forest per orbit, sorted by text
        weights: Coefficient of each representative in its own wedge
    """

    N: int
    n: int
    p: int
    divfree: bool
    representatives: Tuple[AromaticForest, ...]
    weights: Tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.representatives)

    @cached_property
    def index(self) -> Dict[AromaticForest, int]:
        return {f: j for j, f in enumerate(self.representatives)}

    def element(self, j: int) -> FormCombo:
        return wedge(FormCombo.of(self.representatives[j]))

    def coordinates(self, c: FormCombo) -> Row:
        """Coordinates of ∧c; the wedge is applied first, so raw combos are accepted."""
        w = wedge(c)
        if self.divfree:
            w = drop_one_loops(w)
        coords: Row = {}
        for f, a in w.terms.items():
            if f.grade != (self.n, self.p) or f.order != self.N:
                raise GradeError(f"{f.text} is not in the space of order {self.N}, n={self.n}, p={self.p}")
            j = self.index.get(f)
            if j is not None:
                coords[j] = a / self.weights[j]
        return coords

    def combo(self, coords: Mapping[int, Fraction]) -> FormCombo:
        out = FormCombo()
        for j, a in sorted(coords.items()):
            out = out + self.element(j) * a
        return out

    def to_records(self) -> List[Dict[str, str]]:
        return [{"index": str(j), "forest": f.text} for j, f in enumerate(self.representatives)]


@lru_cache(maxsize=None)
def basis(N: int, n: int, p: int = 0, divfree: bool = False) -> SpaceBasis:
    if min(N, n, p) < 0:
        raise GradeError(f"invalid grade N={N}, n={n}, p={p}")
    forests = generate(N, n, p, divfree) if p <= N else ()
    orbits: Dict[str, AromaticForest] = {}
    for f in forests:
        orbits.setdefault(orbit_key(f), f)
    reps, weights = [], []
    for f in sorted(orbits.values(), key=lambda g: g.text):
        weight = dict(_wedge_forest(f)).get(f, Fraction(0))
        if weight:
            reps.append(f)
            weights.append(weight)
    return SpaceBasis(N, n, p, divfree, tuple(reps), tuple(weights))


def dimension(N: int, n: int, p: int = 0, divfree: bool = False) -> int:
    return len(basis(N, n, p, divfree))


def random_form(N: int, n: int, p: int, rng: np.random.Generator, divfree: bool = False, terms: int = 3) -> FormCombo:
    """Random integer combination of up to `terms` basis elements of Ω_{n,p}^N."""
    space = basis(N, n, p, divfree)
    if not len(space):
        return FormCombo()
    picks = rng.choice(len(space), size=min(terms, len(space)), replace=False)
    coeffs = rng.integers(1, 4, size=len(picks)) * rng.choice([-1, 1], size=len(picks))
    return space.combo({int(j): Fraction(int(a)) for j, a in zip(picks, coeffs)})


# --- Operator matrices ------------------------------------------------------


@dataclass(frozen=True)
class BasisMap:
    """Matrix of a linear operator between two bases (columns = images of source elements)."""

    name: str
    source: SpaceBasis
    target: SpaceBasis
    matrix: SparseRationalMatrix

    @property
    def rank(self) -> int:
        return rank(self.matrix)

    @property
    def nullity(self) -> int:
        return len(self.source) - self.rank

    def kernel_combos(self) -> List[FormCombo]:
        return [self.source.combo(v) for v in kernel(self.matrix)]


def _assemble(name: str, source: SpaceBasis, target: SpaceBasis, op: Callable[[FormCombo], FormCombo], threads: int) -> BasisMap:
    def column(j: int) -> Row:
        return target.coordinates(op(source.element(j)))

    indices = range(len(source))
    if threads > 1 and len(source) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            columns = list(pool.map(column, indices))
    else:
        columns = [column(j) for j in indices]
    return BasisMap(name, source, target, SparseRationalMatrix.from_columns(len(target), columns))


@lru_cache(maxsize=None)
def matrix_dH(N: int, n: int, p: int = 0, divfree: bool = False, threads: int = 1) -> BasisMap:
    if n < 1:
        raise GradeError("d_H needs at least one root")
    return _assemble("d_H", basis(N, n, p, divfree), basis(N, n - 1, p, divfree), d_H, threads)


@lru_cache(maxsize=None)
def matrix_dV(N: int, n: int, p: int = 0, divfree: bool = False, threads: int = 1) -> BasisMap:
    return _assemble("d_V", basis(N, n, p, divfree), basis(N, n, p + 1, divfree), d_V, threads)


@lru_cache(maxsize=None)
def matrix_I(N: int, p: int, divfree: bool = False, threads: int = 1) -> BasisMap:
    if p < 1:
        raise GradeError("the interior Euler operator needs p >= 1")
    space = basis(N, 0, p, divfree)
    return _assemble("I", space, space, interior_euler_I, threads)


@lru_cache(maxsize=None)
def matrix_delta_V(N: int, p: int = 0, divfree: bool = False, threads: int = 1) -> BasisMap:
    """δ_V = I∘d_V on Ω_{0,p}; at p = 0 this is E°."""
    return _assemble("delta_V", basis(N, 0, p, divfree), basis(N, 0, p + 1, divfree), delta_V, threads)


def solenoidal_dimension(N: int, divfree: bool = False, threads: int = 1) -> int:
    """dim Ker d_H on Ω_1^N."""
    return matrix_dH(N, 1, 0, divfree, threads).nullity


# --- Solenoidal forms -------------------------------------------------------


def solenoidal_generators(N: int, divfree: bool = False) -> List[FormCombo]:
    """d_H∧γ for every γ in the basis of Ω_2^N; "b" joins at order 1 in the 1-loop free setting."""
    generators = []
    for j in range(dimension(N, 2, 0, divfree)):
        g = d_H(basis(N, 2, 0, divfree).element(j))
        if divfree:
            g = drop_one_loops(g)
        if g:
            generators.append(g)
    if divfree and N == 1:
        generators.append(FormCombo.of("b"))
    return generators


def solenoidal_basis(N: int) -> List[FormCombo]:
    """Open the 1-loops of the smallest tree type and of one other type, then apply d_H."""
    elements = []
    for alpha in generate(N, 0, 0):
        types = self_loop_types(alpha)
        if len(types) < 2:
            continue
        nodes = list(types.values())
        first = nodes[0]
        for other in nodes[1:]:
            opened = cut_edge(cut_edge(alpha, first), other)
            elements.append(d_H(wedge(FormCombo.of(opened))))
    return elements


def bamboo_check(c: FormCombo) -> Dict[int, Fraction]:
    """Coefficient of the bamboo tree of each order present in c."""
    grade = c.grade()
    if grade not in (None, (1, 0)):
        raise GradeError(f"bamboo coefficients are read on one-root forms, got {grade}")
    return {N: c.coeff(bamboo(N)) for N in c.orders}


# --- Divergences and annihilators -------------------------------------------


def _as_forest(value: Union[str, AromaticForest]) -> AromaticForest:
    return parse_forest(value) if isinstance(value, str) else canonicalize(value)


def redirect_rho(alpha: Union[str, AromaticForest]) -> FormCombo:
    """Sum over all simultaneous redirections of the 1-loops of alpha to other nodes."""
    alpha = _as_forest(alpha)
    loops = one_loop_nodes(alpha)
    if not loops:
        raise PreconditionError(f"{alpha.text} has no 1-loop to redirect")
    out = FormCombo()
    targets = [[u for u in range(alpha.order) if u != v] for v in loops]
    for choice in product(*targets):
        g = alpha
        for v, u in zip(loops, choice):
            g = redirect(g, v, u)
        out.add_term(g, 1)
    return out


def self_looped_scalars(N: int) -> List[AromaticForest]:
    return [f for f in generate(N, 0, 0) if has_one_loop(f)]


def divergence_basis(N: int) -> List[Tuple[AromaticForest, FormCombo]]:
    """Pairs (α, α + (-1)^(k-1) ρ(α)) over the self-looped scalars α with k 1-loops."""
    pairs = []
    for alpha in self_looped_scalars(N):
        sign = -1 if len(one_loop_nodes(alpha)) % 2 == 0 else 1
        pairs.append((alpha, FormCombo.of(alpha) + redirect_rho(alpha) * sign))
    return pairs


def annihilator_div_basis(N: int) -> List[FormCombo]:
    """One functional per non-self-looped scalar β, written as a combo of duals."""
    rho = [(alpha, len(one_loop_nodes(alpha)), redirect_rho(alpha)) for alpha in self_looped_scalars(N)]
    functionals = []
    for beta in generate(N, 0, 0):
        if has_one_loop(beta):
            continue
        functional = FormCombo.of(beta)
        for alpha, k, image in rho:
            m = image.coeff(beta)
            if m:
                functional.add_term(alpha, -m if k % 2 else m)
        functionals.append(functional)
    return functionals


def annihilator_edge_subsets(beta: Union[str, AromaticForest], per_distinct: bool = False) -> FormCombo:
    """π(β) = Σ_Ê (-1)^|Ê| m(β, Ê) (β with Ê turned into 1-loops)*.

    With per_distinct each resulting graph is counted once, which agrees with
    annihilator_div_basis; the literal sum over edge subsets does not at N = 2.
    """
    beta = _as_forest(beta)
    if beta.grade != (0, 0) or has_one_loop(beta):
        raise PreconditionError(f"{beta.text} is not a non-self-looped scalar")
    out = FormCombo()
    seen = set()
    for size in range(beta.order + 1):
        for subset in combinations(range(beta.order), size):
            g = beta
            for v in subset:
                g = redirect(g, v, v)
            g = canonicalize(g)
            if per_distinct:
                if g in seen:
                    continue
                seen.add(g)
            m = redirect_rho(g).coeff(beta) if size else 1
            out.add_term(g, -m if size % 2 else m)
    return out


def pair(functional: FormCombo, c: FormCombo) -> Fraction:
    """Evaluate a combo of duals γ* on a combo."""
    return sum((a * c.coeff(f) for f, a in functional.terms.items()), Fraction(0))


def image_dual_basis(N: int, threads: int = 1) -> List[FormCombo]:
    """d_H*φ* for the self-looped scalars φ, read off the rows of the d_H matrix."""
    bmap = matrix_dH(N, 1, 0, False, threads)
    functionals = []
    for i, phi in enumerate(bmap.target.representatives):
        if not has_one_loop(phi):
            continue
        functional = FormCombo()
        for j, value in bmap.matrix.row(i).items():
            functional.add_term(bmap.source.representatives[j], value)
        functionals.append(functional)
    return functionals


def dH_adjoint_cut(phi: Union[str, AromaticForest]) -> FormCombo:
    """d_H*φ* = Σ_e m1/m2 (φ cut at e)*, with m1 the coefficient of φ in d_H of the cut."""
    phi = _as_forest(phi)
    if phi.grade != (0, 0):
        raise GradeError(f"d_H* is taken on scalar duals, got {phi.text}")
    cuts = [canonicalize(cut_edge(phi, v)) for v in range(phi.order)]
    multiplicity = defaultdict(int)
    for g in cuts:
        multiplicity[g] += 1
    out = FormCombo()
    for g in cuts:
        m1 = d_H(FormCombo.of(g)).coeff(phi)
        out.add_term(g, Fraction(m1, multiplicity[g]))
    return out


# --- Exactness --------------------------------------------------------------


class ExactnessEntry(BaseModel):
    direction: Literal["horizontal", "vertical", "augmented"]
    n: int
    p: int
    dim_image: int
    dim_kernel: int
    exact: bool
    informational: bool = False
    witness: Optional[str] = None


class ExactnessReport(BaseModel):
    N: int
    divfree: bool
    entries: List[ExactnessEntry]
    exact: bool

    @property
    def defects(self) -> List[ExactnessEntry]:
        return [e for e in self.entries if not e.exact and not e.informational]


def _compare(direction, n, p, outgoing: BasisMap, incoming: Optional[BasisMap], informational=False) -> ExactnessEntry:
    dim_image = incoming.rank if incoming else 0
    dim_kernel = outgoing.nullity
    exact = dim_image == dim_kernel
    witness = None
    if not exact:
        for vector in kernel(outgoing.matrix):
            if incoming is None or not _in_column_space(incoming.matrix, vector):
                witness = outgoing.source.combo(vector).to_text()
                break
    return ExactnessEntry(
        direction=direction,
        n=n,
        p=p,
        dim_image=dim_image,
        dim_kernel=dim_kernel,
        exact=exact,
        informational=informational,
        witness=witness,
    )


def _in_column_space(m: SparseRationalMatrix, vector: Row) -> bool:
    try:
        solve(m, vector)
    except InconsistentSystemError:
        return False
    return True


def exactness_report(N: int, n_max: Optional[int] = None, p_max: Optional[int] = None, divfree: bool = False, threads: int = 1) -> ExactnessReport:
    """Compare image and kernel dimensions at every node of the bicomplex of order N.

    The column n = 0 is closed by E° (p = 0) and by I (p >= 1); in the 1-loop
    free setting those entries are informational.
    """
    n_max = N if n_max is None else min(n_max, N)
    p_max = min(2, N) if p_max is None else min(p_max, N)
    entries = []
    for p in range(p_max + 1):
        for n in range(1, n_max + 1):
            incoming = matrix_dH(N, n + 1, p, divfree, threads) if n + 1 <= N else None
            entries.append(_compare("horizontal", n, p, matrix_dH(N, n, p, divfree, threads), incoming))
        if N >= 1:
            closing = matrix_delta_V(N, 0, divfree, threads) if p == 0 else matrix_I(N, p, divfree, threads)
            entries.append(_compare("augmented", 0, p, closing, matrix_dH(N, 1, p, divfree, threads), informational=divfree))
    for n in range(n_max + 1):
        for p in range(p_max + 1):
            incoming = matrix_dV(N, n, p - 1, divfree, threads) if p >= 1 else None
            entries.append(_compare("vertical", n, p, matrix_dV(N, n, p, divfree, threads), incoming))
    exact = all(e.exact for e in entries if not e.informational)
    return ExactnessReport(N=N, divfree=divfree, entries=entries, exact=exact)


# --- Volume preservation ----------------------------------------------------


class VPCertificate(BaseModel):
    order: int
    divfree: bool
    feasible: bool
    eta: Dict[int, str] = {}
    alpha: Dict[int, List[Dict[str, str]]] = {}
    failed_order: Optional[int] = None
    witness: Optional[str] = None


def _coefficient_combo(b: Mapping[Union[str, AromaticForest], object]) -> FormCombo:
    c = FormCombo()
    for key, value in b.items():
        f = _as_forest(key)
        if f.grade != (1, 0):
            raise GradeError(f"coefficient maps are indexed by one-root forests, got {f.text}")
        c.add_term(f, Fraction(str(value)) if not isinstance(value, (int, Fraction)) else value)
    return c


def vp_certificate(
    b: Mapping[Union[str, AromaticForest], object],
    order: Optional[int] = None,
    divfree: bool = False,
    scaled: bool = False,
    threads: int = 1,
) -> VPCertificate:
    """Solve b = b + d_H η order by order, or return the first obstruction.

    With scaled the map holds B-series coefficients and A_σ is applied first.
    """
    c = _coefficient_combo(b)
    if c.coeff(parse_forest("b")) != 1:
        raise PreconditionError("the coefficient of b must be 1")
    if scaled:
        c = symmetry_scale(c)
    if divfree:
        c = drop_one_loops(c)
    order = max(c.orders) if order is None else order
    cert = VPCertificate(order=order, divfree=divfree, feasible=True)
    for k in range(2, order + 1):
        piece = c.homogeneous(k)
        tall = bamboo(k)
        if piece.coeff(tall):
            return cert.model_copy(update={"feasible": False, "failed_order": k, "witness": f"{tall.text}*"})
        bmap = matrix_dH(k, 2, 0, divfree, threads)
        rhs = bmap.target.coordinates(piece)
        try:
            x = solve(bmap.matrix, rhs)
        except InconsistentSystemError:
            return cert.model_copy(update={"feasible": False, "failed_order": k, "witness": _witness(bmap, piece, rhs, threads)})
        eta = bmap.source.combo(x)
        cert.eta[k] = eta.to_text()
        cert.alpha[k] = [
            {"forest": bmap.source.representatives[j].text, "coeff": str(a)} for j, a in sorted(x.items())
        ]
    return cert


def _witness(bmap: BasisMap, piece: FormCombo, rhs: Row, threads: int) -> str:
    """A functional vanishing on the solenoidal forms but not on piece."""
    if not bmap.source.divfree:
        dual = matrix_dH(bmap.source.N, 1, 0, False, threads)
        coords = dual.source.coordinates(piece)
        for i, phi in enumerate(dual.target.representatives):
            if has_one_loop(phi) and pairing(dual.matrix.row(i), coords):
                return f"d_H*({phi.text}*)"
    for y in kernel(bmap.matrix.transpose()):
        if pairing(y, rhs):
            return " + ".join(f"{a} * {bmap.target.representatives[i].text}*" for i, a in sorted(y.items()))
    raise InconsistentSystemError("no separating functional found")


# --- Rooted trees -----------------------------------------------------------


class TreeObstruction(BaseModel):
    N: int
    trees: int
    standard_kernel: int
    divfree_kernel: int
    ok: bool


def rooted_tree_obstruction(N: int, threads: int = 1) -> TreeObstruction:
    """Dimension of the solenoidal forms spanned by aroma-free trees, with and without 1-loops."""
    dims = []
    trees = 0
    for divfree in (False, True):
        bmap = matrix_dH(N, 1, 0, divfree, threads)
        cols = [j for j, f in enumerate(bmap.source.representatives) if not f.cycle_nodes]
        trees = len(cols)
        sub = bmap.matrix.select_columns(cols)
        dims.append(len(cols) - rank(sub))
    expected = (0, 1 if N == 1 else 0)
    return TreeObstruction(N=N, trees=trees, standard_kernel=dims[0], divfree_kernel=dims[1], ok=tuple(dims) == expected)
