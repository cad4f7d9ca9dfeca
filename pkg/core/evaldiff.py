"""
Elementary differentials of forms without covertices (p = 0) on polynomial vector fields.

Each node v carries an index i_v and contributes the factor ∂_{I_v} f^{i_v},
where I_v collects the indices of the predecessors of v. Root indices are the
free tensor indices in root order; all other indices are summed over 1..d.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from itertools import product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ValidationError, field_validator
from sympy import QQ, Poly, Rational, Symbol, itermonomials, symbols
from sympy.parsing.sympy_parser import parse_expr
from sympy.polys.orderings import monomial_key

from core.algebra import FormCombo, as_combo, d_H
from core.errors import ConfigError, GradeError, PreconditionError, VerificationError
from core.forest import AromaticForest


def _gens(d: int) -> Tuple[Symbol, ...]:
    return tuple(symbols(f"x1:{d + 1}"))


class FieldPayload(BaseModel):
    d: int
    components: List[str]

    @field_validator("d")
    @classmethod
    def _positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("dimension must be at least 1")
        return value

    @field_validator("components")
    @classmethod
    def _nonempty(cls, value: List[str]) -> List[str]:
        if not value:
            raise ValueError("at least one component is required")
        return value


class PolyVectorField:
    """
    Polynomial vector field with rational coefficients

    Args:
        components: One polynomial (or expression) per coordinate, in x1..xd
    """

    def __init__(self, components: Sequence):
        self.d = len(components)
        if self.d < 1:
            raise PreconditionError("a vector field needs at least one component")
        self.gens = _gens(self.d)
        self.components: Tuple[Poly, ...] = tuple(Poly(c, *self.gens, domain=QQ) for c in components)
        self._derivatives: Dict[Tuple[int, Tuple[int, ...]], Poly] = {}

    @classmethod
    def from_payload(cls, payload: Union[Mapping, FieldPayload]) -> "PolyVectorField":
        """Build from {"d": int, "components": [polynomial strings in x1..xd]}."""
        try:
            data = payload if isinstance(payload, FieldPayload) else FieldPayload.model_validate(payload)
        except ValidationError as e:
            raise ConfigError(f"invalid vector field payload: {e}") from e
        if len(data.components) != data.d:
            raise ConfigError(f"expected {data.d} components, got {len(data.components)}")
        gens = _gens(data.d)
        local = {g.name: g for g in gens}
        exprs = []
        for text in data.components:
            try:
                expr = parse_expr(text, local_dict=local)
            except Exception as e:
                raise ConfigError(f"cannot parse component {text!r}: {e}") from e
            unknown = expr.free_symbols - set(gens)
            if unknown:
                raise ConfigError(f"component {text!r} uses unknown symbols {sorted(map(str, unknown))}")
            exprs.append(expr)
        return cls(exprs)

    def derivative(self, i: int, index: Tuple[int, ...]) -> Poly:
        """∂_index f^i for a sorted multi-index of 0-based coordinates."""
        key = (i, index)
        cached = self._derivatives.get(key)
        if cached is None:
            cached = self.components[i]
            for j in index:
                cached = cached.diff(self.gens[j])
            self._derivatives[key] = cached
        return cached

    def zero(self) -> Poly:
        return Poly(0, *self.gens, domain=QQ)

    def to_payload(self) -> Dict:
        return {"d": self.d, "components": [str(c.as_expr()) for c in self.components]}

    def __repr__(self) -> str:
        return f"PolyVectorField({self.to_payload()['components']})"


class PolyTensor:
    """
    Tensor of polynomials indexed by (i_1, ..., i_n), 0-based

    Args:
        rank: Number of indices n
        d: Range of each index
        entries: Nonzero entries
    """

    def __init__(self, rank: int, d: int, entries: Optional[Mapping[Tuple[int, ...], Poly]] = None):
        self.rank = rank
        self.d = d
        self.entries: Dict[Tuple[int, ...], Poly] = {k: v for k, v in (entries or {}).items() if not v.is_zero}

    def __getitem__(self, index: Tuple[int, ...]) -> Optional[Poly]:
        return self.entries.get(tuple(index))

    def __add__(self, other: "PolyTensor") -> "PolyTensor":
        if (self.rank, self.d) != (other.rank, other.d):
            raise GradeError(f"cannot add tensors of rank {self.rank} and {other.rank}")
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out[k] + v if k in out else v
        return PolyTensor(self.rank, self.d, out)

    def scale(self, a) -> "PolyTensor":
        a = Fraction(a)
        factor = Rational(a.numerator, a.denominator)
        return PolyTensor(self.rank, self.d, {k: v.mul_ground(factor) for k, v in self.entries.items()})

    def is_zero(self) -> bool:
        return not self.entries

    def scalar(self, field: PolyVectorField) -> Poly:
        """Value of a rank 0 tensor."""
        if self.rank != 0:
            raise GradeError(f"tensor of rank {self.rank} is not a scalar")
        return self.entries.get((), field.zero())

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyTensor) or (self.rank, self.d) != (other.rank, other.d):
            return False
        keys = set(self.entries) | set(other.entries)
        return all(
            (self.entries[k] - other.entries[k]).is_zero if k in self.entries and k in other.entries else False
            for k in keys
        )


def _forest_value(f: AromaticForest, field: PolyVectorField) -> PolyTensor:
    if f.n_covertices:
        raise GradeError(f"elementary differentials are evaluated for p = 0 only, got {f.text}")
    d = field.d
    preds = f.predecessors
    summed = [v for v in range(f.order) if v not in f.roots]
    entries: Dict[Tuple[int, ...], Poly] = {}
    for free in product(range(d), repeat=f.n_roots):
        total = field.zero()
        for inner in product(range(d), repeat=len(summed)):
            index = dict(zip(f.roots, free))
            index.update(zip(summed, inner))
            factors = [
                field.derivative(index[v], tuple(sorted(index[u] for u in preds[v])))
                for v in range(f.order)
            ]
            term = reduce(lambda x, y: x * y, factors, Poly(1, *field.gens, domain=QQ))
            total = total + term
        if not total.is_zero:
            entries[free] = total
    return PolyTensor(f.n_roots, d, entries)


def elementary_differential(c: Union[str, AromaticForest, FormCombo], field: PolyVectorField) -> PolyTensor:
    """F(c)(f), linear in c."""
    combo = as_combo(c)
    grade = combo.grade()
    if grade is None:
        return PolyTensor(0, field.d)
    if grade[1]:
        raise GradeError(f"elementary differentials are evaluated for p = 0 only, got p = {grade[1]}")
    out = PolyTensor(grade[0], field.d)
    for f, a in combo.terms.items():
        out = out + _forest_value(f, field).scale(a)
    return out


def divergence(value: Union[PolyTensor, PolyVectorField]) -> Poly:
    """Σ_i ∂_i of a vector field or of a rank 1 tensor."""
    if isinstance(value, PolyVectorField):
        return reduce(lambda x, y: x + y, (value.components[i].diff(value.gens[i]) for i in range(value.d)))
    if value.rank != 1:
        raise GradeError(f"divergence needs a rank 1 tensor, got rank {value.rank}")
    gens = _gens(value.d)
    total = Poly(0, *gens, domain=QQ)
    for (i,), entry in value.entries.items():
        total = total + entry.diff(gens[i])
    return total


def check_dH_identity(gamma: Union[str, AromaticForest, FormCombo], field: PolyVectorField) -> bool:
    """Div F(γ)(f) == F(d_H γ)(f), exactly."""
    combo = as_combo(gamma)
    if combo.grade() not in (None, (1, 0)):
        raise GradeError(f"the divergence identity is checked on one-root forms, got {combo.grade()}")
    lhs = divergence(elementary_differential(combo, field)) if combo else field.zero()
    rhs = elementary_differential(d_H(combo), field).scalar(field) if combo else field.zero()
    return (lhs - rhs).is_zero


def _random_poly(gens: Sequence[Symbol], deg: int, rng: np.random.Generator) -> Poly:
    monomials = sorted(itermonomials(list(gens), deg), key=monomial_key("grlex", list(reversed(gens))))
    coeffs = rng.integers(-3, 4, size=len(monomials))
    return Poly(sum(int(a) * m for a, m in zip(coeffs, monomials)), *gens, domain=QQ)


def random_field(d: int, deg: int, seed: int) -> PolyVectorField:
    """Random polynomial field of total degree at most deg, integer coefficients in [-3, 3]."""
    if d < 1:
        raise PreconditionError("dimension must be at least 1")
    rng = np.random.default_rng(seed)
    gens = _gens(d)
    return PolyVectorField([_random_poly(gens, deg, rng) for _ in range(d)])


def divfree_field_from_potential(potential: Mapping[Tuple[int, int], object], d: int) -> PolyVectorField:
    """f^i = Σ_j ∂_j A^{ij} for the antisymmetric A given by its entries with i < j (0-based)."""
    gens = _gens(d)
    comps = [Poly(0, *gens, domain=QQ) for _ in range(d)]
    for (i, j), entry in potential.items():
        if i >= j:
            raise PreconditionError(f"potential entries are given for i < j, got ({i}, {j})")
        a = Poly(entry, *gens, domain=QQ)
        comps[i] = comps[i] + a.diff(gens[j])
        comps[j] = comps[j] - a.diff(gens[i])
    return PolyVectorField(comps)


def random_divfree_field(d: int, deg: int, seed: int) -> PolyVectorField:
    if d < 2:
        raise PreconditionError("divergence-free polynomial fields need d >= 2")
    rng = np.random.default_rng(seed)
    gens = _gens(d)
    potential = {(i, j): _random_poly(gens, deg + 1, rng) for i in range(d) for j in range(i + 1, d)}
    field = divfree_field_from_potential(potential, d)
    if not divergence(field).is_zero:
        raise VerificationError("generated field is not divergence-free")
    return field


def check_solenoidal_numeric(
    c: Union[str, FormCombo],
    divfree: bool = False,
    trials: int = 3,
    seed: int = 0,
    d: int = 3,
    deg: int = 2,
) -> bool:
    """F(d_H c)(f) vanishes on `trials` random fields (divergence-free ones with divfree)."""
    combo = as_combo(c)
    if combo.grade() not in (None, (1, 0)):
        raise GradeError(f"solenoidal checks take one-root forms, got {combo.grade()}")
    if not combo:
        return True
    image = d_H(combo)
    for trial in range(trials):
        field = random_divfree_field(d, deg, seed + trial) if divfree else random_field(d, deg, seed + trial)
        if not elementary_differential(image, field).scalar(field).is_zero:
            return False
    return True
