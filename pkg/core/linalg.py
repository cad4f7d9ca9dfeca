"""
Exact sparse linear algebra over the rationals.

Rows are dicts column -> Fraction without stored zeros. Reduction goes through
sympy's sparse DomainMatrix over QQ with ``rref_den(method="CD")``: denominators
are cleared and the elimination is fraction-free (Bareiss-style exact division)
over ZZ. Pivots are the leftmost nonzero columns and the reduced form is
unique, so kernels and particular solutions are reproducible.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Mapping, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from core.errors import InconsistentSystemError

Row = Dict[int, Fraction]


def _to_qq(value) -> object:
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def _to_fraction(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


def to_domain_matrix(rows: Mapping[int, Mapping[int, Fraction]], shape: Tuple[int, int]) -> DomainMatrix:
    """Sparse DomainMatrix over QQ from a dict of sparse rows."""
    dod = {i: {j: _to_qq(v) for j, v in row.items() if v} for i, row in rows.items()}
    return DomainMatrix.from_dod({i: row for i, row in dod.items() if row}, shape, QQ)


def _reduce(rows: Mapping[int, Mapping[int, Fraction]], n_cols: int) -> Dict[int, Row]:
    """Reduced echelon form as a map pivot column -> normalized row."""
    rows = {k: row for k, row in enumerate(rows.values()) if any(row.values())}
    if not rows or not n_cols:
        return {}
    reduced, den, pivots = to_domain_matrix(rows, (len(rows), n_cols)).rref_den(method="CD")
    den = _to_fraction(den)
    dod = reduced.to_dod()
    return {
        lead: {j: _to_fraction(v) / den for j, v in dod.get(k, {}).items() if v}
        for k, lead in enumerate(pivots)
    }


class SparseRationalMatrix:
    """
    Exact rational matrix stored by rows

    Args:
        n_rows: Number of rows
        n_cols: Number of columns
        rows: Sparse rows, row index -> {column index: value}
    """

    def __init__(self, n_rows: int, n_cols: int, rows: Mapping[int, Mapping[int, Fraction]] = None):
        self.n_rows = n_rows
        self.n_cols = n_cols
        self.rows: Dict[int, Row] = {}
        for i, row in (rows or {}).items():
            clean = {j: Fraction(v) for j, v in row.items() if v}
            if clean:
                self.rows[i] = clean

    @classmethod
    def from_columns(cls, n_rows: int, columns: Sequence[Mapping[int, Fraction]]) -> "SparseRationalMatrix":
        rows: Dict[int, Row] = {}
        for j, column in enumerate(columns):
            for i, value in column.items():
                if value:
                    rows.setdefault(i, {})[j] = Fraction(value)
        return cls(n_rows, len(columns), rows)

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence]) -> "SparseRationalMatrix":
        n_cols = len(dense[0]) if dense else 0
        return cls(len(dense), n_cols, {i: dict(enumerate(row)) for i, row in enumerate(dense)})

    def to_dense(self) -> List[List[Fraction]]:
        return [[self.get(i, j) for j in range(self.n_cols)] for i in range(self.n_rows)]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.n_rows, self.n_cols

    def get(self, i: int, j: int) -> Fraction:
        return self.rows.get(i, {}).get(j, Fraction(0))

    def row(self, i: int) -> Row:
        return dict(self.rows.get(i, {}))

    def column(self, j: int) -> Row:
        return {i: row[j] for i, row in self.rows.items() if j in row}

    def transpose(self) -> "SparseRationalMatrix":
        rows: Dict[int, Row] = {}
        for i, row in self.rows.items():
            for j, value in row.items():
                rows.setdefault(j, {})[i] = value
        return SparseRationalMatrix(self.n_cols, self.n_rows, rows)

    def select_columns(self, cols: Sequence[int]) -> "SparseRationalMatrix":
        position = {j: k for k, j in enumerate(cols)}
        rows = {i: {position[j]: v for j, v in row.items() if j in position} for i, row in self.rows.items()}
        return SparseRationalMatrix(self.n_rows, len(cols), rows)

    def apply(self, vector: Mapping[int, Fraction]) -> Row:
        """Matrix-vector product for a sparse column vector."""
        out: Row = {}
        for i, row in self.rows.items():
            total = sum((value * vector[j] for j, value in row.items() if j in vector), Fraction(0))
            if total:
                out[i] = total
        return out

    def to_domain_matrix(self) -> DomainMatrix:
        return to_domain_matrix(self.rows, self.shape)

    @cached_property
    def rref(self) -> Dict[int, Row]:
        return _reduce({i: self.rows[i] for i in sorted(self.rows)}, self.n_cols)

    @property
    def pivots(self) -> List[int]:
        return list(self.rref)

    def __eq__(self, other) -> bool:
        return isinstance(other, SparseRationalMatrix) and self.shape == other.shape and self.rows == other.rows

    def __repr__(self) -> str:
        nnz = sum(len(r) for r in self.rows.values())
        return f"SparseRationalMatrix({self.n_rows}x{self.n_cols}, nnz={nnz})"


def rank(m: SparseRationalMatrix) -> int:
    return len(m.rref)


def kernel(m: SparseRationalMatrix) -> List[Row]:
    """Null space basis, one vector per free column with that entry set to 1."""
    reduced = m.rref
    basis = []
    for free in range(m.n_cols):
        if free in reduced:
            continue
        vector: Row = {free: Fraction(1)}
        for lead, row in reduced.items():
            if free in row:
                vector[lead] = -row[free]
        basis.append(vector)
    return basis


def solve(m: SparseRationalMatrix, rhs: Mapping[int, Fraction]) -> Row:
    """A particular solution of m x = rhs with every free variable at 0."""
    extra = m.n_cols
    augmented = []
    for i in sorted(set(m.rows) | set(rhs)):
        row = dict(m.rows.get(i, {}))
        if rhs.get(i):
            row[extra] = Fraction(rhs[i])
        augmented.append(row)
    reduced = _reduce(dict(enumerate(augmented)), extra + 1)
    if extra in reduced:
        raise InconsistentSystemError(f"no solution: the right-hand side is outside the column space of {m!r}")
    return {lead: row[extra] for lead, row in reduced.items() if extra in row}


def is_consistent(m: SparseRationalMatrix, rhs: Mapping[int, Fraction]) -> bool:
    try:
        solve(m, rhs)
    except InconsistentSystemError:
        return False
    return True


def span_rank(vectors: Sequence[Mapping[int, Fraction]]) -> int:
    """Rank of a list of sparse vectors."""
    n_cols = max((j + 1 for v in vectors for j, value in v.items() if value), default=0)
    return len(_reduce(dict(enumerate(vectors)), n_cols))


def pairing(functional: Mapping[int, Fraction], vector: Mapping[int, Fraction]) -> Fraction:
    return sum((value * vector[j] for j, value in functional.items() if j in vector), Fraction(0))
