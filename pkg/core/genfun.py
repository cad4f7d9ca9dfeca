"""
Truncated generating functions for the dimensions of the bicomplex.

Series are exact (Fraction coefficients) and truncated at z^K. Sums over
substituted series t(z^k) stop at k = K, which is exact at that order.

OEIS cross-references: t = A000081, a = A001372, å = A217896, ā = A001373.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, List, Sequence, Tuple

from pydantic import BaseModel

from core.errors import PreconditionError, VerificationError


class PowerSeries:
    """
    Power series in z truncated after z^K

    Args:
        coeffs: Coefficients of z^0, z^1, ...; padded or cut to K + 1 entries
        K: Truncation order
    """

    __slots__ = ("coeffs", "K")

    def __init__(self, coeffs: Sequence, K: int):
        self.K = K
        padded = [Fraction(c) for c in coeffs[: K + 1]]
        self.coeffs: List[Fraction] = padded + [Fraction(0)] * (K + 1 - len(padded))

    @classmethod
    def monomial(cls, k: int, K: int, coeff=1) -> "PowerSeries":
        return cls([0] * k + [coeff], K)

    def __getitem__(self, n: int) -> Fraction:
        return self.coeffs[n] if 0 <= n <= self.K else Fraction(0)

    def __add__(self, other) -> "PowerSeries":
        other = self._lift(other)
        return PowerSeries([a + b for a, b in zip(self.coeffs, other.coeffs)], self.K)

    __radd__ = __add__

    def __neg__(self) -> "PowerSeries":
        return PowerSeries([-a for a in self.coeffs], self.K)

    def __sub__(self, other) -> "PowerSeries":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "PowerSeries":
        return self._lift(other) - self

    def __mul__(self, other) -> "PowerSeries":
        if not isinstance(other, PowerSeries):
            return PowerSeries([a * other for a in self.coeffs], self.K)
        out = [Fraction(0)] * (self.K + 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j in range(self.K + 1 - i):
                    out[i + j] += a * other.coeffs[j]
        return PowerSeries(out, self.K)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "PowerSeries":
        if not isinstance(other, PowerSeries):
            return self * (Fraction(1) / Fraction(other))
        return self * other.reciprocal()

    def __eq__(self, other) -> bool:
        return isinstance(other, PowerSeries) and self.coeffs == other.coeffs

    def _lift(self, value) -> "PowerSeries":
        return value if isinstance(value, PowerSeries) else PowerSeries([value], self.K)

    def reciprocal(self) -> "PowerSeries":
        c0 = self.coeffs[0]
        if not c0:
            raise PreconditionError("reciprocal of a series without constant term")
        out = [Fraction(0)] * (self.K + 1)
        out[0] = 1 / c0
        for n in range(1, self.K + 1):
            acc = sum((self.coeffs[m] * out[n - m] for m in range(1, n + 1)), Fraction(0))
            out[n] = -acc / c0
        return PowerSeries(out, self.K)

    def dilate(self, k: int) -> "PowerSeries":
        """f(z^k)."""
        out = [Fraction(0)] * (self.K + 1)
        for n, a in enumerate(self.coeffs):
            if n * k > self.K:
                break
            out[n * k] = a
        return PowerSeries(out, self.K)

    def shift(self, m: int) -> "PowerSeries":
        """z^m f for m >= 0, f / z^-m for m < 0 (the dropped low terms must vanish)."""
        if m >= 0:
            return PowerSeries([0] * m + self.coeffs, self.K)
        if any(self.coeffs[: -m]):
            raise PreconditionError(f"series is not divisible by z^{-m}")
        return PowerSeries(self.coeffs[-m:], self.K)

    def exp(self) -> "PowerSeries":
        if self.coeffs[0]:
            raise PreconditionError("exp needs a series without constant term")
        out = [Fraction(0)] * (self.K + 1)
        out[0] = Fraction(1)
        for n in range(1, self.K + 1):
            out[n] = sum((m * self.coeffs[m] * out[n - m] for m in range(1, n + 1)), Fraction(0)) / n
        return PowerSeries(out, self.K)

    def integers(self, start: int = 0) -> List[int]:
        values = self.coeffs[start:]
        if any(v.denominator != 1 for v in values):
            raise VerificationError(f"non-integral coefficients in a counting series: {values}")
        return [int(v) for v in values]

    def __repr__(self) -> str:
        return f"PowerSeries({[str(c) for c in self.coeffs]}, K={self.K})"


class BivariateSeries:
    """
    Series in u and z truncated after z^K, polynomial in u at each z-degree

    Args:
        rows: rows[N][k] is the coefficient of u^k z^N
        K: Truncation order in z
    """

    __slots__ = ("rows", "K")

    def __init__(self, rows: Sequence[Sequence], K: int):
        self.K = K
        self.rows: List[List[Fraction]] = [[Fraction(c) for c in row] for row in list(rows)[: K + 1]]
        self.rows += [[] for _ in range(K + 1 - len(self.rows))]

    @classmethod
    def from_series(cls, f: PowerSeries, u_degree: int = 0) -> "BivariateSeries":
        return cls([[0] * u_degree + [c] for c in f.coeffs], f.K)

    def coeff(self, k: int, N: int) -> Fraction:
        row = self.rows[N] if 0 <= N <= self.K else []
        return row[k] if 0 <= k < len(row) else Fraction(0)

    @staticmethod
    def _poly_add(p: List[Fraction], q: List[Fraction]) -> List[Fraction]:
        size = max(len(p), len(q))
        return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(size)]

    @staticmethod
    def _poly_mul(p: List[Fraction], q: List[Fraction]) -> List[Fraction]:
        if not p or not q:
            return []
        out = [Fraction(0)] * (len(p) + len(q) - 1)
        for i, a in enumerate(p):
            if a:
                for j, b in enumerate(q):
                    out[i + j] += a * b
        return out

    def __add__(self, other: "BivariateSeries") -> "BivariateSeries":
        return BivariateSeries([self._poly_add(p, q) for p, q in zip(self.rows, other.rows)], self.K)

    def __mul__(self, other) -> "BivariateSeries":
        if isinstance(other, PowerSeries):
            other = BivariateSeries.from_series(other)
        if not isinstance(other, BivariateSeries):
            return BivariateSeries([[c * other for c in row] for row in self.rows], self.K)
        out: List[List[Fraction]] = [[] for _ in range(self.K + 1)]
        for i, p in enumerate(self.rows):
            for j in range(self.K + 1 - i):
                out[i + j] = self._poly_add(out[i + j], self._poly_mul(p, other.rows[j]))
        return BivariateSeries(out, self.K)

    __rmul__ = __mul__

    def exp(self) -> "BivariateSeries":
        if any(self.rows[0]):
            raise PreconditionError("exp needs a series without z^0 term")
        out: List[List[Fraction]] = [[] for _ in range(self.K + 1)]
        out[0] = [Fraction(1)]
        for n in range(1, self.K + 1):
            acc: List[Fraction] = []
            for m in range(1, n + 1):
                acc = self._poly_add(acc, [m * c for c in self._poly_mul(self.rows[m], out[n - m])])
            out[n] = [c / n for c in acc]
        return BivariateSeries(out, self.K)

    def at(self, u) -> PowerSeries:
        """Specialize u to a number."""
        u = Fraction(u)
        return PowerSeries([sum((c * u ** k for k, c in enumerate(row)), Fraction(0)) for row in self.rows], self.K)

    def column(self, k: int) -> PowerSeries:
        """Series of the u^k coefficients."""
        return PowerSeries([self.coeff(k, N) for N in range(self.K + 1)], self.K)


def _check_order(K: int):
    if K < 1:
        raise PreconditionError(f"truncation order must be at least 1, got {K}")


def _plethystic_sum(f: PowerSeries, weight: Callable[[int], Fraction]) -> PowerSeries:
    total = PowerSeries([], f.K)
    for k in range(1, f.K + 1):
        total = total + f.dilate(k) * weight(k)
    return total


def t_series(K: int) -> PowerSeries:
    """Rooted trees: t = z exp(Σ t(z^k)/k), by fixed-point iteration."""
    _check_order(K)
    t = PowerSeries.monomial(1, K)
    for _ in range(K):
        t = _plethystic_sum(t, lambda k: Fraction(1, k)).exp().shift(1)
    return t


def _t_over_z(K: int) -> PowerSeries:
    """t/z to order K; t itself is taken one order further so the top coefficient is exact."""
    return PowerSeries(t_series(K + 1).coeffs[1:], K)


def aroma_series(K: int) -> Tuple[PowerSeries, PowerSeries, PowerSeries]:
    """(a, å, ā): all scalars, self-looped scalars, non-self-looped scalars.

    ā keeps the empty scalar as its constant term, so z a = t ā and å = a - ā.
    """
    _check_order(K)
    t = t_series(K)
    a = PowerSeries([1], K)
    for k in range(1, K + 1):
        a = a * (1 - t.dilate(k)).reciprocal()
    a_bar = a / _t_over_z(K)
    a_ring = a - a_bar
    return a, a_ring, a_bar


def _b0(K: int) -> BivariateSeries:
    t = t_series(K)
    a, _, _ = aroma_series(K)
    inner = BivariateSeries([[]] * (K + 1), K)
    for k in range(1, K + 1):
        sign = Fraction(1 if k % 2 else -1, k)
        inner = inner + BivariateSeries.from_series(t.dilate(k), u_degree=k) * sign
    return inner.exp() * a


def row_series(K: int) -> Tuple[BivariateSeries, BivariateSeries, PowerSeries, PowerSeries]:
    """(b0, b1, c1, s) for the first two rows, the functional forms and the solenoidal forms."""
    _check_order(K)
    t = t_series(K)
    a, a_ring, _ = aroma_series(K)
    b0 = _b0(K)
    denom = ((1 - t) * (1 - t)).reciprocal()
    # 1 + u - u t
    factor = BivariateSeries([[1, 1]] + [[]] * K, K) + BivariateSeries.from_series(-t, u_degree=1)
    b1 = b0 * factor * (t * denom)
    c1 = (a * t * denom).shift(1)
    s = a * t - a_ring
    return b0, b1, c1, s


def tilde_row_series(K: int) -> Tuple[BivariateSeries, BivariateSeries, PowerSeries, PowerSeries]:
    """1-loop free analogues (b~0, b~1, c~1, s~)."""
    _check_order(K)
    t = t_series(K)
    b0, _, c1, s = row_series(K)
    t_over_z = _t_over_z(K)
    b0_tilde = b0 * t_over_z.reciprocal()
    denom = ((1 - t) * (1 - t)).reciprocal()
    # t + u - u t
    factor = BivariateSeries.from_series(t) + BivariateSeries([[0, 1]] + [[]] * K, K) + BivariateSeries.from_series(-t, u_degree=1)
    b1_tilde = b0 * factor * denom.shift(1)
    c1_tilde = c1.shift(1)
    s_tilde = PowerSeries.monomial(1, K) + s / t_over_z
    return b0_tilde, b1_tilde, c1_tilde, s_tilde


def alternating_row_sum(row: BivariateSeries) -> PowerSeries:
    return row.at(-1)


def divfree_second_row_defect(K: int) -> PowerSeries:
    """b~1(-1, z) - c~1(z); it equals -z ā(z), so the 1-loop free second row is not exact."""
    _, b1_tilde, c1_tilde, _ = tilde_row_series(K)
    return alternating_row_sum(b1_tilde) - c1_tilde


class SolenoidalRow(BaseModel):
    N: int
    omega_1: int
    self_looped: int
    psi: int
    psi_tilde: int


class BottomRowsRow(BaseModel):
    N: int
    first_row: List[int]
    second_row: List[int]
    functional: int


class DimensionTables(BaseModel):
    K: int
    solenoidal: List[SolenoidalRow]
    bottom_rows: List[BottomRowsRow]


def dimension_table(K: int, n_columns: int = 5) -> DimensionTables:
    """Both dimension tables up to order K; row lists run n = n_columns - 1 .. 0."""
    _check_order(K)
    t = t_series(K)
    a, a_ring, _ = aroma_series(K)
    b0, b1, c1, s = row_series(K)
    s_tilde = tilde_row_series(K)[3]
    omega_1 = (a * t).integers()
    solenoidal = []
    for N in range(1, K + 1):
        row = SolenoidalRow(
            N=N,
            omega_1=omega_1[N],
            self_looped=int(a_ring[N]),
            psi=int(s[N]),
            psi_tilde=int(s_tilde[N]),
        )
        if row.psi != row.omega_1 - row.self_looped:
            raise VerificationError(f"|Ψ^{N}| != |Ω_1^{N}| - |Ω̊_0^{N}|")
        solenoidal.append(row)
    bottom = [
        BottomRowsRow(
            N=N,
            first_row=[int(b0.coeff(n, N)) for n in reversed(range(n_columns))],
            second_row=[int(b1.coeff(n, N)) for n in reversed(range(n_columns))],
            functional=int(c1[N]),
        )
        for N in range(1, K + 1)
    ]
    return DimensionTables(K=K, solenoidal=solenoidal, bottom_rows=bottom)


def isomorphic_space_dims(N: int) -> Tuple[int, int, int, int, int]:
    """|Ω_{1,1}^{N-1}|, |Ω_{0,1}^{N-1}|, |I_1^N|, |I~_1^{N+1}|, |Ω~_{0,1}^N|."""
    if N < 2:
        raise PreconditionError("the isomorphic spaces are compared from N = 2 on")
    K = N + 1
    _, b1, c1, _ = row_series(K)
    _, b1_tilde, c1_tilde, _ = tilde_row_series(K)
    return (
        int(b1.coeff(1, N - 1)),
        int(b1.coeff(0, N - 1)),
        int(c1[N]),
        int(c1_tilde[N + 1]),
        int(b1_tilde.coeff(0, N)),
    )
