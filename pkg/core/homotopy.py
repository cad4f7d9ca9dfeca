"""
Homotopy operators of the aromatic bicomplex.

Every operator is applied forest by forest with the order |γ| of that forest,
so combinations mixing several orders are handled linearly.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Tuple

from core.algebra import (
    FormCombo,
    _dH_forest,
    _require,
    d_H,
    d_V,
    drop_one_loops,
    euler_E,
    euler_E_at,
    euler_Eq,
    euler_Estar,
    euler_terms_at,
    graft_trailing,
    interior_euler_I,
    last_root,
    top_covertex,
    wedge,
)
from core.errors import PreconditionError, VerificationError
from core.forest import AromaticForest, VERTEX, has_one_loop, one_loop_nodes, replace_covertex


def _per_forest(c: FormCombo, op) -> FormCombo:
    out = FormCombo()
    for f, a in c.terms.items():
        out = out + op(f) * a
    return out


# --- Vertical ---------------------------------------------------------------


def h_V(c: FormCombo) -> FormCombo:
    """(p/|γ|) γ with its top covertex turned back into a vertex."""
    _require(c, lambda n, p: p >= 1, "h_V needs a covertex")

    def op(f: AromaticForest):
        p = f.n_covertices
        return ((replace_covertex(f, p), Fraction(p, f.order)),)

    return wedge(c.map_forests(op))


# --- Horizontal -------------------------------------------------------------


@lru_cache(maxsize=1 << 14)
def _hH_forest(f: AromaticForest) -> FormCombo:
    n, N = f.n_roots, f.order
    if N == 0:
        return FormCombo()
    out = FormCombo()
    single = FormCombo.of(f)
    for q in range(N):
        e = euler_Eq(single, q + 1)
        if e:
            out = out + graft_trailing(e, q, q + 1) * Fraction(n + 1, q + n + 1)
    return wedge(out) / N


def h_H(c: FormCombo) -> FormCombo:
    return _per_forest(c, _hH_forest)


def variational_identity_check(c: FormCombo) -> FormCombo:
    """Residual (d_H h_H + h_V E°) c - c on scalars."""
    _require(c, lambda n, p: n == 0 and p == 0, "the variational identity is stated on scalars")
    return d_H(h_H(c)) + h_V(euler_Estar(c)) - c


def horizontal_identity_residual(c: FormCombo) -> FormCombo:
    """Residual (d_H h_H + h_H d_H) c - c for forms with at least one root."""
    _require(c, lambda n, p: n >= 1, "the horizontal identity needs n >= 1")
    return d_H(h_H(c)) + h_H(d_H(c)) - c


def vertical_identity_residual(c: FormCombo) -> FormCombo:
    """Residual (d_V h_V + h_V d_V) c - c; the first term is absent when p = 0."""
    grade = c.grade()
    down = d_V(h_V(c)) if grade and grade[1] >= 1 else FormCombo()
    return down + h_V(d_V(c)) - c


# --- Divergence-free horizontal ---------------------------------------------


def _reject_one_loops(c: FormCombo):
    for f in c.terms:
        if has_one_loop(f):
            raise PreconditionError(f"{f.text} contains a 1-loop")


def d_H_divfree(c: FormCombo) -> FormCombo:
    return drop_one_loops(d_H(c))


@lru_cache(maxsize=1 << 14)
def _hH_divfree_forest(f: AromaticForest) -> FormCombo:
    n, N = f.n_roots, f.order
    if N == 0:
        return FormCombo()
    out = FormCombo()
    for v in range(N):
        offset = 0 if v in f.roots else 1
        for q in range(N):
            e = FormCombo(euler_terms_at(f, v, q + 1))
            if e:
                out = out + graft_trailing(e, q, q + 1) * Fraction(n + 1, q + n + offset)
    return drop_one_loops(wedge(out) / N)


def h_H_divfree(c: FormCombo) -> Tuple[FormCombo, FormCombo]:
    """Divergence-free horizontal homotopy and its remainder E_r c / |c| (one root only)."""
    _reject_one_loops(c)
    h = _per_forest(c, _hH_divfree_forest)
    remainder = FormCombo()
    for f, a in c.terms.items():
        if f.n_roots == 1:
            remainder = remainder + euler_E_at(FormCombo.of(f), last_root) * (a / f.order)
    return h, drop_one_loops(remainder)


def divfree_identity_residual(c: FormCombo) -> FormCombo:
    """(d_H h~ + h~ d_H) c - c + R c, all modulo 1-loops."""
    _require(c, lambda n, p: n >= 1, "the horizontal identity needs n >= 1")
    h, remainder = h_H_divfree(c)
    back, _ = h_H_divfree(d_H_divfree(c))
    return d_H_divfree(h) + back - c + remainder


def _divfree_shifted(c: FormCombo, euler) -> FormCombo:
    _reject_one_loops(c)
    out = FormCombo()
    for N in c.orders:
        if N <= 1:
            raise PreconditionError("the simpler divergence-free identity needs N > 1")
        piece = c.homogeneous(N)
        shifted = piece + drop_one_loops(euler(piece)) / (N - 1)
        out = out + h_H_divfree(shifted)[0]
    return out


def h_H_divfree_first(c: FormCombo) -> FormCombo:
    """h~(1 + E/(N-1)), applied to d_H of a one-root form."""
    return _divfree_shifted(c, euler_E)


def h_H_divfree_second(c: FormCombo) -> FormCombo:
    """h~(1 + E_r/(N-1)) on one-root forms."""
    return _divfree_shifted(c, lambda x: euler_E_at(x, last_root))


def h_H_divfree_simple(c: FormCombo) -> Tuple[FormCombo, FormCombo]:
    """Pair (h~1 d_H c, h~2 c); c = d_H(second) + first modulo 1-loops."""
    _require(c, lambda n, p: n == 1, "the simpler identity is stated for one root")
    _reject_one_loops(c)
    return h_H_divfree_first(d_H_divfree(c)), h_H_divfree_second(c)


# --- Augmented --------------------------------------------------------------


@lru_cache(maxsize=1 << 14)
def _aug_hH_forest(f: AromaticForest) -> FormCombo:
    out = FormCombo()
    single = FormCombo.of(f)
    for q in range(1, f.order + 1):
        e = euler_Eq(single, q, top_covertex)
        if e:
            out = out + graft_trailing(e, q - 1, q) / q
    return wedge(out)


def aug_h_H(c: FormCombo) -> FormCombo:
    _require(c, lambda n, p: n == 0 and p >= 1, "the augmented horizontal homotopy acts on Ω_{0,p}, p >= 1")
    return _per_forest(c, _aug_hH_forest)


def aug_h_V(c: FormCombo) -> FormCombo:
    return interior_euler_I(h_V(c))


# --- Integration by parts ---------------------------------------------------


def _theta(f: AromaticForest, v: int) -> AromaticForest:
    succ = list(f.succ)
    succ[v] = -1
    return AromaticForest(f.labels, tuple(succ), f.roots + (v,))


def ibp_homotopy(c: FormCombo, pick: str = "first") -> FormCombo:
    """Horizontal homotopy by repeatedly opening 1-loops on vertices.

    Args:
        c: Scalars (no roots)
        pick: Open the eligible (forest text, vertex) pair that sorts "first" or "last"

    When several 1-loops are eligible, the opening order changes the result by a
    d_H-closed form; d_H of the output is the same. The usual values on "<b[b[b]]>",
    "<b[b],b>" and "<b[b,b]>" come from pick="last", the one on "<b,b> <b>" from
    pick="first".
    """
    _require(c, lambda n, p: n == 0, "integration by parts acts on forms without roots")
    if pick not in ("first", "last"):
        raise PreconditionError(f"unknown pick strategy {pick!r}")
    hat = FormCombo()
    for N in c.orders:
        piece = c.homogeneous(N)
        hat = hat + piece - (euler_E(piece) / N if N else FormCombo())
    result = FormCombo()
    while True:
        eligible = sorted(
            (f.text, v, f)
            for f in hat.terms
            for v in one_loop_nodes(f)
            if f.labels[v] == VERTEX
        )
        if not eligible:
            break
        _, v, tau = eligible[0] if pick == "first" else eligible[-1]
        a = hat.terms[tau]
        opened = _theta(tau, v)
        result.add_term(opened, a)
        hat = hat - FormCombo(_dH_forest(opened)) * a
    return wedge(result)


# --- Higher antiderivatives -------------------------------------------------


def nth_antiderivative(c: FormCombo, n: int) -> FormCombo:
    """h^(n) c with D^n(h^(n) c) = c, defined when E^p c = 0 for p < n."""
    for p in range(n):
        if euler_Eq(c, p):
            raise PreconditionError(f"E^{p} does not vanish on the input, no antiderivative of order {n}")
    out = FormCombo()
    for f, a in c.terms.items():
        single = FormCombo.of(f)
        for p in range(n, f.order + 1):
            e = euler_Eq(single, p)
            if e:
                out = out + graft_trailing(e, p - n, p) * (a / (comb(p, n) * f.order))
    if graft_trailing(out, n, n) != c:
        raise VerificationError(f"regrafting the antiderivative of order {n} does not recover the input")
    return out
