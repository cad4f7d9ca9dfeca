import pytest

from conftest import C
from core.algebra import FormCombo, d_H, delta_V, euler_Estar, interior_euler_I
from core.errors import GradeError, PreconditionError
from core.forest import generate
from core.homotopy import (
    aug_h_H,
    aug_h_V,
    d_H_divfree,
    divfree_identity_residual,
    h_H,
    h_H_divfree,
    h_H_divfree_simple,
    h_V,
    horizontal_identity_residual,
    ibp_homotopy,
    nth_antiderivative,
    variational_identity_check,
    vertical_identity_residual,
)

COMPARISON = [
    ("<b>", "b", "b"),
    ("<b[b]>", "0", "0"),
    ("<b,b>", "b[b]", "b[b]"),
    ("<b> <b>", "<b> b", "<b> b"),
    (
        "<b[b[b]]>",
        "1/6 * <b[b]> b + 1/6 * <b> b[b] - 1/6 * b[b,b] - 1/6 * <b,b> b",
        "1/3 * <b> b[b] - 1/3 * <b,b> b",
    ),
    (
        "<b[b],b>",
        "-1/6 * <b[b]> b - 1/6 * <b> b[b] + 1/6 * b[b,b] + 1/6 * <b,b> b",
        "-1/3 * <b> b[b] + 1/3 * <b,b> b",
    ),
    ("<b,b,b>", "b[b[b]]", "b[b[b]]"),
    ("<b[b,b]>", "2/3 * <b[b]> b + 1/3 * b[b,b]", "b[b,b] + 2/3 * <b> b[b] - 2/3 * <b,b> b"),
    ("<b[b]> <b>", "0", "0"),
    ("<b,b> <b>", "1/3 * <b,b> b + 2/3 * <b> b[b]", "<b,b> b + 2/3 * <b[b]> b - 2/3 * b[b,b]"),
    ("<b> <b> <b>", "<b> <b> b", "<b> <b> b"),
]

SINGLE_CHOICE = {"<b>", "<b[b]>", "<b,b>", "<b> <b>", "<b> <b> <b>"}
# pick strategy reproducing the listed ibp value where "first" and "last" disagree
PICK_FOR_ROW = {"<b[b[b]]>": "last", "<b[b],b>": "last", "<b[b,b]>": "last", "<b,b> <b>": "first"}


class TestVertical:
    def test_single_covertex(self):
        assert h_V(C("o1")) == C("b")

    def test_weight(self):
        assert h_V(C("<b[o1]>")) == C("1/2 * <b[b]>")

    def test_needs_covertex(self):
        with pytest.raises(GradeError):
            h_V(C("b"))

    def test_identity(self, random_form):
        for N in range(1, 6):
            for n in range(0, min(N, 2) + 1):
                for p in range(0, min(N, 2) + 1):
                    c = random_form(N, n, p)
                    assert vertical_identity_residual(c) == FormCombo(), (N, n, p)


class TestHorizontal:
    @pytest.mark.parametrize("source, plain, ibp", COMPARISON)
    def test_comparison_rows(self, source, plain, ibp):
        assert h_H(C(source)) == C(plain)
        # several 1-loops may be opened first, the outputs agree up to closed forms
        assert d_H(ibp_homotopy(C(source)) - C(ibp)) == FormCombo()

    @pytest.mark.parametrize("source, ibp", [(s, i) for s, _, i in COMPARISON if s in SINGLE_CHOICE])
    def test_ibp_single_choice_rows(self, source, ibp):
        assert ibp_homotopy(C(source)) == C(ibp)

    @pytest.mark.parametrize("source, plain, ibp", COMPARISON)
    def test_ibp_rows_reached_by_a_pick_order(self, source, plain, ibp):
        outputs = {pick: ibp_homotopy(C(source), pick) for pick in ("first", "last")}
        assert C(ibp) in outputs.values()
        if source in PICK_FOR_ROW:
            pick = PICK_FOR_ROW[source]
            other = "first" if pick == "last" else "last"
            assert outputs[pick] == C(ibp)
            assert outputs[other] != C(ibp)

    def test_operators_differ_by_closed_forms(self):
        for N in range(1, 5):
            for f in generate(N, 0, 0):
                c = FormCombo.of(f)
                assert d_H(h_H(c) - ibp_homotopy(c)) == FormCombo(), f.text

    def test_pick_order_does_not_matter(self):
        for N in range(1, 5):
            for f in generate(N, 0, 0):
                c = FormCombo.of(f)
                assert d_H(ibp_homotopy(c, "first") - ibp_homotopy(c, "last")) == FormCombo(), f.text

    def test_ibp_rejects_roots(self):
        with pytest.raises(GradeError):
            ibp_homotopy(C("b"))
        with pytest.raises(PreconditionError):
            ibp_homotopy(C("<b>"), "middle")

    @pytest.mark.parametrize("source", ["<b,b>", "<b> <b>", "<b[b]>", "<b,b[b]>", "<b> <b,b>"])
    def test_variational_identity_examples(self, source):
        assert variational_identity_check(C(source)) == FormCombo()

    def test_variational_identity(self, random_form):
        for N in range(1, 6):
            assert variational_identity_check(random_form(N, 0, 0)) == FormCombo()

    def test_horizontal_identity(self, random_form):
        for N in range(1, 6):
            for n in range(1, min(N, 3) + 1):
                for p in range(0, min(N, 2) + 1):
                    c = random_form(N, n, p)
                    assert horizontal_identity_residual(c) == FormCombo(), (N, n, p)

    def test_horizontal_identity_needs_root(self):
        with pytest.raises(GradeError):
            horizontal_identity_residual(C("<b>"))

    def test_exact_scalars_are_divergences(self):
        c = C("<b> <b> - <b,b>")
        assert euler_Estar(c) == FormCombo()
        assert d_H(h_H(c)) == c


class TestDivergenceFree:
    def test_order_one_remainder(self):
        h, remainder = h_H_divfree(C("b"))
        assert h == FormCombo()
        assert remainder == C("b")

    def test_solenoidal_form_has_no_remainder(self):
        c = C("<b,b> b - b[b,b]")
        assert d_H_divfree(c) == FormCombo()
        assert h_H_divfree(c)[1] == FormCombo()
        assert divfree_identity_residual(c) == FormCombo()

    def test_rejects_one_loops(self):
        with pytest.raises(PreconditionError):
            h_H_divfree(C("<b> b"))

    def test_identity(self, random_form):
        for N in range(1, 6):
            for n in range(1, min(N, 3) + 1):
                c = random_form(N, n, 0, divfree=True)
                assert divfree_identity_residual(c) == FormCombo(), (N, n)

    def test_no_remainder_above_one_root(self, random_form):
        for N in range(2, 5):
            c = random_form(N, 2, 0, divfree=True)
            assert h_H_divfree(c)[1] == FormCombo()

    def test_simpler_identity(self, random_form):
        for N in range(2, 5):
            c = random_form(N, 1, 0, divfree=True)
            first, second = h_H_divfree_simple(c)
            assert d_H_divfree(second) + first == c

    def test_simpler_identity_fails_at_order_one(self):
        with pytest.raises(PreconditionError):
            h_H_divfree_simple(C("b"))


class TestAugmented:
    def test_interior_plus_boundary(self, random_form):
        for N in range(1, 5):
            for p in (1, 2):
                if p > N:
                    continue
                c = random_form(N, 0, p)
                assert interior_euler_I(c) + d_H(aug_h_H(c)) == c, (N, p)

    def test_vertical_first_column(self, random_form):
        for N in range(1, 5):
            c = interior_euler_I(random_form(N, 0, 1))
            assert delta_V(h_V(c)) + aug_h_V(delta_V(c)) == c, N

    def test_vertical_higher_columns(self, random_form):
        for N in range(2, 5):
            c = interior_euler_I(random_form(N, 0, 2))
            assert delta_V(aug_h_V(c)) + aug_h_V(delta_V(c)) == c, N

    def test_needs_covertex(self):
        with pytest.raises(GradeError):
            aug_h_H(C("<b>"))


class TestAntiderivative:
    def test_loop(self):
        assert nth_antiderivative(C("<b>"), 1) == C("b")

    def test_precondition(self):
        with pytest.raises(PreconditionError, match="E\\^0"):
            nth_antiderivative(C("<b,b>"), 1)

    def test_zero(self):
        assert nth_antiderivative(FormCombo(), 2) == FormCombo()

    def test_divergences(self, random_form):
        for N in range(1, 5):
            gamma = random_form(N, 1, 0)
            c = d_H(gamma)
            out = nth_antiderivative(c, 1)
            assert d_H(out) == c
