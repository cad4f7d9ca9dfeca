from fractions import Fraction

import pytest

from core.errors import PreconditionError
from core.forest import generate, has_one_loop
from core.genfun import (
    PowerSeries,
    aroma_series,
    dimension_table,
    divfree_second_row_defect,
    isomorphic_space_dims,
    row_series,
    t_series,
    tilde_row_series,
)
from core.spaces import dimension, solenoidal_dimension


class TestPowerSeries:
    def test_reciprocal(self):
        one_minus_z = PowerSeries([1, -1], 5)
        assert one_minus_z.reciprocal().integers() == [1] * 6

    def test_exp(self):
        series = PowerSeries.monomial(1, 4).exp()
        assert series.coeffs == [1, 1, Fraction(1, 2), Fraction(1, 6), Fraction(1, 24)]

    def test_dilate_and_shift(self):
        series = PowerSeries([1, 2, 3], 4)
        assert series.dilate(2).integers() == [1, 0, 2, 0, 3]
        assert series.shift(1).integers() == [0, 1, 2, 3, 0]
        assert series.shift(1).shift(-1) == series

    def test_shift_needs_divisibility(self):
        with pytest.raises(PreconditionError):
            PowerSeries([1, 1], 3).shift(-1)

    def test_reciprocal_needs_constant_term(self):
        with pytest.raises(PreconditionError):
            PowerSeries([0, 1], 3).reciprocal()


class TestCountingSeries:
    def test_rooted_trees(self):
        assert t_series(7).integers(1) == [1, 1, 2, 4, 9, 20, 48]

    def test_scalars(self):
        a, a_ring, a_bar = aroma_series(6)
        assert a.integers() == [1, 1, 3, 7, 19, 47, 130]
        assert a_ring + a_bar == a

    @pytest.mark.parametrize("N", [1, 2, 3, 4])
    def test_scalars_by_loops(self, N):
        _, a_ring, a_bar = aroma_series(N)
        scalars = generate(N, 0, 0)
        assert a_ring[N] == sum(1 for f in scalars if has_one_loop(f))
        assert a_bar[N] == sum(1 for f in scalars if not has_one_loop(f))

    def test_truncation_order(self):
        with pytest.raises(PreconditionError):
            t_series(0)


class TestRows:
    @pytest.mark.parametrize("N", [1, 2, 3, 4, 5])
    def test_first_row_counts_forms(self, N):
        b0 = row_series(N)[0]
        for n in range(N + 1):
            assert b0.coeff(n, N) == dimension(N, n, 0), n

    @pytest.mark.parametrize("N", [1, 2, 3])
    def test_second_row_counts_forms(self, N):
        b1 = row_series(N)[1]
        for n in range(N + 1):
            assert b1.coeff(n, N) == dimension(N, n, 1), n

    @pytest.mark.parametrize("N", [1, 2, 3, 4, 5])
    def test_divfree_row_totals(self, N):
        b0_tilde = tilde_row_series(N)[0]
        assert b0_tilde.at(1)[N] == sum(dimension(N, n, 0, True) for n in range(N + 1))

    @pytest.mark.parametrize("N", [1, 2, 3, 4, 5])
    def test_solenoidal_counts(self, N):
        s = row_series(N)[3]
        s_tilde = tilde_row_series(N)[3]
        assert s[N] == solenoidal_dimension(N)
        assert s_tilde[N] == solenoidal_dimension(N, divfree=True)

    def test_functional_forms(self):
        c1 = row_series(9)[2]
        assert c1.integers(1) == [0, 1, 4, 15, 52, 175, 571, 1838, 5834]
        assert tilde_row_series(9)[2] == c1.shift(1)

    def test_divfree_second_row_defect(self):
        _, _, a_bar = aroma_series(8)
        assert divfree_second_row_defect(8) == -a_bar.shift(1)


class TestTables:
    def test_solenoidal_table(self):
        rows = dimension_table(10).solenoidal
        assert [r.psi for r in rows[:8]] == [0, 0, 1, 3, 11, 31, 95, 269]
        assert [r.psi_tilde for r in rows[:8]] == [1, 0, 1, 2, 7, 16, 48, 123]
        last = rows[9]
        assert (last.omega_1, last.self_looped, last.psi, last.psi_tilde) == (7261, 5045, 2216, 937)

    def test_bottom_rows(self):
        row = dimension_table(7).bottom_rows[6]
        assert row.first_row == [0, 7, 102, 338, 343]
        assert row.second_row == [2, 85, 654, 1838, 1838]
        assert row.functional == 571

    def test_second_row_at_order_nine(self):
        # the last two entries agree through the isomorphism between both columns
        row = dimension_table(9).bottom_rows[8]
        assert row.second_row[-1] == row.second_row[-2] == 18363

    @pytest.mark.parametrize("N", [2, 3, 4, 5, 6])
    def test_isomorphic_spaces(self, N):
        dims = isomorphic_space_dims(N)
        assert len(set(dims)) == 1

    def test_isomorphic_spaces_start_at_two(self):
        with pytest.raises(PreconditionError):
            isomorphic_space_dims(1)

    def test_columns(self):
        row = dimension_table(4, n_columns=3).bottom_rows[3]
        assert len(row.first_row) == 3
        assert row.first_row[-1] == dimension(4, 0, 0)
