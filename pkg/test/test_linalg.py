from fractions import Fraction

import numpy as np
import pytest

from core.errors import InconsistentSystemError
from core.linalg import SparseRationalMatrix, is_consistent, kernel, pairing, rank, solve, span_rank


def dense(rows):
    return SparseRationalMatrix.from_dense(rows)


class TestRank:
    def test_repeated_rows(self):
        assert rank(dense([[1, 1], [1, 1]])) == 1

    def test_identity(self):
        assert rank(dense([[1, 0, 0], [0, 1, 0], [0, 0, 1]])) == 3

    def test_zero(self):
        m = SparseRationalMatrix(3, 4)
        assert rank(m) == 0
        assert len(kernel(m)) == 4

    def test_fractions(self):
        m = dense([[Fraction(1, 2), Fraction(1, 3)], [3, 2]])
        assert rank(m) == 1

    def test_transpose_keeps_rank(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            rows = rng.integers(-2, 3, size=(4, 6)).tolist()
            m = dense(rows)
            assert rank(m) == rank(m.transpose())
            assert rank(m) == np.linalg.matrix_rank(np.array(rows, dtype=float))

    def test_rref_is_reduced(self):
        m = dense([[2, 4, 1], [1, 2, 3]])
        assert m.pivots == [0, 2]
        assert m.rref[0] == {0: Fraction(1), 1: Fraction(2)}
        assert m.rref[2] == {2: Fraction(1)}


class TestKernel:
    def test_kernel_vectors_are_annihilated(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            m = dense(rng.integers(-3, 4, size=(3, 5)).tolist())
            vectors = kernel(m)
            assert len(vectors) == m.n_cols - rank(m)
            for v in vectors:
                assert m.apply(v) == {}

    def test_one_free_column(self):
        assert kernel(dense([[1, 1]])) == [{0: Fraction(-1), 1: Fraction(1)}]


class TestSolve:
    def test_particular_solution(self):
        m = dense([[1, 2], [3, 4]])
        x = solve(m, {0: 5, 1: 11})
        assert x == {0: Fraction(1), 1: Fraction(2)}

    def test_free_variables_are_zero(self):
        m = dense([[1, 1, 0]])
        assert solve(m, {0: 2}) == {0: Fraction(2)}

    def test_inconsistent(self):
        m = dense([[1, 1], [1, 1]])
        with pytest.raises(InconsistentSystemError):
            solve(m, {0: 1, 1: 2})
        assert not is_consistent(m, {0: 1, 1: 2})
        assert is_consistent(m, {0: 3, 1: 3})

    def test_zero_rhs(self):
        assert solve(dense([[1, 2]]), {}) == {}


class TestHelpers:
    def test_dense_round_trip(self):
        rows = [[0, 1], [Fraction(2, 3), 0]]
        assert dense(rows).to_dense() == rows

    def test_from_columns(self):
        m = SparseRationalMatrix.from_columns(2, [{0: 1}, {1: 2}, {}])
        assert m.shape == (2, 3)
        assert m.column(1) == {1: Fraction(2)}
        assert m.row(0) == {0: Fraction(1)}

    def test_select_columns(self):
        m = dense([[1, 2, 3]]).select_columns([2, 0])
        assert m.to_dense() == [[3, 1]]

    def test_span_rank(self):
        assert span_rank([{0: 1}, {0: 2}, {1: 1}]) == 2
        assert span_rank([]) == 0

    def test_pairing(self):
        assert pairing({0: 2, 3: 1}, {0: Fraction(1, 2), 1: 5}) == 1


class TestDomainMatrixReduction:
    def test_kernel_basis_is_pinned(self):
        m = dense([[1, 2, 0, 3], [2, 4, 1, 10]])
        assert kernel(m) == [
            {1: Fraction(1), 0: Fraction(-2)},
            {3: Fraction(1), 0: Fraction(-3), 2: Fraction(-4)},
        ]

    def test_leftmost_pivots(self):
        m = dense([[0, 3, 6], [0, 1, 5]])
        assert m.pivots == [1, 2]
        assert kernel(m) == [{0: Fraction(1)}]

    def test_rational_entries_are_normalized(self):
        m = dense([[Fraction(2, 3), Fraction(1, 5)], [Fraction(4, 3), 1]])
        assert m.rref == {0: {0: Fraction(1)}, 1: {1: Fraction(1)}}
        assert solve(m, {0: Fraction(1, 3), 1: Fraction(2, 3)}) == {0: Fraction(1, 2)}

    def test_matches_domain_matrix_rank(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            m = dense(rng.integers(-3, 4, size=(4, 5)).tolist())
            assert rank(m) == m.to_domain_matrix().rank()
