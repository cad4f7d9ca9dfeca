import pytest
from sympy import symbols

from core.errors import ConfigError, GradeError, PreconditionError
from core.evaldiff import (
    PolyVectorField,
    check_dH_identity,
    check_solenoidal_numeric,
    divergence,
    divfree_field_from_potential,
    elementary_differential,
    random_divfree_field,
    random_field,
)
from core.forest import generate

x1, x2 = symbols("x1 x2")

PSI3 = "1/2 * <b,b> b + 1/2 * <b[b]> b - 1/2 * <b> b[b] - 1/2 * b[b,b]"


class TestFields:
    def test_divergence(self):
        assert divergence(PolyVectorField([-x2, x1])).is_zero
        assert divergence(PolyVectorField([x1**2, 0])).as_expr() == 2 * x1

    def test_payload(self):
        field = PolyVectorField.from_payload({"d": 2, "components": ["x1*x2", "x2**2 + 1/3"]})
        assert field.d == 2
        assert field.components[0].as_expr() == x1 * x2
        assert PolyVectorField.from_payload(field.to_payload()).components == field.components

    @pytest.mark.parametrize(
        "payload",
        [
            {"d": 0, "components": ["x1"]},
            {"d": 2, "components": ["x1"]},
            {"d": 1, "components": ["y"]},
            {"d": 1, "components": ["x1 +"]},
            {"components": ["x1"]},
        ],
    )
    def test_bad_payload(self, payload):
        with pytest.raises(ConfigError):
            PolyVectorField.from_payload(payload)

    def test_potential(self):
        field = divfree_field_from_potential({(0, 1): x1 * x2}, 2)
        assert [c.as_expr() for c in field.components] == [x1, -x2]

    def test_potential_needs_upper_entries(self):
        with pytest.raises(PreconditionError):
            divfree_field_from_potential({(1, 0): x1}, 2)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_random_divfree_field(self, seed):
        assert divergence(random_divfree_field(3, 2, seed)).is_zero

    def test_random_divfree_needs_two_dimensions(self):
        with pytest.raises(PreconditionError):
            random_divfree_field(1, 2, 0)

    def test_random_field_is_reproducible(self):
        assert random_field(2, 2, 5).components == random_field(2, 2, 5).components


class TestElementaryDifferentials:
    def test_single_vertex(self):
        field = PolyVectorField([x1 * x2, x2])
        value = elementary_differential("b", field)
        assert value.rank == 1
        assert value[(0,)].as_expr() == x1 * x2
        assert value[(1,)].as_expr() == x2

    def test_loop_is_divergence(self):
        field = PolyVectorField([x1**2, x1 * x2])
        value = elementary_differential("<b>", field).scalar(field)
        assert value == divergence(field)

    def test_two_nodes(self):
        # f'f for f = (x2, 0) vanishes, for f = (x1, 0) it is f
        assert elementary_differential("b[b]", PolyVectorField([x2, 0])).is_zero()
        value = elementary_differential("b[b]", PolyVectorField([x1, 0]))
        assert value[(0,)].as_expr() == x1

    def test_covertices_rejected(self):
        with pytest.raises(GradeError):
            elementary_differential("o1", PolyVectorField([x1]))

    @pytest.mark.parametrize("seed", [0, 1])
    def test_divergence_identity(self, seed):
        field = random_field(2, 2, seed)
        for N in range(1, 4):
            for f in generate(N, 1, 0):
                assert check_dH_identity(f, field), f.text

    def test_divergence_identity_on_combos(self):
        assert check_dH_identity(PSI3, random_field(3, 1, 0))

    def test_divergence_identity_needs_one_root(self):
        with pytest.raises(GradeError):
            check_dH_identity("<b>", random_field(2, 1, 0))


class TestSolenoidalCheck:
    def test_solenoidal_form(self):
        assert check_solenoidal_numeric(PSI3, trials=2, deg=1)

    def test_loop_free_part(self):
        c = "<b,b> b - b[b,b]"
        assert check_solenoidal_numeric(c, divfree=True, trials=2, deg=1)
        assert not check_solenoidal_numeric(c, trials=2, deg=2)

    def test_not_solenoidal(self):
        assert not check_solenoidal_numeric("b[b]", trials=1)

    def test_zero_form(self):
        assert check_solenoidal_numeric("0")

    def test_needs_one_root(self):
        with pytest.raises(GradeError):
            check_solenoidal_numeric("<b>")
