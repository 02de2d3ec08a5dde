import pytest

from artifact.exactla import field
from artifact.chain import unit_complex
from artifact.coalg import (
    fixture, FIXTURES, validate_coalgebra, is_valid_coalgebra, coalgebra_from_terms,
    gamma_coalgebra, validate_simplicial_coalgebra, UnknownFixture,
)
from artifact.simplicial import normalize

AXIOMS = ("chain_maps", "coassociative", "counital", "cocommutative", "simply_connected")


@pytest.mark.parametrize("name", FIXTURES)
@pytest.mark.parametrize("F", ["F2", "F3", "F5", "Q"])
def test_fixtures_pass_all_axioms(name, F):
    C = fixture(name, F)
    rep = validate_coalgebra(C)
    assert all(rep[k] for k in AXIOMS), rep
    assert is_valid_coalgebra(C)


def test_fixture_shapes():
    assert fixture("unit").carrier.dims == {0: 1}
    assert {n: d for n, d in fixture("C2").carrier.dims.items() if d} == {0: 1, 2: 1}
    assert fixture("product-demo").field == field("F2xF3")
    with pytest.raises(UnknownFixture):
        fixture("nope")


def test_dropped_counit_term_fails():
    F = field("F3")
    C = coalgebra_from_terms(
        F, {0: 1, 2: 1}, {},
        {(0, 0): [(1, (0, 0), (0, 0))], (2, 0): [(1, (2, 0), (0, 0))]},
        {(0, 0): 1}, name="broken")
    rep = validate_coalgebra(C)
    assert not rep["counital"]
    assert not is_valid_coalgebra(C)


def test_noncocommutative_detected():
    # Δ(c) = c⊗1 + 1⊗c + a⊗b with a, b of degree 2 is not fixed by the twist
    F = field("Q")
    C = coalgebra_from_terms(
        F, {0: 1, 2: 2, 4: 1}, {},
        {(0, 0): [(1, (0, 0), (0, 0))],
         (2, 0): [(1, (2, 0), (0, 0)), (1, (0, 0), (2, 0))],
         (2, 1): [(1, (2, 1), (0, 0)), (1, (0, 0), (2, 1))],
         (4, 0): [(1, (4, 0), (0, 0)), (1, (0, 0), (4, 0)), (1, (2, 0), (2, 1))]},
        {(0, 0): 1})
    rep = validate_coalgebra(C)
    assert rep["coassociative"] and rep["counital"] and not rep["cocommutative"]


@pytest.mark.parametrize("name", ["unit", "C2"])
def test_gamma_coalgebra(name):
    C = fixture(name, "F3")
    D = gamma_coalgebra(C, 8)
    rep = validate_simplicial_coalgebra(D)
    assert all(v for v in rep.values() if isinstance(v, bool)), rep
    assert normalize(D.carrier) == C.carrier
    if name == "unit":
        assert D.C == unit_complex(C.field)
