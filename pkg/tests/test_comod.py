import pytest

from artifact.exactla import Mat, field
from artifact.chain import (
    sphere, unit_complex, homology_dims, is_quasi_iso, ChainMap, tensor, identity_map,
)
from artifact.coalg import fixture
from artifact.comod import (
    Comodule, trivial_comodule, coalgebra_as_comodule, cofree, extend, restrict,
    validate_comodule, is_valid_comodule, cotensor, unit_iso, cofree_iso, kernel_comodule,
    direct_sum_comodule, gamma_comodule, n_comodule, counit_map, comonoidal_map, scofree,
    CoalgebraMismatch, gamma_of,
)
from artifact.simplicial import normalize

import gen


def nonzero(dims):
    return {n: d for n, d in dims.items() if d}


@pytest.mark.parametrize("F", ["F2", "F3", "Q", "F2xF3"])
def test_basic_comodules_validate(F):
    C = fixture("C2", F)
    for X in (trivial_comodule(C), coalgebra_as_comodule(C),
              cofree(gen.random_cogenerator(F, 3), C)):
        assert is_valid_comodule(X), validate_comodule(X)


def test_dropped_counit_component_fails():
    C = fixture("C2", "F3")
    X = coalgebra_as_comodule(C)
    T = tensor(X.carrier, C.carrier)
    # keep only the c ↦ 1⊗c part of ρ on the top class
    bad = ChainMap(X.carrier, T, {0: X.rho.level(0),
                                  2: Mat.from_entries(C.field, T.dim(2), 1, {(0, 0): 1})})
    Y = Comodule(C, X.carrier, bad)
    rep = validate_comodule(Y)
    assert not rep["counital"]
    assert not is_valid_comodule(Y)


def test_cofree_examples():
    C = fixture("C2", "F5")
    assert cofree(unit_complex(C.field), C).carrier == C.carrier
    X = cofree(sphere(C.field, 1, 3), C)
    assert nonzero(X.carrier.dims) == {3: 1, 5: 1}


def test_extend_restrict_round_trip():
    C = fixture("C2x4", "F3")
    for seed in range(50):
        M = gen.random_cogenerator("F3", seed)
        Mp = gen.random_cogenerator("F3", seed + 500)
        W = cofree(M, C)
        cof = cofree(Mp, C)
        g = gen.random_chain_map(W.carrier, Mp, seed, span=3)
        h = extend(W, g, cof)
        assert h.is_comodule_map()
        assert restrict(h, cof) == g


def test_cotensor_examples():
    C = fixture("C2", "F3")
    k = trivial_comodule(C)
    T = cotensor(k, k)
    assert nonzero(T.carrier.dims) == {0: 1}
    for name in ("unit", "C2", "C2x4"):
        Cx = fixture(name, "Q")
        for X in (trivial_comodule(Cx), coalgebra_as_comodule(Cx), gen.random_comodule(Cx, 2)):
            assert unit_iso(X)[1].check()
        M = gen.random_cogenerator("Q", 8)
        _, _, iso = cofree_iso(M, gen.random_comodule(Cx, 3))
        assert iso.check()


def test_cotensor_coalgebra_mismatch():
    with pytest.raises(CoalgebraMismatch):
        cotensor(trivial_comodule(fixture("C2", "F2")), trivial_comodule(fixture("C2x4", "F2")))


def test_kernel_and_sums_are_comodules():
    C = fixture("C2", "F2")
    X = gen.random_comodule(C, 4)
    assert is_valid_comodule(X)
    S, incs, projs = direct_sum_comodule(X, coalgebra_as_comodule(C))
    assert is_valid_comodule(S)
    assert all(f.is_comodule_map() for f in incs + projs)


def test_gamma_and_n():
    C = fixture("C2", "F3")
    for X in (trivial_comodule(C), coalgebra_as_comodule(C), cofree(sphere(C.field, 1, 2), C)):
        G = gamma_comodule(X, 6)
        assert is_valid_comodule(G, top=5)
        assert G.normal == X.carrier
    nk = n_comodule(gamma_comodule(trivial_comodule(C), 6))
    assert homology_dims(nk.comodule.carrier, range(0, 5)) == {0: 1, 1: 0, 2: 0, 3: 0, 4: 0}
    nc = n_comodule(gamma_comodule(coalgebra_as_comodule(C), 6))
    assert homology_dims(nc.comodule.carrier, range(0, 5)) == homology_dims(C.carrier, range(0, 5))


def test_n_of_simplicial_cofree():
    C = fixture("C2", "F3")
    D = gamma_of(C, 6)
    M = sphere(C.field, 1, 2)
    nc = n_comodule(scofree(M, D))
    expect = homology_dims(tensor(M, C.carrier), range(0, 6))
    assert homology_dims(nc.comodule.carrier, range(0, 6)) == expect


def test_counit_and_comonoidal_on_simple_inputs():
    C = fixture("C2", "F3")
    G = gamma_comodule(coalgebra_as_comodule(C), 6)
    _, u = counit_map(G)
    assert is_quasi_iso(u.map, degrees=range(0, 5)).ok
    X = gamma_comodule(cofree(sphere(C.field, 1, 1), C), 6)
    Y = gamma_comodule(cofree(sphere(C.field, 1, 2), C), 6)
    T, nw, f = comonoidal_map(X, Y, 5)
    assert is_quasi_iso(f.map, degrees=range(0, 5)).ok
