import pytest

from artifact.exactla import Mat, field, rank
from artifact.chain import (
    make_complex, sphere, disk, disk_to_sphere, unit_complex, zero_complex, identity_map,
    zero_map, direct_sum, homology, homology_dims, betti_by_rank, tensor, tensor_map,
    pullback, split_decompose, truncate_nonneg, factor_cofib_qtower, fn_step,
    factor_acyclic_cofib_postnikov, solve_lift, is_quasi_iso, is_injective_map,
    is_simply_connected, kernel_complex, associator, twist, unit_right, koszul_defect,
    ChainMap, NotAComplex, NoLift, PreconditionViolated, TargetMismatch, induced_map,
)

import gen

F = field("F3")
FIELDS = ["F2", "F3", "Q", "F2xF3"]


def test_make_complex_examples():
    K = make_complex(F, (0, 0), {0: 1})
    assert homology_dims(K) == {0: 1}
    D1 = make_complex(F, (0, 1), {0: 1, 1: 1}, {1: Mat.identity(F, 1)})
    assert homology_dims(D1) == {0: 0, 1: 0}
    with pytest.raises(NotAComplex) as e:
        make_complex(F, (0, 2), {0: 1, 1: 1, 2: 1}, {1: Mat.identity(F, 1), 2: Mat.identity(F, 1)})
    assert e.value.degree == 2


def test_spheres_and_disks():
    assert homology_dims(sphere(F, 1, 2)) == {2: 1}
    assert set(homology_dims(disk(F, 1, 3)).values()) == {0}
    K, inc = kernel_complex(disk_to_sphere(F, 1, 3))
    assert {n: d for n, d in K.dims.items() if d} == {2: 1}
    assert homology_dims(K)[2] == 1


@pytest.mark.parametrize("name", FIELDS)
def test_homology_rank_nullity(name):
    for seed in range(25):
        X = gen.random_complex(name, seed, -2, 4)
        for n in X.degrees:
            h = homology(X, n)
            if X.field.is_product:
                for k, hk in enumerate(h):
                    assert hk.dim == betti_by_rank(X.factor(k), n)
                continue
            assert h.dim == betti_by_rank(X, n)
            assert (X.d(n) @ h.cycle_reps).is_zero()
            assert h.classify @ h.cycle_reps == Mat.identity(X.field, h.dim)


def test_tensor_examples():
    S = tensor(sphere(F, 1, 2), sphere(F, 1, 3))
    assert homology_dims(S) == {n: int(n == 5) for n in S.degrees}
    D = tensor(disk(F, 1, 1), disk(F, 1, 1))
    assert set(homology_dims(D).values()) == {0}
    assert D.dim(1) == 2
    # x, y of degree 1: d(x⊗y) = dx⊗y - x⊗dy
    assert D.d(2).to_lists() == [[1], [F.base.neg(1)]] or D.d(2).to_lists() == [[(1,)], [(2,)]]


@pytest.mark.parametrize("name", FIELDS)
def test_tensor_koszul_and_coherence(name):
    X = gen.random_complex(name, 1, 0, 2, 2)
    Y = gen.random_complex(name, 2, 0, 2, 2)
    Z = gen.random_complex(name, 3, 0, 1, 2)
    assert koszul_defect(X, Y) == 0
    a = associator(X, Y, Z)
    assert a.is_chain_map() and is_quasi_iso(a).ok
    t = twist(X, Y)
    assert t.is_chain_map()
    assert twist(Y, X) @ t == identity_map(t.source)
    u = unit_right(X)
    assert u.is_chain_map()


def test_pullback_examples():
    X = sphere(F, 1, 2)
    P, p1, p2, _ = pullback(identity_map(X), disk_to_sphere(F, 1, 2))
    assert P.dims == disk(F, 1, 2).dims
    assert homology_dims(P).get(2, 0) == 0
    P, p1, _, _ = pullback(identity_map(X), identity_map(X))
    assert is_quasi_iso(p1).ok
    with pytest.raises(TargetMismatch):
        pullback(identity_map(X), identity_map(sphere(F, 1, 3)))


def test_pullback_mediate():
    Y = gen.random_complex("F3", 4, 0, 3, 3)
    f = gen.random_surjective_on_cycles(Y, 2, 4)
    n = 2
    V = f.target.dim(n)
    pb = pullback(f, disk_to_sphere(F, V, n))
    a = identity_map(pb.P)
    m = pb.mediate(pb.p1 @ a, pb.p2 @ a)
    assert m == a


def test_split_decompose_examples():
    sp = split_decompose(sphere(F, 1, 2))
    assert sp.summands == [("sphere", 2, 1)]
    sp = split_decompose(disk(F, 1, 3))
    assert sp.summands == [("disk", 3, 1)]


def test_truncate_nonneg_examples():
    X = sphere(F, 1, 2)
    T, inc = truncate_nonneg(X)
    assert {n: d for n, d in T.dims.items() if d} == {2: 1}
    T, _ = truncate_nonneg(disk(F, 1, 0))
    assert all(d == 0 for d in T.dims.values())
    for seed in range(10):
        X = gen.random_complex("Q", seed, -3, 3)
        T, inc = truncate_nonneg(X)
        assert inc.is_chain_map() and is_injective_map(inc)
        assert is_quasi_iso(inc, degrees=range(0, 4)).ok


def test_factor_cofib_qtower_examples():
    S = sphere(F, 1, 2)
    fz = factor_cofib_qtower(zero_map(S, zero_complex(F)))
    assert is_injective_map(fz.first)
    assert all(homology(fz.middle, n).dim == 0 for n in fz.middle.degrees)
    fi = factor_cofib_qtower(identity_map(S))
    assert fi.second @ fi.first == identity_map(S)


def test_fn_step_examples():
    S = sphere(F, 1, 2)
    st = fn_step(zero_map(zero_complex(F, 2, 2), S), 2)
    assert st.V == 1 and homology(st.Y, 2).dim == 0
    big, (i1, _), _ = direct_sum(S, S)
    st = fn_step(i1, 2)
    assert st.V == 1 and homology(st.Y, 2).dim == 1
    assert rank(induced_map(st.j, 2)) == 1
    st = fn_step(identity_map(S), 2)
    assert st.V == 0 and st.Y == S
    with pytest.raises(PreconditionViolated):
        fn_step(zero_map(S, S), 2)


def test_factor_acyclic_cofib_postnikov_examples():
    S = sphere(F, 1, 2)
    fa = factor_acyclic_cofib_postnikov(zero_map(S, zero_complex(F)))
    assert is_quasi_iso(fa.first).ok and is_injective_map(fa.first)
    g = disk_to_sphere(F, 1, 2)
    fa = factor_acyclic_cofib_postnikov(g)
    assert fa.second @ fa.first == g
    assert all(s.kind in ("product", "P") for s in fa.stages)


def test_solve_lift_examples():
    S = sphere(F, 1, 2)
    Z = zero_complex(F, 2, 2)
    with pytest.raises(NoLift):
        solve_lift(zero_map(Z, S), disk_to_sphere(F, 1, 2), zero_map(Z, disk(F, 1, 2)),
                   identity_map(S))
    i = identity_map(S)
    l = solve_lift(i, zero_map(S, zero_complex(F)), identity_map(S), zero_map(S, zero_complex(F)))
    assert l @ i == identity_map(S)


def test_quasi_iso_and_simply_connected():
    assert is_quasi_iso(identity_map(sphere(F, 2, 1))).ok
    assert is_quasi_iso(zero_map(disk(F, 1, 2), zero_complex(F))).ok
    assert not is_quasi_iso(disk_to_sphere(F, 1, 2)).ok
    assert is_simply_connected(unit_complex(F))
    U, _, _ = direct_sum(unit_complex(F), sphere(F, 1, 2))
    assert is_simply_connected(U)
    V, _, _ = direct_sum(unit_complex(F), sphere(F, 1, 1))
    assert not is_simply_connected(V)


def test_tensor_map_functorial():
    X = gen.random_complex("F5", 6, 0, 2, 2)
    Y = gen.random_complex("F5", 7, 0, 2, 2)
    f = gen.random_chain_map(X, X, 3)
    g = gen.random_chain_map(Y, Y, 4)
    fg = tensor_map(f, g)
    assert fg.is_chain_map()
    assert tensor_map(f @ f, g @ g) == fg @ fg
