"""Differential graded coalgebras, their Γ-transport, and desk-scale fixtures."""

from dataclasses import dataclass, field as dc_field

from .exactla import Mat, field as make_field
from .chain import (
    ChainComplex, ChainMap, tensor, tensor_map, tensor_position, identity_map,
    associator, twist, unit_right, unit_left, unit_complex, is_simply_connected,
)
from .simplicial import (
    SimplicialModule, flat, LevelwiseMap, keyed_columns, eilenberg_zilber,
    DEFAULT_LEVEL_BOUND,
)


class CoalgebraError(Exception):
    pass


class UnknownFixture(CoalgebraError):
    pass


class DGCoalgebra:
    """Carrier C with Δ: C -> C⊗C and ε: C -> 𝕜."""

    def __init__(self, carrier, delta, epsilon, name=None):
        self.carrier = carrier
        self.delta = delta
        self.epsilon = epsilon
        self.field = carrier.field
        self.name = name
        self._cc = delta.target
        self._cache = {}

    @property
    def CC(self):
        return self._cc

    def tensor_cached(self, key, make):
        got = self._cache.get(key)
        if got is None:
            got = make()
            self._cache[key] = got
        return got

    def factor(self, k):
        return self.tensor_cached(("factor", k), lambda: self._factor(k))

    def _factor(self, k):
        C = self.carrier.factor(k)
        CC = tensor(C, C)
        K = unit_complex(C.field)
        d = ChainMap(C, CC, {n: m.factor(k) for n, m in self.delta.levels.items()}, check=False)
        e = ChainMap(C, K, {n: m.factor(k) for n, m in self.epsilon.levels.items()}, check=False)
        return DGCoalgebra(C, d, e, self.name)

    @property
    def coaugmentation(self):
        """Index of the degree-0 unit (simply connected coalgebras have exactly one)."""
        return 0

    def __repr__(self):
        return f"DGCoalgebra({self.name or '?'}, {self.carrier!r})"


def coalgebra_from_terms(field_, dims, d, delta_terms, eps_terms, name=None, differentials=None):
    """Build a coalgebra from basis-level formulas.

    delta_terms[(n, a)] is a list of (coeff, (i, x), (j, y)) meaning
    Δ(e_{n,a}) = Σ coeff e_{i,x} ⊗ e_{j,y}; eps_terms[(0, a)] = ε(e_{0,a}).
    """
    degs = [n for n in dims if dims[n]] or [0]
    C = ChainComplex(field_, (min(degs + [0]), max(degs)), dims, differentials or {})
    CC = tensor(C, C)
    K = unit_complex(field_)
    levels = {}
    for n in C.degrees:
        pos = tensor_position(C, C, n)
        ent = {}
        for a in range(C.dim(n)):
            for coeff, (i, x), (j, y) in delta_terms.get((n, a), []):
                r = pos[(i, x, y)]
                ent[(r, a)] = ent.get((r, a), 0) + coeff
        levels[n] = Mat.from_entries(field_, CC.dim(n), C.dim(n), ent)
    delta = ChainMap(C, CC, levels)
    e0 = {(0, a): v for (n, a), v in eps_terms.items() if n == 0}
    eps = ChainMap(C, K, {0: Mat.from_entries(field_, 1, C.dim(0), e0)} if C.dim(0) else {})
    return DGCoalgebra(C, delta, eps, name)


def validate_coalgebra(C):
    """Report of the coalgebra axioms, all checked by exact matrix identities."""
    if C.field.is_product:
        reps = [validate_coalgebra(C.factor(k)) for k in range(len(C.field.factors))]
        out = {key: all(r[key] for r in reps) for key in reps[0]}
        return out
    X = C.carrier
    CC = C.CC
    rep = {"chain_maps": C.delta.is_chain_map() and C.epsilon.is_chain_map()}
    I = identity_map(X)
    L = tensor(CC, X)
    R = tensor(X, CC)
    left = associator(X, X, X, XY=CC, XYZ_left=L, YZ=CC, XYZ_right=R) @ \
        tensor_map(C.delta, I, source=CC, target=L) @ C.delta
    right = tensor_map(I, C.delta, source=CC, target=R) @ C.delta
    rep["coassociative"] = left == right
    K = C.epsilon.target
    XK = tensor(X, K)
    KX = tensor(K, X)
    r1 = unit_right(X, XK) @ tensor_map(I, C.epsilon, source=CC, target=XK) @ C.delta
    r2 = unit_left(X, KX) @ tensor_map(C.epsilon, I, source=CC, target=KX) @ C.delta
    rep["counital"] = r1 == I and r2 == I
    rep["cocommutative"] = (twist(X, X, CC, CC) @ C.delta) == C.delta
    rep["simply_connected"] = is_simply_connected(X)
    return rep


def is_valid_coalgebra(C):
    r = validate_coalgebra(C)
    return r["chain_maps"] and r["coassociative"] and r["counital"]


FIXTURES = ("unit", "C2", "C2x4", "product-demo")


def fixture(name, field_="F2"):
    """Named test coalgebras (all simply connected and cocommutative)."""
    if name == "product-demo":
        return fixture("C2", "F2xF3")._renamed("product-demo")
    F = make_field(field_)
    if name == "unit":
        return coalgebra_from_terms(F, {0: 1}, {}, {(0, 0): [(1, (0, 0), (0, 0))]},
                                    {(0, 0): 1}, name="unit")
    if name == "C2":
        return coalgebra_from_terms(
            F, {0: 1, 2: 1}, {},
            {(0, 0): [(1, (0, 0), (0, 0))],
             (2, 0): [(1, (2, 0), (0, 0)), (1, (0, 0), (2, 0))]},
            {(0, 0): 1}, name="C2")
    if name == "C2x4":
        return coalgebra_from_terms(
            F, {0: 1, 2: 1, 4: 1}, {},
            {(0, 0): [(1, (0, 0), (0, 0))],
             (2, 0): [(1, (2, 0), (0, 0)), (1, (0, 0), (2, 0))],
             (4, 0): [(1, (4, 0), (0, 0)), (1, (0, 0), (4, 0)), (1, (2, 0), (2, 0))]},
            {(0, 0): 1}, name="C2x4")
    raise UnknownFixture(name)


def _renamed(self, name):
    self.name = name
    return self


DGCoalgebra._renamed = _renamed


# ---- simplicial coalgebras ----

class SimplicialCoalgebra:
    """Γ(C) with Δ_Γ: C -> N(ΓC ⊗ ΓC) and ε: C -> 𝕜, in normal form."""

    def __init__(self, C, delta, epsilon, base=None, level_bound=DEFAULT_LEVEL_BOUND):
        self.C = C
        self.carrier = SimplicialModule(C, level_bound)
        self.delta = delta
        self.epsilon = epsilon
        self.field = C.field
        self.base = base
        self.flat_cc = flat((C, C))
        self.flat_unit = flat((), C.field)

    def __repr__(self):
        return f"SimplicialCoalgebra({self.C!r})"


def gamma_coalgebra(C, level_bound=DEFAULT_LEVEL_BOUND):
    """Comonoidal structure on Γ(C): Δ_Γ = EZ ∘ Δ."""
    if C.field.is_product:
        return tuple(gamma_coalgebra(C.factor(k), level_bound) for k in range(len(C.field.factors)))
    X = C.carrier
    ft = flat((X, X))
    ez = eilenberg_zilber(X, X, ft, C.CC)
    return SimplicialCoalgebra(X, ez @ C.delta, C.epsilon, base=C, level_bound=level_bound)


def validate_simplicial_coalgebra(D, top=None):
    """Axioms of Γ(C) checked on normalized chains up to degree top."""
    C = D.C
    top = D.carrier.level_bound if top is None else top
    f2 = D.flat_cc
    f3 = flat((C, C, C))
    rep = {"chain_maps": D.delta.is_chain_map()}
    dmap = (f2, D.delta)
    L = LevelwiseMap(f2, [dmap, None])
    R = LevelwiseMap(f2, [None, dmap])
    emap = (D.flat_unit, D.epsilon)
    E1 = LevelwiseMap(f2, [None, emap])
    E2 = LevelwiseMap(f2, [emap, None])
    coassoc = counit = cocomm = True
    for n in C.degrees:
        if n > top:
            break
        for a, col in enumerate(keyed_columns(f2, D.delta, n)):
            coassoc &= L.image_elem(col, n) == R.image_elem(col, n)
            want = {(((tuple(range(n + 1))), a),): C.field.base.one}
            counit &= E1.image_elem(col, n) == want and E2.image_elem(col, n) == want
            cocomm &= {(k[1], k[0]): v for k, v in col.items()} == col
    rep["coassociative"] = coassoc
    rep["counital"] = counit
    rep["cocommutative"] = cocomm
    rep["simply_connected"] = is_simply_connected(C)
    return rep
