"""Right comodules over a coalgebra: dg comodules, simplicial comodules in
normal form, cotensor products, and the lifted Dold-Kan functors.

A dg comodule stores ρ: X -> X⊗C as a ChainMap.  A simplicial comodule over
Γ(C) stores its normalized chains M and ρ: M -> N(ΓM ⊗ ΓC) as a ChainMap
into the normalized levelwise tensor flat((M, C)).
"""

from .exactla import Mat, NoSolution, kernel, retraction, solve_many, rank
from .chain import (
    componentwise,
    ChainComplex, ChainMap, tensor, tensor_map, tensor_basis, tensor_position,
    identity_map, associator, twist, unit_right, unit_complex, subcomplex,
    is_quasi_iso, homology_dims, direct_sum, PreconditionViolated,
)
from .coalg import DGCoalgebra, SimplicialCoalgebra, gamma_coalgebra, validate_coalgebra
from .simplicial import (
    flat, LevelwiseMap, KeyedMap, keyed_to_mat, ez_elem, unflatten, reindex_first,
    DEFAULT_LEVEL_BOUND, SimplicialModule, NegativeSupport,
)


class ComoduleError(Exception):
    pass


class CoalgebraMismatch(ComoduleError):
    pass


class NotCocommutative(ComoduleError):
    pass


class NotAComoduleMap(ComoduleError):
    pass


def _inverse_perm(f):
    """Inverse of a chain map whose levels are permutation matrices."""
    return ChainMap(f.target, f.source, {n: f.level(n).T for n in f.degrees}, check=False)


def _retract_through(incl, g):
    """The unique h with incl ∘ h = g, for injective incl; raises if g leaves the image."""
    lv = {}
    for n in g.source.degrees:
        if incl.source.dim(n) and g.source.dim(n):
            try:
                lv[n] = solve_many(incl.level(n), g.level(n))
            except NoSolution:
                raise PreconditionViolated("map does not factor through the subobject", n)
    return ChainMap(g.source, incl.source, lv, check=False)


# ---- dg comodules ----

class Comodule:
    """Right C-comodule (X, ρ: X -> X⊗C)."""

    def __init__(self, coalgebra, carrier, rho, name=None):
        if carrier.field != coalgebra.field:
            raise CoalgebraMismatch("carrier and coalgebra over different fields")
        self.coalgebra = coalgebra
        self.carrier = carrier
        self.rho = rho
        self.field = carrier.field
        self.name = name

    @property
    def XC(self):
        return self.rho.target

    def factor(self, k):
        C = self.coalgebra.factor(k)
        X = self.carrier.factor(k)
        XC = tensor(X, C.carrier)
        rho = ChainMap(X, XC, {n: m.factor(k) for n, m in self.rho.levels.items()}, check=False)
        return Comodule(C, X, rho, self.name)

    def __repr__(self):
        return f"Comodule({self.name or '?'}, {self.carrier!r})"


class ComoduleMap:
    def __init__(self, source, target, f):
        if source.coalgebra is not target.coalgebra:
            raise CoalgebraMismatch("comodule map between different coalgebras")
        self.source, self.target, self.map = source, target, f
        self.field = f.field

    def level(self, n):
        return self.map.level(n)

    @property
    def levels(self):
        return self.map.levels

    def is_comodule_map(self):
        if not self.map.is_chain_map():
            return False
        C = self.source.coalgebra.carrier
        lhs = tensor_map(self.map, identity_map(C), source=self.source.XC, target=self.target.XC) @ self.source.rho
        return lhs == self.target.rho @ self.map

    def __matmul__(self, other):
        return ComoduleMap(other.source, self.target, self.map @ other.map)

    def factor(self, k):
        return ComoduleMap(self.source.factor(k), self.target.factor(k), self.map.factor(k))


def _dg_report(X):
    C = X.coalgebra
    M, Cc = X.carrier, C.carrier
    I = identity_map(M)
    XC = X.XC
    rep = {"chain_map": X.rho.is_chain_map()}
    L = tensor(XC, Cc)
    R = tensor(M, C.CC)
    left = associator(M, Cc, Cc, XY=XC, XYZ_left=L, YZ=C.CC, XYZ_right=R) @ \
        tensor_map(X.rho, identity_map(Cc), source=XC, target=L) @ X.rho
    right = tensor_map(I, C.delta, source=XC, target=R) @ X.rho
    rep["coassociative"] = left == right
    XK = tensor(M, C.epsilon.target)
    r1 = unit_right(M, XK) @ tensor_map(I, C.epsilon, source=XC, target=XK) @ X.rho
    rep["counital"] = r1 == I
    return rep


def validate_comodule(X, top=None):
    """Exact report of the comodule axioms (dg or simplicial)."""
    if isinstance(X, SComodule):
        return _simplicial_report(X, top)
    if X.field.is_product:
        reps = [_dg_report(X.factor(k)) for k in range(len(X.field.factors))]
        return {key: all(r[key] for r in reps) for key in reps[0]}
    return _dg_report(X)


def is_valid_comodule(X, top=None):
    return all(validate_comodule(X, top).values())


def coalgebra_as_comodule(C):
    """C over itself, ρ = Δ."""
    return Comodule(C, C.carrier, C.delta, name=C.name)


def trivial_comodule(C):
    """𝕜 with ρ the coaugmentation 𝕜 -> 𝕜⊗C = C."""
    K = unit_complex(C.field)
    KC = tensor(K, C.carrier)
    rho = ChainMap(K, KC, {0: Mat.from_entries(C.field, KC.dim(0), 1, {(C.coaugmentation, 0): 1})})
    return Comodule(C, K, rho, name="k")


def zero_comodule(C):
    Z = ChainComplex(C.field, (0, 0), {0: 0}, {})
    return Comodule(C, Z, ChainMap(Z, tensor(Z, C.carrier), {}, check=False), name="0")


def cofree(M, C):
    """M⊗C with ρ = id_M ⊗ Δ (reassociated)."""
    if M.field != C.field:
        from .exactla import FieldMismatch
        raise FieldMismatch("cofree comodule over a different field")
    Cc = C.carrier
    MC = tensor(M, Cc)
    R = tensor(M, C.CC)
    L = tensor(MC, Cc)
    a = associator(M, Cc, Cc, XY=MC, XYZ_left=L, YZ=C.CC, XYZ_right=R)
    rho = _inverse_perm(a) @ tensor_map(identity_map(M), C.delta, source=MC, target=R)
    X = Comodule(C, MC, rho, name="cofree")
    X.cogenerator = M
    return X


def counit_projection(X):
    """id⊗ε: X⊗C -> X for the carrier of a cofree comodule built on X.cogenerator."""
    M = X.cogenerator
    C = X.coalgebra
    XK = tensor(M, C.epsilon.target)
    return unit_right(M, XK) @ tensor_map(identity_map(M), C.epsilon, source=X.carrier, target=XK)


def extend(W, g, cof):
    """Cofree extension (g⊗id_C)∘ρ_W: W -> cof, for g: W.carrier -> cof.cogenerator."""
    C = cof.coalgebra
    f = tensor_map(g, identity_map(C.carrier), source=W.XC, target=cof.carrier) @ W.rho
    return ComoduleMap(W, cof, f)


def restrict(h, cof):
    """(id⊗ε) ∘ h, the inverse of extend."""
    return counit_projection(cof) @ h.map


def sub_comodule(Y, incl, name=None):
    """Subcomodule on the image of injective incl: K -> Y.carrier (closure asserted)."""
    K = incl.source
    C = Y.coalgebra
    KC = tensor(K, C.carrier)
    big = tensor_map(incl, identity_map(C.carrier), source=KC, target=Y.XC)
    rho = _retract_through(big, Y.rho @ incl)
    X = Comodule(C, K, rho, name=name)
    return X, ComoduleMap(X, Y, incl)


def kernel_comodule(f):
    """ker of a comodule map, with its inclusion."""
    K, incl = subcomplex(f.source.carrier, {n: kernel(f.level(n)) for n in f.source.carrier.degrees})
    return sub_comodule(f.source, incl, name="ker")


def direct_sum_comodule(X, Y):
    C = X.coalgebra
    S, (i1, i2), (p1, p2) = direct_sum(X.carrier, Y.carrier)
    SC = tensor(S, C.carrier)
    I = identity_map(C.carrier)
    rho = tensor_map(i1, I, source=X.XC, target=SC) @ X.rho @ p1 + \
        tensor_map(i2, I, source=Y.XC, target=SC) @ Y.rho @ p2
    Z = Comodule(C, S, rho, name="sum")
    return Z, (ComoduleMap(X, Z, i1), ComoduleMap(Y, Z, i2)), (ComoduleMap(Z, X, p1), ComoduleMap(Z, Y, p2))


# ---- cotensor ----

class Cotensor:
    """X □_C Y as a subcomodule of X⊗Y."""

    def __init__(self, X, Y, comodule, inclusion, XY):
        self.X, self.Y = X, Y
        self.comodule = comodule
        self.inclusion = inclusion
        self.XY = XY

    @property
    def carrier(self):
        return self.comodule.carrier


def _left_coaction(Y):
    """λ_Y = τ∘ρ_Y: Y -> C⊗Y."""
    C = Y.coalgebra
    return twist(Y.carrier, C.carrier, Y.XC, tensor(C.carrier, Y.carrier)) @ Y.rho


def _check_pair(X, Y):
    if X.coalgebra is not Y.coalgebra:
        raise CoalgebraMismatch("cotensor of comodules over different coalgebras")
    if not validate_coalgebra(X.coalgebra)["cocommutative"]:
        raise NotCocommutative("cotensor needs a cocommutative coalgebra")


def _cotensor_single(X, Y):
    C = X.coalgebra
    A, B, Cc = X.carrier, Y.carrier, C.carrier
    XY = tensor(A, B)
    CY = tensor(Cc, B)
    L = tensor(X.XC, B)
    R = tensor(A, CY)
    a = associator(A, Cc, B, XY=X.XC, XYZ_left=L, YZ=CY, XYZ_right=R) @ \
        tensor_map(X.rho, identity_map(B), source=XY, target=L)
    b = tensor_map(identity_map(A), _left_coaction(Y), source=XY, target=R)
    diff = a - b
    K, incl = subcomplex(XY, {n: kernel(diff.level(n)) for n in XY.degrees})
    # coaction inherited from id_X ⊗ ρ_Y, reassociated to (X⊗Y)⊗C
    YC = Y.XC
    XYC = tensor(A, YC)
    big = tensor(XY, Cc)
    assoc = associator(A, B, Cc, XY=XY, XYZ_left=big, YZ=YC, XYZ_right=XYC)
    full = Comodule(C, XY, _inverse_perm(assoc) @ tensor_map(identity_map(A), Y.rho, source=XY, target=XYC))
    sub, inc = sub_comodule(full, incl, name="cotensor")
    return Cotensor(X, Y, sub, incl, XY)


def cotensor(X, Y):
    _check_pair(X, Y)
    if X.field.is_product:
        return tuple(_cotensor_single(X.factor(k), Y.factor(k)) for k in range(len(X.field.factors)))
    return _cotensor_single(X, Y)


def cotensor_map(T1, T2, f, g):
    """f□g: T1 -> T2 for comodule maps f: T1.X -> T2.X, g: T1.Y -> T2.Y."""
    fg = tensor_map(f.map, g.map, source=T1.XY, target=T2.XY)
    return ComoduleMap(T1.comodule, T2.comodule, _retract_through(T2.inclusion, fg @ T1.inclusion))


class Iso:
    """A mutually inverse pair of comodule maps."""

    def __init__(self, forward, backward):
        self.forward, self.backward = forward, backward

    def check(self):
        f, b = self.forward.map, self.backward.map
        return (b @ f == identity_map(f.source) and f @ b == identity_map(b.source)
                and self.forward.is_comodule_map() and self.backward.is_comodule_map())


@componentwise
def unit_iso(X):
    """X ≅ X □_C C via ρ; inverse id⊗ε."""
    C = X.coalgebra
    Cm = coalgebra_as_comodule(C)
    T = cotensor(X, Cm)
    fwd = _retract_through(T.inclusion, X.rho)
    XK = tensor(X.carrier, C.epsilon.target)
    back = unit_right(X.carrier, XK) @ tensor_map(identity_map(X.carrier), C.epsilon,
                                                  source=T.XY, target=XK) @ T.inclusion
    return T, Iso(ComoduleMap(X, T.comodule, fwd), ComoduleMap(T.comodule, X, back))


@componentwise
def cofree_iso(M, Y):
    """M⊗Y ≅ (M⊗C) □_C Y; forward assoc⁻¹∘(id⊗λ_Y), inverse id⊗ε⊗id."""
    C = Y.coalgebra
    cof = cofree(M, C)
    T = cotensor(cof, Y)
    B, Cc = Y.carrier, C.carrier
    MY = tensor(M, B)
    # M⊗Y carries the coaction id_M ⊗ ρ_Y
    MYC = tensor(M, Y.XC)
    big = tensor(MY, Cc)
    assoc = associator(M, B, Cc, XY=MY, XYZ_left=big, YZ=Y.XC, XYZ_right=MYC)
    MYm = Comodule(C, MY, _inverse_perm(assoc) @ tensor_map(identity_map(M), Y.rho, source=MY, target=MYC),
                   name="M⊗Y")
    CY = tensor(Cc, B)
    MCY = tensor(M, CY)
    a = associator(M, Cc, B, XY=cof.carrier, XYZ_left=T.XY, YZ=CY, XYZ_right=MCY)
    fwd = _inverse_perm(a) @ tensor_map(identity_map(M), _left_coaction(Y), source=MY, target=MCY)
    fwd = _retract_through(T.inclusion, fwd)
    back = tensor_map(counit_projection(cof), identity_map(B), source=T.XY, target=MY) @ T.inclusion
    return T, MYm, Iso(ComoduleMap(MYm, T.comodule, fwd), ComoduleMap(T.comodule, MYm, back))


# ---- simplicial comodules (normal form) ----

def gamma_of(C, level_bound=DEFAULT_LEVEL_BOUND):
    """The simplicial coalgebra Γ(C), shared by every comodule over C."""
    return C.tensor_cached(("gamma", level_bound), lambda: gamma_coalgebra(C, level_bound))


class SComodule:
    """Simplicial right Γ(C)-comodule with normalized chains M and ρ: M -> N(ΓM⊗ΓC)."""

    def __init__(self, coalgebra, normal, rho, name=None):
        if any(normal.dim(n) for n in normal.degrees if n < 0):
            raise NegativeSupport("simplicial comodules are non-negative")
        self.coalgebra = coalgebra
        self.normal = normal
        self.rho = rho            # KeyedMap into flat((normal, C))
        self.field = normal.field
        self.name = name

    @property
    def base(self):
        return self.coalgebra.base

    @property
    def carrier(self):
        return SimplicialModule(self.normal, self.coalgebra.carrier.level_bound)

    @property
    def flat_xc(self):
        return flat((self.normal, self.coalgebra.C))

    def __repr__(self):
        return f"SComodule({self.name or '?'}, {self.normal!r})"


class SComoduleMap:
    """Simplicial comodule map, stored as its normalized chain map."""

    def __init__(self, source, target, f):
        if source.coalgebra is not target.coalgebra:
            raise CoalgebraMismatch("comodule map between different coalgebras")
        self.source, self.target, self.map = source, target, f
        self.field = f.field

    def is_comodule_map(self, top=None):
        f = self.map
        if top is None:
            if not f.is_chain_map():
                return False
        elif not all(f.target.d(n) @ f.level(n) == f.level(n - 1) @ f.source.d(n)
                     for n in f.degrees if f.degrees.start < n <= top):
            return False
        X, Y = self.source, self.target
        lm = LevelwiseMap(X.flat_xc, [(flat((Y.normal,)), self.map), None])
        F = X.field.base
        for n in X.normal.degrees:
            if top is not None and n > top:
                break
            for a in range(X.normal.dim(n)):
                lhs = lm.image_elem(X.rho.keyed(n, a), n)
                rhs = {}
                for r, v in self.map.level(n).column(a).items():
                    for k, c in Y.rho.keyed(n, r).items():
                        rhs[k] = F.add(rhs.get(k, F.zero), F.mul(v, c))
                if lhs != {k: v for k, v in rhs.items() if v}:
                    return False
        return True


def _simplicial_report(X, top=None):
    D = X.coalgebra
    C = D.C
    M = X.normal
    top = M.hi if top is None else top
    fxc = X.flat_xc
    one = X.field.base.one
    rep = {"chain_map": X.rho.is_chain_map(top)}
    L = LevelwiseMap(fxc, [(fxc, X.rho), None])
    R = LevelwiseMap(fxc, [None, (D.flat_cc, D.delta)])
    E = LevelwiseMap(fxc, [None, (D.flat_unit, D.epsilon)])
    coassoc = counit = True
    for n in M.degrees:
        if n > top:
            break
        for a in range(M.dim(n)):
            col = X.rho.keyed(n, a)
            coassoc = coassoc and L.image_elem(col, n) == R.image_elem(col, n)
            counit = counit and E.image_elem(col, n) == {((tuple(range(n + 1)), a),): one}
    rep["coassociative"] = coassoc
    rep["counital"] = counit
    return rep


def _ez_after(M, C, field_, g):
    """EZ_{M,C} ∘ g as a KeyedMap, for g a ChainMap into tensor(M, C)."""
    ft = flat((M, C))
    F = field_.base
    cols = {}
    for n in g.source.degrees:
        if not g.source.dim(n):
            continue
        basis = tensor_basis(M, C, n)
        out = []
        for col in g.level(n).columns():
            acc = {}
            for r, v in col.items():
                i, a, j, b = basis[r]
                for k, c in ez_elem(M, C, i, a, j, b).items():
                    acc[k] = F.add(acc.get(k, F.zero), F.mul(v, F(c)))
            out.append({k: w for k, w in acc.items() if w})
        cols[n] = out
    return KeyedMap(g.source, ft, cols)


def gamma_comodule(X, level_bound=DEFAULT_LEVEL_BOUND):
    """Γ(X) with coaction EZ ∘ Γ(ρ), in normal form."""
    if X.field.is_product:
        return tuple(gamma_comodule(X.factor(k), level_bound) for k in range(len(X.field.factors)))
    M = X.carrier
    if any(M.dim(n) for n in M.degrees if n < 0):
        raise NegativeSupport("Γ needs a non-negative comodule")
    D = gamma_of(X.coalgebra, level_bound)
    return SComodule(D, M, _ez_after(M, D.C, X.field, X.rho), name=X.name)


def scofree(M, D, bound=None):
    """M⊗Γ(C) with coaction id⊗Δ_Γ; normal form flat((M, C)), built up to bound."""
    C = D.C
    inner = flat((M, C), bound=bound)
    Q = inner.complex()
    G = flat((Q, C))
    lm = LevelwiseMap(inner, [None, (D.flat_cc, D.delta)])
    cols = {}
    for n in Q.degrees:
        cols[n] = [unflatten(G, lm.image_key(key, n), n) for key in inner.basis(n)]
    X = SComodule(D, Q, KeyedMap(Q, G, cols), name="cofree")
    X.cogenerator = M
    return X


def scoalgebra_as_comodule(D):
    return gamma_comodule(coalgebra_as_comodule(D.base), D.carrier.level_bound)


def _restrict_keyed(elem, incl, retr, F):
    """Move an element over keys (s, rest…) of a bigger first factor into the subobject."""
    out = reindex_first(elem, lambda k: retr.level(k), F)
    back = reindex_first(out, lambda k: incl.level(k), F)
    if back != elem:
        raise PreconditionViolated("element leaves the subcomodule")
    return out


def _retraction_map(incl):
    return ChainMap(incl.target, incl.source,
                    {n: retraction(incl.level(n)) for n in incl.source.degrees
                     if incl.source.dim(n) and incl.target.dim(n)}, check=False)


def ssub_comodule(Y, incl, big_keyed, name=None):
    """Subcomodule on K -> Y.normal, given ρ_Y∘incl as elements over flat((Y.normal, C))."""
    K = incl.source
    C = Y.coalgebra.C
    retr = _retraction_map(incl)
    F = Y.field.base
    G = flat((K, C))
    cols = {n: [_restrict_keyed(e, incl, retr, F) for e in es] for n, es in big_keyed.items()}
    X = SComodule(Y.coalgebra, K, KeyedMap(K, G, cols), name=name)
    return X, SComoduleMap(X, Y, incl)


def _compose_rho(Y, incl):
    F = Y.field.base
    out = {}
    for n in incl.source.degrees:
        if not incl.source.dim(n):
            continue
        es = []
        for col in incl.level(n).columns():
            acc = {}
            for r, v in col.items():
                for k, c in Y.rho.keyed(n, r).items():
                    acc[k] = F.add(acc.get(k, F.zero), F.mul(v, c))
            es.append({k: w for k, w in acc.items() if w})
        out[n] = es
    return out


class SCotensor:
    def __init__(self, X, Y, comodule, inclusion, ft):
        self.X, self.Y = X, Y
        self.comodule = comodule
        self.inclusion = inclusion     # W -> flat((X, Y)).complex()
        self.ft = ft

    @property
    def normal(self):
        return self.comodule.normal


def scotensor(X, Y, bound=None):
    """X □_{Γ(C)} Y: kernel of (ρ_X⊗id) − (id⊗ρ_Y) in N(ΓX⊗ΓY), twist unsigned.

    bound truncates the levelwise tensor brutally above that degree.
    """
    if isinstance(X, tuple):
        return tuple(scotensor(x, y, bound) for x, y in zip(X, Y))
    if X.coalgebra is not Y.coalgebra:
        raise CoalgebraMismatch("cotensor of comodules over different coalgebras")
    D = X.coalgebra
    if not validate_coalgebra(D.base)["cocommutative"]:
        raise NotCocommutative("cotensor needs a cocommutative coalgebra")
    A = flat((X.normal, Y.normal), bound=bound)
    S = A.complex()
    la = LevelwiseMap(A, [(X.flat_xc, X.rho), None])
    lb = LevelwiseMap(A, [None, (Y.flat_xc, Y.rho)])
    F = X.field.base
    basis = {}
    for n in S.degrees:
        ca, cb = [], []
        for key in A.basis(n):
            ca.append(la.image_key(key, n))
            cb.append({(k[0], k[2], k[1]): v for k, v in lb.image_key(key, n).items()})
        (ma, mb), _ = keyed_to_mat(X.field, [ca, cb])
        basis[n] = kernel(ma - mb) if ma.rows else Mat.identity(X.field, S.dim(n))
    W, incl = subcomplex(S, basis)
    G = flat((S, D.C))
    big = {}
    for n in W.degrees:
        if not W.dim(n):
            continue
        base = A.basis(n)
        es = []
        for col in incl.level(n).columns():
            elem = lb.image_elem({base[r]: v for r, v in col.items()}, n)
            es.append(unflatten(G, elem, n))
        big[n] = es
    full = SComodule(D, S, None)
    sub, _ = ssub_comodule(full, incl, big, name="cotensor")
    return SCotensor(X, Y, sub, incl, A)


# ---- the lifted normalization N^C ----

class NC:
    """N^C(X) ⊂ N(X)⊗C together with its inclusion."""

    def __init__(self, source, comodule, inclusion, cof):
        self.source = source
        self.comodule = comodule
        self.inclusion = inclusion
        self.cofree = cof


def _nc_single(X, top=None):
    D = X.coalgebra
    C = D.base
    M, Cc = X.normal, C.carrier
    cof = cofree(M, C)
    MC = cof.carrier
    F = X.field.base
    basis = {}
    for n in MC.degrees:
        if not MC.dim(n) or (top is not None and n > top):
            continue
        cols = []
        for (i, a, j, b) in tensor_basis(M, Cc, n):
            acc = {}
            for k, v in X.rho.keyed(i, a).items():
                acc[(k, (j, b))] = v
            pos = tensor_position(Cc, Cc, j)
            inv = {p: t for t, p in pos.items()}
            for r, v in C.delta.level(j).column(b).items():
                j1, b1, b2 = inv[r]
                j2 = j - j1
                for k, c in ez_elem(M, D.C, i, a, j1, b1).items():
                    kk = (k, (j2, b2))
                    acc[kk] = F.sub(acc.get(kk, F.zero), F.mul(v, F(c)))
            cols.append({k: w for k, w in acc.items() if w})
        (m,), _ = keyed_to_mat(X.field, [cols])
        basis[n] = kernel(m) if m.rows else Mat.identity(X.field, MC.dim(n))
    K, incl = subcomplex(MC, basis)
    sub, inc = sub_comodule(cof, incl, name="N^C")
    return NC(X, sub, incl, cof)


def n_comodule(X, top=None):
    """N^C(X), the equalizer of N(ρ)⊗id_C and (EZ⊗id_C)∘(id⊗Δ) on N(X)⊗C.

    With top, only degrees <= top are kept (a subcomodule with the same
    homology below top).
    """
    if isinstance(X, tuple):
        return tuple(n_comodule(x, top) for x in X)
    return _nc_single(X, top)


def counit_map(X, nc=None, top=None):
    """Γ N^C(X) -> X: the equalizer inclusion followed by id⊗ε, in normal form."""
    if isinstance(X, tuple):
        return tuple(counit_map(x, top=top) for x in X)
    nc = nc or _nc_single(X, top)
    u = counit_projection(nc.cofree) @ nc.inclusion
    G = gamma_comodule(nc.comodule, X.coalgebra.carrier.level_bound)
    return G, SComoduleMap(G, X, u)


def comonoidal_map(X, Y, bound=None, W=None):
    """N^C(X) □_C N^C(Y) -> N^C(X □_{Γ(C)} Y) induced by EZ, through degree bound.

    W, if given, is scotensor(X, Y, bound) already computed.
    """
    if isinstance(X, tuple):
        return tuple(comonoidal_map(x, y, bound) for x, y in zip(X, Y))
    D = X.coalgebra
    C = D.base
    F = X.field.base
    nx, ny = _nc_single(X), _nc_single(Y)
    T = cotensor(nx.comodule, ny.comodule)
    W = W or scotensor(X, Y, bound)
    nw = _nc_single(W.comodule)
    MX, MY, Cc = X.normal, Y.normal, C.carrier
    A = W.ft
    S = W.inclusion.target
    retr = _retraction_map(W.inclusion)
    WC = nw.cofree.carrier
    big = tensor(nx.cofree.carrier, ny.cofree.carrier)
    emb = tensor_map(nx.inclusion, ny.inclusion, source=T.XY, target=big) @ T.inclusion
    eps = C.epsilon
    levels = {}
    for n in T.carrier.degrees:
        if not T.carrier.dim(n) or (bound is not None and n > bound):
            continue
        bb = tensor_basis(nx.cofree.carrier, ny.cofree.carrier, n)
        wpos = tensor_position(W.normal, Cc, n)
        cols = []
        for col in emb.level(n).columns():
            acc = {}
            for r, v in col.items():
                p, u, q, w = bb[r]
                i, a, j, b = tensor_basis(MX, Cc, p)[u]
                if j != 0:
                    continue
                e = eps.level(0).column(b).get(0, F.zero)
                if not e:
                    continue
                i2, a2, j2, b2 = tensor_basis(MY, Cc, q)[w]
                for k, c in ez_elem(MX, MY, i, a, i2, a2).items():
                    deg = i + i2
                    s_idx = A.index(deg)[k]
                    for wi, rv in retr.level(deg).column(s_idx).items():
                        row = wpos[(deg, wi, b2)]
                        acc[row] = F.add(acc.get(row, F.zero), F.mul(F.mul(v, e), F.mul(F(c), rv)))
            cols.append({k: x for k, x in acc.items() if x})
        levels[n] = Mat.from_sparse_columns(X.field, WC.dim(n), cols)
    g = ChainMap(T.carrier, WC, levels, check=False)
    # the EZ image of a cotensor element must land inside W before retracting
    f = _retract_through(nw.inclusion, g)
    return T, nw, ComoduleMap(T.comodule, nw.comodule, f)
