"""Postnikov towers of comodules over a simply connected coalgebra and their
stabilized limits (fibrant replacements), in the dg and simplicial worlds.

Stage convention: X(0) = 0, X(1) is the cofree comodule on the underlying
complex, and X(n+1) is the pullback of X(n) -> S^n(V_n)⊗C along the
disk-to-sphere map, with V_n the cokernel of H_n(X) -> H_n(X(n)).  The fibre
of X(n+1) -> X(n) is S^{n-1}(V_n)⊗C, so degree i is constant from stage i+2 on.
"""

from dataclasses import dataclass, field as dc_field

from .exactla import Mat, kernel, solve_many, rank, hstack, vstack, NoSolution
from .chain import (
    ChainComplex, ChainMap, sphere, disk, disk_to_sphere, direct_sum, subcomplex,
    attaching_matrix, homology, induced_map, is_quasi_iso, is_injective_map,
    is_surjective_map, is_simply_connected, identity_map, tensor_basis, tensor, tensor_map,
)
from .comod import (
    Comodule, ComoduleMap, SComodule, SComoduleMap, cofree, extend, zero_comodule,
    kernel_comodule, validate_comodule, scofree, ssub_comodule, gamma_of, gamma_comodule,
    counit_projection, _retract_through, is_valid_comodule,
)
from .simplicial import (
    flat, LevelwiseMap, KeyedMap, keyed_to_mat, ez_elem, NegativeSupport,
)


class TowerError(Exception):
    pass


class NotSimplyConnected(TowerError):
    pass


class NotStabilized(TowerError):
    def __init__(self, degree):
        super().__init__(f"tower not stabilized in degree {degree}")
        self.degree = degree


@dataclass
class Stage:
    index: int
    comodule: object
    to_prev: ChainMap = None       # X(n) -> X(n-1)
    j: ChainMap = None             # X -> X(n)
    V: int = 0                     # dim of the module attached to reach this stage
    attaching: ChainMap = None     # X(n-1) -> S^{n-1}(V)
    fiber: ChainMap = None         # S^{n-2}(V)⊗C (in normal form for simplicial) -> X(n)
    compare: ChainMap = None       # dg stage -> normalized simplicial stage (seeded towers)

    @property
    def carrier(self):
        c = self.comodule
        return c.normal if isinstance(c, SComodule) else c.carrier


@dataclass
class PostnikovTower:
    coalgebra: object
    source: object
    stages: list
    n_max: int
    world: str = "dg"
    seed: object = None

    @property
    def V(self):
        return {s.index - 1: s.V for s in self.stages if s.index >= 2}

    def stage(self, n):
        return self.stages[n]


def _check_input(X):
    C = X.coalgebra if isinstance(X, Comodule) else X.coalgebra.base
    if not is_simply_connected(C.carrier):
        raise NotSimplyConnected("the coalgebra must be simply connected")
    M = X.carrier if isinstance(X, Comodule) else X.normal
    if any(M.dim(n) for n in M.degrees if n < 0):
        raise NegativeSupport("towers are built for non-negative comodules")


# ---- dg towers ----

def _recast(f, source=None, target=None):
    return ChainMap(source or f.source, target or f.target, f.levels, check=False)


def attach_comodule(Y, g, n):
    """Pullback of Y -> S^n(V)⊗C <- D^n(V)⊗C written as Y ⊕ S^{n-1}(V)⊗C.

    g: Y_n -> V is the attaching matrix; the map to the sphere is its cofree
    extension f.  d(x, b) = (dx, f(x) + d b) and ρ(x, b) = (ρx, (1⊗Δ)b).
    """
    C = Y.coalgebra
    F = Y.field
    v = g.rows
    Sn = sphere(F, v, n)
    cofS = cofree(Sn, C)
    W = cofree(sphere(F, v, n - 1), C)
    f = extend(Y, ChainMap(Y.carrier, Sn, {n: g}, check=False), cofS).map
    S, (i1, i2), (p1, p2) = direct_sum(Y.carrier, W.carrier)
    d = {}
    for m in range(S.lo + 1, S.hi + 1):
        dm = S.d(m)
        if Y.carrier.dim(m) and W.carrier.dim(m - 1):
            # (S^n(V)⊗C)_m and (S^{n-1}(V)⊗C)_{m-1} share the basis V⊗C_{m-n}
            dm = dm + i2.level(m - 1) @ f.level(m) @ p1.level(m)
        d[m] = dm
    P = ChainComplex(F, S.support, S.dims, d)
    i1, i2 = _recast(i1, target=P), _recast(i2, target=P)
    p1, p2 = _recast(p1, source=P), _recast(p2, source=P)
    PC = tensor(P, C.carrier)
    I = identity_map(C.carrier)
    rho = tensor_map(i1, I, source=Y.XC, target=PC) @ Y.rho @ p1 + \
        tensor_map(i2, I, source=W.XC, target=PC) @ W.rho @ p2
    Pm = Comodule(C, P, rho, name="stage")
    return Pm, p1, ComoduleMap(W, Pm, i2), W, ChainMap(Y.carrier, Sn, {n: g}, check=False)


def _stage_one(X):
    C = X.coalgebra
    X1 = cofree(X.carrier, C)
    j1 = _recast(X.rho, target=X1.carrier)
    zero = zero_comodule(C)
    return X1, j1, zero


def build_tower(X, n_max):
    """The dg Postnikov tower X(0), …, X(n_max) of a comodule X."""
    if isinstance(X, SComodule):
        return build_stower(X, n_max)
    if X.field.is_product:
        return tuple(build_tower(X.factor(k), n_max) for k in range(len(X.field.factors)))
    _check_input(X)
    C = X.coalgebra
    X1, j1, zero = _stage_one(X)
    stages = [Stage(0, zero, None, ChainMap(X.carrier, zero.carrier, {}, check=False)),
              Stage(1, X1, ChainMap(X1.carrier, zero.carrier, {}, check=False), j1)]
    for n in range(1, n_max):
        cur = stages[-1]
        g, _ = attaching_matrix(cur.j, n)
        if g.rows == 0:
            Y = cur.comodule
            stages.append(Stage(n + 1, Y, identity_map(Y.carrier), cur.j, 0))
            continue
        P, proj, fib, W, att = attach_comodule(cur.comodule, g, n)
        j = _lift_zero(cur.j, P.carrier)
        stages.append(Stage(n + 1, P, proj, j, g.rows, att, fib))
    return PostnikovTower(C, X, stages, n_max, "dg")


def _lift_zero(j, P):
    """(j, 0): X -> Y ⊕ W for the explicit pullback, where Y comes first."""
    F = j.field
    lv = {}
    for m in j.source.degrees:
        if j.source.dim(m) and P.dim(m):
            top = j.level(m)
            extra = P.dim(m) - top.rows
            lv[m] = vstack(F, [top, Mat.zero(F, extra, j.source.dim(m))]) if extra else top
    return ChainMap(j.source, P, lv, check=False)


# ---- limits and fibrant replacement ----

@dataclass
class Limit:
    comodule: object
    valid: int          # degrees <= valid agree with the limit of the tower
    stage: int


def stabilization_witnesses(t):
    """{(n, i): bool} — structure map X(n+1) -> X(n) is the identity in degree i, i <= n-2."""
    out = {}
    for s in t.stages[2:]:
        n = s.index - 1
        for i in range(0, n - 1):
            A = s.carrier
            B = t.stages[n].carrier
            out[(n, i)] = A.dim(i) == B.dim(i) and s.to_prev.level(i) == Mat.identity(A.field, A.dim(i))
    return out


def limit_of_tower(t):
    """Degree i of the limit is degree i of stage min(i+2, N); valid for i <= N-2."""
    N = t.n_max
    wit = stabilization_witnesses(t)
    for i in range(0, N - 1):
        for n in range(i + 2, N):
            if not wit.get((n, i), False):
                raise NotStabilized(i)
    return Limit(t.stages[N].comodule, N - 2, N)


@dataclass
class FibrantReplacement:
    tower: PostnikovTower
    limit: Limit
    j: ChainMap

    @property
    def comodule(self):
        return self.limit.comodule

    @property
    def valid(self):
        return self.limit.valid


def fibrant_replace(X, n_max):
    t = build_tower(X, n_max)
    if isinstance(t, tuple):
        return tuple(_fr(s) for s in t)
    return _fr(t)


def _fr(t):
    L = limit_of_tower(t)
    return FibrantReplacement(t, L, t.stages[t.n_max].j)


def cofree_retraction(X, t):
    """For cofree X = M⊗C: the comodule map X(1) = (M⊗C)⊗C -> X, (m⊗c)⊗c' ↦ ε(c) m⊗c', with r∘j_1 = id."""
    C = X.coalgebra
    X1 = t.stages[1].comodule
    r = tensor_map(counit_projection(X), identity_map(C.carrier), source=X1.carrier, target=X.carrier)
    return ComoduleMap(X1, X, r)


# ---- verification ----

def verify_tower(t, X=None):
    """Report on the tower properties; every listed failure is a bug."""
    if isinstance(t, tuple):
        reps = [verify_tower(s) for s in t]
        return {"ok": all(r["ok"] for r in reps), "factors": reps}
    X = X or t.source
    simplicial = t.world == "simplicial"
    M = X.normal if simplicial else X.carrier
    fails = []
    rep = {"stages": []}
    for s in t.stages:
        n = s.index
        st = {"index": n, "dims": dict(s.carrier.dims), "V": s.V}
        if n >= 1:
            v = is_quasi_iso(s.j, degrees=range(0, n))
            st["homology"] = v.ok
            st["j_injective"] = is_injective_map(s.j)
            if not v.ok:
                fails.append(("homology", n))
            if not st["j_injective"]:
                fails.append(("j_injective", n))
        if n >= 2:
            p = s.to_prev
            prev = t.stages[n - 1]
            st["surjective"] = is_surjective_map(p, [i for i in prev.carrier.degrees if i > 0])
            st["compatible"] = (p @ s.j).levels == {k: m for k, m in prev.j.levels.items()} or \
                all((p @ s.j).level(i) == prev.j.level(i) for i in M.degrees)
            st["stable"] = all(p.level(i) == Mat.identity(p.field, s.carrier.dim(i))
                               and s.carrier.dim(i) == prev.carrier.dim(i) for i in range(0, n - 2))
            st["ses"] = _ses_ok(t, s)
            for key in ("surjective", "compatible", "stable", "ses"):
                if not st[key]:
                    fails.append((key, n))
        if s.compare is not None:
            c = s.compare
            # the simplicial stages are built up to a degree bound; compare below it
            st["compare"] = _chain_map_upto(c, c.target.hi) and \
                is_quasi_iso(c, degrees=range(0, t.n_max - 1)).ok
            if t.seed is not None and st["compare"]:
                G = gamma_comodule(t.seed.stages[n].comodule, s.comodule.coalgebra.carrier.level_bound)
                st["compare"] = SComoduleMap(G, s.comodule, c).is_comodule_map(top=t.n_max - 1)
            if not st["compare"]:
                fails.append(("compare", n))
        rep["stages"].append(st)
    rep["stabilization"] = all(stabilization_witnesses(t).values())
    rep["failures"] = fails
    rep["ok"] = not fails and rep["stabilization"]
    return rep


def _chain_map_upto(f, top):
    return all(f.target.d(n) @ f.level(n) == f.level(n - 1) @ f.source.d(n)
               for n in f.degrees if f.degrees.start < n <= top)


def _ses_ok(t, s):
    """ker(X(n) -> X(n-1)) is the image of the fibre, and the fibre embeds."""
    p = s.to_prev
    if s.V == 0:
        return all(p.level(i) == Mat.identity(p.field, s.carrier.dim(i)) for i in s.carrier.degrees
                   if s.carrier.dim(i))
    fib = s.fiber
    fm = fib.map if hasattr(fib, "map") else fib
    if not is_injective_map(fm) or not (p @ fm).is_zero() or not fm.is_chain_map():
        return False
    for i in s.carrier.degrees:
        kd = s.carrier.dim(i) - rank(p.level(i)) if s.carrier.dim(i) else 0
        if kd != fm.source.dim(i):
            return False
    if hasattr(fib, "is_comodule_map"):
        return fib.is_comodule_map()
    return True


# ---- simplicial towers ----

def _as_chain(keyed, ft):
    return KeyedMap(keyed.source, ft, keyed.cols).chain_map()


def _attach_s(Y, g, n, bound):
    D = Y.coalgebra
    F = Y.field
    Fb = F.base
    v = g.rows
    Sn, Dn = sphere(F, v, n), disk(F, v, n)
    gmap = ChainMap(Y.normal, Sn, {n: g}, check=False)
    fS = flat((Sn,))
    fl = LevelwiseMap(Y.flat_xc, [(fS, gmap), None])
    E = scofree(Dn, D, bound)
    inner = flat((Dn, D.C), bound=bound)
    Ec = E.normal
    pl = LevelwiseMap(inner, [(fS, disk_to_sphere(F, v, n)), None])
    M = Y.normal
    S, (i1, i2), (q1, q2) = direct_sum(M, Ec)
    basis = {}
    for i in S.degrees:
        fc = [fl.image_elem(Y.rho.keyed(i, a), i) for a in range(M.dim(i))]
        pc = [pl.image_key(key, i) for key in inner.basis(i)] if Ec.dim(i) else []
        (fm, pm), _ = keyed_to_mat(F, [fc, pc])
        m, e = M.dim(i), Ec.dim(i)
        if fm.rows == 0:
            sol = Mat.zero(F, e, m)
            K = Mat.identity(F, e)
        else:
            sol = solve_many(pm, fm) if m else Mat.zero(F, e, 0)
            K = kernel(pm)
        top = hstack(F, [Mat.identity(F, m), Mat.zero(F, m, K.cols)], m)
        bot = hstack(F, [sol, K], e)
        basis[i] = vstack(F, [top, bot])
    P, incl = subcomplex(S, basis)
    big = {}
    for i in P.degrees:
        if not P.dim(i):
            continue
        es = []
        for col in incl.level(i).columns():
            acc = {}
            for r, c in col.items():
                if r < M.dim(i):
                    items = Y.rho.keyed(i, r).items()
                    shift = 0
                else:
                    items = E.rho.keyed(i, r - M.dim(i)).items()
                    shift = 1
                for key, w in items:
                    sig, a = key[0]
                    k2 = ((sig, a + (M.dim(sig[-1]) if shift else 0)),) + key[1:]
                    acc[k2] = Fb.add(acc.get(k2, Fb.zero), Fb.mul(c, w))
            es.append({k: x for k, x in acc.items() if x})
        big[i] = es
    full = SComodule(D, S, None)
    Pm, _ = ssub_comodule(full, incl, big, name="stage")
    proj = q1 @ incl
    # the fibre: N(K(V, n-1)⊗ΓC) mapped into the disk part, then into P
    Sm = sphere(F, v, n - 1)
    fib_ft = flat((Sm, D.C), bound=bound)
    Fc = fib_ft.complex()
    iota = ChainMap(Sm, Dn, {n - 1: Mat.identity(F, v)}, check=False)
    il = LevelwiseMap(fib_ft, [(flat((Dn,)), iota), None])
    lv = {}
    for i in Fc.degrees:
        if Fc.dim(i) and Ec.dim(i):
            idx = inner.index(i)
            cols = [{idx[k]: x for k, x in il.image_key(key, i).items()} for key in fib_ft.basis(i)]
            lv[i] = Mat.from_sparse_columns(F, Ec.dim(i), cols)
    to_E = ChainMap(Fc, Ec, lv, check=False)
    fiber = _retract_through(incl, i2 @ to_E)
    return Pm, proj, fiber, incl, (i1, i2), inner, E, gmap


def _seeded_attaching(phi, g_dg, Mn, n):
    """g_s with g_s∘φ_n = g_dg and g_s∘d_{n+1} = 0."""
    F = phi.field
    A = hstack(F, [phi.level(n), Mn.d(n + 1)], Mn.dim(n))
    T = hstack(F, [g_dg, Mat.zero(F, g_dg.rows, Mn.dim(n + 1))], g_dg.rows)
    return solve_many(A.T, T.T).T


def _ez_matrix(M, C, ft, n, F):
    """EZ: (M⊗C)_n -> flat((M, C)) degree n as a matrix."""
    idx = ft.index(n)
    cols = []
    for (i, a, j, b) in tensor_basis(M, C, n):
        cols.append({idx[k]: F.base(c) for k, c in ez_elem(M, C, i, a, j, b).items()})
    return Mat.from_sparse_columns(F, len(idx), cols)


def build_stower(Xs, n_max, seed=None, bound=None):
    """Simplicial Postnikov tower by levelwise pullbacks, in normal form.

    With seed = the dg tower of a dg comodule X and Xs = gamma_comodule(X),
    the attaching maps are chosen to match the dg ones through comparison
    maps φ_n: X(n)_dg -> N(X(n)_s), which are recorded on each stage.
    """
    if isinstance(Xs, tuple):
        seeds = seed if isinstance(seed, tuple) else (None,) * len(Xs)
        return tuple(build_stower(x, n_max, sd, bound) for x, sd in zip(Xs, seeds))
    _check_input(Xs)
    D = Xs.coalgebra
    F = Xs.field
    bound = n_max + 1 if bound is None else bound
    M = Xs.normal
    X1 = scofree(M, D, bound)
    inner = flat((M, D.C), bound=bound)
    j1 = KeyedMap(M, inner, Xs.rho.cols).chain_map()
    j1 = _recast(j1, target=X1.normal)
    Z = ChainComplex(F, (0, 0), {0: 0}, {})
    zero = SComodule(D, Z, KeyedMap(Z, flat((Z, D.C)), {}))
    stages = [Stage(0, zero, None, ChainMap(M, Z, {}, check=False)),
              Stage(1, X1, ChainMap(X1.normal, Z, {}, check=False), j1)]
    if seed is not None:
        dg1 = seed.stages[1].carrier
        lv = {n: _ez_matrix(M, D.C, inner, n, F) for n in dg1.degrees if n <= X1.normal.hi and dg1.dim(n)}
        stages[1].compare = ChainMap(dg1, X1.normal, lv, check=False)
    for n in range(1, n_max):
        cur = stages[-1]
        if seed is not None:
            sd = seed.stages[n + 1]
            g_dg = sd.attaching.level(n) if sd.V else Mat.zero(F, 0, seed.stages[n].carrier.dim(n))
            g = _seeded_attaching(cur.compare, g_dg, cur.carrier, n) if sd.V else Mat.zero(F, 0, cur.carrier.dim(n))
        else:
            g, _ = attaching_matrix(cur.j, n)
        if g.rows == 0:
            Y = cur.comodule
            st = Stage(n + 1, Y, identity_map(Y.normal), cur.j, 0)
            if seed is not None:
                st.compare = cur.compare
            stages.append(st)
            continue
        Pm, proj, fiber, incl, (i1, i2), Dflat, E, gmap = _attach_s(cur.comodule, g, n, bound)
        j = _retract_through(incl, i1 @ cur.j)
        st = Stage(n + 1, Pm, proj, j, g.rows, gmap, fiber)
        if seed is not None:
            st.compare = _compare_step(seed.stages[n + 1], seed.stages[n].comodule, cur, st, incl,
                                       Dflat, n, F)
        stages.append(st)
    return PostnikovTower(D, Xs, stages, n_max, "simplicial", seed)


def _compare_step(sd, prev, cur, st, incl, Dflat, n, F):
    """φ_{n+1}(x, b) = (φ_n x, EZ(f(x)_u + b_v)) for the explicit dg pullback."""
    Pdg = sd.carrier
    Y = prev.carrier
    Fb = F.base
    v = sd.V
    Dn, C = Dflat.factors
    Sn = sphere(F, v, n)
    f = extend(prev, sd.attaching, cofree(Sn, prev.coalgebra)).map
    lv = {}
    for i in Pdg.degrees:
        if not Pdg.dim(i) or not st.carrier.dim(i):
            continue
        y = Y.dim(i)
        idx = Dflat.index(i) if Dflat.bound >= i else {}
        phi = cur.compare.level(i)
        left = phi if y else Mat.zero(F, cur.carrier.dim(i), 0)
        cols_e = []
        tb_s = tensor_basis(Sn, C, i)
        tb_w = tensor_basis(sphere(F, v, n - 1), C, i)
        for a in range(Pdg.dim(i)):
            acc = {}
            if a < y:
                for r, c in f.level(i).column(a).items():
                    p, u, q, w = tb_s[r]
                    for k, s in ez_elem(Dn, C, p, u, q, w).items():
                        acc[idx[k]] = Fb.add(acc.get(idx[k], Fb.zero), Fb.mul(c, Fb(s)))
            else:
                p, u, q, w = tb_w[a - y]
                for k, s in ez_elem(Dn, C, p, u, q, w).items():
                    acc[idx[k]] = Fb.add(acc.get(idx[k], Fb.zero), Fb(s))
            cols_e.append({k: x for k, x in acc.items() if x})
        E_dim = incl.target.dim(i) - cur.carrier.dim(i)
        e_part = Mat.from_sparse_columns(F, E_dim, cols_e)
        m_part = hstack(F, [left, Mat.zero(F, cur.carrier.dim(i), Pdg.dim(i) - y)], cur.carrier.dim(i))
        lv[i] = solve_many(incl.level(i), vstack(F, [m_part, e_part]))
    return ChainMap(Pdg, st.carrier, lv, check=False)
