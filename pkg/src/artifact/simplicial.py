"""Simplicial modules in Dold-Kan normal form.

A simplicial module is stored as its normalized chain complex X.  Level n of
Γ(X) has basis tags (σ, a): σ a monotone surjection [n] ->> [k] written as its
value tuple, a a basis index of X_k.  The normalized complex is taken to be
the intersection of the kernels of d_1, ..., d_n with differential d_0, so
the summand σ = id is the normalized part and (id, a) has d_0 = (id, d a).

Levelwise tensor products A_1 ⊗ ... ⊗ A_r of such modules are handled by
FlatTensor: their normalized chains are the quotient by degeneracies, with
basis the tag tuples whose surjections have no common flat step.
"""

import heapq
from functools import lru_cache
from itertools import combinations

from .exactla import Mat, FieldMismatch
from .chain import (
    ChainComplex, ChainMap, ShapeMismatch, tensor, tensor_position, tensor_basis,
    homology, unit_complex, sphere, disk, disk_to_sphere, componentwise,
)


class SimplicialError(Exception):
    pass


class NegativeSupport(SimplicialError):
    pass


class LevelBoundExceeded(SimplicialError):
    pass


class BadDegree(SimplicialError):
    pass


DEFAULT_LEVEL_BOUND = 8
# normalized levelwise tensors are materialized up to this degree
FLAT_DEGREE_CAP = 10


# ---- Δ combinatorics ----

@lru_cache(maxsize=None)
def surjections(n, k):
    """Monotone surjections [n] ->> [k] as value tuples, lexicographic."""
    if k > n or k < 0:
        return ()
    out = []
    for jumps in combinations(range(n), k):
        v, vals = 0, [0]
        js = set(jumps)
        for i in range(n):
            if i in js:
                v += 1
            vals.append(v)
        out.append(tuple(vals))
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def all_surjections(n):
    return tuple(sorted(s for k in range(n + 1) for s in surjections(n, k)))


@lru_cache(maxsize=None)
def face_op(n, i):
    """δ^i: [n-1] -> [n] skipping i."""
    return tuple(j for j in range(n + 1) if j != i)


@lru_cache(maxsize=None)
def degen_op(n, i):
    """σ^i: [n+1] -> [n] repeating i."""
    return tuple(j if j <= i else j - 1 for j in range(n + 2))


@lru_cache(maxsize=None)
def _epi_mono(sigma, theta):
    """Factor σ∘θ = μ∘ε; returns (ε, kind) with kind 'id', 'd0' or None."""
    comp = tuple(sigma[t] for t in theta)
    k = sigma[-1]
    img = sorted(set(comp))
    if len(img) == k + 1:
        return comp, "id"
    if len(img) == k and img[0] == 1:
        return tuple(c - 1 for c in comp), "d0"
    return None, None


class _Atom:
    """Γ-action data for one normalized complex."""

    def __init__(self, X):
        self.X = X
        self.F = X.field.base
        self._dcols = {}

    def dcol(self, k, a):
        key = (k, a)
        c = self._dcols.get(key)
        if c is None:
            c = self.X.d(k).column(a)
            self._dcols[key] = c
        return c

    def act(self, theta, tag):
        """θ^*(σ, a) as a list of ((ε, b), coeff)."""
        sigma, a = tag
        eps, kind = _epi_mono(sigma, theta)
        if kind == "id":
            return [((eps, a), self.F.one)]
        if kind == "d0":
            return [((eps, b), v) for b, v in self.dcol(sigma[-1], a).items()]
        return []


_ATOMS = {}


def _atom(X):
    a = _ATOMS.get(id(X))
    if a is None or a.X is not X:
        a = _Atom(X)
        _ATOMS[id(X)] = a
    return a


@lru_cache(maxsize=None)
def _degeneracy_mask(sigma):
    """Bit i set when sigma repeats at positions i, i+1."""
    m = 0
    for i in range(len(sigma) - 1):
        if sigma[i] == sigma[i + 1]:
            m |= 1 << i
    return m


def is_nondegenerate(sigmas, n):
    m = (1 << n) - 1
    for s in sigmas:
        m &= _degeneracy_mask(s)
        if not m:
            return True
    return not m


class FlatTensor:
    """Normalized chains of the levelwise tensor Γ(X_1) ⊗ ... ⊗ Γ(X_r)."""

    def __init__(self, factors, bound=None):
        factors = tuple(factors)
        for X in factors:
            if X.lo < 0 and any(X.dim(n) for n in X.degrees if n < 0):
                raise NegativeSupport("simplicial factors must be non-negative")
        if factors:
            f0 = factors[0].field
            if any(X.field != f0 for X in factors):
                raise FieldMismatch("levelwise tensor over different fields")
            self.field = f0
        else:
            self.field = None
        self.factors = factors
        self.atoms = [_atom(X) for X in factors]
        self.top = sum(max([n for n in X.degrees if X.dim(n)] or [0]) for X in factors)
        self.bound = min(self.top, FLAT_DEGREE_CAP if bound is None else bound)
        self._basis = {}
        self._index = {}
        self._complex = None
        self._moore = {}
        self._act = {}

    def _set_field(self, field_):
        self.field = field_

    @property
    def F(self):
        return self.field.base

    def basis(self, n):
        b = self._basis.get(n)
        if b is None:
            b = self._enumerate(n)
            self._basis[n] = b
            self._index[n] = {key: i for i, key in enumerate(b)}
        return b

    def index(self, n):
        self.basis(n)
        return self._index[n]

    def _enumerate(self, n):
        r = len(self.factors)
        if r == 0:
            return [()] if n == 0 else []
        tops = [[k for k in X.degrees if X.dim(k) and 0 <= k <= n] for X in self.factors]
        out = []

        def paths(ks):
            # sequences of n nonempty step-sets reaching ks exactly
            res = []

            def rec(i, cur, rem):
                left = n - i
                if max(rem) > left:
                    return
                if left == 0:
                    if not any(rem):
                        res.append(tuple(tuple(c) for c in cur))
                    return
                if sum(rem) < left:
                    return
                avail = [t for t in range(r) if rem[t] > 0]
                for size in range(1, len(avail) + 1):
                    for S in combinations(avail, size):
                        for t in range(r):
                            cur[t].append(cur[t][-1] + (1 if t in S else 0))
                        nrem = list(rem)
                        for t in S:
                            nrem[t] -= 1
                        rec(i + 1, cur, nrem)
                        for t in range(r):
                            cur[t].pop()

            rec(0, [[0] for _ in range(r)], list(ks))
            return res

        def choose(t, ks):
            if t == r:
                if sum(ks) < n:
                    return
                for sig in paths(ks):
                    idx_lists = [range(self.factors[u].dim(ks[u])) for u in range(r)]
                    for combo in _product(idx_lists):
                        out.append(tuple((sig[u], combo[u]) for u in range(r)))
                return
            for k in tops[t]:
                choose(t + 1, ks + [k])

        choose(0, [])
        out.sort()
        return out

    # -- actions on general (possibly degenerate) keys --
    def act(self, theta, key):
        ck = (theta, key)
        got = self._act.get(ck)
        if got is None:
            got = self._act_raw(theta, key)
            self._act[ck] = got
        return got

    def _act_raw(self, theta, key):
        res = {(): self.F.one} if self.factors else {(): 1}
        for atom, tag in zip(self.atoms, key):
            terms = atom.act(theta, tag)
            if not terms:
                return {}
            nxt = {}
            F = atom.F
            for k0, c0 in res.items():
                for t1, c1 in terms:
                    nk = k0 + (t1,)
                    nxt[nk] = F.add(nxt.get(nk, F.zero), F.mul(c0, c1))
            res = {k: v for k, v in nxt.items() if v}
        return res

    def act_elem(self, theta, elem):
        F = self.F
        out = {}
        for key, c in elem.items():
            for k2, c2 in self.act(theta, key).items():
                out[k2] = F.add(out.get(k2, F.zero), F.mul(c, c2))
        return {k: v for k, v in out.items() if v}

    def reduce(self, elem, n):
        """Project a level-n element onto the nondegenerate basis (quotient model)."""
        return {k: v for k, v in elem.items() if is_nondegenerate([t[0] for t in k], n)}

    def moore(self, key, m):
        """Representative of a nondegenerate key in ∩_{i≥1} ker d_i at level m."""
        ck = (key, m)
        got = self._moore.get(ck)
        if got is not None:
            return got
        if not self.factors:
            return {key: 1}
        F = self.F
        elem = {key: F.one}
        for j in range(m - 1, -1, -1):
            t = self.act_elem(degen_op(m - 1, j), self.act_elem(face_op(m, j + 1), elem))
            for k2, v in t.items():
                w = F.sub(elem.get(k2, F.zero), v)
                if w:
                    elem[k2] = w
                else:
                    elem.pop(k2, None)
        self._moore[ck] = elem
        return elem

    def complex(self):
        if self._complex is None:
            self._complex = self._build_complex()
            _COMPLEX_OWNER[id(self._complex)] = self
        return self._complex

    def _build_complex(self):
        if not self.factors:
            return unit_complex(self.field)
        F = self.F
        hi = max(self.bound, 0)
        dims = {n: len(self.basis(n)) for n in range(0, hi + 1)}
        d = {}
        for n in range(1, hi + 1):
            idx = self.index(n - 1)
            cols = []
            for key in self.basis(n):
                acc = {}
                for i in range(n + 1):
                    sgn = F.one if i % 2 == 0 else F.neg(F.one)
                    for k2, v in self.reduce(self.act(face_op(n, i), key), n - 1).items():
                        r = idx[k2]
                        acc[r] = F.add(acc.get(r, F.zero), F.mul(sgn, v))
                cols.append({r: v for r, v in acc.items() if v})
            d[n] = Mat.from_sparse_columns(self.field, dims[n - 1], cols)
        return ChainComplex(self.field, (0, hi), dims, d, check=False)

    def boundary(self, elem, n):
        """Σ(-1)^i d_i on a level-n element, reduced to nondegenerate keys."""
        F = self.F
        out = {}
        if n == 0 or not self.factors:
            return out
        for key, v in elem.items():
            for i in range(n + 1):
                sg = v if i % 2 == 0 else F.neg(v)
                for k2, c in self.act(face_op(n, i), key).items():
                    out[k2] = F.add(out.get(k2, F.zero), F.mul(sg, c))
        return self.reduce({k: v for k, v in out.items() if v}, n - 1)

    def element_to_vector(self, elem, n):
        idx = self.index(n)
        F = self.F
        out = {}
        for k, v in self.reduce(elem, n).items():
            r = idx[k]
            out[r] = F.add(out.get(r, F.zero), v)
        return {r: v for r, v in out.items() if v}


def _product(lists):
    res = [()]
    for L in lists:
        res = [p + (x,) for p in res for x in L]
    return res


_FLATS = {}
_COMPLEX_OWNER = {}


def flat(factors, field_=None, bound=None):
    """Cached FlatTensor over the given normalized complexes."""
    key = (tuple(id(X) for X in factors) if factors else ("unit", field_), bound)
    got = _FLATS.get(key)
    if got is not None and all(a is b for a, b in zip(got.factors, factors)):
        return got
    ft = FlatTensor(factors, bound)
    if field_ is not None:
        ft._set_field(field_)
    _FLATS[key] = ft
    return ft


def clear_caches():
    _FLATS.clear()
    _PSI.clear()
    _COMPLEX_OWNER.clear()
    _ATOMS.clear()
    _epi_mono.cache_clear()


# ---- maps between flat tensors ----

class LevelwiseMap:
    """The normalization of a levelwise tensor of simplicial maps.

    maps[t] is None (identity on factor t) or a pair (flat_t, f_t) where f_t is
    a ChainMap from source.factors[t] into flat_t.complex().  Images are
    returned as dicts over nondegenerate keys of the concatenated target, so
    the target basis never has to be enumerated.
    """

    def __init__(self, source, maps):
        self.source = source
        self.maps = maps
        self.F = source.F
        self._tag = {}
        self._key = {}

    def _tag_image(self, t, tag, n):
        ck = (t, tag)
        got = self._tag.get(ck)
        if got is not None:
            return got
        F = self.F
        sigma, a = tag
        if self.maps[t] is None:
            res = {(tag,): F.one}
        else:
            ft, fmap = self.maps[t]
            k = sigma[-1]
            res = {}
            for key0, v in keyed_column(ft, fmap, k, a).items():
                for key, c in ft.moore(key0, k).items():
                    for k2, c2 in ft.act(sigma, key).items():
                        res[k2] = F.add(res.get(k2, F.zero), F.mul(F.mul(v, c), c2))
            res = {k: v for k, v in res.items() if v}
        self._tag[ck] = res
        return res

    def image_key(self, key, n):
        got = self._key.get(key)
        if got is not None:
            return got
        F = self.F
        acc = {(): F.one}
        for t, tag in enumerate(key):
            im = self._tag_image(t, tag, n)
            nxt = {}
            for k0, c0 in acc.items():
                for k1, c1 in im.items():
                    nk = k0 + k1
                    nxt[nk] = F.add(nxt.get(nk, F.zero), F.mul(c0, c1))
            acc = {k: v for k, v in nxt.items() if v}
            if not acc:
                break
        out = {k: v for k, v in acc.items() if is_nondegenerate([tg[0] for tg in k], n)}
        self._key[key] = out
        return out

    def image_elem(self, elem, n):
        """elem: {source key: coeff} at degree n."""
        F = self.F
        out = {}
        for key, c in elem.items():
            for k2, v in self.image_key(key, n).items():
                out[k2] = F.add(out.get(k2, F.zero), F.mul(c, v))
        return {k: v for k, v in out.items() if v}

    def image_vector(self, vec, n):
        """vec: {source basis index: coeff}."""
        base = self.source.basis(n)
        return self.image_elem({base[i]: v for i, v in vec.items()}, n)

    def chain_map(self, target, degrees=None):
        S = self.source.complex()
        T = target.complex()
        degrees = S.degrees if degrees is None else degrees
        levels = {}
        for n in degrees:
            if n > target.bound or n > self.source.bound:
                continue
            idx = target.index(n)
            cols = []
            for key in self.source.basis(n):
                cols.append({idx[k]: v for k, v in self.image_key(key, n).items()})
            levels[n] = Mat.from_sparse_columns(S.field, T.dim(n), cols)
        return ChainMap(S, T, levels, check=False)


class KeyedMap:
    """A chain map into ft.complex() stored as dicts over the keys of ft."""

    def __init__(self, source, ft, cols):
        self.source = source
        self.ft = ft
        self.cols = cols          # {n: [dict key -> coeff]}
        self.field = source.field

    def keyed(self, n, a):
        cs = self.cols.get(n)
        return cs[a] if cs else {}

    def chain_map(self):
        T = self.ft.complex()
        levels = {}
        for n, cs in self.cols.items():
            if n > T.hi:
                continue
            idx = self.ft.index(n)
            levels[n] = Mat.from_sparse_columns(self.field, T.dim(n),
                                                [{idx[k]: v for k, v in c.items()} for c in cs])
        return ChainMap(self.source, T, levels, check=False)

    def is_chain_map(self, top=None):
        X, ft = self.source, self.ft
        F = X.field.base
        for n in X.degrees:
            if n < 1 or (top is not None and n > top):
                continue
            for a in range(X.dim(n)):
                lhs = ft.boundary(self.keyed(n, a), n)
                rhs = {}
                for r, v in X.d(n).column(a).items():
                    for k, c in self.keyed(n - 1, r).items():
                        rhs[k] = F.add(rhs.get(k, F.zero), F.mul(v, c))
                if lhs != {k: v for k, v in rhs.items() if v}:
                    return False
        return True

    def __matmul__(self, g):
        """self ∘ g for a ChainMap g into self.source."""
        F = self.field.base
        cols = {}
        for n in g.source.degrees:
            if not g.source.dim(n):
                continue
            out = []
            for col in g.level(n).columns():
                acc = {}
                for r, v in col.items():
                    for k, c in self.keyed(n, r).items():
                        acc[k] = F.add(acc.get(k, F.zero), F.mul(v, c))
                out.append({k: v for k, v in acc.items() if v})
            cols[n] = out
        return KeyedMap(g.source, self.ft, cols)


class IdentityKeyed(KeyedMap):
    """The identity of ft.complex() as a KeyedMap."""

    def __init__(self, ft):
        self.ft = ft
        self.source = ft.complex()
        self.field = self.source.field

    def keyed(self, n, a):
        return {self.ft.basis(n)[a]: self.field.base.one}


def keyed_column(ft, fmap, k, a):
    if isinstance(fmap, KeyedMap):
        return fmap.keyed(k, a)
    if not fmap.target.dim(k):
        return {}
    base = ft.basis(k)
    return {base[r]: v for r, v in fmap.level(k).column(a).items()}


def to_keyed(ft, f):
    """A ChainMap into ft.complex() as a KeyedMap."""
    if isinstance(f, KeyedMap):
        return f
    return KeyedMap(f.source, ft, {n: [keyed_column(ft, f, n, a) for a in range(f.source.dim(n))]
                                   for n in f.source.degrees if f.source.dim(n)})


def ez_elem(X, Y, i, a, j, b):
    """EZ(x_{i,a} ⊗ y_{j,b}) as a dict over keys of flat((X, Y))."""
    return {((s1, a), (s2, b)): sg for (s1, s2), sg in shuffle_paths(i, j)}


_PSI = {}


def _psi(G):
    got = _PSI.get(id(G))
    if got is None or got[0] is not G:
        inner = _COMPLEX_OWNER[id(G.factors[0])]
        lm = LevelwiseMap(G, [(inner, IdentityKeyed(inner))] + [None] * (len(G.factors) - 1))
        got = (G, inner, lm, {})
        _PSI[id(G)] = got
    return got


def unflatten(G, elem, n):
    """Inverse of the canonical iso N(Γ(N(ΓA_1⊗…⊗ΓA_r)) ⊗ ΓB…) ≅ N(ΓA_1⊗…⊗ΓA_r⊗ΓB…).

    G = flat((Q,) + rest) with Q = inner.complex() for an inner FlatTensor; elem
    is a level-n element over keys of flat(inner.factors + rest).  The iso is
    unitriangular once keys are ordered by the joint rank of their inner part,
    which the peeling below exploits.
    """
    _, inner, psi, leads = _psi(G)
    r = len(inner.factors)
    F = G.F

    def lead(key):
        got = leads.get(key)
        if got is not None:
            return got
        gam = [t[0] for t in key[:r]]
        sigma, cur = [0], 0
        for i in range(1, n + 1):
            if any(g[i] != g[i - 1] for g in gam):
                cur += 1
            sigma.append(cur)
        reps = {}
        for i, s in enumerate(sigma):
            reps.setdefault(s, i)
        q = tuple((tuple(g[reps[s]] for s in range(cur + 1)), t[1]) for g, t in zip(gam, key[:r]))
        got = (cur, ((tuple(sigma), inner.index(cur)[q]),) + tuple(key[r:]))
        leads[key] = got
        return got

    resid = {k: v for k, v in elem.items() if v}
    heap = [(-lead(k)[0], i, k) for i, k in enumerate(resid)]
    heapq.heapify(heap)
    tick = len(heap)
    out = {}
    while heap:
        _, _, k = heapq.heappop(heap)
        c = resid.get(k)
        if not c:
            continue
        pk = lead(k)[1]
        out[pk] = F.add(out.get(pk, F.zero), c)
        img = psi.image_key(pk, n)
        if img.get(k) != F.one:
            raise SimplicialError("unflatten lost triangularity")
        for k2, v in img.items():
            w = F.sub(resid.get(k2, F.zero), F.mul(c, v))
            if w:
                if k2 not in resid:
                    tick += 1
                    heapq.heappush(heap, (-lead(k2)[0], tick, k2))
                resid[k2] = w
            else:
                resid.pop(k2, None)
        if resid.get(k):
            raise SimplicialError("unflatten did not clear its leading key")
    return {k: v for k, v in out.items() if v}


def reindex_first(elem, mat_by_degree, F):
    """Apply a graded linear map to the index of the first tag of every key."""
    out = {}
    for key, v in elem.items():
        sigma, a = key[0]
        col = mat_by_degree(sigma[-1]).column(a)
        for r, c in col.items():
            k2 = ((sigma, r),) + tuple(key[1:])
            out[k2] = F.add(out.get(k2, F.zero), F.mul(v, c))
    return {k: v for k, v in out.items() if v}


def apply_levelwise(source, maps, target, degrees=None):
    return LevelwiseMap(source, maps).chain_map(target, degrees)


def keyed_columns(ft, f, n):
    """Columns of f at degree n as dicts over the nondegenerate keys of ft."""
    base = ft.basis(n)
    return [{base[r]: v for r, v in col.items()} for col in f.level(n).columns()]


def compose_keyed(lm, ft, f, n):
    """(levelwise map lm) ∘ f at degree n, with f landing in ft = lm.source."""
    return [lm.image_elem(col, n) for col in keyed_columns(ft, f, n)]


def keyed_to_mat(field_, column_sets):
    """Stack several lists of keyed columns over one shared row index."""
    index = {}
    for cols in column_sets:
        for col in cols:
            for k in col:
                if k not in index:
                    index[k] = len(index)
    mats = [Mat.from_sparse_columns(field_, len(index), [{index[k]: v for k, v in c.items()} for c in cols])
            for cols in column_sets]
    return mats, index


def permute_factors(source, perm, target):
    """Reorder factors: target.factors[i] = source.factors[perm[i]] (no signs)."""
    S, T = source.complex(), target.complex()
    levels = {}
    for n in S.degrees:
        idx = target.index(n)
        ent = {}
        for j, key in enumerate(source.basis(n)):
            ent[(idx[tuple(key[p] for p in perm)], j)] = 1
        levels[n] = Mat.from_entries(S.field, T.dim(n), S.dim(n), ent)
    return ChainMap(S, T, levels, check=False)


def identity_into_flat(ft):
    """The identity of ft.complex(), read as a map into the flat tensor ft."""
    C = ft.complex()
    return (ft, ChainMap(C, C, {n: Mat.identity(C.field, C.dim(n)) for n in C.degrees}, check=False))


# ---- simplicial modules ----

class LevelData:
    def __init__(self, n, tags, faces, degeneracies):
        self.n = n
        self.tags = tags
        self.dim = len(tags)
        self.faces = faces                # d_i: level n -> level n-1
        self.degeneracies = degeneracies  # s_i: level n -> level n+1


class SimplicialModule:
    """Γ(normal), materialized lazily up to level_bound."""

    def __init__(self, normal, level_bound=DEFAULT_LEVEL_BOUND):
        if any(normal.dim(n) for n in normal.degrees if n < 0):
            raise NegativeSupport("normal form must be non-negative")
        self.normal = normal
        self.level_bound = level_bound
        self.field = normal.field
        self._levels = {}

    def __eq__(self, other):
        return isinstance(other, SimplicialModule) and other.normal == self.normal

    __hash__ = None

    def factor(self, k):
        return SimplicialModule(self.normal.factor(k), self.level_bound)

    def level_tags(self, n):
        X = self.normal
        return [(s, a) for s in all_surjections(n) for a in range(X.dim(s[-1]))]

    def level_dim(self, n):
        return len(self.level_tags(n))

    def operator(self, theta, m, n):
        """Matrix of θ^*: level n -> level m for θ: [m] -> [n]."""
        if self.field.is_product:
            return Mat.join_factors(self.field, [self.factor(k).operator(theta, m, n)
                                                 for k in range(len(self.field.factors))])
        atom = _atom(self.normal)
        src = self.level_tags(n)
        idx = {t: i for i, t in enumerate(self.level_tags(m))}
        cols = []
        for tag in src:
            cols.append({idx[t2]: v for t2, v in atom.act(theta, tag)})
        return Mat.from_sparse_columns(self.field, len(idx), cols)

    def structure_maps(self, n):
        if n > self.level_bound:
            raise LevelBoundExceeded(f"level {n} > bound {self.level_bound}")
        got = self._levels.get(n)
        if got is None:
            faces = [self.operator(face_op(n, i), n - 1, n) for i in range(n + 1)] if n else []
            degs = [self.operator(degen_op(n, i), n + 1, n) for i in range(n + 1)]
            got = LevelData(n, self.level_tags(n), faces, degs)
            self._levels[n] = got
        return got


def gamma(X, level_bound=DEFAULT_LEVEL_BOUND):
    if any(X.dim(n) for n in X.degrees if n < 0):
        raise NegativeSupport("Γ needs a non-negative complex")
    if X.lo < 0:
        X = X.with_window(0, max(X.hi, 0))
    return SimplicialModule(X, level_bound)


def normalize(A):
    return A.normal


def homotopy_group(A, n):
    return homology(A.normal, n)


def eilenberg_maclane(field_, dim, n, level_bound=DEFAULT_LEVEL_BOUND):
    if n < 0:
        raise BadDegree("K(V, n) needs n >= 0")
    return gamma(sphere(field_, dim, n), level_bound)


def path_object(field_, dim, n, level_bound=DEFAULT_LEVEL_BOUND):
    """(PK(V,n), K(V,n), the projection as a map of normal forms)."""
    if n < 1:
        raise BadDegree("PK(V, n) needs n >= 1")
    p = disk_to_sphere(field_, dim, n)
    return gamma(p.source, level_bound), gamma(p.target, level_bound), p


@componentwise
def simplicial_identity_defects(A, top):
    """Count failures of the simplicial identities on levels 0..top."""
    bad = 0
    L = {n: A.structure_maps(n) for n in range(0, top + 1)}
    for n in range(0, top + 1):
        d, s = L[n].faces, L[n].degeneracies
        for i in range(n + 1):
            for j in range(i + 1, n + 1):
                if n >= 2 and L[n - 1].faces and d and \
                        L[n - 1].faces[i] @ d[j] != L[n - 1].faces[j - 1] @ d[i]:
                    bad += 1
        if n + 1 > top:
            continue
        up = L[n + 1]
        for i in range(n + 1):
            for j in range(i, n + 1):
                if up.degeneracies[i] @ s[j] != up.degeneracies[j + 1] @ s[i]:
                    bad += 1
        for i in range(n + 2):
            for j in range(n + 1):
                lhs = up.faces[i] @ s[j]
                if i < j:
                    rhs = L[n - 1].degeneracies[j - 1] @ d[i] if n >= 1 else None
                elif i in (j, j + 1):
                    rhs = Mat.identity(A.field, L[n].dim)
                else:
                    rhs = L[n - 1].degeneracies[j] @ d[i - 1] if n >= 1 else None
                if rhs is not None and lhs != rhs:
                    bad += 1
    return bad


def moore_complex(A, top):
    """Unnormalized Moore complex of A on levels 0..top."""
    dims = {n: A.level_dim(n) for n in range(top + 1)}
    d = {}
    for n in range(1, top + 1):
        faces = A.structure_maps(n).faces
        m = faces[0]
        for i in range(1, n + 1):
            m = m + faces[i] if i % 2 == 0 else m - faces[i]
        d[n] = m
    return ChainComplex(A.field, (0, top), dims, d, check=False)


# ---- levelwise tensor, EZ, AW ----

def levelwise_tensor(A, B):
    if A.field != B.field:
        raise FieldMismatch("levelwise tensor over different fields")
    ft = flat((A.normal, B.normal))
    return SimplicialModule(ft.complex(), min(A.level_bound, B.level_bound))


@lru_cache(maxsize=None)
def shuffle_paths(p, q):
    """((σ_1, σ_2), sign) for every (p, q)-shuffle path."""
    out = []
    for bsteps in combinations(range(p + q), q):
        bs = set(bsteps)
        s1, s2 = [0], [0]
        inv, seen_b = 0, 0
        for i in range(p + q):
            if i in bs:
                s1.append(s1[-1])
                s2.append(s2[-1] + 1)
                seen_b += 1
            else:
                s1.append(s1[-1] + 1)
                s2.append(s2[-1])
                inv += seen_b
        out.append(((tuple(s1), tuple(s2)), -1 if inv % 2 else 1))
    return tuple(out)


@componentwise
def eilenberg_zilber(X, Y, ft=None, XY=None):
    """EZ: X⊗Y -> N(ΓX ⊗ ΓY) for normalized complexes X, Y."""
    ft = ft or flat((X, Y))
    XY = XY or tensor(X, Y)
    T = ft.complex()
    F = X.field.base
    levels = {}
    for n in XY.degrees:
        if n > T.hi:
            continue
        idx = ft.index(n)
        cols = []
        for (i, a, j, b) in tensor_basis(X, Y, n):
            col = {}
            for (s1, s2), sg in shuffle_paths(i, j):
                r = idx[((s1, a), (s2, b))]
                col[r] = F.add(col.get(r, F.zero), F(sg))
            cols.append({r: v for r, v in col.items() if v})
        levels[n] = Mat.from_sparse_columns(X.field, T.dim(n), cols)
    return ChainMap(XY, T, levels, check=False)


@componentwise
def alexander_whitney(X, Y, ft=None, XY=None):
    """AW: N(ΓX ⊗ ΓY) -> X⊗Y, front face ⊗ back face."""
    ft = ft or flat((X, Y))
    XY = XY or tensor(X, Y)
    S = ft.complex()
    F = X.field.base
    ax, ay = _atom(X), _atom(Y)
    levels = {}
    for n in S.degrees:
        pos = tensor_position(X, Y, n)
        cols = []
        for (t1, t2) in ft.basis(n):
            col = {}
            for p in range(n + 1):
                front = tuple(range(p + 1))
                back = tuple(range(p, n + 1))
                for (e1, a), c1 in ax.act(front, t1):
                    if e1 != tuple(range(p + 1)):
                        continue
                    for (e2, b), c2 in ay.act(back, t2):
                        if e2 != tuple(range(n - p + 1)):
                            continue
                        r = pos[(p, a, b)]
                        col[r] = F.add(col.get(r, F.zero), F.mul(c1, c2))
            cols.append({r: v for r, v in col.items() if v})
        levels[n] = Mat.from_sparse_columns(X.field, XY.dim(n), cols)
    return ChainMap(S, XY, levels, check=False)
