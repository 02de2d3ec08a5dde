"""Seeded random generators for tests.

Shapes (dimensions, ranks, which summands) come from a field-independent
stream, so the F2xF3 instance for a seed is exactly the join of the F2 and F3
instances for that seed.
"""

import random
from fractions import Fraction

from artifact.exactla import Mat, field as make_field, rank, solve_many, hstack
from artifact.chain import (
    ChainComplex, ChainMap, direct_sum, sphere, disk, chain_map_space, homology, tensor,
)
from artifact.comod import cofree, extend, kernel_comodule, Comodule

FIELDS = ("F2", "F3", "F5", "Q")


def rngs(seed):
    return random.Random(seed), random.Random(seed * 7919 + 17)


def scalar(F, vr):
    if F.name == "Q":
        if vr.random() < 0.2:
            return Fraction(vr.randint(-3, 3), vr.randint(1, 3))
        return Fraction(vr.randint(-2, 2))
    return vr.randrange(F.p)


def random_mat(Fs, rows, cols, vr, density=0.6):
    F = Fs.base
    ent = {}
    for i in range(rows):
        for j in range(cols):
            if vr.random() < density:
                v = scalar(F, vr)
                if v:
                    ent[(i, j)] = v
    return Mat.from_entries(Fs, rows, cols, ent)


def random_invertible(Fs, n, vr):
    while True:
        m = random_mat(Fs, n, n, vr, 0.7)
        if rank(m) == n:
            return m


def join_complexes(Fs, parts):
    X = parts[0]
    d = {n: Mat.join_factors(Fs, [p.d(n) for p in parts]) for n in range(X.lo + 1, X.hi + 1)}
    return ChainComplex(Fs, X.support, X.dims, d)


def join_maps(Fs, parts, source, target):
    f = parts[0]
    lv = {n: Mat.join_factors(Fs, [p.level(n) for p in parts]) for n in f.degrees
          if source.dim(n) and target.dim(n)}
    return ChainMap(source, target, lv)


def _per_factor(Fs, make):
    """Build a single-field object per factor and join; make(F1) -> object."""
    return [make(Fs.factor(k)) for k in range(len(Fs.factors))]


def complex_shape(sr, lo, hi, maxdim):
    """[(kind, degree, dim)] with total degree-wise dims <= maxdim."""
    used = {n: 0 for n in range(lo - 1, hi + 2)}
    parts = []
    for _ in range(sr.randint(1, 2 * (hi - lo + 1))):
        kind = sr.choice(("sphere", "disk"))
        n = sr.randint(lo + (kind == "disk"), hi)
        k = sr.randint(1, 2)
        span = [n] if kind == "sphere" else [n, n - 1]
        if all(used[m] + k <= maxdim for m in span):
            for m in span:
                used[m] += k
            parts.append((kind, n, k))
    return parts


def random_complex(Fs, seed, lo=0, hi=4, maxdim=5):
    """A random complex: a conjugated sum of spheres and disks."""
    Fs = make_field(Fs)
    if Fs.is_product:
        return join_complexes(Fs, _per_factor(Fs, lambda F: random_complex(F, seed, lo, hi, maxdim)))
    sr, vr = rngs(seed)
    shape = complex_shape(sr, lo, hi, maxdim)
    pieces = [sphere(Fs, k, n) if kind == "sphere" else disk(Fs, k, n) for kind, n, k in shape]
    if not pieces:
        return ChainComplex(Fs, (lo, hi), {}, {})
    S, _, _ = direct_sum(*pieces)
    S = S.with_window(min(lo, S.lo), max(hi, S.hi))
    P = {n: random_invertible(Fs, S.dim(n), vr) for n in S.degrees if S.dim(n)}
    Pi = {n: solve_many(m, Mat.identity(Fs, m.rows)) for n, m in P.items()}
    d = {}
    for n in range(S.lo + 1, S.hi + 1):
        if S.dim(n) and S.dim(n - 1):
            d[n] = P[n - 1] @ S.d(n) @ Pi[n]
    return ChainComplex(Fs, S.support, S.dims, d)


def random_chain_map(X, Y, seed, span=4):
    """A random combination of a basis of Hom_Ch(X, Y)."""
    Fs = X.field
    if Fs.is_product:
        parts = [random_chain_map(X.factor(k), Y.factor(k), seed, span)
                 for k in range(len(Fs.factors))]
        return join_maps(Fs, parts, X, Y)
    _, vr = rngs(seed)
    basis = chain_map_space(X, Y)
    vr.shuffle(basis)
    lv = {n: Mat.zero(Fs, Y.dim(n), X.dim(n)) for n in X.degrees}
    for b in basis[:span]:
        c = scalar(Fs.base, vr)
        for n in X.degrees:
            lv[n] = lv[n] + b.level(n).scale((c,))
    return ChainMap(X, Y, lv)


def random_mono(Fs, seed, lo=0, hi=4, maxdim=5):
    """(i: A -> B) injective, B = A ⊕ W conjugated."""
    Fs = make_field(Fs)
    A = random_complex(Fs, seed, lo, hi, max(1, maxdim // 2))
    W = random_complex(Fs, seed + 1, lo, hi, max(1, maxdim // 2))
    S, (i1, _), _ = direct_sum(A, W)
    return conjugate_target(i1, seed)


def conjugate_target(i, seed):
    """i followed by a random degreewise change of basis of its target."""
    Fs = i.field
    if Fs.is_product:
        parts = [conjugate_target(i.factor(k), seed) for k in range(len(Fs.factors))]
        B = join_complexes(Fs, [p.target for p in parts])
        return join_maps(Fs, parts, i.source, B)
    _, vr = rngs(seed + 3)
    B = i.target
    P = {n: random_invertible(Fs, B.dim(n), vr) for n in B.degrees if B.dim(n)}
    Pi = {n: solve_many(m, Mat.identity(Fs, m.rows)) for n, m in P.items()}
    d = {n: P[n - 1] @ B.d(n) @ Pi[n] for n in range(B.lo + 1, B.hi + 1)
         if B.dim(n) and B.dim(n - 1)}
    B2 = ChainComplex(Fs, B.support, B.dims, d)
    return ChainMap(i.source, B2, {n: P[n] @ i.level(n) for n in P if i.source.dim(n)})


def random_acyclic_mono(Fs, seed, lo=0, hi=4, maxdim=5):
    """(i: A -> B) injective quasi-isomorphism, B = A ⊕ (sum of disks) conjugated."""
    Fs = make_field(Fs)
    A = random_complex(Fs, seed, lo, hi, max(1, maxdim // 2))
    sr, _ = rngs(seed + 1)
    disks = [disk(Fs, sr.randint(1, 2), n) for n in range(lo + 1, hi + 1) if sr.random() < 0.5]
    if not disks:
        disks = [disk(Fs, 1, sr.randint(lo + 1, hi))]
    W, _, _ = direct_sum(*disks)
    S, (i1, _), _ = direct_sum(A, W)
    return conjugate_target(i1, seed)


def random_surjective_on_cycles(X, n, seed):
    """(f: X -> S^n(V)) with H_n(f) onto, V of random dim <= dim H_n(X)."""
    Fs = X.field
    if Fs.is_product:
        parts = [random_surjective_on_cycles(X.factor(k), n, seed) for k in range(len(Fs.factors))]
        Vd = parts[0].target.dim(n)
        T = sphere(Fs, Vd, n)
        return join_maps(Fs, parts, X, T)
    sr, vr = rngs(seed)
    h = homology(X, n)
    v = sr.randint(0, h.dim)
    T = sphere(Fs, v, n)
    if v == 0 or X.dim(n) == 0:
        return ChainMap(X, T, {})
    while True:
        R = random_mat(Fs, v, h.dim, vr, 0.8)
        if rank(R) == v:
            break
    # f = R ∘ classify on cycles, zero on a complement of the cycles
    Z = h.cycles
    comp = []
    cur = Z
    for j in range(X.dim(n)):
        e = Mat.from_entries(Fs, X.dim(n), 1, {(j, 0): 1})
        ext = hstack(Fs, [cur, e], X.dim(n))
        if rank(ext) > rank(cur):
            cur = ext
            comp.append(j)
    B = cur
    T_ = hstack(Fs, [R @ h.classify @ Z, Mat.zero(Fs, v, len(comp))], v)
    f = solve_many(B.T, T_.T).T
    return ChainMap(X, T, {n: f})


# ---- comodules ----

def random_nonneg(Fs, seed, hi=4, maxdim=2):
    return random_complex(Fs, seed, 0, hi, maxdim)


def random_comodule(C, seed):
    """ker of a cofree extension (M⊗C) -> M'⊗C of a random chain map M⊗C -> M'."""
    Fs = C.field
    if Fs.is_product:
        raise ValueError("build random product comodules factorwise and compare")
    M = random_nonneg(Fs, seed, 3, 2)
    Mp = random_nonneg(Fs, seed + 101, 4, 2)
    W = cofree(M, C)
    cof = cofree(Mp, C)
    g = random_chain_map(W.carrier, Mp, seed + 7, span=3)
    X, _ = kernel_comodule(extend(W, g, cof))
    X.name = f"random{seed}"
    return X


def random_cogenerator(Fs, seed):
    return random_nonneg(Fs, seed, 3, 2)


def join_comodules(C, parts, name=None):
    """The product-field comodule whose factors are the given single-field comodules."""
    X = join_complexes(C.field, [p.carrier for p in parts])
    T = tensor(X, C.carrier)
    rho = join_maps(C.field, [p.rho for p in parts], X, T)
    return Comodule(C, X, rho, name or parts[0].name)


def matched_seeds(name, count, fields=("F2", "F3"), start=0):
    """First seeds whose random comodules over the named fixture have equal shapes in every field."""
    from artifact.coalg import fixture
    out, s = [], start
    while len(out) < count:
        shapes = {tuple(sorted(random_comodule(fixture(name, F), s).carrier.dims.items()))
                  for F in fields}
        if len(shapes) == 1:
            out.append(s)
        s += 1
    return out
