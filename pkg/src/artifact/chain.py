"""Bounded chain complexes over a FieldSpec and the model-structure toolkit on them.

Conventions: d_n maps degree n to degree n-1.  Tensor products use the Koszul
sign d(x⊗y) = dx⊗y + (-1)^|x| x⊗dy, with the basis of (X⊗Y)_n ordered by
ascending left degree, then left index, then right index.
"""

from dataclasses import dataclass, field as dc_field
from functools import wraps
from typing import Callable

from .exactla import (
    Mat, FieldSpec, LinAlgError, NoSolution, ShapeMismatch, FieldMismatch,
    kernel, rank, solve_many, cokernel, block_diag, hstack, vstack, is_injective, is_surjective,
    _rref_rows, _transpose_rows,
)


class ChainError(Exception):
    pass


class NotAComplex(ChainError):
    def __init__(self, degree):
        super().__init__(f"d∘d != 0 at degree {degree}")
        self.degree = degree


class NotAChainMap(ChainError):
    def __init__(self, degree):
        super().__init__(f"map does not commute with d at degree {degree}")
        self.degree = degree


class TargetMismatch(ChainError):
    pass


class PreconditionViolated(ChainError):
    def __init__(self, msg, degree=None):
        super().__init__(msg)
        self.degree = degree


class NoLift(ChainError):
    pass


def _assemble(field_, rows, cols, pieces):
    """Matrix with each (row_offset, col_offset, Mat) piece added in place."""
    blocks = []
    for k, F in enumerate(field_.factors):
        out = [dict() for _ in range(rows)]
        for ro, co, m in pieces:
            for i, r in enumerate(m.blocks[k]):
                tgt = out[ro + i]
                for j, v in r.items():
                    w = F.add(tgt.get(co + j, F.zero), v)
                    if w:
                        tgt[co + j] = w
                    else:
                        tgt.pop(co + j, None)
        blocks.append(out)
    return Mat(field_, rows, cols, blocks)


class ChainComplex:
    """A complex supported in the window [lo, hi]."""

    def __init__(self, field_, support, dims, d, check=True):
        lo, hi = support
        if lo > hi:
            raise ShapeMismatch(f"empty window {support}")
        self.field = field_
        self.lo, self.hi = int(lo), int(hi)
        self._dims = {n: int(dims.get(n, 0)) for n in range(self.lo, self.hi + 1)}
        for n in dims:
            if not self.lo <= n <= self.hi and dims[n]:
                raise ShapeMismatch(f"dimension outside window at degree {n}")
        self._d = {}
        for n in range(self.lo + 1, self.hi + 1):
            m = d.get(n)
            if m is None:
                m = Mat.zero(field_, self._dims[n - 1], self._dims[n])
            if m.field != field_:
                raise FieldMismatch(f"differential at degree {n}")
            if m.shape != (self._dims[n - 1], self._dims[n]):
                raise ShapeMismatch(f"d_{n} has shape {m.shape}, expected "
                                    f"{(self._dims[n - 1], self._dims[n])}")
            self._d[n] = m
        for n, m in d.items():
            if not self.lo < n <= self.hi and not m.is_zero():
                raise ShapeMismatch(f"nonzero differential outside window at degree {n}")
        if check:
            for n in range(self.lo + 2, self.hi + 1):
                if not (self._d[n - 1] @ self._d[n]).is_zero():
                    raise NotAComplex(n)

    @property
    def support(self):
        return (self.lo, self.hi)

    @property
    def degrees(self):
        return range(self.lo, self.hi + 1)

    def dim(self, n):
        return self._dims.get(n, 0)

    @property
    def dims(self):
        return dict(self._dims)

    def d(self, n):
        m = self._d.get(n)
        if m is None:
            return Mat.zero(self.field, self.dim(n - 1), self.dim(n))
        return m

    def total_dim(self):
        return sum(self._dims.values())

    def factor(self, k):
        return ChainComplex(self.field.factor(k), self.support, self._dims,
                            {n: m.factor(k) for n, m in self._d.items()}, check=False)

    def with_window(self, lo, hi):
        """Same complex viewed in a larger (or equal) window."""
        for n in self.degrees:
            if (n < lo or n > hi) and self.dim(n):
                raise ShapeMismatch(f"degree {n} falls outside [{lo}, {hi}]")
        return ChainComplex(self.field, (lo, hi), {n: self.dim(n) for n in range(lo, hi + 1)},
                            {n: self.d(n) for n in range(lo + 1, hi + 1)}, check=False)

    def __eq__(self, other):
        if not isinstance(other, ChainComplex) or other.field != self.field:
            return False
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        return all(self.dim(n) == other.dim(n) for n in range(lo, hi + 1)) and all(
            self.d(n) == other.d(n) for n in range(lo + 1, hi + 1))

    def __hash__(self):
        return hash(tuple(self.dim(n) for n in self.degrees))

    def __repr__(self):
        nz = {n: v for n, v in self._dims.items() if v}
        return f"ChainComplex({self.field.name}, {self.support}, {nz})"


class ChainMap:
    """Degree-zero chain map; levels[n] is a target.dim(n) x source.dim(n) matrix."""

    def __init__(self, source, target, levels, check=True):
        if source.field != target.field:
            raise FieldMismatch("chain map between different fields")
        self.source, self.target = source, target
        self.field = source.field
        self._levels = {}
        for n, m in levels.items():
            if m.shape != (target.dim(n), source.dim(n)):
                raise ShapeMismatch(f"level {n} has shape {m.shape}, expected "
                                    f"{(target.dim(n), source.dim(n))}")
            if source.dim(n) and target.dim(n):
                self._levels[n] = m
        if check:
            self.check()

    @property
    def degrees(self):
        return range(min(self.source.lo, self.target.lo), max(self.source.hi, self.target.hi) + 1)

    def level(self, n):
        m = self._levels.get(n)
        if m is None:
            return Mat.zero(self.field, self.target.dim(n), self.source.dim(n))
        return m

    @property
    def levels(self):
        return {n: self.level(n) for n in self.degrees}

    def check(self):
        for n in self.degrees:
            if n - 1 < self.degrees.start:
                continue
            lhs = self.target.d(n) @ self.level(n)
            rhs = self.level(n - 1) @ self.source.d(n)
            if lhs != rhs:
                raise NotAChainMap(n)
        return True

    def is_chain_map(self):
        try:
            return self.check()
        except NotAChainMap:
            return False

    def __matmul__(self, other):
        """self ∘ other."""
        if not _same_shape(other.target, self.source):
            raise TargetMismatch("composition of non-composable maps")
        return ChainMap(other.source, self.target,
                        {n: self.level(n) @ other.level(n) for n in other.source.degrees
                         if self.target.dim(n)}, check=False)

    def __add__(self, other):
        return ChainMap(self.source, self.target,
                        {n: self.level(n) + other.level(n) for n in self.degrees}, check=False)

    def __sub__(self, other):
        return ChainMap(self.source, self.target,
                        {n: self.level(n) - other.level(n) for n in self.degrees}, check=False)

    def __neg__(self):
        return ChainMap(self.source, self.target,
                        {n: -m for n, m in self._levels.items()}, check=False)

    def __eq__(self, other):
        return (isinstance(other, ChainMap) and self.source == other.source
                and self.target == other.target
                and all(self.level(n) == other.level(n) for n in self.degrees))

    __hash__ = None

    def is_zero(self):
        return all(m.is_zero() for m in self._levels.values())

    def factor(self, k):
        return ChainMap(self.source.factor(k), self.target.factor(k),
                        {n: m.factor(k) for n, m in self._levels.items()}, check=False)

    def __repr__(self):
        return f"ChainMap({self.source!r} -> {self.target!r})"


def _same_shape(X, Y):
    if X is Y:
        return True
    lo, hi = joint_window(X, Y)
    return X.field == Y.field and all(X.dim(n) == Y.dim(n) for n in range(lo, hi + 1))


def componentwise(fn):
    """Run fn once per factor when its first argument lives over a product field."""
    @wraps(fn)
    def wrapper(*args, **kwargs):
        first = args[0]
        fs = getattr(first, "field", None)
        if isinstance(fs, FieldSpec) and fs.is_product:
            out = []
            for k in range(len(fs.factors)):
                a = [x.factor(k) if hasattr(x, "factor") and isinstance(getattr(x, "field", None), FieldSpec) else x
                     for x in args]
                out.append(fn(*a, **kwargs))
            return tuple(out)
        return fn(*args, **kwargs)
    return wrapper


# ---- constructors ----

def make_complex(field_, support, dims, differentials=None, check=True):
    return ChainComplex(field_, support, dims, differentials or {}, check=check)


def zero_complex(field_, lo=0, hi=0):
    return ChainComplex(field_, (lo, hi), {}, {}, check=False)


def unit_complex(field_):
    return ChainComplex(field_, (0, 0), {0: 1}, {}, check=False)


def sphere(field_, dim, n):
    return ChainComplex(field_, (n, n), {n: dim}, {}, check=False)


def disk(field_, dim, n):
    return ChainComplex(field_, (n - 1, n), {n: dim, n - 1: dim},
                        {n: Mat.identity(field_, dim)}, check=False)


def disk_to_sphere(field_, dim, n):
    D, S = disk(field_, dim, n), sphere(field_, dim, n)
    return ChainMap(D, S, {n: Mat.identity(field_, dim)}, check=False)


def identity_map(X):
    return ChainMap(X, X, {n: Mat.identity(X.field, X.dim(n)) for n in X.degrees}, check=False)


def zero_map(X, Y):
    return ChainMap(X, Y, {}, check=False)


def joint_window(*cs):
    return min(c.lo for c in cs), max(c.hi for c in cs)


def direct_sum(*cs):
    """(S, inclusions, projections) for the direct sum of the given complexes."""
    field_ = cs[0].field
    lo, hi = joint_window(*cs)
    dims = {n: sum(c.dim(n) for c in cs) for n in range(lo, hi + 1)}
    d = {n: block_diag(field_, [c.d(n) for c in cs]) for n in range(lo + 1, hi + 1)}
    S = ChainComplex(field_, (lo, hi), dims, d, check=False)
    incs, projs = [], []
    offs = {n: 0 for n in range(lo, hi + 1)}
    for c in cs:
        inc, proj = {}, {}
        for n in range(lo, hi + 1):
            k = c.dim(n)
            if k:
                inc[n] = _assemble(field_, dims[n], k, [(offs[n], 0, Mat.identity(field_, k))])
                proj[n] = _assemble(field_, k, dims[n], [(0, offs[n], Mat.identity(field_, k))])
            offs[n] += k
        incs.append(ChainMap(c, S, inc, check=False))
        projs.append(ChainMap(S, c, proj, check=False))
    return S, incs, projs


def pair_map(f, g):
    """(f, g): W -> X⊕Y."""
    S, _, _ = direct_sum(f.target, g.target)
    return ChainMap(f.source, S, {n: vstack(f.field, [f.level(n), g.level(n)])
                                  for n in f.source.degrees if S.dim(n)}, check=False)


def sum_map(*fs):
    """f1 ⊕ f2 ⊕ ...: ⊕X_i -> ⊕Y_i."""
    S, _, _ = direct_sum(*[f.source for f in fs])
    T, _, _ = direct_sum(*[f.target for f in fs])
    return ChainMap(S, T, {n: block_diag(S.field, [f.level(n) for f in fs])
                           for n in S.degrees}, check=False)


def copair_map(f, g):
    """[f, g]: X⊕Y -> Z."""
    S, _, _ = direct_sum(f.source, g.source)
    return ChainMap(S, f.target, {n: hstack(f.field, [f.level(n), g.level(n)], f.target.dim(n))
                                  for n in S.degrees}, check=False)


def subcomplex(X, basis):
    """Subcomplex spanned degreewise by the columns of basis[n] (injective).

    Returns (K, inclusion).  Raises PreconditionViolated if d leaves the span.
    """
    field_ = X.field
    lo, hi = X.lo, X.hi
    B = {n: basis.get(n, Mat.zero(field_, X.dim(n), 0)) for n in range(lo, hi + 1)}
    dims = {n: B[n].cols for n in B}
    d = {}
    for n in range(lo + 1, hi + 1):
        if dims[n] and dims[n - 1]:
            try:
                d[n] = solve_many(B[n - 1], X.d(n) @ B[n])
            except NoSolution:
                raise PreconditionViolated("span is not closed under d", n)
        elif dims[n] and not (X.d(n) @ B[n]).is_zero():
            raise PreconditionViolated("span is not closed under d", n)
    K = ChainComplex(field_, (lo, hi), dims, d, check=False)
    return K, ChainMap(K, X, {n: B[n] for n in B}, check=False)


@componentwise
def kernel_complex(f):
    """(ker f, inclusion)."""
    return subcomplex(f.source, {n: kernel(f.level(n)) for n in f.source.degrees})


# ---- homology ----

@dataclass
class HomologyData:
    degree: int
    dim: int
    cycle_reps: Mat      # X_n x dim, columns are cycles
    classify: Mat        # dim x X_n, valid on cycles
    cycles: Mat          # basis of Z_n

    def class_of(self, v):
        return self.classify.apply(v)


def homology(X, n):
    """Canonical homology data at degree n (single factor)."""
    if X.field.is_product:
        return tuple(homology(X.factor(k), n) for k in range(len(X.field.factors)))
    field_ = X.field
    Z = kernel(X.d(n))
    z = Z.cols
    if z == 0:
        e = Mat.zero(field_, X.dim(n), 0)
        return HomologyData(n, 0, e, Mat.zero(field_, 0, X.dim(n)), Z)
    Bz = solve_many(Z, X.d(n + 1))
    P, h = cokernel(Bz)
    piv, _ = _rref_rows(field_.base, _transpose_rows(Bz.blocks[0], Bz.cols))
    pset = set(piv)
    comp = [j for j in range(z) if j not in pset]
    reps = Z.select_cols(comp)
    # kernel basis column k has a 1 at the k-th free index and 0 at the others,
    # so the Z-coordinates of a cycle are its entries at the free indices
    free_idx = _kernel_free_indices(X.d(n))
    coord = Mat.from_entries(field_, z, X.dim(n), {(k, f): 1 for k, f in enumerate(free_idx)})
    return HomologyData(n, h, reps, P @ coord, Z)


def _kernel_free_indices(M):
    piv, _ = _rref_rows(M.field.base, M.blocks[0])
    pset = set(piv)
    return [j for j in range(M.cols) if j not in pset]


def homology_dims(X, degrees=None):
    if X.field.is_product:
        return tuple(homology_dims(X.factor(k), degrees) for k in range(len(X.field.factors)))
    degrees = X.degrees if degrees is None else degrees
    return {n: homology(X, n).dim for n in degrees}


@componentwise
def betti_by_rank(X, n):
    """dim H_n from ranks alone (an independent recomputation)."""
    return X.dim(n) - rank(X.d(n)) - rank(X.d(n + 1))


def induced_map(f, n, hs=None, ht=None):
    """Matrix of H_n(f) in the canonical homology bases."""
    hs = hs or homology(f.source, n)
    ht = ht or homology(f.target, n)
    return ht.classify @ f.level(n) @ hs.cycle_reps


@dataclass
class Verdict:
    ok: bool
    report: dict = dc_field(default_factory=dict)

    def __bool__(self):
        return self.ok


def is_quasi_iso(f, degrees=None):
    if f.field.is_product:
        vs = [is_quasi_iso(f.factor(k), degrees) for k in range(len(f.field.factors))]
        return Verdict(all(v.ok for v in vs), {"factors": [v.report for v in vs]})
    degrees = f.degrees if degrees is None else degrees
    ok, rep = True, {}
    for n in degrees:
        hs, ht = homology(f.source, n), homology(f.target, n)
        r = rank(induced_map(f, n, hs, ht)) if hs.dim and ht.dim else 0
        good = hs.dim == ht.dim == r
        rep[n] = {"source": hs.dim, "target": ht.dim, "rank": r, "iso": good}
        ok = ok and good
    return Verdict(ok, rep)


def is_injective_map(f):
    return all(is_injective(f.level(n)) for n in f.source.degrees if f.source.dim(n))


def is_surjective_map(f, degrees=None):
    degrees = f.target.degrees if degrees is None else degrees
    return all(is_surjective(f.level(n)) for n in degrees if f.target.dim(n))


def is_simply_connected(X):
    if X.field.is_product:
        return all(is_simply_connected(X.factor(k)) for k in range(len(X.field.factors)))
    return (X.dim(0) == 1 and X.dim(1) == 0
            and all(X.dim(n) == 0 for n in X.degrees if n < 0))


# ---- tensor products ----

def tensor_blocks(X, Y, n):
    """[(i, j, offset)] for (X⊗Y)_n, ascending in i."""
    out, off = [], 0
    for i in X.degrees:
        j = n - i
        a, b = X.dim(i), Y.dim(j)
        if a and b:
            out.append((i, j, off))
            off += a * b
    return out, off


def tensor(X, Y):
    if X.field != Y.field:
        raise FieldMismatch("tensor of complexes over different fields")
    field_ = X.field
    lo, hi = X.lo + Y.lo, X.hi + Y.hi
    layout = {n: tensor_blocks(X, Y, n) for n in range(lo - 1, hi + 1)}
    dims = {n: layout[n][1] for n in range(lo, hi + 1)}
    d = {}
    for n in range(lo + 1, hi + 1):
        tgt = {i: off for i, _, off in layout[n - 1][0]}
        pieces = []
        for i, j, off in layout[n][0]:
            Ij = Mat.identity(field_, Y.dim(j))
            Ii = Mat.identity(field_, X.dim(i))
            if i - 1 in tgt and X.dim(i - 1):
                pieces.append((tgt[i - 1], off, X.d(i).kron(Ij)))
            if i in tgt and Y.dim(j - 1):
                m = Ii.kron(Y.d(j))
                pieces.append((tgt[i], off, m if i % 2 == 0 else -m))
        d[n] = _assemble(field_, dims[n - 1], dims[n], pieces)
    return ChainComplex(field_, (lo, hi), dims, d, check=False)


def tensor_map(f, g, source=None, target=None):
    """f⊗g for degree-zero maps."""
    S = source or tensor(f.source, g.source)
    T = target or tensor(f.target, g.target)
    field_ = f.field
    levels = {}
    for n in S.degrees:
        sb, _ = tensor_blocks(f.source, g.source, n)
        tb = {i: off for i, _, off in tensor_blocks(f.target, g.target, n)[0]}
        pieces = []
        for i, j, off in sb:
            if i in tb:
                pieces.append((tb[i], off, f.level(i).kron(g.level(j))))
        levels[n] = _assemble(field_, T.dim(n), S.dim(n), pieces)
    return ChainMap(S, T, levels, check=False)


def tensor_basis(X, Y, n):
    """List of (i, a, j, b) in basis order of (X⊗Y)_n."""
    out = []
    for i, j, _ in tensor_blocks(X, Y, n)[0]:
        for a in range(X.dim(i)):
            for b in range(Y.dim(j)):
                out.append((i, a, j, b))
    return out


def tensor_position(X, Y, n):
    """{(i, a, b): index} for (X⊗Y)_n."""
    pos = {}
    for i, j, off in tensor_blocks(X, Y, n)[0]:
        nb = Y.dim(j)
        for a in range(X.dim(i)):
            for b in range(nb):
                pos[(i, a, b)] = off + a * nb + b
    return pos


def associator(X, Y, Z, XY=None, XYZ_left=None, YZ=None, XYZ_right=None):
    """(X⊗Y)⊗Z -> X⊗(Y⊗Z); a permutation, no signs."""
    XY = XY or tensor(X, Y)
    YZ = YZ or tensor(Y, Z)
    L = XYZ_left or tensor(XY, Z)
    R = XYZ_right or tensor(X, YZ)
    field_ = X.field
    levels = {}
    xy_basis = {m: tensor_basis(X, Y, m) for m in XY.degrees}
    for n in L.degrees:
        rpos = tensor_position(X, YZ, n)
        ent = {}
        for idx, (m, u, k, c) in enumerate(tensor_basis(XY, Z, n)):
            i, a, j, b = xy_basis[m][u]
            yz = tensor_position(Y, Z, j + k)[(j, b, c)]
            ent[(rpos[(i, a, yz)], idx)] = 1
        levels[n] = Mat.from_entries(field_, R.dim(n), L.dim(n), ent)
    return ChainMap(L, R, levels, check=False)


def twist(X, Y, XY=None, YX=None):
    """x⊗y -> (-1)^{|x||y|} y⊗x."""
    XY = XY or tensor(X, Y)
    YX = YX or tensor(Y, X)
    levels = {}
    for n in XY.degrees:
        pos = tensor_position(Y, X, n)
        ent = {}
        for idx, (i, a, j, b) in enumerate(tensor_basis(X, Y, n)):
            ent[(pos[(j, b, a)], idx)] = -1 if (i * j) % 2 else 1
        levels[n] = Mat.from_entries(X.field, YX.dim(n), XY.dim(n), ent)
    return ChainMap(XY, YX, levels, check=False)


def unit_right(X, XK=None):
    """X⊗𝕜 -> X (identity on bases)."""
    XK = XK or tensor(X, unit_complex(X.field))
    return ChainMap(XK, X, {n: Mat.identity(X.field, X.dim(n)) for n in X.degrees}, check=False)


def unit_left(X, KX=None):
    KX = KX or tensor(unit_complex(X.field), X)
    return ChainMap(KX, X, {n: Mat.identity(X.field, X.dim(n)) for n in X.degrees}, check=False)


def koszul_defect(X, Y, T=None):
    """Number of basis elements violating d(x⊗y) = dx⊗y + (-1)^|x| x⊗dy (expect 0)."""
    if X.field.is_product:
        return sum(koszul_defect(X.factor(k), Y.factor(k)) for k in range(len(X.field.factors)))
    T = T or tensor(X, Y)
    bad = 0
    F = X.field.base
    for n in T.degrees:
        pos = tensor_position(X, Y, n - 1)
        dT = T.d(n)
        for idx, (i, a, j, b) in enumerate(tensor_basis(X, Y, n)):
            want = {}
            for r, v in X.d(i).column(a).items():
                k = pos[(i - 1, r, b)]
                want[k] = F.add(want.get(k, F.zero), v)
            sgn = F.one if i % 2 == 0 else F.neg(F.one)
            for r, v in Y.d(j).column(b).items():
                k = pos[(i, a, r)]
                want[k] = F.add(want.get(k, F.zero), F.mul(sgn, v))
            want = {k: v for k, v in want.items() if v}
            if dT.column(idx) != want:
                bad += 1
    return bad


# ---- pullbacks and attaching ----

@dataclass
class Pullback:
    P: ChainComplex
    p1: ChainMap
    p2: ChainMap
    inclusion: ChainMap      # P -> X⊕Y
    mediate: Callable

    def __iter__(self):
        return iter((self.P, self.p1, self.p2, self.mediate))


@componentwise
def pullback(f, g):
    """Degreewise kernel of (f, -g) inside X⊕Y."""
    if not _same_shape(f.target, g.target):
        raise TargetMismatch("pullback legs have different targets")
    X, Y = f.source, g.source
    S, _, (q1, q2) = direct_sum(X, Y)
    field_ = f.field
    basis = {}
    for n in S.degrees:
        m = hstack(field_, [f.level(n), -g.level(n)], f.target.dim(n))
        basis[n] = kernel(m)
    P, inc = subcomplex(S, basis)

    def mediate(a, b):
        if not _same_shape(a.source, b.source):
            raise TargetMismatch("cone legs have different sources")
        W = a.source
        lv = {}
        for n in W.degrees:
            if P.dim(n) and W.dim(n):
                lv[n] = solve_many(inc.level(n), vstack(field_, [a.level(n), b.level(n)]))
        return ChainMap(W, P, lv, check=False)

    return Pullback(P, q1 @ inc, q2 @ inc, inc, mediate)


@dataclass
class Attached:
    """Y ×_{S^n(V)} D^n(V) written as Y with V glued in at degree n-1."""
    P: ChainComplex
    proj: ChainMap           # P -> Y
    to_disk: ChainMap        # P -> D^n(V)
    attaching: ChainMap      # Y -> S^n(V)
    n: int
    dim: int

    def lift(self, j):
        """X -> P from j: X -> Y with attaching ∘ j = 0 (zero disk component)."""
        lv = {}
        for m in j.source.degrees:
            if self.P.dim(m) and j.source.dim(m):
                top = j.level(m)
                if m == self.n - 1:
                    top = vstack(self.P.field, [top, Mat.zero(self.P.field, self.dim, j.source.dim(m))])
                lv[m] = top
        return ChainMap(j.source, self.P, lv, check=False)


def attach(Y, fn, n):
    """Pullback of Y -> S^n(V) <- D^n(V), with fn: Y_n -> V the attaching matrix."""
    field_ = Y.field
    v = fn.rows
    lo, hi = min(Y.lo, n - 1), max(Y.hi, n)
    dims = {m: Y.dim(m) for m in range(lo, hi + 1)}
    dims[n - 1] += v
    d = {}
    for m in range(lo + 1, hi + 1):
        dm = Y.d(m)
        if m == n:
            dm = vstack(field_, [dm, fn])
        elif m == n - 1:
            dm = hstack(field_, [dm, Mat.zero(field_, Y.dim(m - 1), v)], Y.dim(m - 1))
        d[m] = dm
    P = ChainComplex(field_, (lo, hi), dims, d, check=False)
    proj = {}
    for m in range(lo, hi + 1):
        if Y.dim(m):
            if m == n - 1:
                proj[m] = hstack(field_, [Mat.identity(field_, Y.dim(m)), Mat.zero(field_, Y.dim(m), v)])
            else:
                proj[m] = Mat.identity(field_, Y.dim(m))
    D, S = disk(field_, v, n), sphere(field_, v, n)
    to_disk = {n: fn, n - 1: hstack(field_, [Mat.zero(field_, v, Y.dim(n - 1)), Mat.identity(field_, v)])}
    return Attached(P, ChainMap(P, Y, proj, check=False), ChainMap(P, D, to_disk, check=False),
                    ChainMap(Y, S, {n: fn}, check=False), n, v)


# ---- splitting ----

@dataclass
class SplitDecomposition:
    summands: list           # [(kind, degree, dim)]
    pieces: list             # the summand complexes, in order
    S: ChainComplex          # their direct sum
    to_X: ChainMap
    from_X: ChainMap


def _dsum(field_, cs):
    if not cs:
        Z = zero_complex(field_)
        return Z, [], []
    return direct_sum(*cs)


@componentwise
def split_decompose(X):
    """X ≅ ⊕ S^n(H_n) ⊕ D^n(B_{n-1}), with the echelon-chosen iso pair."""
    field_ = X.field
    summands, pieces, cols = [], [], []
    for n in X.degrees:
        h = homology(X, n)
        if h.dim:
            summands.append(("sphere", n, h.dim))
            pieces.append(sphere(field_, h.dim, n))
            cols.append({n: h.cycle_reps})
        # pivot columns of d_n: their images form a basis of B_{n-1}
        piv = _pivot_columns(X.d(n))
        if piv:
            b = len(piv)
            top = Mat.from_entries(field_, X.dim(n), b, {(p, k): 1 for k, p in enumerate(piv)})
            summands.append(("disk", n, b))
            pieces.append(disk(field_, b, n))
            cols.append({n: top, n - 1: X.d(n) @ top})
    S, incs, projs = _dsum(field_, pieces)
    lv = {}
    for m in X.degrees:
        blocks = []
        for piece, c in zip(pieces, cols):
            if piece.dim(m):
                blocks.append(c[m])
        if blocks and X.dim(m):
            lv[m] = hstack(field_, blocks, X.dim(m))
    to_X = ChainMap(S, X, lv, check=False)
    inv = {m: solve_many(lv[m], Mat.identity(field_, X.dim(m))) for m in lv}
    from_X = ChainMap(X, S, inv, check=False)
    return SplitDecomposition(summands, pieces, S, to_X, from_X)


def _pivot_columns(M):
    piv, _ = _rref_rows(M.field.base, M.blocks[0])
    return piv


@componentwise
def truncate_nonneg(X):
    """Degrees > 0 kept, degree 0 replaced by Z_0, negative degrees dropped."""
    field_ = X.field
    hi = max(X.hi, 0)
    Z0 = kernel(X.d(0)) if X.dim(0) else Mat.zero(field_, 0, 0)
    dims = {n: X.dim(n) for n in range(1, hi + 1)}
    dims[0] = Z0.cols
    d = {n: X.d(n) for n in range(2, hi + 1)}
    if hi >= 1:
        d[1] = solve_many(Z0, X.d(1)) if Z0.cols else Mat.zero(field_, 0, X.dim(1))
    T = ChainComplex(field_, (0, hi), dims, d, check=False)
    lv = {n: Mat.identity(field_, X.dim(n)) for n in range(1, hi + 1)}
    lv[0] = Z0 if Z0.cols else Mat.zero(field_, X.dim(0), 0)
    return T, ChainMap(T, X.with_window(min(X.lo, 0), hi), lv, check=False)


# ---- factorizations ----

@dataclass
class Stage:
    kind: str                # "Q" (D^n -> 0 summand), "P" (pullback along D^n -> S^n), "product"
    degree: int
    dim: int
    attaching: object = None


@dataclass
class Factorization:
    middle: ChainComplex
    first: ChainMap
    second: ChainMap
    stages: list


@componentwise
def factor_cofib_qtower(f):
    """X ↪ Z⊕Y -> Y with Z a sum of disks (acyclic)."""
    X, Y = f.source, f.target
    field_ = f.field
    sp = split_decompose(X)
    disks, embs, stages = [], [], []
    for (kind, n, k), piece in zip(sp.summands, sp.pieces):
        if kind == "sphere":
            D = disk(field_, k, n + 1)
            embs.append(ChainMap(piece, D, {n: Mat.identity(field_, k)}, check=False))
            stages.append(Stage("Q", n + 1, k))
        else:
            D = piece
            embs.append(identity_map(piece))
            stages.append(Stage("Q", n, k))
        disks.append(D)
    if embs:
        iota = sum_map(*embs) @ sp.from_X
        Z = iota.target
    else:
        Z = zero_complex(field_, Y.lo, Y.hi)
        iota = zero_map(X, Z)
    first = pair_map(iota, f)
    M = first.target
    _, _, (_, q) = direct_sum(Z, Y)
    second = ChainMap(M, Y, q.levels, check=False)
    return Factorization(M, first, second, stages)


@dataclass
class FnStep:
    Y: ChainComplex
    j: ChainMap
    proj: ChainMap
    V: int
    attached: object


def _check_mono_h_injective(j):
    for n in j.source.degrees:
        if j.source.dim(n) and rank(j.level(n)) < j.source.dim(n):
            raise PreconditionViolated(f"j is not injective in degree {n}", n)
    for n in j.source.degrees:
        hs = homology(j.source, n)
        if hs.dim and rank(induced_map(j, n, hs)) < hs.dim:
            raise PreconditionViolated(f"H_{n}(j) is not injective", n)


def attaching_matrix(j, n, hs=None, ht=None):
    """(fn, V-projection) with fn: Y_n -> V = coker H_n(j), fn∘j_n = 0, fn(B_n) = 0."""
    X, Y = j.source, j.target
    field_ = j.field
    ht = ht or homology(Y, n)
    hs = hs or homology(X, n)
    Hj = induced_map(j, n, hs, ht) if hs.dim else Mat.zero(field_, ht.dim, 0)
    PV, v = cokernel(Hj)
    if v == 0:
        return Mat.zero(field_, 0, Y.dim(n)), PV
    Zb = ht.cycles
    A = hstack(field_, [Zb, j.level(n)], Y.dim(n))
    T = hstack(field_, [PV @ ht.classify @ Zb, Mat.zero(field_, v, X.dim(n))], v)
    fn = solve_many(A.T, T.T).T
    return fn, PV


@componentwise
def fn_step(j, n, check=True):
    if check:
        _check_mono_h_injective(j)
    fn, _ = attaching_matrix(j, n)
    if fn.rows == 0:
        return FnStep(j.target, j, identity_map(j.target), 0, None)
    at = attach(j.target, fn, n)
    return FnStep(at.P, at.lift(j), at.proj, fn.rows, at)


@componentwise
def factor_acyclic_cofib_postnikov(f):
    """X ↪ (tower limit) -> Y with first a quasi-isomorphism."""
    X, Y = f.source, f.target
    j = pair_map(identity_map(X), f)
    _, _, (_, q) = direct_sum(X, Y)
    second = ChainMap(j.target, Y, q.levels, check=False)
    stages = [Stage("product", 0, 0)]
    lo, hi = joint_window(X, Y)
    order = list(range(max(lo, 0), hi + 1)) + list(range(min(hi, -1), lo - 1, -1))
    for n in order:
        st = fn_step(j, n, check=False)
        if st.V:
            stages.append(Stage("P", n, st.V, st.attached.attaching))
            second = second @ st.proj
            j = st.j
    return Factorization(j.target, j, second, stages)


# ---- lifting ----

def _system_rows(F, eqs, nvars):
    rows = []
    for coeffs, rhs in eqs:
        r = {k: v for k, v in coeffs.items() if v}
        if rhs:
            r[nvars] = rhs
        if r:
            rows.append(r)
    return rows


def _map_variables(B, E):
    idx, n_ = {}, 0
    for n in B.degrees:
        for r in range(E.dim(n)):
            for c in range(B.dim(n)):
                idx[(n, r, c)] = n_
                n_ += 1
    return idx, n_


def _commute_equations(F, B, E, idx):
    eqs = []
    for n in B.degrees:
        dE, dB = E.d(n), B.d(n)
        dBc = dB.columns()
        for s in range(E.dim(n - 1)):
            for c in range(B.dim(n)):
                co = {}
                for r in range(E.dim(n)):
                    v = dE.blocks[0][s].get(r)
                    if v:
                        co[idx[(n, r, c)]] = F.add(co.get(idx[(n, r, c)], F.zero), v)
                for t, v in dBc[c].items():
                    k = idx[(n - 1, s, t)]
                    co[k] = F.sub(co.get(k, F.zero), v)
                eqs.append((co, F.zero))
    return eqs


@componentwise
def solve_lift(i, p, top, bottom):
    """l: B -> E with l∘i = top and p∘l = bottom, or NoLift."""
    A, B, E = i.source, i.target, p.source
    F = i.field.base
    idx, nv = _map_variables(B, E)
    eqs = _commute_equations(F, B, E, idx)
    for n in B.degrees:
        im, tp = i.level(n), top.level(n)
        imc = im.columns()
        for r in range(E.dim(n)):
            for a in range(A.dim(n)):
                co = {idx[(n, r, c)]: v for c, v in imc[a].items()}
                eqs.append((co, tp.blocks[0][r].get(a, F.zero)))
        pm, bt = p.level(n), bottom.level(n)
        for s in range(p.target.dim(n)):
            for c in range(B.dim(n)):
                co = {idx[(n, r, c)]: v for r, v in pm.blocks[0][s].items()}
                eqs.append((co, bt.blocks[0][s].get(c, F.zero)))
    piv, red = _rref_rows(F, _system_rows(F, eqs, nv))
    if piv and piv[-1] == nv:
        raise NoLift("lifting problem is inconsistent")
    sol = {}
    for pc, r in zip(piv, red):
        if r.get(nv):
            sol[pc] = r[nv]
    lv = {}
    for n in B.degrees:
        ent = {(r, c): sol[idx[(n, r, c)]] for r in range(E.dim(n)) for c in range(B.dim(n))
               if idx[(n, r, c)] in sol}
        lv[n] = Mat.from_entries(i.field, E.dim(n), B.dim(n), ent)
    return ChainMap(B, E, lv, check=False)


def chain_map_space(X, Y):
    """A basis of Hom_Ch(X, Y) (single factor)."""
    F = X.field.base
    idx, nv = _map_variables(X, Y)
    eqs = _commute_equations(F, X, Y, idx)
    rows = _system_rows(F, eqs, nv)
    M = Mat(X.field, len(rows), nv, [rows])
    K = kernel(M) if rows else Mat.identity(X.field, nv)
    out = []
    for col in K.columns():
        lv = {}
        for n in X.degrees:
            ent = {(r, c): col[idx[(n, r, c)]] for r in range(Y.dim(n)) for c in range(X.dim(n))
                   if idx[(n, r, c)] in col}
            lv[n] = Mat.from_entries(X.field, Y.dim(n), X.dim(n), ent)
        out.append(ChainMap(X, Y, lv, check=False))
    return out
