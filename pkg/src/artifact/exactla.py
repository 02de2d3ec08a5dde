"""Exact linear algebra over finite products of prime fields and the rationals.

A matrix over a product field is stored as one sparse block per factor.  Every
operation acts on the blocks independently, which is the idempotent
decomposition of a module over a semisimple ring.  Rows are dicts
``{col: nonzero}``; they are never mutated once a Mat is built.
"""

import heapq
from fractions import Fraction
from functools import reduce


class LinAlgError(Exception):
    pass


class NoSolution(LinAlgError):
    pass


class NotSurjective(LinAlgError):
    pass


class NotInjective(LinAlgError):
    pass


class FieldMismatch(LinAlgError):
    pass


class ShapeMismatch(LinAlgError):
    pass


def _is_prime(p):
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


class PrimeField:
    """The field with p elements; elements are ints in [0, p)."""

    def __init__(self, p):
        p = int(p)
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.zero = 0
        self.one = 1

    @property
    def name(self):
        return f"F{self.p}"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    def __repr__(self):
        return self.name

    def __call__(self, x):
        if isinstance(x, Fraction):
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def fmt(self, a):
        return str(a)

    def parse(self, s):
        if isinstance(s, bool) or not isinstance(s, (int, str)):
            raise ValueError(f"bad residue {s!r}")
        v = int(s)
        if not 0 <= v < self.p:
            raise ValueError(f"residue {v} out of range for {self.name}")
        return v


class Rationals:
    """The rational numbers, exact."""

    zero = Fraction(0)
    one = Fraction(1)
    name = "Q"

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "Q"

    def __call__(self, x):
        return Fraction(x)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def fmt(self, a):
        return f"{a.numerator}/{a.denominator}"

    def parse(self, s):
        if isinstance(s, bool):
            raise ValueError(f"bad rational {s!r}")
        if isinstance(s, int):
            return Fraction(s)
        if not isinstance(s, str):
            raise ValueError(f"bad rational {s!r}")
        num, sep, den = s.partition("/")
        if not sep:
            raise ValueError(f"rational must be written a/b, got {s!r}")
        a, b = int(num), int(den)
        if b <= 0:
            raise ValueError(f"denominator must be positive in {s!r}")
        q = Fraction(a, b)
        if (q.numerator, q.denominator) != (a, b):
            raise ValueError(f"rational {s!r} not in lowest terms")
        return q


QQ = Rationals()


def base_field(name):
    name = name.strip()
    if name in ("Q", "QQ"):
        return QQ
    if name.startswith("F") or name.startswith("GF"):
        return PrimeField(int(name.lstrip("GF")))
    raise ValueError(f"unknown field {name!r}")


class FieldSpec:
    """An ordered product of base fields."""

    def __init__(self, factors):
        factors = tuple(base_field(f) if isinstance(f, str) else f for f in factors)
        if not factors:
            raise ValueError("empty FieldSpec")
        for f in factors:
            if not isinstance(f, (PrimeField, Rationals)):
                raise ValueError(f"not a base field: {f!r}")
        self.factors = factors

    @classmethod
    def parse(cls, text):
        return cls(text.split("x"))

    @property
    def name(self):
        return "x".join(f.name for f in self.factors)

    @property
    def is_product(self):
        return len(self.factors) > 1

    def factor(self, k):
        return FieldSpec((self.factors[k],))

    @property
    def base(self):
        if self.is_product:
            raise FieldMismatch(f"{self.name} is a product field")
        return self.factors[0]

    def scalar(self, x):
        """Normalize x (a plain number or a per-factor sequence) into a Scalar tuple."""
        if isinstance(x, (tuple, list)):
            if len(x) != len(self.factors):
                raise ShapeMismatch(f"scalar {x!r} has wrong factor count for {self.name}")
            return tuple(F(v) for F, v in zip(self.factors, x))
        return tuple(F(x) for F in self.factors)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and other.factors == self.factors

    def __hash__(self):
        return hash(self.factors)

    def __repr__(self):
        return f"FieldSpec({self.name})"


def field(name):
    """Shorthand: field('F2'), field('Q'), field('F2xF3')."""
    if isinstance(name, FieldSpec):
        return name
    return FieldSpec.parse(name)


# ---- sparse row kernels (one base field) ----

def _axpy(F, r, a, s):
    """r += a*s in place, dropping zeros."""
    if isinstance(F, PrimeField):
        p = F.p
        for j, v in s.items():
            w = (r.get(j, 0) + a * v) % p
            if w:
                r[j] = w
            else:
                r.pop(j, None)
    else:
        for j, v in s.items():
            w = r.get(j, 0) + a * v
            if w:
                r[j] = w
            else:
                r.pop(j, None)


def _scale_row(F, a, s):
    if isinstance(F, PrimeField):
        p = F.p
        return {j: a * v % p for j, v in s.items() if a * v % p}
    return {j: a * v for j, v in s.items() if a * v}


def _rref_rows(F, rows):
    """Reduced row echelon form of the span of rows.

    Returns (pivots, reduced) with pivots ascending and reduced[i] the row
    whose leading entry 1 sits in column pivots[i].  This is the unique RREF.
    """
    # forward elimination: stored rows have leading 1 at their pivot, entries beyond
    piv = {}
    for row in rows:
        r = dict(row)
        heap = [c for c in r if c in piv]
        heapq.heapify(heap)
        while heap:
            c = heapq.heappop(heap)
            a = r.get(c)
            if not a:
                continue
            for j in _axpy_new(F, r, F.neg(a), piv[c]):
                if j in piv:
                    heapq.heappush(heap, j)
        if not r:
            continue
        c0 = min(r)
        piv[c0] = _scale_row(F, F.inv(r[c0]), r)
    # back substitution, highest pivot first
    order = sorted(piv)
    for c in reversed(order):
        r = piv[c]
        for c2 in sorted(j for j in r if j != c and j in piv):
            a = r.get(c2)
            if a:
                _axpy(F, r, F.neg(a), piv[c2])
    return order, [piv[c] for c in order]


def _axpy_new(F, r, a, s):
    """_axpy, returning the columns that became nonzero."""
    new = []
    if isinstance(F, PrimeField):
        p = F.p
        for j, v in s.items():
            old = r.get(j, 0)
            w = (old + a * v) % p
            if w:
                r[j] = w
                if not old:
                    new.append(j)
            elif old:
                del r[j]
    else:
        for j, v in s.items():
            old = r.get(j, 0)
            w = old + a * v
            if w:
                r[j] = w
                if not old:
                    new.append(j)
            elif old:
                del r[j]
    return new


def _transpose_rows(rows, ncols):
    out = [dict() for _ in range(ncols)]
    for i, r in enumerate(rows):
        for j, v in r.items():
            out[j][i] = v
    return out


class Mat:
    """A rows x cols matrix over a FieldSpec, one sparse block per factor."""

    __slots__ = ("field", "rows", "cols", "blocks", "_colcache")

    def __init__(self, field_, rows, cols, blocks):
        self.field = field_
        self.rows = rows
        self.cols = cols
        self.blocks = tuple(tuple(b) for b in blocks)
        self._colcache = None
        if len(self.blocks) != len(field_.factors):
            raise ShapeMismatch("block count differs from factor count")
        for b in self.blocks:
            if len(b) != rows:
                raise ShapeMismatch("row count mismatch")

    # -- construction --
    @classmethod
    def zero(cls, field_, rows, cols):
        return cls(field_, rows, cols, [[{} for _ in range(rows)] for _ in field_.factors])

    @classmethod
    def identity(cls, field_, n):
        return cls(field_, n, n, [[{i: F.one} for i in range(n)] for F in field_.factors])

    @classmethod
    def from_rows(cls, field_, rows, cols=None):
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        blocks = [[] for _ in field_.factors]
        for r in rows:
            if len(r) != cols:
                raise ShapeMismatch("ragged matrix")
            sc = [field_.scalar(x) for x in r]
            for k in range(len(field_.factors)):
                blocks[k].append({j: s[k] for j, s in enumerate(sc) if s[k]})
        return cls(field_, len(rows), cols, blocks)

    @classmethod
    def from_columns(cls, field_, columns, rows):
        m = cls.from_rows(field_, [list(c) for c in columns], rows)
        return m.T

    @classmethod
    def from_entries(cls, field_, rows, cols, entries):
        """entries: {(i, j): scalar}."""
        blocks = [[{} for _ in range(rows)] for _ in field_.factors]
        for (i, j), x in entries.items():
            s = field_.scalar(x)
            for k, v in enumerate(s):
                if v:
                    blocks[k][i][j] = v
        return cls(field_, rows, cols, blocks)

    @classmethod
    def from_sparse_columns(cls, field_, rows, columns):
        """Single-factor helper: columns is a list of {row: value} dicts."""
        F = field_.base
        block = [{} for _ in range(rows)]
        for j, col in enumerate(columns):
            for i, v in col.items():
                v = F(v)
                if v:
                    block[i][j] = v
        return cls(field_, rows, len(columns), [block])

    @classmethod
    def join_factors(cls, field_, mats):
        """Reassemble a product-field matrix from per-factor matrices of equal shape."""
        if len(mats) != len(field_.factors):
            raise ShapeMismatch("wrong number of factor matrices")
        r, c = mats[0].rows, mats[0].cols
        for m in mats:
            if (m.rows, m.cols) != (r, c):
                raise ShapeMismatch("factor matrices differ in shape")
        return cls(field_, r, c, [m.blocks[0] for m in mats])

    def factor(self, k):
        return Mat(self.field.factor(k), self.rows, self.cols, [self.blocks[k]])

    # -- inspection --
    @property
    def shape(self):
        return (self.rows, self.cols)

    def entry(self, i, j):
        return tuple(b[i].get(j, F.zero) for b, F in zip(self.blocks, self.field.factors))

    def to_rows(self):
        return [[self.entry(i, j) for j in range(self.cols)] for i in range(self.rows)]

    def to_lists(self):
        """Single-factor dense rows of plain field elements."""
        F = self.field.base
        b = self.blocks[0]
        return [[b[i].get(j, F.zero) for j in range(self.cols)] for i in range(self.rows)]

    def column(self, j):
        """Single-factor column j as a {row: value} dict (do not mutate)."""
        if self._colcache is None:
            self._colcache = self.columns()
        return self._colcache[j]

    def columns(self):
        out = [dict() for _ in range(self.cols)]
        for i, r in enumerate(self.blocks[0]):
            for j, v in r.items():
                out[j][i] = v
        return out

    def is_zero(self):
        return all(not r for b in self.blocks for r in b)

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return (self.field == other.field and self.shape == other.shape
                and self.blocks == other.blocks)

    def __hash__(self):
        return hash((self.rows, self.cols))

    def __repr__(self):
        return f"Mat({self.field.name}, {self.rows}x{self.cols})"

    def _check(self, other):
        if self.field != other.field:
            raise FieldMismatch(f"{self.field.name} vs {other.field.name}")

    # -- arithmetic --
    def __matmul__(self, other):
        self._check(other)
        if self.cols != other.rows:
            raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
        blocks = []
        for F, A, B in zip(self.field.factors, self.blocks, other.blocks):
            out = []
            for ra in A:
                acc = {}
                for j, a in ra.items():
                    rb = B[j]
                    if rb:
                        _axpy(F, acc, a, rb)
                out.append(acc)
            blocks.append(out)
        return Mat(self.field, self.rows, other.cols, blocks)

    def _combine(self, other, sign):
        self._check(other)
        if self.shape != other.shape:
            raise ShapeMismatch(f"{self.shape} vs {other.shape}")
        blocks = []
        for F, A, B in zip(self.field.factors, self.blocks, other.blocks):
            s = F.one if sign > 0 else F.neg(F.one)
            out = []
            for ra, rb in zip(A, B):
                r = dict(ra)
                _axpy(F, r, s, rb)
                out.append(r)
            blocks.append(out)
        return Mat(self.field, self.rows, self.cols, blocks)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, x):
        s = self.field.scalar(x)
        return Mat(self.field, self.rows, self.cols,
                   [[_scale_row(F, a, r) for r in b]
                    for F, a, b in zip(self.field.factors, s, self.blocks)])

    @property
    def T(self):
        return Mat(self.field, self.cols, self.rows,
                   [_transpose_rows(b, self.cols) for b in self.blocks])

    def apply(self, vec):
        """Single-factor: image of a sparse vector {index: value}."""
        F = self.field.base
        acc = {}
        cols = self.columns() if vec else []
        for j, a in vec.items():
            _axpy(F, acc, a, cols[j])
        return acc

    def select_cols(self, idx):
        pos = {j: n for n, j in enumerate(idx)}
        return Mat(self.field, self.rows, len(idx),
                   [[{pos[j]: v for j, v in r.items() if j in pos} for r in b] for b in self.blocks])

    def select_rows(self, idx):
        return Mat(self.field, len(idx), self.cols, [[b[i] for i in idx] for b in self.blocks])

    def kron(self, other):
        self._check(other)
        blocks = []
        for F, A, B in zip(self.field.factors, self.blocks, other.blocks):
            out = []
            for ra in A:
                for rb in B:
                    row = {}
                    for j, a in ra.items():
                        for l, b in rb.items():
                            row[j * other.cols + l] = F.mul(a, b)
                    out.append(row)
            blocks.append(out)
        return Mat(self.field, self.rows * other.rows, self.cols * other.cols, blocks)


def hstack(field_, mats, rows=None):
    if not mats:
        return Mat.zero(field_, rows or 0, 0)
    r = mats[0].rows
    blocks = []
    for k in range(len(field_.factors)):
        out = [dict() for _ in range(r)]
        off = 0
        for m in mats:
            if m.rows != r:
                raise ShapeMismatch("hstack row mismatch")
            for i, row in enumerate(m.blocks[k]):
                for j, v in row.items():
                    out[i][off + j] = v
            off += m.cols
        blocks.append(out)
    return Mat(field_, r, sum(m.cols for m in mats), blocks)


def vstack(field_, mats, cols=None):
    if not mats:
        return Mat.zero(field_, 0, cols or 0)
    c = mats[0].cols
    for m in mats:
        if m.cols != c:
            raise ShapeMismatch("vstack column mismatch")
    return Mat(field_, sum(m.rows for m in mats), c,
               [[r for m in mats for r in m.blocks[k]] for k in range(len(field_.factors))])


def block_diag(field_, mats):
    rows = sum(m.rows for m in mats)
    cols = sum(m.cols for m in mats)
    blocks = []
    for k in range(len(field_.factors)):
        out = []
        off = 0
        for m in mats:
            for r in m.blocks[k]:
                out.append({off + j: v for j, v in r.items()})
            off += m.cols
        blocks.append(out)
    return Mat(field_, rows, cols, blocks)


# ---- the five primitives ----

def rref_kernel_image(M):
    """(rank per factor, kernel basis, image basis).

    Kernel columns follow the free columns of the RREF; image columns are the
    pivot columns of M.  Over a product field the columns of each factor are
    supported on that factor alone, so they span the kernel (image) factorwise.
    """
    ranks, kers, ims = [], [], []
    for k, F in enumerate(M.field.factors):
        B = M.blocks[k]
        piv, red = _rref_rows(F, B)
        ranks.append(len(piv))
        pset = set(piv)
        free = [j for j in range(M.cols) if j not in pset]
        by_free = {f: {f: F.one} for f in free}
        for p, r in zip(piv, red):
            for j, v in r.items():
                if j != p:
                    by_free[j][p] = F.neg(v)
        kcols = [by_free[f] for f in free]
        kers.append(kcols)
        ims.append(piv)
    K = _factor_supported(M.field, M.cols, kers)
    I_cols = []
    for k, F in enumerate(M.field.factors):
        cols = _transpose_rows(M.blocks[k], M.cols)
        I_cols.append([cols[j] for j in ims[k]])
    I = _factor_supported(M.field, M.rows, I_cols)
    return tuple(ranks), K, I


def _factor_supported(field_, rows, per_factor_cols):
    total = sum(len(c) for c in per_factor_cols)
    blocks = []
    off = 0
    for k in range(len(field_.factors)):
        b = [dict() for _ in range(rows)]
        for n, col in enumerate(per_factor_cols[k]):
            for i, v in col.items():
                b[i][off + n] = v
        off += len(per_factor_cols[k])
        blocks.append(b)
    return Mat(field_, rows, total, blocks)


def rank(M):
    """Rank of a single-factor matrix (tuple for product fields)."""
    r = tuple(len(_rref_rows(F, b)[0]) for F, b in zip(M.field.factors, M.blocks))
    return r[0] if len(r) == 1 else r


def kernel(M):
    return rref_kernel_image(M)[1]


def image(M):
    return rref_kernel_image(M)[2]


def solve(M, b):
    """A particular x with M x = b; b is a column Mat (rows x 1) or a list of scalars.

    Free variables are set to zero.  Raises NoSolution if b is outside the
    image in some factor.
    """
    if not isinstance(b, Mat):
        b = Mat.from_rows(M.field, [[x] for x in b], 1)
    X = solve_many(M, b)
    return X


def solve_many(M, B):
    """X with M X = B, solving each column of B."""
    M._check(B)
    if M.rows != B.rows:
        raise ShapeMismatch("solve: row mismatch")
    blocks = []
    for k, F in enumerate(M.field.factors):
        aug = [dict(r) for r in M.blocks[k]]
        n = M.cols
        for i, r in enumerate(B.blocks[k]):
            for j, v in r.items():
                aug[i][n + j] = v
        piv, red = _rref_rows(F, aug)
        out = [dict() for _ in range(n)]
        for p, r in zip(piv, red):
            if p >= n:
                raise NoSolution(f"right-hand side outside the image (factor {k})")
            for j, v in r.items():
                if j >= n:
                    out[p][j - n] = v
        blocks.append(out)
    return Mat(M.field, M.cols, B.cols, blocks)


def section(M):
    """S with M S = I, for M surjective in every factor."""
    r = rank(M)
    rs = r if isinstance(r, tuple) else (r,)
    if any(x < M.rows for x in rs):
        raise NotSurjective(f"rank {r} < {M.rows}")
    return solve_many(M, Mat.identity(M.field, M.rows))


def retraction(M):
    """R with R M = I, for M injective in every factor."""
    r = rank(M)
    rs = r if isinstance(r, tuple) else (r,)
    if any(x < M.cols for x in rs):
        raise NotInjective(f"rank {r} < {M.cols}")
    return section(M.T).T


def cokernel(M):
    """(projection P, dim per factor) with P surjective and ker P = im M.

    The complement of the image is spanned by the standard basis vectors at
    the non-pivot coordinates of the RREF of M^T, in ascending order.
    """
    dims, projs = [], []
    for k, F in enumerate(M.field.factors):
        piv, red = _rref_rows(F, _transpose_rows(M.blocks[k], M.cols))
        pset = set(piv)
        comp = [j for j in range(M.rows) if j not in pset]
        dims.append(len(comp))
        by_comp = {j: {j: F.one} for j in comp}
        for p, r in zip(piv, red):
            for j, v in r.items():
                if j != p:
                    by_comp[j][p] = F.neg(v)
        projs.append([by_comp[j] for j in comp])
    if len(set(dims)) == 1:
        P = Mat(M.field, dims[0], M.rows, projs)
    else:
        # unequal per-factor dimensions: stack factor-supported rows
        total = sum(dims)
        blocks = []
        off = 0
        for k in range(len(M.field.factors)):
            b = [dict() for _ in range(total)]
            for n, row in enumerate(projs[k]):
                b[off + n] = row
            off += dims[k]
            blocks.append(b)
        P = Mat(M.field, total, M.rows, blocks)
    d = tuple(dims)
    return P, (d[0] if len(d) == 1 else d)


def is_injective(M):
    r = rank(M)
    return all(x == M.cols for x in (r if isinstance(r, tuple) else (r,)))


def is_surjective(M):
    r = rank(M)
    return all(x == M.rows for x in (r if isinstance(r, tuple) else (r,)))


def in_span(M, v):
    """Single-factor: is the sparse vector v in the column span of M?"""
    try:
        solve_many(M, Mat.from_sparse_columns(M.field, M.rows, [v]))
        return True
    except NoSolution:
        return False


def compose(*mats):
    return reduce(lambda a, b: a @ b, mats)
