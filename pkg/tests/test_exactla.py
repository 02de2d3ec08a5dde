import random
from fractions import Fraction

import pytest

from artifact.exactla import (
    Mat, field, base_field, rank, kernel, image, solve, solve_many, section, retraction,
    cokernel, is_injective, is_surjective, in_span, NoSolution, ShapeMismatch, FieldMismatch,
    _rref_rows,
)

import gen


def dense_rref(F, rows, ncols):
    """Textbook Gauss-Jordan on dense lists."""
    M = [[r.get(j, F.zero) for j in range(ncols)] for r in rows]
    piv, ri = [], 0
    for c in range(ncols):
        p = next((i for i in range(ri, len(M)) if M[i][c] != F.zero), None)
        if p is None:
            continue
        M[ri], M[p] = M[p], M[ri]
        inv = F.inv(M[ri][c])
        M[ri] = [F.mul(inv, x) for x in M[ri]]
        for i in range(len(M)):
            if i != ri and M[i][c] != F.zero:
                a = M[i][c]
                M[i] = [F.sub(x, F.mul(a, y)) for x, y in zip(M[i], M[ri])]
        piv.append(c)
        ri += 1
    return piv, [{j: v for j, v in enumerate(M[i]) if v != F.zero} for i in range(ri)]


@pytest.mark.parametrize("name", ["F2", "F3", "F5", "Q"])
def test_rref_matches_dense_oracle(name):
    F = base_field(name)
    rng = random.Random(5)
    for _ in range(200):
        nr, nc = rng.randint(0, 8), rng.randint(1, 8)
        rows = []
        for _ in range(nr):
            r = {j: F(rng.randint(-2, 2)) for j in range(nc) if rng.random() < 0.5}
            rows.append({j: v for j, v in r.items() if v != F.zero})
        assert _rref_rows(F, rows) == dense_rref(F, rows, nc)


def test_field_parsing_and_scalars():
    Fs = field("F2xF3")
    assert Fs.is_product and Fs.name == "F2xF3"
    assert Fs.scalar(5) == (1, 2)
    assert Fs.scalar([1, 2]) == (1, 2)
    with pytest.raises(ShapeMismatch):
        Fs.scalar([1, 2, 3])
    assert field("Q").base(Fraction(1, 3)) == Fraction(1, 3)
    with pytest.raises(ValueError):
        base_field("F4")
    with pytest.raises(FieldMismatch):
        Fs.base


def test_rational_grammar():
    Q = base_field("Q")
    assert Q.parse("-3/4") == Fraction(-3, 4)
    assert Q.fmt(Fraction(6, 4)) == "3/2"
    for bad in ("2/4", "1/0", "1/-2", "0.5", True):
        with pytest.raises(ValueError):
            Q.parse(bad)


@pytest.mark.parametrize("name", gen.FIELDS + ("F2xF3",))
def test_rank_nullity_and_bases(name):
    Fs = field(name)
    rng = random.Random(1)
    for seed in range(60):
        _, vr = gen.rngs(seed)
        r, c = rng.randint(0, 6), rng.randint(0, 6)
        M = Mat.join_factors(Fs, [gen.random_mat(Fs.factor(k), r, c, vr)
                                  for k in range(len(Fs.factors))])
        K, I = kernel(M), image(M)
        rk = rank(M)
        rks = rk if isinstance(rk, tuple) else (rk,)
        assert (M @ K).is_zero()
        for k, x in enumerate(rks):
            Mk = M.factor(k)
            assert kernel(Mk).cols + x == c
            assert image(Mk).cols == x == rank(image(Mk))


def test_solve_section_retraction():
    Fs = field("F3")
    M = Mat.from_rows(Fs, [[1, 2, 0], [0, 1, 1]])
    S = section(M)
    assert M @ S == Mat.identity(Fs, 2)
    R = retraction(M.T)
    assert R @ M.T == Mat.identity(Fs, 2)
    x = solve(M, [1, 1])
    assert M @ x == Mat.from_rows(Fs, [[1], [1]])
    with pytest.raises(NoSolution):
        solve(Mat.from_rows(Fs, [[1, 0], [1, 0]]), [1, 2])
    B = Mat.from_rows(Fs, [[1, 0], [0, 2]])
    X = solve_many(M, B)
    assert M @ X == B


def test_cokernel_and_predicates():
    Fs = field("Q")
    M = Mat.from_rows(Fs, [[1, 0], [0, 0], [0, 1]])
    P, d = cokernel(M)
    assert d == 1 and (P @ M).is_zero() and is_surjective(P)
    assert is_injective(M) and not is_surjective(M)
    assert in_span(M, {0: Fraction(3)}) and not in_span(M, {1: Fraction(1)})


def test_product_blocks_are_independent():
    Fs = field("F2xF3")
    m2 = Mat.from_rows(field("F2"), [[1, 1], [1, 1]])
    m3 = Mat.from_rows(field("F3"), [[1, 1], [1, 2]])
    M = Mat.join_factors(Fs, [m2, m3])
    assert rank(M) == (1, 2)
    assert M.factor(0) == m2 and M.factor(1) == m3
    with pytest.raises(ShapeMismatch):
        Mat.join_factors(Fs, [m2, Mat.identity(field("F3"), 3)])
