import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from strathom.exact_linalg import (
    QQ,
    ZZ,
    ColumnLattice,
    ExactMatrix,
    PresolvedSolver,
    coordinates_in_subquotient,
    determinant,
    invariant_factors,
    inverse,
    kernel_basis,
    rank,
    smith_normal_form,
    solve_in_image,
    subquotient,
)


def M(rows, ring=ZZ):
    return ExactMatrix.from_rows(rows, ring)


def check_snf(m):
    res = smith_normal_form(m)
    assert res.D == res.U @ m @ res.V
    assert determinant(res.U) in (1, -1)
    assert determinant(res.V) in (1, -1)
    diag = res.diagonal()
    for d in diag:
        assert d >= 0
    nz = [d for d in diag if d != 0]
    # zeros trail and consecutive entries divide
    assert diag[: len(nz)] == nz
    for a, b in zip(nz, nz[1:]):
        assert b % a == 0
    # off-diagonal entries vanish
    for i in range(res.D.rows):
        for j in range(res.D.cols):
            if i != j:
                assert res.D[i, j] == 0
    return res


# ---------------------------------------------------------------- snf


def test_snf_identity():
    res = check_snf(ExactMatrix.identity(2))
    assert res.diagonal() == [1, 1]


def test_snf_2x2_divisor_chain():
    # d1 = gcd of entries = 2, d1*d2 = |det| = 8, so D = diag(2, 4)
    m = M([[2, 4], [6, 8]])
    res = check_snf(m)
    assert res.diagonal() == [2, 4]


def test_snf_zero_matrix():
    res = check_snf(ExactMatrix.zeros(3, 3))
    assert res.diagonal() == [0, 0, 0]


def test_snf_rectangular():
    res = check_snf(M([[1, 2, 3], [4, 5, 6]]))
    assert res.rank == 2


def test_snf_rejects_rationals():
    with pytest.raises(ValueError):
        smith_normal_form(M([[1]], QQ))


def test_invariant_factors_matches_snf():
    m = M([[2, 0], [0, 6], [0, 0]])
    assert invariant_factors(m) == [2, 6]


def test_snf_big_entries_no_overflow():
    big = 10 ** 30
    m = M([[big, 1], [0, big]])
    res = check_snf(m)
    assert res.diagonal() == [1, big * big]


@settings(max_examples=150, deadline=None)
@given(
    st.integers(1, 6),
    st.integers(1, 6),
    st.integers(0, 2 ** 32),
)
def test_snf_random_properties(r, c, seed):
    rng = random.Random(seed)
    m = M([[rng.randint(-10, 10) for _ in range(c)] for _ in range(r)])
    res = check_snf(m)
    if r == c:
        det = determinant(m)
        prod = 1
        for d in res.diagonal():
            if d != 0:
                prod *= d
        if det != 0:
            assert prod == abs(det)


# ---------------------------------------------------------------- kernels


def test_kernel_of_identity_is_empty():
    assert kernel_basis(ExactMatrix.identity(3)).cols == 0


def test_kernel_of_difference():
    k = kernel_basis(M([[1, -1]]))
    assert k.cols == 1
    a, b = k.col(0)
    assert a == b and abs(a) == 1


def test_kernel_is_saturated():
    # [[2, -4]] has rational kernel (2, 1); the lattice generator must be
    # primitive, not an integer multiple like (4, 2)
    k = kernel_basis(M([[2, -4]]))
    assert k.cols == 1
    col = k.col(0)
    assert sorted(abs(x) for x in col) == [1, 2]


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 2 ** 32))
def test_rank_nullity(r, c, seed):
    rng = random.Random(seed)
    rows = [[rng.randint(-6, 6) for _ in range(c)] for _ in range(r)]
    for ring in (ZZ, QQ):
        m = M(rows, ring)
        k = kernel_basis(m)
        assert rank(m) + k.cols == c
        if k.cols:
            assert (m @ k).is_zero()


# ---------------------------------------------------------------- solving


def test_solve_identity():
    x = solve_in_image(ExactMatrix.identity(3), [5, -1, 2])
    assert x == [5, -1, 2]


def test_solve_not_in_image_over_zz():
    assert solve_in_image(M([[2]]), [3]) is None


def test_solve_in_image_over_qq():
    from fractions import Fraction

    x = solve_in_image(M([[2]], QQ), [3])
    assert x == [Fraction(3, 2)]


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 2 ** 32))
def test_solve_round_trip(r, c, seed):
    rng = random.Random(seed)
    m = M([[rng.randint(-5, 5) for _ in range(c)] for _ in range(r)])
    x = [rng.randint(-4, 4) for _ in range(c)]
    b = m.matvec(x)
    sol = solve_in_image(m, b)
    assert sol is not None
    assert m.matvec(sol) == b


def test_presolved_solver_reuse():
    m = M([[1, 2], [3, 4]])
    s = PresolvedSolver(m)
    for x in ([1, 0], [0, 1], [7, -7]):
        b = m.matvec(x)
        assert s.solve(b) == x


def test_inverse_unimodular():
    m = M([[2, 1], [1, 1]])
    mi = inverse(m)
    assert m @ mi == ExactMatrix.identity(2)


# ---------------------------------------------------------------- subquotients


def test_subquotient_free_rank_one():
    sq = subquotient(M([[1]]), ExactMatrix.zeros(1, 0))
    assert (sq.betti, sq.torsion) == (1, [])


def test_subquotient_z_mod_2():
    sq = subquotient(M([[1]]), M([[2]]))
    assert (sq.betti, sq.torsion) == (0, [2])


def test_subquotient_rejects_bad_image():
    with pytest.raises(ValueError, match="image not contained in kernel"):
        subquotient(M([[2], [0]]), M([[1], [1]]))


def test_subquotient_lift_and_coordinates():
    # Z^2 / <(0, 3)> = Z + Z/3
    kernel = ExactMatrix.identity(2)
    image = M([[0], [3]])
    sq = subquotient(kernel, image)
    assert sq.betti == 1
    assert sq.torsion == [3]
    free, tors = coordinates_in_subquotient(sq.lift.col(0), sq)
    assert free == [1] and tors == [0]
    free, tors = coordinates_in_subquotient([0, 3], sq)
    assert free == [0] and tors == [0]
    free, tors = coordinates_in_subquotient([0, 1], sq)
    assert free == [0] and tors != [0]


def test_coordinates_rejects_non_cocycle():
    sq = subquotient(M([[2], [2]]), ExactMatrix.zeros(2, 0))
    with pytest.raises(ValueError, match="not a cocycle"):
        coordinates_in_subquotient([1, 0], sq)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(0, 3), st.integers(0, 2 ** 32))
def test_subquotient_zz_vs_qq(n, b, seed):
    rng = random.Random(seed)
    image_rows = [[3 * rng.randint(-2, 2) for _ in range(b)] for _ in range(n)]
    kz = ExactMatrix.identity(n, ZZ)
    kq = ExactMatrix.identity(n, QQ)
    sz = subquotient(kz, M(image_rows, ZZ))
    sq = subquotient(kq, M(image_rows, QQ))
    assert sq.torsion == []
    if not sz.torsion:
        assert sz.betti == sq.betti


# ---------------------------------------------------------------- lattices


def test_column_lattice_membership():
    lat = ColumnLattice(ZZ)
    lat.add({0: 2, 1: 0})
    lat.add({1: 3})
    assert lat.rank == 2
    assert lat.contains({0: 2, 1: 3})
    assert not lat.contains({0: 1})
    co = lat.coordinates({0: 4, 1: -3})
    assert co == {0: 2, 1: -1}


def test_column_lattice_gcd_combination():
    lat = ColumnLattice(ZZ)
    lat.add({0: 4})
    grew = lat.add({0: 6})
    assert grew
    assert lat.contains({0: 2})
    co = lat.coordinates({0: 2})
    assert co is not None
    assert 4 * co.get(0, 0) + 6 * co.get(1, 0) == 2


def test_column_lattice_coordinates_reconstruct():
    rng = random.Random(7)
    gens = [
        {i: rng.randint(-5, 5) for i in range(4)}
        for _ in range(6)
    ]
    lat = ColumnLattice(ZZ)
    for g in gens:
        lat.add(g)
    # any random integer combination is a member and reconstructs exactly
    for _ in range(20):
        cs = [rng.randint(-3, 3) for _ in gens]
        target = {}
        for c, g in zip(cs, gens):
            for k, v in g.items():
                target[k] = target.get(k, 0) + c * v
        target = {k: v for k, v in target.items() if v}
        co = lat.coordinates(target)
        assert co is not None
        rebuilt = {}
        for gi, c in co.items():
            for k, v in gens[gi].items():
                rebuilt[k] = rebuilt.get(k, 0) + c * v
        rebuilt = {k: v for k, v in rebuilt.items() if v}
        assert rebuilt == target


def test_column_lattice_equality():
    a = ColumnLattice(ZZ)
    a.add({0: 1, 1: 1})
    a.add({1: 2})
    b = ColumnLattice(ZZ)
    b.add({0: 1, 1: 3})
    b.add({1: 2})
    assert a.lattice_equals(b)
    c = ColumnLattice(ZZ)
    c.add({0: 1, 1: 1})
    assert not a.lattice_equals(c)
