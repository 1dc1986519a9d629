import random
from fractions import Fraction

from t2mc.qlinalg import (IntMatrix, Matrix, det, frac, frac_str, in_lattice,
                          integer_kernel, invert, rank_kernel,
                          smith_normal_form, solve, solve_integer)


def test_frac_parsing_and_printing():
    assert frac("3/4") == Fraction(3, 4)
    assert frac("-2") == Fraction(-2)
    assert frac_str(Fraction(3, 4)) == "3/4"
    assert frac_str(Fraction(5)) == "5"
    assert frac_str(Fraction(-1, 2)) == "-1/2"


def test_rank_kernel_nilpotent_block():
    rank, kernel = rank_kernel(Matrix.from_rows([[0, 1], [0, 0]]))
    assert rank == 1
    assert kernel == [(Fraction(1), Fraction(0))]


def test_rank_kernel_identity():
    rank, kernel = rank_kernel(Matrix.identity(3))
    assert rank == 3
    assert kernel == []


def test_rank_kernel_rank_one():
    rank, kernel = rank_kernel(Matrix.from_rows([[1, 2], [2, 4]]))
    assert rank == 1
    assert kernel == [(Fraction(-2), Fraction(1))]


def test_solve_identity():
    sol = solve(Matrix.identity(3), [1, 2, 3])
    assert sol is not None
    assert sol[0] == (Fraction(1), Fraction(2), Fraction(3))
    assert sol[1] == []


def test_solve_inconsistent():
    assert solve(Matrix.from_rows([[0, 0]]), [1]) is None


def test_solve_underdetermined():
    particular, kernel = solve(Matrix.from_rows([[1, 1]]), [2])
    assert particular == (Fraction(2), Fraction(0))
    assert kernel == [(Fraction(-1), Fraction(1))]


def test_invert_diagonal():
    inv = invert(Matrix.from_rows([[2, 0], [0, 3]]))
    assert inv == Matrix.from_rows([[Fraction(1, 2), 0], [0, Fraction(1, 3)]])


def test_invert_singular():
    assert invert(Matrix.from_rows([[1, 1], [1, 1]])) is None


def test_invert_unipotent():
    inv = invert(Matrix.from_rows([[1, 2], [0, 1]]))
    assert inv == Matrix.from_rows([[1, -2], [0, 1]])


def test_smith_normal_form_pinned():
    d, u, v = smith_normal_form(IntMatrix.from_rows([[2, 0], [0, 3]]))
    assert d == (1, 6)
    d, _, _ = smith_normal_form(IntMatrix.from_rows([[0, 0], [0, 0]]))
    assert d == (0, 0)
    d, _, _ = smith_normal_form(IntMatrix.from_rows([[2]]))
    assert d == (2,)


def _int_det(m: IntMatrix):
    return det(Matrix(m.rows, m.cols, [Fraction(e) for e in m.entries]))


def test_smith_normal_form_properties():
    rng = random.Random(11)
    for _ in range(25):
        n = rng.randint(1, 4)
        mcols = rng.randint(1, 4)
        mat = IntMatrix(n, mcols,
                        [rng.randint(-5, 5) for _ in range(n * mcols)])
        d, u, v = smith_normal_form(mat)
        prod = u * mat * v
        for i in range(n):
            for j in range(mcols):
                expected = d[i] if i == j and i < len(d) else 0
                assert prod[(i, j)] == expected
        for k in range(len(d) - 1):
            if d[k + 1] != 0:
                assert d[k] != 0 and d[k + 1] % d[k] == 0
            assert d[k] >= 0
        assert abs(_int_det(u)) == 1
        assert abs(_int_det(v)) == 1


def _random_matrix(rng, rows, cols):
    return Matrix(rows, cols,
                  [Fraction(rng.randint(-6, 6), rng.randint(1, 4))
                   for _ in range(rows * cols)])


def test_rank_nullity_random():
    rng = random.Random(7)
    for _ in range(20):
        rows = rng.randint(1, 8)
        cols = rng.randint(1, 8)
        m = _random_matrix(rng, rows, cols)
        rank, kernel = rank_kernel(m)
        assert rank + len(kernel) == cols
        for vec in kernel:
            assert all(x == 0 for x in m.apply(vec))
        if kernel:
            span = Matrix.from_rows([list(v) for v in kernel])
            span_rank, _ = rank_kernel(span)
            assert span_rank == len(kernel)


def test_invert_roundtrip_random():
    rng = random.Random(13)
    found = 0
    while found < 10:
        n = rng.randint(1, 6)
        m = _random_matrix(rng, n, n)
        inv = invert(m)
        if inv is None:
            assert det(m) == 0
            continue
        found += 1
        assert m * inv == Matrix.identity(n)
        assert inv * m == Matrix.identity(n)


def test_solve_random_consistency():
    rng = random.Random(17)
    for _ in range(15):
        rows = rng.randint(1, 6)
        cols = rng.randint(1, 6)
        a = _random_matrix(rng, rows, cols)
        x = [Fraction(rng.randint(-3, 3)) for _ in range(cols)]
        b = a.apply(x)
        sol = solve(a, b)
        assert sol is not None
        particular, kernel = sol
        assert a.apply(particular) == tuple(b)
        for vec in kernel:
            assert all(v == 0 for v in a.apply(vec))


def test_integer_kernel_and_lattice_membership():
    mat = IntMatrix.from_rows([[1, 1, -1, 0]])
    kernel = integer_kernel(mat)
    assert len(kernel) == 3
    for vec in kernel:
        assert sum(a * b for a, b in zip((1, 1, -1, 0), vec)) == 0
    basis = [(1, 1, 0, 0), (0, 0, 1, 1)]
    assert in_lattice(basis, (1, 1, 1, 1))
    assert in_lattice(basis, (2, 2, -1, -1))
    assert not in_lattice(basis, (1, 0, 0, 0))
    assert in_lattice([], (0, 0, 0, 0))
    assert not in_lattice([], (1, 0, 0, 0))


def test_solve_integer():
    a = IntMatrix.from_rows([[2, 0], [0, 3]])
    assert solve_integer(a, [4, 9]) == (2, 3)
    assert solve_integer(a, [1, 0]) is None
