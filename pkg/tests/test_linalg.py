from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from csmkit.linalg import (
    as_rows,
    fmt_rational,
    in_row_space,
    intersect_row_spaces,
    matmul,
    matvec,
    normalize,
    null_space,
    parse_rational,
    rank,
    rref,
)

small = st.integers(-4, 4)


def matrices(rows=3, cols=4):
    return st.lists(st.lists(small, min_size=cols, max_size=cols), min_size=1, max_size=rows)


def test_parse_rational_accepts_exact_forms():
    assert parse_rational("-1/2") == Fraction(-1, 2)
    assert parse_rational(" 3 ") == 3
    assert parse_rational(Fraction(2, 3)) == Fraction(2, 3)


@pytest.mark.parametrize("bad", [0.5, True, None])
def test_parse_rational_rejects_inexact(bad):
    with pytest.raises(TypeError):
        parse_rational(bad)


def test_rref_known():
    assert rref(as_rows([[2, 4], [1, 3]])) == ((1, 0), (0, 1))
    assert rref(as_rows([[0, 0, 3], [0, 0, 6]])) == ((0, 0, 1),)
    assert rref([]) == ()


@given(matrices())
def test_rref_canonical_under_row_operations(m):
    rows = as_rows(m)
    shuffled = tuple(reversed(rows)) + (tuple(a + b for a, b in zip(rows[0], rows[-1])),)
    assert rref(rows, 4) == rref(shuffled, 4)


@given(matrices())
def test_null_space_is_kernel_of_complementary_dimension(m):
    rows = as_rows(m)
    ker = null_space(rows, 4)
    assert len(ker) + rank(rows) == 4
    for v in ker:
        assert all(x == 0 for x in matvec(rows, v))


@given(matrices(), matrices())
def test_intersection_of_row_spaces(a, b):
    ra, rb = as_rows(a), as_rows(b)
    common = intersect_row_spaces(ra, rb)
    # dim(A + B) = dim A + dim B - dim(A cap B)
    assert rank(ra + rb) == rank(ra) + rank(rb) - len(common)
    for v in common:
        assert in_row_space(v, ra) and in_row_space(v, rb)


def test_normalize_and_format():
    assert normalize(as_rows([[0, -2, 4]])[0]) == (0, 1, -2)
    with pytest.raises(ValueError):
        normalize((Fraction(0),))
    assert fmt_rational(Fraction(-3, 4)) == "-3/4"
    assert fmt_rational(Fraction(5)) == "5"


def test_matmul_associates_with_matvec():
    a = as_rows([[1, 2], [0, 1]])
    b = as_rows([[3, 0, 1], [1, 1, 1]])
    v = as_rows([[1, -1, 2]])[0]
    assert matvec(matmul(a, b), v) == matvec(a, matvec(b, v))
