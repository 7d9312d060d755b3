"""Exact rational linear algebra on row lists.

Flats of projective space are represented by the linear forms cutting them
out. Everything here works on tuples of :class:`fractions.Fraction` so that
flats can be compared by their reduced row-echelon form.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Row = tuple[Fraction, ...]
Rows = tuple[Row, ...]


def parse_rational(value) -> Fraction:
    """Parse ``3``, ``"3"``, ``"-1/2"`` or a Fraction into a Fraction.

    Floats are rejected: they would silently introduce rounding.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as an exact rational")


def as_rows(rows: Iterable[Iterable]) -> Rows:
    return tuple(tuple(parse_rational(x) for x in row) for row in rows)


def rref(rows: Iterable[Sequence[Fraction]], ncols: int | None = None) -> Rows:
    """Reduced row-echelon form with zero rows dropped.

    The result is canonical for the row space, so it doubles as a hashable key.
    """
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return ()
    ncols = len(m[0]) if ncols is None else ncols
    piv_r = 0
    for piv_c in range(ncols):
        pivot = next((i for i in range(piv_r, len(m)) if m[i][piv_c] != 0), None)
        if pivot is None:
            continue
        m[piv_r], m[pivot] = m[pivot], m[piv_r]
        p = m[piv_r][piv_c]
        m[piv_r] = [x / p for x in m[piv_r]]
        for i in range(len(m)):
            if i != piv_r and m[i][piv_c] != 0:
                f = m[i][piv_c]
                m[i] = [a - f * b for a, b in zip(m[i], m[piv_r])]
        piv_r += 1
        if piv_r == len(m):
            break
    return tuple(tuple(r) for r in m[:piv_r])


def rank(rows: Iterable[Sequence[Fraction]]) -> int:
    return len(rref(list(rows)))


def in_row_space(vec: Sequence[Fraction], rows: Sequence[Sequence[Fraction]]) -> bool:
    if not any(vec):
        return True
    return rank(list(rows) + [vec]) == rank(rows)


def null_space(rows: Sequence[Sequence[Fraction]], ncols: int) -> Rows:
    """Basis of ``{v : r . v = 0 for every row r}``."""
    red = rref(rows, ncols)
    pivots = []
    for r in red:
        pivots.append(next(j for j, x in enumerate(r) if x != 0))
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, p in zip(red, pivots):
            v[p] = -r[f]
        basis.append(tuple(v))
    return tuple(basis)


def intersect_row_spaces(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> Rows:
    """Basis (in rref) of the intersection of two row spaces of equal width."""
    a = rref(a)
    b = rref(b)
    if not a or not b:
        return ()
    width = len(a[0])
    # x.A = y.B  <=>  (x, y) in the kernel of the stacked transpose
    stacked = list(a) + [tuple(-x for x in r) for r in b]
    cols = [tuple(stacked[i][j] for i in range(len(stacked))) for j in range(width)]
    kernel = null_space(cols, len(stacked))
    vecs = []
    for coeffs in kernel:
        v = [Fraction(0)] * width
        for c, r in zip(coeffs[: len(a)], a):
            if c:
                v = [x + c * y for x, y in zip(v, r)]
        vecs.append(v)
    return rref(vecs, width) if vecs else ()


def normalize(vec: Sequence[Fraction]) -> Row:
    """Scale so the first nonzero entry is 1; proportional vectors collide."""
    lead = next((x for x in vec if x != 0), None)
    if lead is None:
        raise ValueError("zero vector has no projective normal form")
    return tuple(Fraction(x) / lead for x in vec)


def matvec(matrix: Sequence[Sequence[Fraction]], vec: Sequence[Fraction]) -> Row:
    return tuple(sum((a * b for a, b in zip(row, vec)), Fraction(0)) for row in matrix)


def matmul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> Rows:
    cols = list(zip(*b))
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols) for row in a)


def fmt_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
