"""Chow ring of P^n and the bundle ring of P(V + 1)."""

import itertools
import random
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from csmkit.chow import (
    BiGradedClass,
    BundleRingClass,
    CohClass,
    DimensionMismatch,
    GradedClass,
    bundle_pushforward,
    cap,
    cap_product,
    chern_cotangent,
    chern_tangent,
    cross,
    diagonal_gysin,
    linear_gysin,
    mul,
    projection_pullback,
    pushforward_monomial,
)


def poly_mul(n, x, y):
    """Oracle: [P^i] is h^(n-i), multiply in Z[h]/h^(n+1)."""
    hx = [x[n - c] for c in range(n + 1)]
    hy = [y[n - c] for c in range(n + 1)]
    prod = [0] * (n + 1)
    for a, b in itertools.product(range(n + 1), repeat=2):
        if a + b <= n:
            prod[a + b] += hx[a] * hy[b]
    return tuple(prod[n - i] for i in range(n + 1))


def classes(n):
    return st.lists(st.integers(-5, 5), min_size=n + 1, max_size=n + 1).map(lambda c: GradedClass(n, tuple(c)))


@pytest.mark.parametrize("n", range(5))
def test_basis_products_exhaustive(n):
    for i, j in itertools.product(range(n + 1), repeat=2):
        got = mul(GradedClass.linear(n, i), GradedClass.linear(n, j))
        want = GradedClass.linear(n, i + j - n) if i + j >= n else GradedClass.zero(n)
        assert got == want


@pytest.mark.parametrize("n", range(5))
def test_ring_axioms_exhaustive_on_basis(n):
    basis = [GradedClass.linear(n, i) for i in range(n + 1)]
    one = GradedClass.fundamental(n)
    for x, y, z in itertools.product(basis, repeat=3):
        assert mul(mul(x, y), z) == mul(x, mul(y, z))
        assert mul(x, y) == mul(y, x)
    for x in basis:
        assert mul(one, x) == x


@given(st.integers(0, 4).flatmap(lambda n: st.tuples(classes(n), classes(n))))
def test_product_matches_polynomial_oracle(pair):
    x, y = pair
    assert mul(x, y).coeffs == poly_mul(x.n, x.coeffs, y.coeffs)


@pytest.mark.parametrize("n", range(2, 5))
def test_bezout(n):
    for d1, d2 in itertools.product(range(1, 4), repeat=2):
        x = d1 * GradedClass.linear(n, n - 1)
        y = d2 * GradedClass.linear(n, n - 1)
        assert mul(x, y) == d1 * d2 * GradedClass.linear(n, n - 2)


def test_chern_classes_of_projective_space():
    assert chern_tangent(2).coeffs == (1, 3, 3)
    assert chern_cotangent(3).coeffs == (1, -4, 6, -4)
    # the degree of the top Chern class is the Euler characteristic
    for n in range(5):
        assert cap(chern_tangent(n), GradedClass.fundamental(n)).degree == n + 1


@pytest.mark.parametrize("n", range(5))
def test_inverse(n):
    for u in (chern_tangent(n), chern_cotangent(n), CohClass(n, (1, 2, -1))):
        assert u * u.inverse() == CohClass.one(n)
        assert u ** -2 * u ** 2 == CohClass.one(n)
    with pytest.raises(ValueError):
        CohClass(n, (2,)).inverse()


def test_dual_flips_odd_degrees():
    x = GradedClass(3, (1, 2, 3, 4))
    assert x.dual().coeffs == (1, -2, 3, -4)
    assert x.dual().dual() == x


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        GradedClass.zero(2) + GradedClass.zero(3)
    with pytest.raises(DimensionMismatch):
        mul(GradedClass.zero(1), GradedClass.zero(2))


def test_json_round_trip_and_str():
    x = GradedClass(2, (2, -3, 1))
    assert GradedClass.from_json(x.to_json()) == x
    assert str(x) == "[P^2] - 3[P^1] + 2[P^0]"
    assert str(GradedClass(1, (2, -1))) == "-[P^1] + 2[P^0]"
    assert str(GradedClass.zero(1)) == "0"


def test_diagonal_gysin_is_intersection_product():
    rng = random.Random(3)
    for n in range(5):
        for _ in range(20):
            x = GradedClass(n, tuple(rng.randint(-4, 4) for _ in range(n + 1)))
            y = GradedClass(n, tuple(rng.randint(-4, 4) for _ in range(n + 1)))
            assert diagonal_gysin(cross(x, y)) == mul(x, y)


def test_linear_gysin_is_intersection_with_plane():
    for n in range(5):
        for k in range(n + 1):
            for j in range(n + 1):
                got = linear_gysin(GradedClass.linear(n, j), k)
                want_dim = j - (n - k)
                assert got == (GradedClass.linear(k, want_dim) if want_dim >= 0 else GradedClass.zero(k))


def test_projection_pullback_and_cap_product():
    x = GradedClass(1, (2, 1))
    z = projection_pullback(x, 1)
    assert z == BiGradedClass(1, 1, ((0, 0), (2, 1)))
    # c(TP^1) x 1 capped against [P^1 x P^1]
    got = cap_product(chern_tangent(1), CohClass.one(1), BiGradedClass(1, 1, ((0, 0), (0, 1))))
    assert got == BiGradedClass(1, 1, ((0, 2), (0, 1)))


# --- bundle ring -----------------------------------------------------------------


def bundle_chern(rng, n, r):
    return CohClass(n, (1,) + tuple(rng.randint(-3, 3) if i <= r else 0 for i in range(1, n + 1)))


@pytest.mark.parametrize("n,r", [(n, r) for n in range(4) for r in range(5)])
def test_reduced_pushforward_agrees_with_segre_oracle(n, r):
    """Dual route: normal-form reduction versus the Segre-class formula on raw monomials."""
    rng = random.Random(10 * n + r)
    for _ in range(3):
        c = bundle_chern(rng, n, r)
        for a in range(n + 1):
            for b in range(n + r + 2):
                got = bundle_pushforward(BundleRingClass.monomial(n, c, r, a, b))
                assert got == pushforward_monomial(n, c, r, a, b), (a, b)


@pytest.mark.parametrize("n,r", [(n, r) for n in range(4) for r in range(5)])
def test_projection_formula(n, r):
    rng = random.Random(100 + 10 * n + r)
    c = bundle_chern(rng, n, r)
    for _ in range(5):
        terms = {(a, b): rng.randint(-3, 3) for a in range(n + 1) for b in range(r + 1)}
        z = BundleRingClass.from_terms(n, c, r, terms)
        u = CohClass(n, tuple(rng.randint(-3, 3) for _ in range(n + 1)))
        assert bundle_pushforward(z * u) == cap(u, bundle_pushforward(z))


@pytest.mark.parametrize("n,r", [(n, r) for n in range(4) for r in range(5)])
def test_total_segre_class_inverts_chern_class(n, r):
    rng = random.Random(200 + 10 * n + r)
    c = bundle_chern(rng, n, r)
    one = BundleRingClass.from_terms(n, c, r, {(0, 0): 1})
    total = GradedClass.zero(n)
    power = one
    for _ in range(n + r + 1):
        total = total + bundle_pushforward(power)
        power = power * one.zeta()
    assert cap(c, total) == GradedClass.fundamental(n)


def test_zeta_relation_holds():
    c = chern_cotangent(2)
    z = BundleRingClass.from_terms(2, c, 2, {(0, 0): 1}).zeta()
    lhs = z * z * z
    rel = {(i, 3 - i): c[i] for i in range(3)}
    assert lhs + BundleRingClass.from_terms(2, c, 2, {k: v for k, v in rel.items() if k != (0, 3)}) == BundleRingClass.from_terms(2, c, 2, {})


def test_bundle_ring_rejects_bad_chern_data():
    with pytest.raises(ValueError):
        BundleRingClass(2, CohClass(2, (1, 1, 1)), 1, ((0, 0), (0, 0), (0, 0)))


def test_binomial_sanity_of_fixtures():
    assert [comb(3, i) for i in range(3)] == list(chern_tangent(2).coeffs)
