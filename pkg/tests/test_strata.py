import random

import pytest

from csmkit.chow import BiGradedClass, GradedClass
from csmkit.generate import flag_poset, random_poset
from csmkit.strata import (
    ConstructibleFunction,
    EulerTable,
    MissingDataError,
    MorseTable,
    NonLinearError,
    PosetError,
    StratPoset,
    Stratum,
    common_refinement,
    cross_fn,
    csm,
    decompose_euler,
    decompose_indicators,
    euler_integral,
    euler_obstruction,
    indicator,
    product,
    product_poset,
    recompose_euler,
)
from helpers import coord, poset, smooth_csm_coeffs


def line_in_plane():
    return poset(2, coord(2, 0))


def test_poset_basic_queries():
    p = line_in_plane()
    assert set(p.ids) == {"P", "H0"}
    assert p.leq("H0", "P") and not p.leq("P", "H0")
    assert p.down("P") == {"P", "H0"}
    assert p.total_dim == 2
    assert p.is_linear()


def test_order_validation():
    s = [Stratum("a", 0, 1, GradedClass.linear(1, 0)), Stratum("b", 1, 1, GradedClass.linear(1, 1))]
    with pytest.raises(PosetError, match="dim"):
        StratPoset(1, s, {"a": ["b"]})
    with pytest.raises(PosetError, match="unknown"):
        StratPoset(1, s, {"b": ["c"]})
    c = Stratum("c", 2, 1, GradedClass.linear(2, 2))
    s2 = [Stratum("a", 0, 1, GradedClass.linear(2, 0)), Stratum("b", 1, 1, GradedClass.linear(2, 1)), c]
    with pytest.raises(PosetError, match="not closed"):
        StratPoset(2, s2, {"b": ["a"], "c": ["b"]})


def test_euler_table_validation():
    s = [Stratum("a", 0, 1, GradedClass.linear(1, 0)), Stratum("b", 1, 1, GradedClass.linear(1, 1))]
    with pytest.raises(PosetError, match="unitriangular"):
        StratPoset(1, s, {"b": ["a"]}, euler={"a": {"a": 1}, "b": {"b": 2}})
    with pytest.raises(PosetError, match="outside"):
        StratPoset(1, s, {"b": ["a"]}, euler={"a": {"a": 1, "b": 1}, "b": {"b": 1}})


def test_mather_leading_term_checked():
    s = [Stratum("a", 0, 1, GradedClass.linear(1, 0)), Stratum("b", 1, 1, GradedClass.linear(1, 1))]
    with pytest.raises(PosetError, match="start with"):
        StratPoset(1, s, {"b": ["a"]}, mather={"b": GradedClass(1, (0, 2))})


def test_json_round_trip():
    p = flag_poset(3)
    q = StratPoset.from_json(p.to_json())
    assert q == p
    assert q.mather == p.mather
    with pytest.raises(PosetError):
        StratPoset.from_json({"strata": []})


def test_chi_c_examples():
    # one line in P^2: the line and its complement
    p = line_in_plane()
    assert {s.id: s.chi_c for s in p} == {"H0": 2, "P": 1}
    # two transversal lines
    q = poset(2, coord(2, 0), coord(2, 1))
    assert {s.id: s.chi_c for s in q} == {"H0,1": 1, "H0": 1, "H1": 1, "P": 0}


def test_csm_known_values():
    p = line_in_plane()
    assert csm(indicator(p, "H0")) == GradedClass(2, (2, 1, 0))
    assert csm(indicator(p, "P")) == GradedClass(2, (3, 3, 1))
    complement = ConstructibleFunction(p, {"P": 1})
    assert csm(complement) == GradedClass(2, (1, 2, 1))


def test_csm_degree_is_euler_characteristic_on_flags():
    rng = random.Random(0)
    for n in range(1, 5):
        p = flag_poset(n)
        for _ in range(10):
            alpha = ConstructibleFunction(p, {s: rng.randint(-3, 3) for s in p.ids})
            assert csm(alpha).coeffs[0] == euler_integral(alpha)


def test_csm_needs_mather_data():
    s = [Stratum("a", 0, 1, GradedClass.linear(1, 0))]
    p = StratPoset(1, s, {})
    with pytest.raises(MissingDataError):
        csm(indicator(p, "a"))


@pytest.mark.parametrize("seed", range(100))
def test_decompose_round_trip_random_posets(seed):
    rng = random.Random(seed)
    p = random_poset(rng, rng.randint(1, 4), rng.randint(1, 7))
    alpha = ConstructibleFunction(p, {s: rng.randint(-5, 5) for s in p.ids})
    c = decompose_euler(alpha)
    assert recompose_euler(p, c) == alpha
    a = decompose_indicators(alpha)
    total = ConstructibleFunction(p)
    for t, v in a.items():
        total = total + v * indicator(p, t)
    assert total == alpha


def test_decompose_basis_columns():
    rng = random.Random(5)
    p = random_poset(rng, 3, 6)
    for z in p.ids:
        c = decompose_euler(euler_obstruction(p, z))
        assert c == {s: int(s == z) for s in p.ids}


def test_arithmetic_and_product():
    p = line_in_plane()
    a = ConstructibleFunction(p, {"H0": 2, "P": -1})
    b = ConstructibleFunction(p, {"H0": 3})
    assert (a + b)("H0") == 5
    assert (a - b)("P") == -1
    assert (2 * a)("H0") == 4
    assert product(a, b) == ConstructibleFunction(p, {"H0": 6})
    assert not ConstructibleFunction(p)
    with pytest.raises(PosetError):
        ConstructibleFunction(p, {"nope": 1})


def test_product_needs_common_poset():
    a = indicator(line_in_plane(), "H0")
    b = indicator(poset(2, coord(2, 1)), "H0")
    with pytest.raises(PosetError):
        product(a, b)


def test_product_poset_is_multiplicative():
    p = line_in_plane()
    q = poset(1, coord(1, 0))
    a = ConstructibleFunction(p, {"H0": 2, "P": -1})
    b = ConstructibleFunction(q, {"H0": 1, "P": 3})
    ab = cross_fn(a, b)
    assert euler_integral(ab) == euler_integral(a) * euler_integral(b)
    pq = product_poset(p, q)
    assert pq.ambient == (2, 1)
    got = csm(ab)
    ca, cb = csm(a), csm(b)
    assert got == BiGradedClass(2, 1, tuple(tuple(x * y for y in cb.coeffs) for x in ca.coeffs))


def test_morse_table_weights():
    p = flag_poset(2)
    nmd = MorseTable({s: {s: 1} for s in p.ids})
    alpha = ConstructibleFunction(p, {"F0": 4, "F1": 1, "F2": 1})
    # alpha = 1_{P^2} + 3 * 1_{P^0}
    assert nmd.weights(alpha) == {"F2": 1, "F1": 0, "F0": 3}
    with pytest.raises(MissingDataError):
        MorseTable({"F0": {"F0": 1}}).weights(alpha)
    with pytest.raises(PosetError):
        MorseTable({"F2": {"F0": 1}}).validate(p)


def test_common_refinement_of_arrangement_posets():
    p1 = line_in_plane()
    p2 = poset(2, coord(2, 1))
    ref = common_refinement(p1, p2)
    a, b = indicator(p1, "H0"), indicator(p2, "H0")
    pa, pb = ref.pull(a), ref.pull(b)
    assert euler_integral(product(pa, pb)) == 1
    assert euler_integral(pa) == euler_integral(a)


def test_common_refinement_without_linear_data():
    rng = random.Random(1)
    p, q = random_poset(rng, 2, 3), random_poset(rng, 2, 4)
    with pytest.raises(NonLinearError):
        common_refinement(p, q)
    assert common_refinement(p, p).poset is p


def test_smooth_table_matches_fixture():
    p = flag_poset(3)
    assert EulerTable.smooth(p) == p.euler
    for k in range(4):
        assert p.mather[f"F{k}"].coeffs == smooth_csm_coeffs(3, k)
