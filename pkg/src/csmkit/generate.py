"""Seeded instance generators: arrangements, flat functions, posets and case files."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations
from math import comb

from .arrangements import Arrangement, build_lattice
from .chow import GradedClass
from .linalg import Rows, rank
from .strata import EulerTable, StratPoset, Stratum

FAMILIES = ("generic-arrangement-pair", "splayed-coordinate-pair", "flag-of-flats")


def random_form(rng: random.Random, n: int, variables=None, bound: int = 4) -> tuple[Fraction, ...]:
    variables = list(range(n + 1)) if variables is None else list(variables)
    while True:
        v = [0] * (n + 1)
        for j in variables:
            v[j] = rng.randint(-bound, bound)
        if any(v):
            return tuple(Fraction(x) for x in v)


def in_general_position(forms, n: int) -> bool:
    size = min(len(forms), n + 1)
    return all(rank(list(sub)) == size for sub in combinations(forms, size))


def generic_arrangement(rng: random.Random, n: int, count: int, avoid=()) -> Arrangement:
    """``count`` hyperplanes such that, together with ``avoid``, all are in general position."""
    forms = list(avoid)
    for _ in range(count):
        while True:
            f = random_form(rng, n)
            if in_general_position(forms + [f], n):
                forms.append(f)
                break
    return Arrangement(n, tuple(forms[len(avoid):]))


def generic_pair(rng: random.Random, n: int, k: int) -> tuple[Arrangement, Arrangement]:
    a = generic_arrangement(rng, n, k)
    b = generic_arrangement(rng, n, k, avoid=a.hyperplanes)
    return a, b


def split_arrangement(rng: random.Random, n: int, variables, count: int) -> Arrangement:
    forms: list = []
    attempts = 0
    while len(forms) < count and attempts < 50 * count:
        attempts += 1
        f = random_form(rng, n, variables)
        if all(rank([f, g]) == 2 for g in forms):
            forms.append(f)
    return Arrangement(n, tuple(forms))


def splayed_pair(rng: random.Random, n: int, k: int) -> tuple[Arrangement, Arrangement, tuple[list[int], list[int]]]:
    """Two arrangements whose forms involve disjoint blocks of coordinates."""
    coords = list(range(n + 1))
    rng.shuffle(coords)
    cut = rng.randint(1, n)
    first, second = sorted(coords[:cut]), sorted(coords[cut:])
    a = split_arrangement(rng, n, first, k)
    b = split_arrangement(rng, n, second, k)
    return a, b, (first, second)


def random_flat_terms(rng: random.Random, arrangement: Arrangement, nterms: int = 3, bound: int = 3) -> list[tuple[list[int], int]]:
    """Random ``(members, coeff)`` pairs naming nonempty flats."""
    flats = build_lattice(arrangement).flats
    out = []
    for _ in range(nterms):
        f = rng.choice(flats)
        c = rng.randint(-bound, bound) or 1
        out.append((sorted(f.members), c))
    return out


def terms_json(terms) -> dict:
    return {"terms": [{"flat": list(m), "coeff": c} for m, c in terms]}


def transversal_embedding(rng: random.Random, k: int, n: int, flats: Rows | list = ()) -> Rows:
    """A ``P^k -> P^n`` matrix whose image meets every flat in ``flats`` transversally."""
    from .microlocal import ConicSupport, LinearEmbedding, is_noncharacteristic_map

    s = ConicSupport(n, tuple((str(i), r) for i, r in enumerate(flats)))
    while True:
        m = tuple(random_form(rng, n) for _ in range(k + 1))
        if rank(m) != k + 1:
            continue
        f = LinearEmbedding(m)
        if is_noncharacteristic_map(f, s):
            return f.matrix


def random_poset(rng: random.Random, n: int, size: int, smooth: bool = False) -> StratPoset:
    """A random graded poset on P^n with a random unitriangular Euler table.

    Mather classes start with the closure class and have random lower terms.
    """
    dims = sorted(rng.randint(0, n) for _ in range(size))
    dims[-1] = n
    ids = [f"S{i}" for i in range(size)]
    below: dict[str, set[str]] = {}
    for i, sid in enumerate(ids):
        lower = [j for j in range(i) if dims[j] < dims[i]]
        chosen = {ids[j] for j in lower if rng.random() < 0.5}
        closed = set(chosen)
        for c in chosen:
            closed |= below[c]
        below[sid] = closed
    strata = [Stratum(sid, d, rng.randint(-2, 3), GradedClass.linear(n, d)) for sid, d in zip(ids, dims)]
    if smooth:
        euler = None
    else:
        euler = EulerTable({z: {z: 1, **{s: rng.randint(-2, 2) for s in below[z]}} for z in ids})
    mather = {}
    for sid, d in zip(ids, dims):
        c = [rng.randint(-3, 3) if i < d else 0 for i in range(n + 1)]
        c[d] = 1
        mather[sid] = GradedClass(n, tuple(c))
    return StratPoset(n, strata, below, euler=euler, mather=mather)


def flag_poset(n: int) -> StratPoset:
    """Strata ``F_k = P^k - P^(k-1)`` of a complete flag of coordinate flats."""
    strata = []
    below = {}
    for k in range(n + 1):
        rows = tuple(tuple(Fraction(int(i == j)) for i in range(n + 1)) for j in range(k + 1, n + 1))
        sid = f"F{k}"
        strata.append(Stratum(sid, k, 1, GradedClass.linear(n, k), rows))
        below[sid] = [f"F{j}" for j in range(k)]
    mather = {f"F{k}": GradedClass(n, tuple(comb(k + 1, k - i) if i <= k else 0 for i in range(n + 1))) for k in range(n + 1)}
    return StratPoset(n, strata, below, mather=mather)


# --- case files ----------------------------------------------------------------


def _arr(a: Arrangement) -> dict:
    return a.to_json()


def _generic_cases(rng, n, k, count):
    cases = []
    for c in range(count):
        a, b = generic_pair(rng, n, k)
        alpha, beta = terms_json(random_flat_terms(rng, a)), terms_json(random_flat_terms(rng, b))
        inputs = {"A": _arr(a), "B": _arr(b), "alpha": alpha, "beta": beta}
        cases.append({"id": f"generic-{c}-intersection", "kind": "intersection-formula", "inputs": inputs,
                      "expect": {"equal": True, "hypothesis": {"splayed": True, "noncharacteristic": True}}})
        cases.append({"id": f"generic-{c}-index", "kind": "index-formula", "inputs": inputs, "expect": {"equal": True}})
    return cases


def _splayed_cases(rng, n, k, count):
    cases = []
    for c in range(count):
        a, b, _ = splayed_pair(rng, n, k)
        alpha, beta = terms_json(random_flat_terms(rng, a)), terms_json(random_flat_terms(rng, b))
        inputs = {"A": _arr(a), "B": _arr(b), "alpha": alpha, "beta": beta}
        cases.append({"id": f"splayed-{c}-check", "kind": "splayed-check", "inputs": {"A": _arr(a), "B": _arr(b)},
                      "expect": {"splayed": True}})
        cases.append({"id": f"splayed-{c}-intersection", "kind": "intersection-formula", "inputs": inputs,
                      "expect": {"equal": True, "hypothesis": {"splayed": True, "noncharacteristic": True}}})
        cases.append({"id": f"splayed-{c}-index", "kind": "index-formula", "inputs": inputs, "expect": {"equal": True}})
    return cases


def _flag_cases(rng, n, count):
    poset = flag_poset(n)
    doc = poset.to_json()
    cases = []
    for c in range(count):
        a = [rng.randint(-3, 3) for _ in range(n + 1)]
        # alpha = sum a_k 1_{P^k}: csm is sum a_k c(TP^k) cap [P^k], chi is sum a_k (k+1)
        values = {f"F{j}": sum(a[j:]) for j in range(n + 1)}
        expected = [sum(a[k] * comb(k + 1, k - i) for k in range(i, n + 1)) for i in range(n + 1)]
        cases.append({
            "id": f"flag-{c}",
            "kind": "csm-compute",
            "inputs": {"P": doc, "alpha": {"values": values}},
            "expect": {"csm": expected, "euler_integral": sum(a[k] * (k + 1) for k in range(n + 1))},
        })
    return cases


def generate(family: str, n: int, seed: int, k: int = 2, count: int = 5) -> dict:
    """A case file whose hypotheses hold by construction; deterministic in ``seed``."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if n < 1:
        raise ValueError("n must be at least 1")
    if k < 0 or count < 0:
        raise ValueError("k and count must be non-negative")
    rng = random.Random(seed)
    if family == "generic-arrangement-pair":
        cases = _generic_cases(rng, n, k, count)
    elif family == "splayed-coordinate-pair":
        cases = _splayed_cases(rng, n, k, count)
    else:
        cases = _flag_cases(rng, n, count)
    return {"family": family, "n": n, "seed": seed, "cases": cases}

