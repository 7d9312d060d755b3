"""Projective hyperplane arrangements over Q and the stratifications they induce."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Sequence

from .chow import GradedClass
from .linalg import Row, Rows, as_rows, fmt_rational, in_row_space, matvec, normalize, null_space, rank, rref
from .strata import ConstructibleFunction, Refinement, StratPoset, Stratum, indicator


class ArrangementError(ValueError):
    pass


@dataclass(frozen=True)
class Arrangement:
    """Hyperplanes ``{x : sum(a_i x_i) = 0}`` of P^n, one coefficient row each."""

    n: int
    hyperplanes: tuple[Row, ...] = ()

    def __post_init__(self):
        rows = as_rows(self.hyperplanes)
        seen = set()
        for r in rows:
            if len(r) != self.n + 1:
                raise ArrangementError(f"hyperplane {r} of P^{self.n} needs {self.n + 1} coefficients")
            if not any(r):
                raise ArrangementError("zero coefficient vector does not define a hyperplane")
            key = normalize(r)
            if key in seen:
                raise ArrangementError(f"hyperplane {[fmt_rational(x) for x in r]} is listed twice")
            seen.add(key)
        object.__setattr__(self, "hyperplanes", rows)

    def __len__(self):
        return len(self.hyperplanes)

    def index_of(self, form: Sequence[Fraction]) -> int | None:
        key = normalize(form)
        for i, h in enumerate(self.hyperplanes):
            if normalize(h) == key:
                return i
        return None

    def normalized(self) -> Arrangement:
        """Canonical presentation: primitive-leading forms in sorted order."""
        return Arrangement(self.n, tuple(sorted(normalize(h) for h in self.hyperplanes)))

    def union(self, other: Arrangement) -> Arrangement:
        """Hyperplanes of ``self`` followed by the new ones of ``other``."""
        if other.n != self.n:
            raise ArrangementError("arrangements live in different projective spaces")
        extra = [h for h in other.hyperplanes if self.index_of(h) is None]
        return Arrangement(self.n, self.hyperplanes + tuple(extra))

    def delete(self, i: int) -> Arrangement:
        return Arrangement(self.n, self.hyperplanes[:i] + self.hyperplanes[i + 1 :])

    def pull_back(self, matrix: Sequence[Sequence[Fraction]]) -> tuple[Row | None, ...]:
        """Forms pulled back along ``[x] -> [x . matrix]``; None where the image lies in the hyperplane."""
        out = []
        for h in self.hyperplanes:
            f = matvec(matrix, h)
            out.append(normalize(f) if any(f) else None)
        return tuple(out)

    def restrict(self, matrix: Sequence[Sequence[Fraction]]) -> Arrangement:
        """The induced arrangement on the linear subspace parametrized by ``matrix``."""
        k = len(matrix) - 1
        forms = {f for f in self.pull_back(matrix) if f is not None}
        return Arrangement(k, tuple(sorted(forms)))

    def restriction_to(self, i: int) -> Arrangement:
        """Restriction onto the i-th hyperplane, in coordinates of a fixed basis of it."""
        basis = null_space([self.hyperplanes[i]], self.n + 1)
        return self.delete(i).restrict(basis)

    def variables(self) -> frozenset[int]:
        return frozenset(j for h in self.hyperplanes for j, x in enumerate(h) if x)

    def to_json(self) -> dict:
        return {"n": self.n, "hyperplanes": [[fmt_rational(x) for x in h] for h in self.hyperplanes]}

    @classmethod
    def from_json(cls, doc: Mapping) -> Arrangement:
        try:
            return cls(int(doc["n"]), tuple(tuple(h) for h in doc.get("hyperplanes", [])))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ArrangementError(f"malformed arrangement document: {exc}") from exc


@dataclass(frozen=True)
class Flat:
    id: str
    dim: int
    rows: Rows
    members: frozenset[int]


def flat_name(members: Iterable[int]) -> str:
    members = sorted(members)
    return "H" + ",".join(map(str, members)) if members else "P"


class FlatLattice:
    """Nonempty flats ordered by reverse inclusion, with the Mobius function."""

    def __init__(self, arrangement: Arrangement, flats: Sequence[Flat]):
        self.arrangement = arrangement
        self.flats = tuple(sorted(flats, key=lambda f: (-f.dim, sorted(f.members))))
        self.by_id = {f.id: f for f in self.flats}
        self.by_members = {f.members: f for f in self.flats}
        self.by_rows = {f.rows: f for f in self.flats}
        self.top = self.by_members[frozenset()]
        self.mobius = self._mobius()

    def leq(self, f: Flat, g: Flat) -> bool:
        """Reverse inclusion: ``f <= g`` iff g is contained in f."""
        return f.members <= g.members

    def interval(self, f: Flat, g: Flat) -> list[Flat]:
        return [h for h in self.flats if self.leq(f, h) and self.leq(h, g)]

    def _mobius(self) -> dict[tuple[str, str], int]:
        mu: dict[tuple[str, str], int] = {}
        for f in self.flats:
            # self.flats is sorted by decreasing dim, so proper lower bounds come first
            for g in self.flats:
                if not self.leq(f, g):
                    continue
                if f is g:
                    mu[f.id, g.id] = 1
                else:
                    mu[f.id, g.id] = -sum(mu[f.id, h.id] for h in self.flats if h is not g and (f.id, h.id) in mu and self.leq(h, g))
        return mu

    def verify_mobius(self) -> bool:
        """Independent pass using the dual recursion ``sum_{f<=h<=g} mu(h, g) = 0``."""
        for f in self.flats:
            for g in self.flats:
                if f is not g and self.leq(f, g):
                    if sum(self.mobius[h.id, g.id] for h in self.interval(f, g)) != 0:
                        return False
            if self.mobius[f.id, f.id] != 1:
                return False
        return True


@lru_cache(maxsize=512)
def build_lattice(arrangement: Arrangement) -> FlatLattice:
    n = arrangement.n
    hyps = arrangement.hyperplanes
    top = Flat("P", n, (), frozenset())
    seen: dict[Rows, Flat] = {(): top}
    queue = [top]
    while queue:
        f = queue.pop()
        for i, h in enumerate(hyps):
            if i in f.members:
                continue
            rows = rref(f.rows + (h,), n + 1)
            if len(rows) == n + 1 or rows in seen:
                continue
            members = frozenset(j for j, k in enumerate(hyps) if in_row_space(k, rows))
            g = Flat(flat_name(members), n - len(rows), rows, members)
            seen[rows] = g
            queue.append(g)
    return FlatLattice(arrangement, list(seen.values()))


def char_poly(lattice: FlatLattice) -> tuple[int, ...]:
    """Projective characteristic polynomial; entry k is the coefficient of t^k."""
    n = lattice.arrangement.n
    coeffs = [0] * (n + 1)
    for f in lattice.flats:
        coeffs[f.dim] += lattice.mobius[lattice.top.id, f.id]
    return tuple(coeffs)


def cone_char_poly(arrangement: Arrangement) -> tuple[int, ...]:
    """Characteristic polynomial of the central arrangement in C^(n+1).

    The cone lattice is the projective one (dimensions shifted by one) plus
    the origin when the forms span everything, with
    ``mu(origin) = -sum_F mu(F)``.
    """
    p = char_poly(build_lattice(arrangement))
    out = (0,) + p
    if arrangement.hyperplanes and rank(arrangement.hyperplanes) == arrangement.n + 1:
        out = (out[0] - sum(p),) + out[1:]
    return out


def _smooth_mather(n: int, k: int) -> GradedClass:
    # c(TP^k) cap [P^k], pushed into P^n
    c = [0] * (n + 1)
    for i in range(k + 1):
        c[k - i] = comb(k + 1, i)
    return GradedClass(n, tuple(c))


@lru_cache(maxsize=512)
def strat_poset_from_arrangement(arrangement: Arrangement) -> StratPoset:
    """Stratify P^n by the open parts of the flats of ``arrangement``.

    Closures are linear, hence smooth: the Euler table is the closure
    indicator table and Chern-Mather classes are ``c(TP^k) cap [P^k]``.
    """
    lattice = build_lattice(arrangement)
    n = arrangement.n
    chi: dict[str, int] = {}
    below: dict[str, list[str]] = {}
    for f in sorted(lattice.flats, key=lambda f: f.dim):
        sub = [g for g in lattice.flats if g is not f and f.members <= g.members]
        below[f.id] = [g.id for g in sub]
        chi[f.id] = f.dim + 1 - sum(chi[g.id] for g in sub)
    strata = [Stratum(f.id, f.dim, chi[f.id], GradedClass.linear(n, f.dim), f.rows) for f in lattice.flats]
    mather = {f.id: _smooth_mather(n, f.dim) for f in lattice.flats}
    return StratPoset(n, strata, below, mather=mather, arrangement=arrangement)


def lattice_of(poset: StratPoset) -> FlatLattice:
    if poset.arrangement is None:
        raise ArrangementError("poset was not generated from an arrangement")
    return build_lattice(poset.arrangement)


def flat_function(poset: StratPoset, terms: Iterable[tuple[Iterable[int], int]]) -> ConstructibleFunction:
    """``sum(coeff * 1_F)`` where each F is the intersection of the listed hyperplanes."""
    arr = poset.arrangement
    if arr is None:
        raise ArrangementError("flat-generated functions need an arrangement poset")
    lattice = build_lattice(arr)
    total = ConstructibleFunction(poset)
    for members, coeff in terms:
        members = list(members)
        for i in members:
            if not 0 <= i < len(arr):
                raise ArrangementError(f"no hyperplane with index {i}")
        rows = rref([arr.hyperplanes[i] for i in members], arr.n + 1) if members else ()
        if len(rows) == arr.n + 1:
            continue  # empty intersection
        total = total + coeff * indicator(poset, lattice.by_rows[rows].id)
    return total


def hypersurface_indicator(poset: StratPoset) -> ConstructibleFunction:
    """Indicator of the union of the hyperplanes (the whole space if there are none)."""
    if poset.arrangement is not None and len(poset.arrangement) == 0:
        return ConstructibleFunction(poset, {s: 1 for s in poset.ids})
    return ConstructibleFunction(poset, {s: int(s != "P") for s in poset.ids})


def refine_arrangement_posets(p1: StratPoset, p2: StratPoset) -> Refinement:
    a1, a2 = p1.arrangement, p2.arrangement
    union = a1.union(a2)
    poset = strat_poset_from_arrangement(union)
    maps = []
    for src, arr in ((p1, a1), (p2, a2)):
        index = {i: union.index_of(h) for i, h in enumerate(arr.hyperplanes)}
        lat = build_lattice(arr)
        mapping = {}
        for f in build_lattice(union).flats:
            members = frozenset(i for i, u in index.items() if u in f.members)
            mapping[f.id] = lat.by_members[members].id
        maps.append((src, mapping))
    return Refinement(poset, maps)


def detect_splayed(a: Arrangement, b: Arrangement):
    """Splayedness of the two hypersurfaces ``union(a)`` and ``union(b)``.

    Delegates to :func:`csmkit.microlocal.is_splayed_pair`; when the two
    arrangements use disjoint sets of coordinates the witness is that
    variable partition.
    """
    from .microlocal import Verdict, is_splayed_pair

    pa, pb = strat_poset_from_arrangement(a), strat_poset_from_arrangement(b)
    verdict = is_splayed_pair(hypersurface_indicator(pa), hypersurface_indicator(pb))
    va, vb = a.variables(), b.variables()
    if verdict.holds and not va & vb:
        rest = frozenset(range(a.n + 1)) - va - vb
        return Verdict(True, {"variable_partition": [sorted(va | rest), sorted(vb)]})
    return verdict
