"""Stratification posets and integer-valued constructible functions on them.

A :class:`StratPoset` records, for each stratum, its dimension, the compactly
supported Euler characteristic of the open stratum and the class of its
closure pushed into the ambient space. Constructible functions are integer
vectors indexed by stratum ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .chow import BiGradedClass, GradedClass, cross
from .linalg import Rows, as_rows, fmt_rational, rref


class PosetError(ValueError):
    """Inconsistent stratification data."""


class MissingDataError(LookupError):
    """An operation needs per-stratum data that the poset does not carry."""


class NonLinearError(ValueError):
    """A linear-algebra operation was asked of strata without flat data."""


@dataclass(frozen=True)
class Stratum:
    id: str
    dim: int
    chi_c: int
    cls: GradedClass | BiGradedClass
    flat: Rows | None = None  # linear forms cutting out the closure


class EulerTable:
    """``entries[Z][S]`` is the value of the Euler obstruction of closure(Z) on S."""

    def __init__(self, entries: Mapping[str, Mapping[str, int]]):
        self.entries = {z: {s: int(v) for s, v in row.items() if v} for z, row in entries.items()}

    @classmethod
    def smooth(cls, poset: StratPoset) -> EulerTable:
        """All closures smooth: the obstruction is the closure indicator."""
        return cls({z: {s: 1 for s in poset.down(z)} for z in poset.ids})

    def value(self, z: str, s: str) -> int:
        return self.entries.get(z, {}).get(s, 0)

    def validate(self, poset: StratPoset) -> None:
        for z in poset.ids:
            if self.value(z, z) != 1:
                raise PosetError(f"Euler table is not unitriangular: e[{z}][{z}] = {self.value(z, z)}")
        for z, row in self.entries.items():
            if z not in poset.by_id:
                raise PosetError(f"Euler table mentions unknown stratum {z!r}")
            for s in row:
                if s not in poset.by_id or not poset.leq(s, z):
                    raise PosetError(f"Euler table entry e[{z}][{s}] lies outside the closure of {z}")

    def __eq__(self, other):
        return isinstance(other, EulerTable) and self.entries == other.entries

    def to_json(self) -> dict:
        return {z: dict(row) for z, row in self.entries.items()}


class StratPoset:
    """Finite stratification of a subspace of P^n (or P^n x P^m).

    ``below[T]`` is the full set of strata lying in closure(T), excluding T.
    The poset is immutable after construction.
    """

    def __init__(
        self,
        ambient: int | tuple[int, int],
        strata: Iterable[Stratum],
        below: Mapping[str, Iterable[str]],
        euler: EulerTable | Mapping | None = None,
        mather: Mapping[str, GradedClass | BiGradedClass] | None = None,
        completion: Mapping | None = None,
        arrangement=None,
    ):
        self.ambient = ambient
        self.strata = tuple(strata)
        self.by_id = {s.id: s for s in self.strata}
        if len(self.by_id) != len(self.strata):
            raise PosetError("duplicate stratum ids")
        self._below = {s.id: frozenset(below.get(s.id, ())) for s in self.strata}
        self._validate_order()
        self.ids = tuple(s.id for s in self.strata)
        # back-substitution order: decreasing dimension, ties by id
        self.order_desc = tuple(sorted(self.ids, key=lambda i: (-self.by_id[i].dim, i)))
        if euler is None:
            euler = EulerTable.smooth(self)
        elif not isinstance(euler, EulerTable):
            euler = EulerTable(euler)
        euler.validate(self)
        self.euler = euler
        self.mather = dict(mather or {})
        for z, c in self.mather.items():
            self._check_leading_term(z, c)
        self.completion = dict(completion or {})
        self.arrangement = arrangement

    def _validate_order(self):
        for t, down in self._below.items():
            for s in down:
                if s not in self.by_id:
                    raise PosetError(f"{t!r} lists unknown stratum {s!r} below it")
                if s == t:
                    raise PosetError(f"{t!r} is listed below itself")
                if self.by_id[s].dim >= self.by_id[t].dim:
                    raise PosetError(f"{s!r} < {t!r} but dim {self.by_id[s].dim} >= {self.by_id[t].dim}")
                if not self._below[s] <= down:
                    raise PosetError(f"down-set of {t!r} is not closed: it misses part of closure({s!r})")

    def _check_leading_term(self, z: str, c):
        if z not in self.by_id:
            raise PosetError(f"Mather data for unknown stratum {z!r}")
        st = self.by_id[z]
        if type(c) is not type(st.cls):
            raise PosetError(f"Mather class of {z!r} lives in the wrong ambient")
        if isinstance(c, GradedClass):
            top = [(i, a) for i, a in enumerate(c.coeffs) if i >= st.dim]
            want = [(i, a) for i, a in enumerate(st.cls.coeffs) if i >= st.dim]
        else:
            top = [a for i, r in enumerate(c.coeffs) for j, a in enumerate(r) if i + j >= st.dim]
            want = [a for i, r in enumerate(st.cls.coeffs) for j, a in enumerate(r) if i + j >= st.dim]
        if top != want:
            raise PosetError(f"Mather class of {z!r} does not start with the class of its closure")

    def leq(self, s: str, t: str) -> bool:
        return s == t or s in self._below[t]

    def down(self, t: str) -> frozenset[str]:
        return self._below[t] | {t}

    def below(self, t: str) -> frozenset[str]:
        return self._below[t]

    def __len__(self):
        return len(self.strata)

    def __iter__(self):
        return iter(self.strata)

    @property
    def total_dim(self) -> int:
        return self.ambient if isinstance(self.ambient, int) else sum(self.ambient)

    def zero_class(self):
        if isinstance(self.ambient, int):
            return GradedClass.zero(self.ambient)
        return BiGradedClass.zero(*self.ambient)

    def is_linear(self) -> bool:
        return all(s.flat is not None for s in self.strata)

    def flat_id(self, rows) -> str | None:
        """Id of the stratum whose closure is cut out by ``rows``."""
        key = rref(rows, self.ambient + 1) if rows else ()
        for s in self.strata:
            if s.flat is not None and s.flat == key:
                return s.id
        return None

    def _key(self):
        return (
            self.ambient,
            self.strata,
            tuple(sorted((k, tuple(sorted(v))) for k, v in self._below.items())),
            tuple(sorted((z, tuple(sorted(r.items()))) for z, r in self.euler.entries.items())),
        )

    def __eq__(self, other):
        return self is other or (isinstance(other, StratPoset) and self._key() == other._key())

    def __hash__(self):
        return hash((self.ambient, self.ids))

    def __repr__(self):
        return f"StratPoset(ambient={self.ambient}, strata={list(self.ids)})"

    def to_json(self) -> dict:
        strata = []
        for s in self.strata:
            d = {
                "id": s.id,
                "dim": s.dim,
                "chi_c": s.chi_c,
                "class": list(s.cls.coeffs) if isinstance(s.cls, GradedClass) else [list(r) for r in s.cls.coeffs],
                "below": sorted(self._below[s.id]),
            }
            if s.flat is not None:
                d["flat"] = [[fmt_rational(x) for x in r] for r in s.flat]
            strata.append(d)
        doc = {"ambient_n": self.ambient, "strata": strata, "euler_table": self.euler.to_json()}
        if self.mather:
            doc["mather"] = {z: list(c.coeffs) for z, c in self.mather.items() if isinstance(c, GradedClass)}
        if self.completion:
            doc["completion"] = {z: [list(r) for r in c.coeffs] for z, c in self.completion.items()}
        return doc

    @classmethod
    def from_json(cls, doc: Mapping) -> StratPoset:
        from .chow import BundleRingClass, chern_cotangent

        try:
            n = int(doc["ambient_n"])
            strata = []
            below = {}
            for s in doc["strata"]:
                flat = as_rows(s["flat"]) if "flat" in s else None
                if flat is not None:
                    flat = rref(flat, n + 1) if flat else ()
                strata.append(Stratum(str(s["id"]), int(s["dim"]), int(s["chi_c"]), GradedClass(n, tuple(s["class"])), flat))
                below[str(s["id"])] = [str(x) for x in s.get("below", [])]
            euler = doc.get("euler_table")
            mather = {z: GradedClass(n, tuple(c)) for z, c in doc.get("mather", {}).items()}
            completion = {
                z: BundleRingClass(n, chern_cotangent(n), n, tuple(map(tuple, c)))
                for z, c in doc.get("completion", {}).items()
            }
        except (KeyError, TypeError) as exc:
            raise PosetError(f"malformed poset document: {exc}") from exc
        return cls(n, strata, below, euler=euler, mather=mather, completion=completion)


class ConstructibleFunction:
    """Integer value per stratum of a fixed poset."""

    __slots__ = ("poset", "values")

    def __init__(self, poset: StratPoset, values: Mapping[str, int] | None = None):
        values = dict(values or {})
        unknown = set(values) - set(poset.by_id)
        if unknown:
            raise PosetError(f"values given on unknown strata {sorted(unknown)}")
        self.poset = poset
        self.values = {s: int(values.get(s, 0)) for s in poset.ids}

    def __call__(self, stratum_id: str) -> int:
        return self.values[stratum_id]

    def _same(self, other):
        if not isinstance(other, ConstructibleFunction):
            return NotImplemented
        if other.poset != self.poset:
            raise PosetError("constructible functions live on different posets; refine first")
        return other

    def __add__(self, other):
        if self._same(other) is NotImplemented:
            return NotImplemented
        return ConstructibleFunction(self.poset, {s: self.values[s] + other.values[s] for s in self.poset.ids})

    def __neg__(self):
        return ConstructibleFunction(self.poset, {s: -v for s, v in self.values.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k):
        if isinstance(k, int) and not isinstance(k, bool):
            return ConstructibleFunction(self.poset, {s: k * v for s, v in self.values.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, ConstructibleFunction) and self.poset == other.poset and self.values == other.values

    def __bool__(self):
        return any(self.values.values())

    def __repr__(self):
        nz = {s: v for s, v in self.values.items() if v}
        return f"ConstructibleFunction({nz})"

    def to_json(self) -> dict:
        return {"values": {s: v for s, v in self.values.items() if v}}


def indicator(poset: StratPoset, stratum_id: str) -> ConstructibleFunction:
    """``1`` on the closure of the given stratum."""
    return ConstructibleFunction(poset, {s: 1 for s in poset.down(stratum_id)})


def euler_obstruction(poset: StratPoset, stratum_id: str, table: EulerTable | None = None) -> ConstructibleFunction:
    table = table or poset.euler
    return ConstructibleFunction(poset, table.entries.get(stratum_id, {}))


def _solve_unitriangular(alpha: ConstructibleFunction, entry) -> dict[str, int]:
    poset = alpha.poset
    c: dict[str, int] = {}
    for s in poset.order_desc:
        acc = alpha.values[s]
        for z in c:
            if z != s and poset.leq(s, z):
                acc -= c[z] * entry(z, s)
        c[s] = acc
    return {s: c[s] for s in poset.ids}


def decompose_euler(alpha: ConstructibleFunction, table: EulerTable | None = None) -> dict[str, int]:
    """Coefficients ``c`` with ``alpha = sum_Z c[Z] * Eu_closure(Z)``."""
    table = table or alpha.poset.euler
    return _solve_unitriangular(alpha, table.value)


def decompose_indicators(alpha: ConstructibleFunction) -> dict[str, int]:
    """Coefficients ``a`` with ``alpha = sum_T a[T] * 1_closure(T)``."""
    return _solve_unitriangular(alpha, lambda z, s: 1)


def recompose_euler(poset: StratPoset, coeffs: Mapping[str, int], table: EulerTable | None = None) -> ConstructibleFunction:
    table = table or poset.euler
    values = {s: 0 for s in poset.ids}
    for z, c in coeffs.items():
        if c:
            for s, e in table.entries.get(z, {}).items():
                values[s] += c * e
    return ConstructibleFunction(poset, values)


def euler_integral(alpha: ConstructibleFunction) -> int:
    return sum(st.chi_c * alpha.values[st.id] for st in alpha.poset)


def product(alpha: ConstructibleFunction, beta: ConstructibleFunction) -> ConstructibleFunction:
    """Pointwise product of two functions on the same poset."""
    if alpha.poset != beta.poset:
        raise PosetError("pointwise product needs a common poset; use common_refinement first")
    return ConstructibleFunction(alpha.poset, {s: alpha.values[s] * beta.values[s] for s in alpha.poset.ids})


def csm(alpha: ConstructibleFunction):
    """Chern-Schwartz-MacPherson class of ``alpha`` via Chern-Mather classes."""
    poset = alpha.poset
    total = poset.zero_class()
    for z, c in decompose_euler(alpha).items():
        if not c:
            continue
        if z not in poset.mather:
            raise MissingDataError(f"no Chern-Mather class for closure of stratum {z!r}")
        total = total + c * poset.mather[z]
    return total


def product_poset(p: StratPoset, q: StratPoset) -> StratPoset:
    """Product stratification with strata ``S|T``.

    Euler obstructions and Mather classes are taken multiplicatively.
    """
    if not (isinstance(p.ambient, int) and isinstance(q.ambient, int)):
        raise PosetError("only products of two projective spaces are modelled")
    strata = []
    below = {}
    for s in p:
        for t in q:
            sid = f"{s.id}|{t.id}"
            strata.append(Stratum(sid, s.dim + t.dim, s.chi_c * t.chi_c, cross(s.cls, t.cls)))
            below[sid] = [f"{a}|{b}" for a in p.down(s.id) for b in q.down(t.id) if (a, b) != (s.id, t.id)]
    euler = {
        f"{z}|{w}": {f"{a}|{b}": ea * eb for a, ea in p.euler.entries.get(z, {}).items() for b, eb in q.euler.entries.get(w, {}).items()}
        for z in p.ids
        for w in q.ids
    }
    mather = {
        f"{z}|{w}": cross(p.mather[z], q.mather[w]) for z in p.mather for w in q.mather
    }
    return StratPoset((p.ambient, q.ambient), strata, below, euler=EulerTable(euler), mather=mather)


def cross_fn(alpha: ConstructibleFunction, beta: ConstructibleFunction) -> ConstructibleFunction:
    pq = product_poset(alpha.poset, beta.poset)
    return ConstructibleFunction(
        pq, {f"{s}|{t}": a * b for s, a in alpha.values.items() for t, b in beta.values.items()}
    )


@dataclass(frozen=True)
class MorseTable:
    """Normal Morse data: ``nmd[S][T]`` is the weight at S of ``1_closure(T)``."""

    nmd: Mapping[str, Mapping[str, int]] = field(default_factory=dict)

    def validate(self, poset: StratPoset) -> None:
        for s, row in self.nmd.items():
            for t, v in row.items():
                if v and not poset.leq(s, t):
                    raise PosetError(f"Morse weight nmd[{s}][{t}] = {v} but {s} is not in closure({t})")

    def weights(self, alpha: ConstructibleFunction) -> dict[str, int]:
        """Euler characteristic of the normal Morse datum of each stratum, weighted by alpha."""
        a = decompose_indicators(alpha)
        out = {}
        for s in alpha.poset.ids:
            if s not in self.nmd:
                raise MissingDataError(f"Morse table has no row for stratum {s!r}")
            out[s] = sum(a[t] * int(v) for t, v in self.nmd[s].items())
        return out


@dataclass
class Refinement:
    """A common refinement together with stratum transfer maps."""

    poset: StratPoset
    sources: list[tuple[StratPoset, dict[str, str]]]

    def pull(self, alpha: ConstructibleFunction) -> ConstructibleFunction:
        for src, mapping in self.sources:
            if src == alpha.poset:
                return ConstructibleFunction(self.poset, {s: alpha.values[mapping[s]] for s in self.poset.ids})
        raise PosetError("function does not live on either refined poset")


def common_refinement(p1: StratPoset, p2: StratPoset, refinement: Refinement | None = None) -> Refinement:
    """Refine two posets to one on which both families of functions live."""
    if refinement is not None:
        return refinement
    if p1 == p2:
        ident = {s: s for s in p1.ids}
        return Refinement(p1, [(p1, ident), (p2, ident)])
    if p1.arrangement is None or p2.arrangement is None:
        raise NonLinearError("cannot refine posets without linear data; supply the refinement")
    from .arrangements import refine_arrangement_posets

    return refine_arrangement_posets(p1, p2)
