"""Conic supports, transversality tests and the verification harnesses.

Everything here assumes linear data: strata closures are flats cut out by
rational linear forms, and maps are coordinate projections
``P^a x P^b -> P^b`` or linear embeddings ``P^k -> P^n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Union

from .chow import (
    BiGradedClass,
    BundleRingClass,
    CohClass,
    GradedClass,
    bundle_pushforward,
    cap,
    cap_product,
    chern_tangent,
    cross,
    diagonal_gysin,
    linear_gysin,
    projection_pullback,
)
from .lagrangian import LagrangianCycle, cc
from .linalg import Rows, as_rows, fmt_rational, intersect_row_spaces, matmul, matvec, null_space, rank, rref
from .strata import (
    ConstructibleFunction,
    EulerTable,
    MissingDataError,
    NonLinearError,
    PosetError,
    Refinement,
    StratPoset,
    common_refinement,
    csm,
    euler_integral,
    product,
    product_poset,
)


class Verdict(NamedTuple):
    holds: bool
    witness: object = None

    def __bool__(self):
        return self.holds


class NonCharacteristicError(ValueError):
    """The transversality hypothesis of an operation is violated."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


def _fmt_rows(rows) -> list:
    return [[fmt_rational(x) for x in r] for r in rows]


@dataclass(frozen=True)
class ConicSupport:
    """Union of conormal spaces ``T*_F``, one per component.

    ``rows`` cut out the flat F in P^n; they are None for strata of a
    product poset, which carry no flat data.
    """

    n: int | tuple[int, int]
    components: tuple[tuple[str, Rows | None], ...] = ()

    @property
    def ids(self) -> frozenset[str]:
        return frozenset(z for z, _ in self.components)

    def __len__(self):
        return len(self.components)

    def to_json(self) -> list:
        return [{"stratum_id": z, "flat": None if r is None else _fmt_rows(r)} for z, r in self.components]


def cycle_support(cycle: LagrangianCycle) -> ConicSupport:
    poset = cycle.poset
    comps = []
    for z in sorted(cycle.terms):
        st = poset.by_id[z]
        if st.flat is None and isinstance(poset.ambient, int):
            raise NonLinearError(f"stratum {z!r} has no flat data, so its conormal geometry is unknown")
        comps.append((z, st.flat))
    return ConicSupport(poset.ambient, tuple(comps))


def support(alpha: ConstructibleFunction, table: EulerTable | None = None) -> ConicSupport:
    return cycle_support(cc(alpha, table))


# --- transversality ---------------------------------------------------------


def _conormals_meet(n: int, rf: Rows, rg: Rows):
    """A nonzero covector in ``N*_F`` and ``N*_G`` at a common point, or None.

    Both flats are cut out by row spaces of forms; if together the forms
    have full rank the flats are disjoint and nothing needs checking.
    """
    if rf and rg and rank(rf + rg) == n + 1:
        return None
    common = intersect_row_spaces(rf, rg) if rf and rg else ()
    return common[0] if common else None


def _require_rows(z, rows):
    if rows is None:
        raise NonLinearError(f"component {z!r} has no flat data")
    return rows


def is_noncharacteristic_diagonal(sa: ConicSupport, sb: ConicSupport) -> Verdict:
    """Whether ``sa`` and the antipodal image of ``sb`` meet only in the zero section."""
    if sa.n != sb.n or not isinstance(sa.n, int):
        raise PosetError("supports must live in the same T*P^n")
    for za, ra in sa.components:
        for zb, rb in sb.components:
            vec = _conormals_meet(sa.n, _require_rows(za, ra), _require_rows(zb, rb))
            if vec is not None:
                return Verdict(False, {"pair": [za, zb], "covector": [fmt_rational(x) for x in vec]})
    return Verdict(True, None)


# --- maps --------------------------------------------------------------------


@dataclass(frozen=True)
class Projection:
    """``P^fiber_dim x P^base_dim -> P^base_dim``."""

    fiber_dim: int
    base_dim: int
    kind = "projection"

    def __post_init__(self):
        if self.fiber_dim < 0 or self.base_dim < 0:
            raise ValueError("projection dimensions must be non-negative")

    @property
    def source(self):
        return (self.fiber_dim, self.base_dim)

    @property
    def target(self) -> int:
        return self.base_dim

    @property
    def relative_dim(self) -> int:
        return self.fiber_dim


@dataclass(frozen=True)
class LinearEmbedding:
    """``P^k -> P^n``, ``[x] -> [x . matrix]`` for a full-rank (k+1) x (n+1) matrix."""

    matrix: Rows
    kind = "embedding"

    def __post_init__(self):
        m = as_rows(self.matrix)
        if not m or len({len(r) for r in m}) != 1:
            raise ValueError("embedding matrix must be a non-empty rectangle")
        if len(m) > len(m[0]) or rank(m) != len(m):
            raise ValueError("embedding matrix must have full row rank")
        object.__setattr__(self, "matrix", m)

    @property
    def source(self) -> int:
        return len(self.matrix) - 1

    @property
    def target(self) -> int:
        return len(self.matrix[0]) - 1

    @property
    def relative_dim(self) -> int:
        return self.source - self.target

    def annihilator(self) -> Rows:
        """Forms on P^n vanishing on the image."""
        return rref(null_space(self.matrix, self.target + 1), self.target + 1)

    def to_json(self) -> dict:
        return {"kind": "embedding", "matrix": _fmt_rows(self.matrix)}


@dataclass(frozen=True)
class Composite:
    """``maps[-1] o ... o maps[0]``; only the innermost map may be a projection."""

    maps: tuple = field(default_factory=tuple)
    kind = "composite"

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise ValueError("empty composite")
        for i, f in enumerate(maps):
            if isinstance(f, Composite):
                raise ValueError("flatten nested composites with compose()")
            if isinstance(f, Projection) and i > 0:
                raise ValueError("a projection can only be the first map applied")
            if i and maps[i - 1].target != f.source:
                raise ValueError(f"maps {i - 1} and {i} do not compose: P^{maps[i - 1].target} vs P^{f.source}")
        object.__setattr__(self, "maps", maps)

    @property
    def source(self):
        return self.maps[0].source

    @property
    def target(self) -> int:
        return self.maps[-1].target

    @property
    def relative_dim(self) -> int:
        return sum(f.relative_dim for f in self.maps)


LinearMap = Union[Projection, LinearEmbedding, Composite]


def _chain(f: LinearMap) -> tuple:
    return f.maps if isinstance(f, Composite) else (f,)


def compose(outer: LinearMap, inner: LinearMap) -> LinearMap:
    """``outer o inner``; consecutive embeddings are multiplied out."""
    chain = list(_chain(inner))
    for g in _chain(outer):
        if chain and isinstance(g, LinearEmbedding) and isinstance(chain[-1], LinearEmbedding):
            chain[-1] = LinearEmbedding(matmul(chain[-1].matrix, g.matrix))
        else:
            chain.append(g)
    return chain[0] if len(chain) == 1 else Composite(tuple(chain))


def _pull_rows(f: LinearEmbedding, rows: Rows) -> Rows:
    return rref([matvec(f.matrix, r) for r in rows], f.source + 1) if rows else ()


def _map_check_one(f, s: ConicSupport):
    if isinstance(f, Projection):
        return None, s
    if s.n != f.target:
        raise PosetError(f"support lives on P^{s.n} but the map lands in P^{f.target}")
    ann = f.annihilator()
    pulled = []
    for z, rows in s.components:
        rows = _require_rows(z, rows)
        vec = _conormals_meet(f.target, rows, ann) if ann else None
        if vec is not None:
            return {"component": z, "covector": [fmt_rational(x) for x in vec]}, None
        p = _pull_rows(f, rows)
        if len(p) <= f.source:
            pulled.append((z, p))
    return None, ConicSupport(f.source, tuple(pulled))


def is_noncharacteristic_map(f: LinearMap, s: ConicSupport) -> Verdict:
    """Projections always pass; an embedding passes iff its image is transversal to every component."""
    for g in reversed(_chain(f)):
        witness, s = _map_check_one(g, s)
        if witness is not None:
            return Verdict(False, witness)
        if isinstance(g, Projection):
            break
    return Verdict(True, None)


# --- pullbacks ---------------------------------------------------------------


@lru_cache(maxsize=64)
def projective_space_poset(n: int) -> StratPoset:
    from .arrangements import Arrangement, strat_poset_from_arrangement

    return strat_poset_from_arrangement(Arrangement(n))


def _step_poset(f, poset: StratPoset) -> StratPoset:
    if isinstance(f, Projection):
        if poset.ambient != f.base_dim:
            raise PosetError(f"poset lives on P^{poset.ambient}, projection base is P^{f.base_dim}")
        return product_poset(projective_space_poset(f.fiber_dim), poset)
    from .arrangements import strat_poset_from_arrangement

    if poset.arrangement is None:
        raise NonLinearError("pullback along an embedding needs an arrangement poset")
    if poset.ambient != f.target:
        raise PosetError(f"poset lives on P^{poset.ambient}, embedding lands in P^{f.target}")
    return strat_poset_from_arrangement(poset.arrangement.restrict(f.matrix))


def _embedding_flat_map(f: LinearEmbedding, poset: StratPoset, target: StratPoset) -> dict[str, str]:
    """For each target stratum, the source stratum containing the image of its generic point."""
    from .arrangements import build_lattice

    arr = poset.arrangement
    lattice = build_lattice(arr)
    forms = arr.pull_back(f.matrix)
    tforms = target.arrangement.hyperplanes
    out = {}
    for w in build_lattice(target.arrangement).flats:
        through = {tforms[j] for j in w.members}
        members = frozenset(i for i, p in enumerate(forms) if p is None or p in through)
        out[w.id] = lattice.by_members[members].id
    return out


def _pull_function_step(f, gamma: ConstructibleFunction) -> ConstructibleFunction:
    target = _step_poset(f, gamma.poset)
    if isinstance(f, Projection):
        return ConstructibleFunction(target, {f"P|{z}": v for z, v in gamma.values.items()})
    mapping = _embedding_flat_map(f, gamma.poset, target)
    return ConstructibleFunction(target, {w: gamma.values[z] for w, z in mapping.items()})


def pullback_function(f: LinearMap, gamma: ConstructibleFunction) -> ConstructibleFunction:
    for g in reversed(_chain(f)):
        gamma = _pull_function_step(g, gamma)
    return gamma


def _pull_cycle_step(f, cycle: LagrangianCycle) -> LagrangianCycle:
    target = _step_poset(f, cycle.poset)
    if isinstance(f, Projection):
        return LagrangianCycle(target, {f"P|{z}": c for z, c in cycle.terms.items()})
    terms: dict[str, int] = {}
    for z, c in cycle.terms.items():
        st = cycle.poset.by_id[z]
        rows = _pull_rows(f, st.flat)
        if len(rows) == f.source + 1:
            continue  # flat misses the image
        w = target.flat_id(rows)
        if w is None or f.source - len(rows) != st.dim + f.source - f.target:
            raise NonCharacteristicError(f"image is not transversal to the closure of {z!r}", {"component": z})
        terms[w] = terms.get(w, 0) + c
    return LagrangianCycle(target, terms)


def pullback_cycle(f: LinearMap, cycle: LagrangianCycle) -> LagrangianCycle:
    """Non-characteristic pullback ``t_* f'^!`` of a conormal cycle."""
    verdict = is_noncharacteristic_map(f, cycle_support(cycle))
    if not verdict:
        raise NonCharacteristicError("map is characteristic for the cycle's support", verdict.witness)
    for g in reversed(_chain(f)):
        cycle = _pull_cycle_step(g, cycle)
    return cycle


def gysin(f: LinearMap, x: GradedClass):
    """Class-level Gysin map ``f^!`` on basis classes."""
    for g in reversed(_chain(f)):
        if isinstance(g, Projection):
            x = projection_pullback(x, g.fiber_dim)
        else:
            x = linear_gysin(x, g.source)
    return x


def _cap_inverse_tangent(space, x):
    if isinstance(space, int):
        return cap(chern_tangent(space).inverse(), x)
    a, b = space
    return cap_product(chern_tangent(a).inverse(), chern_tangent(b).inverse(), x)


# --- index pairing ---------------------------------------------------------


@lru_cache(maxsize=4096)
def _pair_degree(a: BundleRingClass, b: BundleRingClass) -> int:
    return bundle_pushforward(a * b).coeffs[0]


def index_pairing(la: LagrangianCycle, lb: LagrangianCycle) -> int:
    """``deg(LA . LB)`` computed with completion classes in ``P(T*P^n + 1)``.

    The non-characteristic certificate rules out intersection at infinity,
    so the degree of the product of completions is the intersection number.
    """
    n = la.poset.ambient
    if not isinstance(n, int) or lb.poset.ambient != n:
        raise PosetError("both cycles must live in the same T*P^n")
    verdict = is_noncharacteristic_diagonal(cycle_support(la), cycle_support(lb))
    if not verdict:
        raise NonCharacteristicError("supports are not in non-characteristic position", verdict.witness)
    total = 0
    for sa, ca in la.symbols():
        for sb, cb in lb.symbols():
            if sa.completion_class is None or sb.completion_class is None:
                raise MissingDataError("index pairing needs completion classes for every component")
            total += ca * cb * _pair_degree(sa.completion_class, sb.completion_class)
    return total


# --- splayedness -------------------------------------------------------------


def essential_hyperplanes(alpha: ConstructibleFunction) -> frozenset[int]:
    """A minimal set K of hyperplanes such that alpha is constructible for K alone.

    Hyperplanes are dropped greedily in index order.
    """
    from .arrangements import build_lattice

    arr = alpha.poset.arrangement
    if arr is None:
        raise NonLinearError("splayedness is only decided for arrangement posets")
    flats = build_lattice(arr).flats
    keep = set(range(len(arr)))
    for i in range(len(arr)):
        trial = keep - {i}
        seen: dict[frozenset[int], int] = {}
        if all(seen.setdefault(f.members & trial, alpha.values[f.id]) == alpha.values[f.id] for f in flats):
            keep = trial
    return frozenset(keep)


def is_splayed_pair(alpha: ConstructibleFunction, beta: ConstructibleFunction) -> Verdict:
    """Decide whether alpha and beta are splayed, for arrangement posets.

    At a point p only the hyperplanes through p that alpha (resp. beta)
    genuinely depends on matter. The pair splits at p iff their normal
    spaces are complementary, i.e. their ranks add up. Points are taken
    one stratum at a time in the lattice of the union.
    """
    from .arrangements import Arrangement, build_lattice

    pa, pb = alpha.poset, beta.poset
    if pa.arrangement is None or pb.arrangement is None:
        raise NonLinearError("splayedness is only decided for arrangement posets")
    if pa.ambient != pb.ambient:
        raise PosetError("functions live on different projective spaces")
    ka = [pa.arrangement.hyperplanes[i] for i in sorted(essential_hyperplanes(alpha))]
    kb = [pb.arrangement.hyperplanes[i] for i in sorted(essential_hyperplanes(beta))]
    if not ka or not kb:
        return Verdict(True, {"locally_constant": "alpha" if not ka else "beta"})
    union = Arrangement(pa.ambient, tuple(ka)).union(Arrangement(pa.ambient, tuple(kb)))
    a_idx = {union.index_of(h) for h in ka}
    b_idx = {union.index_of(h) for h in kb}
    splits = []
    for w in build_lattice(union).flats:
        aw = sorted(a_idx & w.members)
        bw = sorted(b_idx & w.members)
        if not aw or not bw:
            continue
        ra = rref([union.hyperplanes[i] for i in aw])
        rb = rref([union.hyperplanes[i] for i in bw])
        if len(ra) + len(rb) != rank(ra + rb):
            shared = intersect_row_spaces(ra, rb)
            return Verdict(
                False,
                {
                    "stratum": _fmt_rows(w.rows),
                    "dim": w.dim,
                    "shared_covector": [fmt_rational(x) for x in shared[0]],
                },
            )
        splits.append({"stratum": _fmt_rows(w.rows), "first": _fmt_rows(ra), "second": _fmt_rows(rb)})
    return Verdict(True, {"split": splits})


# --- verification harnesses -------------------------------------------------


def _class_json(x):
    return None if x is None else x.to_json()


@dataclass
class IntersectionReport:
    case_id: str | None
    splayed: bool | None
    noncharacteristic: bool
    lhs: GradedClass
    rhs: GradedClass
    witness: object = None
    tag: str = "intersection-formula-ambient"

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs

    @property
    def certified(self) -> bool:
        return bool(self.splayed) or self.noncharacteristic

    @property
    def status(self) -> str:
        return "identity holds" if self.equal else "identity fails"

    @property
    def hypothesis_status(self) -> str:
        return "hypothesis certified" if self.certified else "hypothesis not certified"

    def to_json(self) -> dict:
        doc = {
            "case_id": self.case_id,
            "tag": self.tag,
            "hypothesis": {"splayed": self.splayed, "noncharacteristic": self.noncharacteristic},
            "hypothesis_status": self.hypothesis_status,
            "lhs": _class_json(self.lhs),
            "rhs": _class_json(self.rhs),
            "equal": self.equal,
            "status": self.status,
        }
        if self.witness is not None:
            doc["witness"] = self.witness
        return doc


def _supports_if_linear(alpha, beta):
    try:
        return support(alpha), support(beta)
    except NonLinearError:
        return None


def verify_intersection_formula(
    alpha: ConstructibleFunction,
    beta: ConstructibleFunction,
    refinement: Refinement | None = None,
    case_id: str | None = None,
) -> IntersectionReport:
    """Compare ``c_*(alpha) . c_*(beta)`` with ``c(TP^n) cap c_*(alpha . beta)``.

    Both sides are always computed; the report records whether the
    hypothesis was certified by splayedness or by transversality.
    """
    n = alpha.poset.ambient
    if not isinstance(n, int) or beta.poset.ambient != n:
        raise PosetError("both functions must live on the same P^n")
    witness = None
    splayed = None
    if alpha.poset.arrangement is not None and beta.poset.arrangement is not None:
        v = is_splayed_pair(alpha, beta)
        splayed = v.holds
        if not v:
            witness = {"splayed": v.witness}
    supports = _supports_if_linear(alpha, beta)
    if supports is None:
        nonchar = False
        witness = {**(witness or {}), "noncharacteristic": "no flat data"}
    else:
        v = is_noncharacteristic_diagonal(*supports)
        nonchar = v.holds
        if not v:
            witness = {**(witness or {}), "noncharacteristic": v.witness}
    ref = common_refinement(alpha.poset, beta.poset, refinement)
    lhs = diagonal_gysin(cross(csm(alpha), csm(beta)))
    rhs = cap(chern_tangent(n), csm(product(ref.pull(alpha), ref.pull(beta))))
    report = IntersectionReport(case_id, splayed, nonchar, lhs, rhs)
    if not report.certified:
        report.witness = witness
    return report


@dataclass
class IndexReport:
    case_id: str | None
    n: int
    euler_integral: int
    pairing: int
    tag: str = "microlocal-index"

    @property
    def rhs(self) -> int:
        return (-1) ** self.n * self.pairing

    @property
    def equal(self) -> bool:
        return self.euler_integral == self.rhs

    def to_json(self) -> dict:
        return {
            "case_id": self.case_id,
            "tag": self.tag,
            "hypothesis": {"noncharacteristic": True},
            "lhs": self.euler_integral,
            "rhs": self.rhs,
            "pairing": self.pairing,
            "equal": self.equal,
            "status": "identity holds" if self.equal else "identity fails",
        }


def verify_index_formula(
    alpha: ConstructibleFunction,
    beta: ConstructibleFunction,
    refinement: Refinement | None = None,
    case_id: str | None = None,
) -> IndexReport:
    """``chi(alpha . beta)`` against ``(-1)^n deg(CC(alpha) . CC(beta))``; refuses uncertified input."""
    ref = common_refinement(alpha.poset, beta.poset, refinement)
    lhs = euler_integral(product(ref.pull(alpha), ref.pull(beta)))
    pairing = index_pairing(cc(alpha), cc(beta))
    return IndexReport(case_id, alpha.poset.ambient, lhs, pairing)


@dataclass
class VRRReport:
    case_id: str | None
    map_kind: str
    lhs: GradedClass | BiGradedClass
    rhs: GradedClass | BiGradedClass
    corollary: dict | None = None
    tag: str = "verdier-riemann-roch"

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs and (self.corollary is None or self.corollary["equal"])

    def to_json(self) -> dict:
        doc = {
            "case_id": self.case_id,
            "tag": self.tag,
            "map": self.map_kind,
            "hypothesis": {"noncharacteristic": True},
            "lhs": _class_json(self.lhs),
            "rhs": _class_json(self.rhs),
            "equal": self.equal,
            "status": "identity holds" if self.equal else "identity fails",
        }
        if self.corollary is not None:
            c = self.corollary
            doc["corollary"] = {"form": c["form"], "lhs": _class_json(c["lhs"]), "rhs": _class_json(c["rhs"]), "equal": c["equal"]}
        return doc


def _corollary(f: LinearMap, csm_gamma: GradedClass, csm_pulled):
    chain = _chain(f)
    if all(isinstance(g, LinearEmbedding) for g in chain):
        k, n = f.source, f.target
        normal = CohClass(k, (1, 1)) ** (n - k)
        lhs, rhs = gysin(f, csm_gamma), cap(normal, csm_pulled)
        return {"form": "embedding", "lhs": lhs, "rhs": rhs, "equal": lhs == rhs}
    if len(chain) == 1:
        a, b = f.source
        lhs = cap_product(chern_tangent(a), CohClass.one(b), gysin(f, csm_gamma))
        return {"form": "submersion", "lhs": lhs, "rhs": csm_pulled, "equal": lhs == csm_pulled}
    return None


def verify_vrr(f: LinearMap, gamma: ConstructibleFunction, case_id: str | None = None) -> VRRReport:
    """``f^!(c(TN)^-1 cap c_*(gamma))`` against ``c(TM)^-1 cap c_*(f^* gamma)``."""
    verdict = is_noncharacteristic_map(f, support(gamma))
    if not verdict:
        raise NonCharacteristicError("map is characteristic for supp(gamma)", verdict.witness)
    csm_gamma = csm(gamma)
    pulled = pullback_function(f, gamma)
    csm_pulled = csm(pulled)
    lhs = gysin(f, _cap_inverse_tangent(f.target, csm_gamma))
    rhs = _cap_inverse_tangent(f.source, csm_pulled)
    return VRRReport(case_id, f.kind, lhs, rhs, _corollary(f, csm_gamma, csm_pulled))
