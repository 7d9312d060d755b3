"""Conic Lagrangian cycles in T*P^n and the characteristic cycle map.

A cycle is an integer combination of conormal spaces of closures of strata
of a fixed poset. Cycle classes live in the projective completion
``P(T*P^n + 1)``; see :func:`flat_completion_class` for the linear case.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

from .chow import BundleRingClass, GradedClass, bundle_pushforward, cap, chern_cotangent
from .strata import (
    ConstructibleFunction,
    EulerTable,
    MissingDataError,
    MorseTable,
    PosetError,
    StratPoset,
    decompose_euler,
    recompose_euler,
)


@lru_cache(maxsize=None)
def flat_completion_class(n: int, k: int) -> BundleRingClass:
    """Class of ``P(T*_Z P^n + 1)`` for a k-plane Z, in the ring of ``P(T*P^n + 1)``.

    Over Z the conormal bundle is the kernel of ``T*P^n|Z -> T*Z``, so its
    completion is the zero locus of the induced section of
    ``O(1) (x) T*Z`` on ``P(T*P^n|Z + 1)``. That gives
    ``[Z] . c_k(T*Z (x) O(1)) = h^(n-k) . sum_i c_i(T*Z) zeta^(k-i)``.
    """
    if not 0 <= k <= n:
        raise ValueError(f"no {k}-plane in P^{n}")
    sign_binom = chern_cotangent(k).coeffs  # c_i(T*P^k) = (-1)^i C(k+1, i)
    terms = {(n - k + i, k - i): sign_binom[i] for i in range(k + 1)}
    return BundleRingClass.from_terms(n, chern_cotangent(n), n, terms)


def _check_completion(n: int, z: str, cls: BundleRingClass) -> BundleRingClass:
    if cls.n != n or cls.rank != n or cls.chern != chern_cotangent(n):
        raise PosetError(f"completion class of {z!r} is not a class on P(T*P^{n} + 1)")
    bad = [(a, b) for (a, b) in cls.terms() if a + b != n]
    if bad:
        raise PosetError(f"completion class of {z!r} is not an n-dimensional cycle (terms {bad})")
    return cls


@dataclass(frozen=True)
class ConormalSymbol:
    stratum_id: str
    dim_z: int
    completion_class: BundleRingClass | None = None


def conormal(poset: StratPoset, stratum_id: str) -> ConormalSymbol:
    """The symbol ``[T*_Z P^n]`` for Z the closure of a stratum."""
    if not isinstance(poset.ambient, int):
        return ConormalSymbol(stratum_id, poset.by_id[stratum_id].dim)
    st = poset.by_id[stratum_id]
    cls = poset.completion.get(stratum_id)
    if cls is not None:
        cls = _check_completion(poset.ambient, stratum_id, cls)
    elif st.flat is not None:
        cls = flat_completion_class(poset.ambient, st.dim)
    return ConormalSymbol(stratum_id, st.dim, cls)


class LagrangianCycle:
    """``sum(terms[Z] * [T*_Z])`` over strata Z of ``poset``."""

    __slots__ = ("poset", "terms")

    def __init__(self, poset: StratPoset, terms: Mapping[str, int] | None = None):
        terms = {z: int(c) for z, c in (terms or {}).items() if c}
        unknown = set(terms) - set(poset.by_id)
        if unknown:
            raise PosetError(f"cycle mentions unknown strata {sorted(unknown)}")
        self.poset = poset
        self.terms = terms

    def __add__(self, other: LagrangianCycle) -> LagrangianCycle:
        if other.poset != self.poset:
            raise PosetError("cycles over different posets")
        t = dict(self.terms)
        for z, c in other.terms.items():
            t[z] = t.get(z, 0) + c
        return LagrangianCycle(self.poset, t)

    def __neg__(self):
        return LagrangianCycle(self.poset, {z: -c for z, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k):
        if isinstance(k, int) and not isinstance(k, bool):
            return LagrangianCycle(self.poset, {z: k * c for z, c in self.terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, LagrangianCycle) and self.poset == other.poset and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"LagrangianCycle({self.terms})"

    def symbols(self) -> list[tuple[ConormalSymbol, int]]:
        return [(conormal(self.poset, z), c) for z, c in self.terms.items()]

    def to_json(self) -> list[dict]:
        return [{"stratum_id": z, "coefficient": c} for z, c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, poset: StratPoset, doc) -> LagrangianCycle:
        return cls(poset, {str(t["stratum_id"]): int(t["coefficient"]) for t in doc})


def cc(alpha: ConstructibleFunction, table: EulerTable | None = None) -> LagrangianCycle:
    """Characteristic cycle, normalised by ``CC(Eu_Z) = (-1)^dim(Z) [T*_Z]``."""
    poset = alpha.poset
    c = decompose_euler(alpha, table)
    return LagrangianCycle(poset, {z: (-1) ** poset.by_id[z].dim * v for z, v in c.items()})


def cc_inverse(cycle: LagrangianCycle, table: EulerTable | None = None) -> ConstructibleFunction:
    poset = cycle.poset
    coeffs = {z: (-1) ** poset.by_id[z].dim * v for z, v in cycle.terms.items()}
    return recompose_euler(poset, coeffs, table)


def morse_table_from_euler(poset: StratPoset, table: EulerTable | None = None) -> MorseTable:
    """The Morse weights forced by an Euler table: ``1_closure(T) = sum_S nmd[S][T] Eu_S``."""
    from .strata import indicator

    nmd: dict[str, dict[str, int]] = {s: {} for s in poset.ids}
    for t in poset.ids:
        for s, v in decompose_euler(indicator(poset, t), table).items():
            if v:
                nmd[s][t] = v
    return MorseTable(nmd)


def cc_from_morse(alpha: ConstructibleFunction, morse: MorseTable | Mapping[str, int]) -> LagrangianCycle:
    """``sum_S (-1)^dim(S) * chi(NMD(S), alpha) * [T*_closure(S)]``.

    ``morse`` is either a bilinear :class:`MorseTable` or the weights of
    ``alpha`` itself, one integer per stratum.
    """
    poset = alpha.poset
    if isinstance(morse, MorseTable):
        morse.validate(poset)
        weights = morse.weights(alpha)
    else:
        missing = set(poset.ids) - set(morse)
        if missing:
            raise MissingDataError(f"no Morse weight for strata {sorted(missing)}")
        weights = {s: int(morse[s]) for s in poset.ids}
    return LagrangianCycle(poset, {s: (-1) ** poset.by_id[s].dim * w for s, w in weights.items()})


def segre(symbol: ConormalSymbol) -> GradedClass:
    """Segre class of the conormal cone, pushed to P^n."""
    cls = symbol.completion_class
    if cls is None:
        raise MissingDataError(f"no completion class for the conormal of {symbol.stratum_id!r}")
    total = GradedClass.zero(cls.n)
    power = cls.like({(0, 0): 1})
    zeta = cls.zeta()
    # zeta is nilpotent: past n + rank every product vanishes
    for _ in range(cls.n + cls.rank + 1):
        total = total + bundle_pushforward(power * cls)
        power = power * zeta
    return total


def dual_mather(symbol: ConormalSymbol) -> GradedClass:
    cls = symbol.completion_class
    if cls is None:
        raise MissingDataError(f"no completion class for the conormal of {symbol.stratum_id!r}")
    return cap(chern_cotangent(cls.n), segre(symbol))


def _dual_of_mather(poset: StratPoset, z: str) -> GradedClass:
    d = poset.by_id[z].dim
    return (-1) ** d * poset.mather[z].dual()


def dual_csm(alpha: ConstructibleFunction, table: EulerTable | None = None) -> GradedClass:
    """Dual MacPherson class, computed through conormal Segre classes.

    Falls back to the sign-flipped Chern-Mather class for strata whose
    conormal class is unknown.
    """
    poset = alpha.poset
    if not isinstance(poset.ambient, int):
        raise PosetError("dual classes are modelled on P^n only")
    total = GradedClass.zero(poset.ambient)
    for z, c in decompose_euler(alpha, table).items():
        if not c:
            continue
        sym = conormal(poset, z)
        if sym.completion_class is not None:
            term = dual_mather(sym)
            if z in poset.completion and z in poset.mather and term != _dual_of_mather(poset, z):
                warnings.warn(f"supplied conormal and Mather data for {z!r} disagree", stacklevel=2)
        elif z in poset.mather:
            term = _dual_of_mather(poset, z)
        else:
            raise MissingDataError(f"neither conormal nor Mather data for stratum {z!r}")
        total = total + (-1) ** sym.dim_z * c * term
    return total
