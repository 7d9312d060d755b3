"""Integer homology model of P^n, P^n x P^m and projective bundles over P^n.

Every class is pushed forward to the ambient projective space, so a class is
just an integer vector in the basis ``[P^0], ..., [P^n]``. Cohomology classes
are truncated polynomials in the hyperplane class ``h``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence


class DimensionMismatch(ValueError):
    pass


def _ints(values) -> tuple[int, ...]:
    out = []
    for v in values:
        if isinstance(v, bool) or int(v) != v:
            raise TypeError(f"class coefficients must be integers, got {v!r}")
        out.append(int(v))
    return tuple(out)


@dataclass(frozen=True)
class GradedClass:
    """``sum(coeffs[i] * [P^i])`` in the Chow group of P^n."""

    n: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _ints(self.coeffs))
        if self.n < 0 or len(self.coeffs) != self.n + 1:
            raise ValueError(f"P^{self.n} class needs {self.n + 1} coefficients, got {len(self.coeffs)}")

    @classmethod
    def zero(cls, n: int) -> GradedClass:
        return cls(n, (0,) * (n + 1))

    @classmethod
    def linear(cls, n: int, k: int) -> GradedClass:
        """The class ``[P^k]`` of a k-plane in P^n."""
        if not 0 <= k <= n:
            raise ValueError(f"no {k}-plane in P^{n}")
        c = [0] * (n + 1)
        c[k] = 1
        return cls(n, tuple(c))

    @classmethod
    def fundamental(cls, n: int) -> GradedClass:
        return cls.linear(n, n)

    def _check(self, other):
        if not isinstance(other, GradedClass):
            return NotImplemented
        if other.n != self.n:
            raise DimensionMismatch(f"P^{self.n} vs P^{other.n}")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return GradedClass(self.n, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return GradedClass(self.n, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return GradedClass(self.n, tuple(-a for a in self.coeffs))

    def __mul__(self, k):
        if isinstance(k, bool) or not isinstance(k, int):
            return NotImplemented
        return GradedClass(self.n, tuple(k * a for a in self.coeffs))

    __rmul__ = __mul__

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i]

    def __bool__(self):
        return any(self.coeffs)

    @property
    def degree(self) -> int:
        """Degree of the zero-dimensional part."""
        return self.coeffs[0]

    def dual(self) -> GradedClass:
        """Multiply the [P^i]-coefficient by (-1)^i."""
        return GradedClass(self.n, tuple((-1) ** i * a for i, a in enumerate(self.coeffs)))

    def to_json(self) -> dict:
        return {"n": self.n, "coeffs": list(self.coeffs)}

    @classmethod
    def from_json(cls, doc) -> GradedClass:
        if isinstance(doc, dict):
            return cls(int(doc["n"]), tuple(doc["coeffs"]))
        return cls(len(doc) - 1, tuple(doc))

    def __str__(self):
        out = ""
        for i in range(self.n, -1, -1):
            a = self.coeffs[i]
            if not a:
                continue
            mag = "" if abs(a) == 1 else str(abs(a))
            if out:
                out += (" - " if a < 0 else " + ") + f"{mag}[P^{i}]"
            else:
                out = ("-" if a < 0 else "") + f"{mag}[P^{i}]"
        return out or "0"


@dataclass(frozen=True)
class CohClass:
    """``sum(coeffs[c] * h^c)`` in the cohomology ring of P^n, ``h^(n+1) = 0``."""

    n: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = list(_ints(self.coeffs))[: self.n + 1]
        c += [0] * (self.n + 1 - len(c))
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def one(cls, n: int) -> CohClass:
        return cls(n, (1,))

    @classmethod
    def h(cls, n: int, power: int = 1) -> CohClass:
        return cls(n, (0,) * power + (1,))

    def __add__(self, other: CohClass) -> CohClass:
        if other.n != self.n:
            raise DimensionMismatch(f"P^{self.n} vs P^{other.n}")
        return CohClass(self.n, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return CohClass(self.n, tuple(-a for a in self.coeffs))

    def __sub__(self, other: CohClass) -> CohClass:
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            return CohClass(self.n, tuple(other * a for a in self.coeffs))
        if not isinstance(other, CohClass):
            return NotImplemented
        if other.n != self.n:
            raise DimensionMismatch(f"P^{self.n} vs P^{other.n}")
        out = [0] * (self.n + 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs[: self.n + 1 - i]):
                    out[i + j] += a * b
        return CohClass(self.n, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> CohClass:
        if e < 0:
            return self.inverse() ** (-e)
        out = CohClass.one(self.n)
        for _ in range(e):
            out = out * self
        return out

    def inverse(self) -> CohClass:
        """Inverse as a truncated power series; needs constant term +-1."""
        b0 = self.coeffs[0]
        if b0 not in (1, -1):
            raise ValueError("only classes with constant term +-1 are invertible over Z")
        inv = [b0]
        for k in range(1, self.n + 1):
            s = sum(self.coeffs[j] * inv[k - j] for j in range(1, k + 1))
            inv.append(-b0 * s)
        return CohClass(self.n, tuple(inv))

    def __getitem__(self, c: int) -> int:
        return self.coeffs[c] if c <= self.n else 0


@dataclass(frozen=True)
class BiGradedClass:
    """``sum(coeffs[i][j] * [P^i x P^j])`` in the Chow group of P^n x P^m."""

    n: int
    m: int
    coeffs: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(_ints(r) for r in self.coeffs)
        if len(rows) != self.n + 1 or any(len(r) != self.m + 1 for r in rows):
            raise ValueError(f"P^{self.n} x P^{self.m} class needs a {self.n + 1}x{self.m + 1} matrix")
        object.__setattr__(self, "coeffs", rows)

    @classmethod
    def zero(cls, n: int, m: int) -> BiGradedClass:
        return cls(n, m, ((0,) * (m + 1),) * (n + 1))

    def _check(self, other):
        if not isinstance(other, BiGradedClass):
            return NotImplemented
        if (other.n, other.m) != (self.n, self.m):
            raise DimensionMismatch(f"P^{self.n}xP^{self.m} vs P^{other.n}xP^{other.m}")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return BiGradedClass(
            self.n, self.m, tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.coeffs, other.coeffs))
        )

    def __neg__(self):
        return BiGradedClass(self.n, self.m, tuple(tuple(-a for a in r) for r in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k):
        if isinstance(k, bool) or not isinstance(k, int):
            return NotImplemented
        return BiGradedClass(self.n, self.m, tuple(tuple(k * a for a in r) for r in self.coeffs))

    __rmul__ = __mul__

    def __bool__(self):
        return any(any(r) for r in self.coeffs)

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "coeffs": [list(r) for r in self.coeffs]}


@dataclass(frozen=True)
class BundleRingClass:
    """A class in the Chow ring of ``P(V + 1)`` over P^n, in normal form.

    ``coeffs[a][b]`` multiplies ``h^a zeta^b`` with ``0 <= b <= rank``, where
    ``zeta = c1(O(1))`` and ``chern`` is the total Chern class of ``V``.
    Use :meth:`from_terms` to build classes from arbitrary monomials; it
    reduces by ``sum_i c_i(V) zeta^(rank + 1 - i) = 0`` and ``h^(n+1) = 0``.
    """

    n: int
    chern: CohClass
    rank: int
    coeffs: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.chern.n != self.n:
            raise DimensionMismatch("Chern class lives over a different base")
        if any(self.chern[i] for i in range(self.rank + 1, self.n + 1)):
            raise ValueError(f"rank {self.rank} bundle cannot have c_i != 0 for i > rank")
        rows = tuple(_ints(r) for r in self.coeffs)
        if len(rows) != self.n + 1 or any(len(r) != self.rank + 1 for r in rows):
            raise ValueError("bundle-ring class is not in normal form: wrong coefficient shape")
        object.__setattr__(self, "coeffs", rows)

    @classmethod
    def from_terms(cls, n: int, chern: CohClass, rank: int, terms: dict[tuple[int, int], int]) -> BundleRingClass:
        poly: dict[tuple[int, int], int] = {}
        for (a, b), c in terms.items():
            if c and a <= n:
                poly[(a, b)] = poly.get((a, b), 0) + c
        top = max((b for (_, b) in poly), default=0)
        for b in range(top, rank, -1):
            for a in range(n + 1):
                c = poly.pop((a, b), 0)
                if not c:
                    continue
                # zeta^b = -sum_{i>=1} c_i h^i zeta^(b-i)
                for i in range(1, rank + 2):
                    ci = chern[i] if i <= n else 0
                    if ci and a + i <= n:
                        key = (a + i, b - i)
                        poly[key] = poly.get(key, 0) - c * ci
        rows = [[0] * (rank + 1) for _ in range(n + 1)]
        for (a, b), c in poly.items():
            rows[a][b] += c
        return cls(n, chern, rank, tuple(map(tuple, rows)))

    @classmethod
    def monomial(cls, n: int, chern: CohClass, rank: int, a: int, b: int) -> BundleRingClass:
        return cls.from_terms(n, chern, rank, {(a, b): 1})

    def like(self, terms: dict[tuple[int, int], int]) -> BundleRingClass:
        return BundleRingClass.from_terms(self.n, self.chern, self.rank, terms)

    def pullback(self, u: CohClass) -> BundleRingClass:
        """The base class ``u`` pulled back to the bundle."""
        return self.like({(a, 0): c for a, c in enumerate(u.coeffs)})

    def zeta(self, power: int = 1) -> BundleRingClass:
        return self.like({(0, power): 1})

    def terms(self) -> dict[tuple[int, int], int]:
        return {(a, b): c for a, row in enumerate(self.coeffs) for b, c in enumerate(row) if c}

    def _same_ring(self, other: BundleRingClass):
        if (other.n, other.rank, other.chern) != (self.n, self.rank, self.chern):
            raise DimensionMismatch("classes live on different projective bundles")

    def __add__(self, other: BundleRingClass) -> BundleRingClass:
        self._same_ring(other)
        t = self.terms()
        for k, c in other.terms().items():
            t[k] = t.get(k, 0) + c
        return self.like(t)

    def __neg__(self):
        return self.like({k: -c for k, c in self.terms().items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            return self.like({k: other * c for k, c in self.terms().items()})
        if isinstance(other, CohClass):
            other = self.pullback(other)
        if not isinstance(other, BundleRingClass):
            return NotImplemented
        self._same_ring(other)
        out: dict[tuple[int, int], int] = {}
        for (a, b), c in self.terms().items():
            for (a2, b2), c2 in other.terms().items():
                k = (a + a2, b + b2)
                out[k] = out.get(k, 0) + c * c2
        return self.like(out)

    __rmul__ = __mul__

    def __bool__(self):
        return any(any(r) for r in self.coeffs)

    def to_json(self) -> dict:
        return {"n": self.n, "rank": self.rank, "chern": list(self.chern.coeffs), "coeffs": [list(r) for r in self.coeffs]}

    @classmethod
    def from_json(cls, doc: dict) -> BundleRingClass:
        n = int(doc["n"])
        return cls(n, CohClass(n, tuple(doc["chern"])), int(doc["rank"]), tuple(map(tuple, doc["coeffs"])))


def mul(x: GradedClass, y: GradedClass) -> GradedClass:
    """Intersection product in P^n: ``[P^i].[P^j] = [P^(i+j-n)]``."""
    if x.n != y.n:
        raise DimensionMismatch(f"P^{x.n} vs P^{y.n}")
    n = x.n
    out = [0] * (n + 1)
    for i, a in enumerate(x.coeffs):
        for j, b in enumerate(y.coeffs):
            if a and b and i + j >= n:
                out[i + j - n] += a * b
    return GradedClass(n, tuple(out))


def cap(u: CohClass, x: GradedClass) -> GradedClass:
    if u.n != x.n:
        raise DimensionMismatch(f"P^{u.n} vs P^{x.n}")
    out = [0] * (x.n + 1)
    for c, b in enumerate(u.coeffs):
        for i, a in enumerate(x.coeffs):
            if b and a and i >= c:
                out[i - c] += a * b
    return GradedClass(x.n, tuple(out))


def chern_tangent(n: int) -> CohClass:
    """``c(TP^n) = (1 + h)^(n+1)``."""
    return CohClass(n, tuple(comb(n + 1, c) for c in range(n + 1)))


def chern_cotangent(n: int) -> CohClass:
    """``c(T*P^n) = (1 - h)^(n+1)``."""
    return CohClass(n, tuple((-1) ** c * comb(n + 1, c) for c in range(n + 1)))


def cross(x: GradedClass, y: GradedClass) -> BiGradedClass:
    return BiGradedClass(x.n, y.n, tuple(tuple(a * b for b in y.coeffs) for a in x.coeffs))


def cap_product(u: CohClass, v: CohClass, z: BiGradedClass) -> BiGradedClass:
    """Cap with the exterior product ``u x v`` on P^n x P^m."""
    if (u.n, v.n) != (z.n, z.m):
        raise DimensionMismatch("cohomology factors do not match the product")
    out = [[0] * (z.m + 1) for _ in range(z.n + 1)]
    for i, row in enumerate(z.coeffs):
        for j, a in enumerate(row):
            if not a:
                continue
            for c in range(i + 1):
                for d in range(j + 1):
                    out[i - c][j - d] += a * u[c] * v[d]
    return BiGradedClass(z.n, z.m, tuple(map(tuple, out)))


def diagonal_gysin(z: BiGradedClass) -> GradedClass:
    """Pull back along the diagonal of P^n: ``[P^i x P^j] -> [P^(i+j-n)]``."""
    if z.n != z.m:
        raise DimensionMismatch(f"diagonal needs P^n x P^n, got P^{z.n} x P^{z.m}")
    n = z.n
    out = [0] * (n + 1)
    for i, row in enumerate(z.coeffs):
        for j, a in enumerate(row):
            if a and i + j >= n:
                out[i + j - n] += a
    return GradedClass(n, tuple(out))


def linear_gysin(x: GradedClass, k: int) -> GradedClass:
    """Gysin pullback to a k-plane ``P^k`` in P^n: ``[P^j] -> [P^(j-n+k)]``."""
    if not 0 <= k <= x.n:
        raise ValueError(f"no {k}-plane in P^{x.n}")
    shift = x.n - k
    return GradedClass(k, tuple(x.coeffs[j + shift] for j in range(k + 1)))


def projection_pullback(x: GradedClass, fiber_dim: int) -> BiGradedClass:
    """Flat pullback along ``P^a x P^b -> P^b``: ``[P^j] -> [P^a x P^j]``."""
    rows = [(0,) * (x.n + 1)] * fiber_dim + [x.coeffs]
    return BiGradedClass(fiber_dim, x.n, tuple(rows))


def bundle_pushforward(z: BundleRingClass) -> GradedClass:
    """Push a class on ``P(V + 1)`` down to P^n.

    In normal form only the ``zeta^rank`` column survives, since
    ``pi_*(zeta^rank) = 1`` and lower powers have too small fibre degree.
    """
    if not isinstance(z, BundleRingClass):
        raise TypeError("expected a BundleRingClass")
    n = z.n
    out = [0] * (n + 1)
    for a, row in enumerate(z.coeffs):
        out[n - a] += row[z.rank]
    return GradedClass(n, tuple(out))


def pushforward_monomial(n: int, chern: CohClass, rank: int, a: int, b: int) -> GradedClass:
    """``pi_*(h^a zeta^b) = h^a . s_(b-rank)(V) cap [P^n]`` without reducing first."""
    if b < rank:
        return GradedClass.zero(n)
    s = chern.inverse()
    u = CohClass(n, (0,) * (a + b - rank) + (s[b - rank],)) if a + b - rank <= n else CohClass(n, ())
    return cap(u, GradedClass.fundamental(n))
