"""Small builders shared by the test modules."""

from fractions import Fraction
from math import comb

from csmkit.arrangements import Arrangement, hypersurface_indicator, strat_poset_from_arrangement


def arr(n, *forms):
    return Arrangement(n, tuple(tuple(f) for f in forms))


def poset(n, *forms):
    return strat_poset_from_arrangement(arr(n, *forms))


def union_indicator(n, *forms):
    return hypersurface_indicator(poset(n, *forms))


def coord(n, i):
    return tuple(Fraction(int(j == i)) for j in range(n + 1))


def smooth_csm_coeffs(n, k):
    """c(TP^k) cap [P^k] pushed into P^n, by binomials."""
    return tuple(comb(k + 1, k - i) if i <= k else 0 for i in range(n + 1))


def cotangent_mather_coeffs(n, k):
    """c(T*P^k) cap [P^k] pushed into P^n."""
    return tuple((-1) ** (k - i) * comb(k + 1, k - i) if i <= k else 0 for i in range(n + 1))


def random_arrangement(rng, n, m, bound=1):
    """``m`` distinct hyperplanes with small coefficients, so coincidences are common."""
    from csmkit.generate import random_form
    from csmkit.linalg import normalize

    forms = {}
    m = min(m, 4) if n == 1 and bound == 1 else m  # P^1 has only four such forms
    while len(forms) < m:
        f = random_form(rng, n, bound=bound)
        forms.setdefault(normalize(f), f)
    return Arrangement(n, tuple(forms.values()))
