"""Exact CSM classes, characteristic cycles and intersection formulas on P^n."""

from .arrangements import (
    Arrangement,
    build_lattice,
    char_poly,
    detect_splayed,
    flat_function,
    hypersurface_indicator,
    strat_poset_from_arrangement,
)
from .chow import BiGradedClass, BundleRingClass, CohClass, GradedClass
from .lagrangian import LagrangianCycle, cc, cc_from_morse, cc_inverse, conormal, dual_csm, dual_mather, segre
from .microlocal import (
    Composite,
    LinearEmbedding,
    Projection,
    index_pairing,
    is_noncharacteristic_diagonal,
    is_noncharacteristic_map,
    is_splayed_pair,
    pullback_cycle,
    pullback_function,
    support,
    verify_index_formula,
    verify_intersection_formula,
    verify_vrr,
)
from .strata import ConstructibleFunction, EulerTable, StratPoset, csm, euler_integral, indicator, product

__version__ = "0.1.0"
