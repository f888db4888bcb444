"""Exact and empirical squarefree densities in Frobenius trace sequences.

Given a curve y^2 = x^3 + ax + b and an integer polynomial f(x, y), the
values f(a_p, p) over good primes p are conjecturally squarefree with a
density given by an Euler-like product of exact matrix-counting local
factors.  This package computes those constants exactly (generic and
per-curve), counts the actual squarefree values up to a bound, and ships
the brute-force oracles the fast paths are checked against.
"""

from .bipoly import (
    FROBDISC,
    KOBLITZ,
    MAX_DEGREE,
    BiPoly,
    bipoly,
    builtin,
    eval_int,
    eval_mod,
    parse_poly,
)
from .errors import (
    BadReductionError,
    BudgetError,
    CapacityError,
    FactorizationError,
    FrobsfError,
    PolyParseError,
    SingularCurveError,
)
from .frobenius import (
    AP_X_MAX_CAP,
    DEFAULT_DIVISIBILITY_NS,
    ApSeries,
    DivisibilityRow,
    FamilyReport,
    SfReport,
    ap,
    ap_series,
    family_average,
    pi_sf,
)
from .gl2 import (
    TraceDetFiber,
    count_bc_pairs,
    count_cf,
    count_cf_twisted,
    enumerate_oracle,
    gl2_order,
    local_density,
    trace_det_fiber,
)
from .integers import (
    Factorization,
    SquarefreeTable,
    factorize,
    is_prime,
    is_squarefree,
    kronecker,
    mu,
    primes_up_to,
    squarefree_divisors,
    squarefree_part,
    squarefree_table,
)
from .serre import (
    DEFAULT_ELL_MAX,
    Curve,
    SerreConstant,
    SerreData,
    constant_generic,
    constant_serre,
    psi,
    ratio_cef,
    serre_data,
)

__version__ = "0.1.0"

__all__ = [
    "AP_X_MAX_CAP",
    "ApSeries",
    "BadReductionError",
    "BiPoly",
    "BudgetError",
    "CapacityError",
    "Curve",
    "DEFAULT_DIVISIBILITY_NS",
    "DEFAULT_ELL_MAX",
    "DivisibilityRow",
    "FROBDISC",
    "Factorization",
    "FactorizationError",
    "FamilyReport",
    "FrobsfError",
    "KOBLITZ",
    "MAX_DEGREE",
    "PolyParseError",
    "SerreConstant",
    "SerreData",
    "SfReport",
    "SingularCurveError",
    "SquarefreeTable",
    "TraceDetFiber",
    "ap",
    "ap_series",
    "bipoly",
    "builtin",
    "constant_generic",
    "constant_serre",
    "count_bc_pairs",
    "count_cf",
    "count_cf_twisted",
    "enumerate_oracle",
    "eval_int",
    "eval_mod",
    "factorize",
    "family_average",
    "gl2_order",
    "is_prime",
    "is_squarefree",
    "kronecker",
    "local_density",
    "mu",
    "parse_poly",
    "pi_sf",
    "primes_up_to",
    "psi",
    "ratio_cef",
    "serre_data",
    "squarefree_divisors",
    "squarefree_part",
    "squarefree_table",
    "trace_det_fiber",
]
