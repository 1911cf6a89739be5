"""Binary CSPs with partially-ordered forbidden patterns."""

from .csp import (
    AcTrace,
    BudgetExceeded,
    Instance,
    InstanceError,
    SearchResult,
    brute_force_solve,
    check_assignment,
    count_solutions,
    enforce_ac,
    is_arc_consistent,
    parse_instance,
    restrict,
    serialize_instance,
)
from .figures import builtin
from .kernels import BACKEND
from .occurrence import (
    CapExceeded,
    OccurrenceResult,
    consistent_linear_extensions,
    find_homomorphism,
    in_class,
    occurs,
    occurs_in_instance,
)
from .pattern import (
    Pattern,
    PatternError,
    dangling_points,
    inv_dom,
    inv_var,
    is_simple,
    mergeable_pairs,
    parse_pattern,
    serialize_pattern,
    unordered,
)

__version__ = "0.1.0"

__all__ = [
    "AcTrace",
    "BACKEND",
    "brute_force_solve",
    "BudgetExceeded",
    "builtin",
    "CapExceeded",
    "check_assignment",
    "consistent_linear_extensions",
    "count_solutions",
    "dangling_points",
    "enforce_ac",
    "find_homomorphism",
    "in_class",
    "Instance",
    "InstanceError",
    "inv_dom",
    "inv_var",
    "is_arc_consistent",
    "is_simple",
    "mergeable_pairs",
    "OccurrenceResult",
    "occurs",
    "occurs_in_instance",
    "parse_instance",
    "parse_pattern",
    "Pattern",
    "PatternError",
    "restrict",
    "SearchResult",
    "serialize_instance",
    "serialize_pattern",
    "unordered",
]
