"""Exact Chern characters of Verlinde bundles on moduli of stable curves.

The package computes, in exact rational arithmetic, the total Chern
character of a Verlinde (conformal-block) bundle as a graded sum of
decorated stable graphs: a diagonal R-matrix built from the fusion weights
acts on the rank field theory, and a global exponential in the Hodge class
accounts for the anomaly.  Alongside the main evaluation it provides the
fusion-rank calculus, stable-graph combinatorics, a limited boundary
divisor calculus, and self-contained verification suites.
"""

from .errors import (
    FusionDatumError,
    InvalidInputError,
    UnsupportedProductError,
    VerlindeError,
)
from .fusion import (
    FusionDatum,
    anomaly_prefactor_exponent,
    builtin_sl2,
    builtin_slr_level1,
    dump_fusion_datum,
    format_fraction,
    load_fusion_datum,
    parse_fraction,
    rank,
)
from .graphs import (
    COMPACT_TYPE,
    GENERAL,
    LOCI,
    RATIONAL_TAILS,
    SMOOTH,
    DecoratedGraph,
    StableGraph,
    automorphism_order,
    canonical_form,
    canonical_stable_graph,
    classify_locus,
    decorate,
    edge_split,
    enumerate_stable_graphs,
    graph_from_json,
    graph_to_json,
    trivial_graph,
    two_loop_graphs,
    validate_stable_graph,
)
from .tautology import (
    DivisorSymbol,
    TautClass,
    divisor_from_split,
    divisor_monomial_expand,
    exp_of_divisor_combination,
    taut_class,
    tautclass_from_json,
    tautclass_to_json,
    unit_class,
    zero_class,
)
from .cohft import (
    DiagonalRMatrix,
    TwoLoopRow,
    compact_type_closed_form,
    edge_factor_series,
    identity_rmatrix,
    rmatrix_action,
    slope_restriction_check,
    slr_tree_remainders,
    smooth_slope_class,
    symplectic_check,
    two_loop_report,
    verlinde_chern_character,
    verlinde_w_matrix,
)
from .verify import Check, run_suite

__version__ = "0.1.0"

__all__ = [
    "COMPACT_TYPE",
    "Check",
    "DecoratedGraph",
    "DiagonalRMatrix",
    "DivisorSymbol",
    "FusionDatum",
    "FusionDatumError",
    "GENERAL",
    "InvalidInputError",
    "LOCI",
    "RATIONAL_TAILS",
    "SMOOTH",
    "StableGraph",
    "TautClass",
    "TwoLoopRow",
    "UnsupportedProductError",
    "VerlindeError",
    "anomaly_prefactor_exponent",
    "automorphism_order",
    "builtin_sl2",
    "builtin_slr_level1",
    "canonical_form",
    "canonical_stable_graph",
    "classify_locus",
    "compact_type_closed_form",
    "decorate",
    "divisor_from_split",
    "divisor_monomial_expand",
    "dump_fusion_datum",
    "edge_factor_series",
    "edge_split",
    "enumerate_stable_graphs",
    "exp_of_divisor_combination",
    "format_fraction",
    "graph_from_json",
    "graph_to_json",
    "identity_rmatrix",
    "load_fusion_datum",
    "parse_fraction",
    "rank",
    "rmatrix_action",
    "run_suite",
    "slope_restriction_check",
    "slr_tree_remainders",
    "smooth_slope_class",
    "symplectic_check",
    "taut_class",
    "tautclass_from_json",
    "tautclass_to_json",
    "trivial_graph",
    "two_loop_graphs",
    "two_loop_report",
    "unit_class",
    "validate_stable_graph",
    "verlinde_chern_character",
    "verlinde_w_matrix",
    "zero_class",
]
