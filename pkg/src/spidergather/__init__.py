"""Exact min-max r-gather clustering and r-gathering on spider metrics."""

from .model import (
    INFEASIBLE,
    MalformedInstanceError,
    MissingFacility,
    NotAPartition,
    PointOnSpider,
    SizeGuard,
    SizeViolation,
    Solution,
    SolutionError,
    SpiderInstance,
    ValueMismatch,
    distance,
    normalize,
    scale_instance,
    validate_clustering,
    validate_gathering,
)
from .fpt_solver import (
    CLUSTERING,
    GATHERING,
    DpRun,
    SolveStats,
    enumerate_suffix_special,
    prune,
    run_dp,
    solve,
)
from .exact_oracle import brute_arrears, brute_clustering, brute_gathering
from .reductions import (
    ArrearsCheck,
    ArrearsInstance,
    CnfFormula,
    GadgetReport,
    ReductionTooLarge,
    SpiderReduction,
    arrears_to_spider,
    assignment_to_choice,
    check_arrears,
    clustering_to_gathering,
    normalize_arrears,
    sat_to_arrears,
    satisfies_one_in_three,
    verify_gadget,
)

__version__ = "0.1.0"

__all__ = [
    "ArrearsCheck",
    "ArrearsInstance",
    "CLUSTERING",
    "CnfFormula",
    "DpRun",
    "GATHERING",
    "GadgetReport",
    "INFEASIBLE",
    "MalformedInstanceError",
    "MissingFacility",
    "NotAPartition",
    "PointOnSpider",
    "ReductionTooLarge",
    "SizeGuard",
    "SizeViolation",
    "Solution",
    "SolutionError",
    "SolveStats",
    "SpiderInstance",
    "SpiderReduction",
    "ValueMismatch",
    "arrears_to_spider",
    "assignment_to_choice",
    "brute_arrears",
    "brute_clustering",
    "brute_gathering",
    "check_arrears",
    "clustering_to_gathering",
    "distance",
    "enumerate_suffix_special",
    "normalize",
    "normalize_arrears",
    "prune",
    "run_dp",
    "sat_to_arrears",
    "satisfies_one_in_three",
    "scale_instance",
    "solve",
    "validate_clustering",
    "validate_gathering",
    "verify_gadget",
]
