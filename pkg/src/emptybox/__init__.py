"""Exact solvers for largest empty axis-aligned rectangle and box problems."""

from .core import (
    AABox,
    BudgetExceededError,
    InfeasibleError,
    Instance,
    Point,
    Rat,
    SolveResult,
    Stats,
    Variant,
    VerificationError,
    instance_from_json,
    instance_to_json,
    make_instance,
    parse_instance_text,
    rank_normalize,
    rat,
    result_to_json,
    verify_result,
)
from .rect2d import (
    DecisionQuery,
    HSeg,
    LaminarSet,
    PairResult,
    Rect2DConfig,
    decide_good_pair,
    maximize_good_pair,
    solve_line_restricted,
    solve_rect2d,
)
from .expr import (
    Branch,
    BranchSet,
    Edge,
    Expr,
    GFunc,
    Pred,
    SimpleFunc,
    eliminate_all,
    eliminate_free,
    rewrite_normalize,
)
from .partition import (
    AxisFlat,
    Cell,
    PartitionReport,
    build_partition,
    verify_partition,
)
from .stepfn import (
    BiStepFn,
    Orthant,
    StepFn,
    SuccessorFn,
    compose,
    envelope_minmax,
    galois_inverse,
    range_max,
    staircase_of_orthants,
)
from .highdim import (
    GenGFunc,
    ObjectiveSpec,
    max_genG_over_box,
    max_gfunc_over_box,
    max_gfunc_over_box_complement,
    max_simple_over_complement,
    solve_2sided_anchored,
    solve_2sided_anchored_improved,
    solve_2sided_box,
    solve_anchored,
    solve_box_hd,
)
from .d3 import (
    Box3DConfig,
    VertexSet,
    lift_to_dominance,
    max_pair_objective,
    maximal_vacant_vertices,
    pair_objective,
    solve_box3d,
    solve_origin_restricted_3d,
    verify_vertex_set,
)

__version__ = "0.1.0"

__all__ = [
    "AABox",
    "BudgetExceededError",
    "InfeasibleError",
    "Instance",
    "Point",
    "Rat",
    "SolveResult",
    "Stats",
    "Variant",
    "VerificationError",
    "instance_from_json",
    "instance_to_json",
    "make_instance",
    "parse_instance_text",
    "rank_normalize",
    "rat",
    "result_to_json",
    "verify_result",
    "DecisionQuery",
    "HSeg",
    "LaminarSet",
    "PairResult",
    "Rect2DConfig",
    "decide_good_pair",
    "maximize_good_pair",
    "solve_line_restricted",
    "solve_rect2d",
    "Branch",
    "BranchSet",
    "Edge",
    "Expr",
    "GFunc",
    "Pred",
    "SimpleFunc",
    "eliminate_all",
    "eliminate_free",
    "rewrite_normalize",
    "AxisFlat",
    "Cell",
    "PartitionReport",
    "build_partition",
    "verify_partition",
    "BiStepFn",
    "Orthant",
    "StepFn",
    "SuccessorFn",
    "compose",
    "envelope_minmax",
    "galois_inverse",
    "range_max",
    "staircase_of_orthants",
    "GenGFunc",
    "ObjectiveSpec",
    "max_genG_over_box",
    "max_gfunc_over_box",
    "max_gfunc_over_box_complement",
    "max_simple_over_complement",
    "solve_2sided_anchored",
    "solve_2sided_anchored_improved",
    "solve_2sided_box",
    "solve_anchored",
    "solve_box_hd",
    "Box3DConfig",
    "VertexSet",
    "lift_to_dominance",
    "max_pair_objective",
    "maximal_vacant_vertices",
    "pair_objective",
    "solve_box3d",
    "solve_origin_restricted_3d",
    "verify_vertex_set",
    "__version__",
]
