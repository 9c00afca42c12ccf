"""Desk-scale laboratory for scattered-space combinatorics.

The package builds finite, fully inspectable instances of the machinery
used to assemble scattered spaces level by level: symbolic ordinals in
Cantor normal form, interval trees refined along canonical sequences,
orbit-constrained finite posets with explicit meet tables, amalgamation
searches joining compatible posets over a shared root, schedule-driven
construction runs, and Cantor-Bendixson analysis of the resulting spaces.
"""

from .amalgam import (
    AmalgamError,
    AmalgamResult,
    EquivalenceStamp,
    FGapError,
    HypothesisViolationError,
    InfeasibleTargetError,
    MaxUndefinedError,
    RefineError,
    SearchExhaustedError,
    SeparatedFamily,
    amalgamate_eta,
    amalgamate_omega,
    canonical_pairing,
    check_adequate,
    delta_root,
    equivalence_stamp,
    kerneldown_check,
    pull_back,
    push_down,
    r2_report,
    separated_refine,
    separated_report,
)
from .analysis import (
    AnalysisError,
    CapExceededError,
    FiniteSpace,
    LevelReport,
    OrdinalLevels,
    finite_cb,
    omega_valuation,
    ordinal_space_levels,
    space_from_poset,
    space_from_text,
    space_to_text,
)
from .conditions import (
    TOP,
    Condition,
    ConditionError,
    LevelBudgetError,
    Point,
    UnmaterializedLevelError,
    Violation,
    condition_from_text,
    condition_to_text,
    extend_below,
    leq,
    level_lt,
    make_condition,
    point_key,
    validate,
)
from .generic import (
    FinitePoset,
    GenericError,
    PredecessorBelow,
    ProbeInconclusiveError,
    RealizePoint,
    Schedule,
    ScheduleError,
    SkeletonReport,
    SposetReport,
    TightnessReport,
    cardinal_profile,
    poset_from_condition,
    poset_from_text,
    poset_to_text,
    run_schedule,
    schedule_from_text,
    schedule_to_text,
    skeleton_check,
    sposet_check,
    tightness_probe,
)
from .intervals import (
    AxiomReport,
    BudgetExceededError,
    DepthCapError,
    Interval,
    IntervalTree,
    Params,
    TreeError,
    tree_axiom_report,
)
from .ordinals import (
    OMEGA,
    ONE,
    ZERO,
    Ordinal,
    OrdinalError,
    OrdinalParseError,
    cb_level,
    compare,
    from_int,
    fundamental,
    omega_pow,
    omega_quotient,
    parse,
)
from .unbounded import (
    BlowupGuardError,
    FamilyError,
    GenerationError,
    SearchResult,
    StarOutcome,
    UnboundedFn,
    f_generate,
    family_count,
    star_search,
    star_verify,
)

__all__ = [
    "OMEGA",
    "ONE",
    "TOP",
    "ZERO",
    "AmalgamError",
    "AmalgamResult",
    "AnalysisError",
    "AxiomReport",
    "BlowupGuardError",
    "BudgetExceededError",
    "CapExceededError",
    "Condition",
    "ConditionError",
    "DepthCapError",
    "EquivalenceStamp",
    "FGapError",
    "FamilyError",
    "FinitePoset",
    "FiniteSpace",
    "GenerationError",
    "GenericError",
    "HypothesisViolationError",
    "InfeasibleTargetError",
    "Interval",
    "IntervalTree",
    "LevelBudgetError",
    "LevelReport",
    "MaxUndefinedError",
    "Ordinal",
    "OrdinalError",
    "OrdinalLevels",
    "OrdinalParseError",
    "Params",
    "Point",
    "PredecessorBelow",
    "ProbeInconclusiveError",
    "RealizePoint",
    "RefineError",
    "Schedule",
    "ScheduleError",
    "SearchExhaustedError",
    "SearchResult",
    "SeparatedFamily",
    "SkeletonReport",
    "SposetReport",
    "StarOutcome",
    "TightnessReport",
    "TreeError",
    "UnboundedFn",
    "UnmaterializedLevelError",
    "Violation",
    "amalgamate_eta",
    "amalgamate_omega",
    "canonical_pairing",
    "cardinal_profile",
    "cb_level",
    "check_adequate",
    "compare",
    "condition_from_text",
    "condition_to_text",
    "delta_root",
    "equivalence_stamp",
    "extend_below",
    "f_generate",
    "family_count",
    "finite_cb",
    "from_int",
    "fundamental",
    "kerneldown_check",
    "leq",
    "level_lt",
    "make_condition",
    "omega_pow",
    "omega_quotient",
    "omega_valuation",
    "ordinal_space_levels",
    "parse",
    "point_key",
    "poset_from_condition",
    "poset_from_text",
    "poset_to_text",
    "pull_back",
    "push_down",
    "r2_report",
    "run_schedule",
    "schedule_from_text",
    "schedule_to_text",
    "separated_refine",
    "separated_report",
    "skeleton_check",
    "space_from_poset",
    "space_from_text",
    "space_to_text",
    "sposet_check",
    "star_search",
    "star_verify",
    "tightness_probe",
    "tree_axiom_report",
    "validate",
]

__version__ = "0.1.0"
