"""Route planning for continual learning over dissimilar task regions.

An agent visits T regions once each, training a linear-regression model on
every region's local data. The expected final loss splits into a
forgetting term driven by parameter dissimilarity, the travel cost of the
route, and a route-independent noise constant. This package provides the
instance format, the regime-specific loss objectives, an approximation
planner with a 3/2-style travel guarantee, an exact small-instance oracle,
forgetting-only and random baselines, and Monte Carlo verification of the
closed-form losses.
"""

from .instance import (
    FormatError,
    ParameterError,
    ProblemInstance,
    Regime,
    RegimeError,
    RegimeKind,
    Route,
    ValidationError,
    ValidationReport,
    classify_regime,
    generate_instance,
    metric_closure,
    read_instance,
    validate_instance,
    write_instance,
)
from .loss import (
    LossBreakdown,
    best_final_region,
    closed_form_forgetting_over,
    closed_form_forgetting_under,
    loss_upper,
    loss_upper_over,
    loss_upper_under,
)
from .mc_verify import (
    McReport,
    TaskGroundTruth,
    delta0_vector,
    delta_matrix,
    forgetting_loss,
    simplex_ground_truth,
    simulate_sequence_over,
    simulate_task_under,
    verify_closed_form,
)
from .planner import (
    PlanResult,
    Strategy,
    plan,
    plan_algorithm1,
    plan_exact,
    plan_forgetting_baseline,
    plan_random,
    ratio,
)
from .shp import (
    HELD_KARP_MAX_T,
    InvariantViolation,
    SizeLimitError,
    held_karp_min_path,
    minimum_spanning_tree,
    route_travel_cost,
)

__version__ = "0.1.0"

__all__ = [
    "FormatError",
    "ParameterError",
    "ProblemInstance",
    "Regime",
    "RegimeError",
    "RegimeKind",
    "Route",
    "ValidationError",
    "ValidationReport",
    "classify_regime",
    "generate_instance",
    "metric_closure",
    "read_instance",
    "validate_instance",
    "write_instance",
    "LossBreakdown",
    "best_final_region",
    "closed_form_forgetting_over",
    "closed_form_forgetting_under",
    "loss_upper",
    "loss_upper_over",
    "loss_upper_under",
    "McReport",
    "TaskGroundTruth",
    "delta0_vector",
    "delta_matrix",
    "forgetting_loss",
    "simplex_ground_truth",
    "simulate_sequence_over",
    "simulate_task_under",
    "verify_closed_form",
    "PlanResult",
    "Strategy",
    "plan",
    "plan_algorithm1",
    "plan_exact",
    "plan_forgetting_baseline",
    "plan_random",
    "ratio",
    "HELD_KARP_MAX_T",
    "InvariantViolation",
    "SizeLimitError",
    "held_karp_min_path",
    "minimum_spanning_tree",
    "route_travel_cost",
]
