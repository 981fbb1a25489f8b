"""Aggregation planning for block-structured LPs on platforms with a known cost table."""

from .aggregator import (
    AggregationPlan,
    BlockSet,
    HardnessInstance,
    build_hardness_instance,
    check_hardness_instance,
    dp_cost_table,
    evaluate_plan,
    load_plan,
    save_plan,
    solve_concave,
    solve_convex,
    solve_dp,
    solve_equal,
    solve_exact_unequal,
    solve_linear,
)
from .calibration import CalibrationRecord, ProbeSpec, fit_model, run_calibration
from .cost_model import CostModel, Curvature, CurvatureKind, classify
from .scheduler import PpuSchedule, distribute_lpt, load_schedule, save_schedule, schedule

__version__ = "0.1.0"

__all__ = [
    "AggregationPlan",
    "BlockSet",
    "CalibrationRecord",
    "CostModel",
    "Curvature",
    "CurvatureKind",
    "HardnessInstance",
    "PpuSchedule",
    "ProbeSpec",
    "build_hardness_instance",
    "check_hardness_instance",
    "classify",
    "distribute_lpt",
    "dp_cost_table",
    "evaluate_plan",
    "fit_model",
    "load_plan",
    "load_schedule",
    "run_calibration",
    "save_plan",
    "save_schedule",
    "schedule",
    "solve_concave",
    "solve_convex",
    "solve_dp",
    "solve_equal",
    "solve_exact_unequal",
    "solve_linear",
]
