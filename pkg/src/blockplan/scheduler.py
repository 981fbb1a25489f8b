"""Distribute blocks across processing units, then aggregate per unit.

Distribution uses longest-processing-time-first list scheduling, after which
each unit's blocks are aggregated independently. Wall-clock time is the
largest per-unit serial time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .aggregator import (
    AggregationPlan,
    BlockSet,
    plan_core_from_dict,
    plan_core_to_dict,
    solve_equal,
    solve_exact_unequal,
)
from .cost_model import CostModel

EMPTY_PLAN = AggregationPlan(
    groups=(), group_sums=(), counts=None, total_cost=0, solver_path="empty"
)


@dataclass(frozen=True)
class PpuSchedule:
    """Per-unit block assignments with their aggregation plans and timings."""

    m: int
    assignments: tuple[tuple[int, ...], ...]
    plans: tuple[AggregationPlan, ...]
    per_ppu_serial_time: tuple[float, ...]
    wall_clock: float


def distribute_lpt(blocks: BlockSet, m: int) -> list[tuple[int, ...]]:
    """Assign block sizes to m units, largest first onto the least-loaded unit.

    Ties go to the lowest-numbered unit. A heuristic: loads are roughly
    equal, not provably optimal.
    """
    if m < 1:
        raise ValueError("need at least one processing unit")
    loads = [0] * m
    buckets: list[list[int]] = [[] for _ in range(m)]
    for size in sorted(blocks.sizes, reverse=True):
        p = min(range(m), key=lambda i: loads[i])
        loads[p] += size
        buckets[p].append(size)
    return [tuple(b) for b in buckets]


def _plan_for_unit(sizes: tuple[int, ...], model: CostModel) -> AggregationPlan:
    if not sizes:
        return EMPTY_PLAN
    unit_blocks = BlockSet(sizes)
    uniform = unit_blocks.equal_size
    if uniform is not None:
        size, count = uniform
        if size % model.block_size == 0:
            view = model if size == model.block_size else model.with_block_size(size)
            return solve_equal(count, view)
    return solve_exact_unequal(unit_blocks, model)


def schedule(blocks: BlockSet, model: CostModel, m: int) -> PpuSchedule:
    """Distribute blocks over m units and aggregate each unit's share optimally.

    Uniform per-unit loads take the equal-size dispatcher; mixed loads take
    the exact search, which caps the per-unit block count.
    """
    assignments = tuple(distribute_lpt(blocks, m))
    plans = tuple(_plan_for_unit(sizes, model) for sizes in assignments)
    times = tuple(p.total_cost for p in plans)
    return PpuSchedule(
        m=m,
        assignments=assignments,
        plans=plans,
        per_ppu_serial_time=times,
        wall_clock=max(times),
    )


def schedule_to_dict(sched: PpuSchedule) -> dict:
    return {
        "m": sched.m,
        "assignments": [list(a) for a in sched.assignments],
        "plans": [plan_core_to_dict(p) for p in sched.plans],
        "wall_clock": sched.wall_clock,
    }


def schedule_from_dict(data: dict) -> PpuSchedule:
    plans = tuple(plan_core_from_dict(p) for p in data["plans"])
    return PpuSchedule(
        m=data["m"],
        assignments=tuple(tuple(a) for a in data["assignments"]),
        plans=plans,
        per_ppu_serial_time=tuple(p.total_cost for p in plans),
        wall_clock=data["wall_clock"],
    )


def save_schedule(path: str | Path, sched: PpuSchedule) -> None:
    Path(path).write_text(json.dumps(schedule_to_dict(sched), indent=2) + "\n")


def load_schedule(path: str | Path) -> PpuSchedule:
    return schedule_from_dict(json.loads(Path(path).read_text()))
