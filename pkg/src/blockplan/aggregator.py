"""Optimal aggregation of blocks into subproblems.

Equal-size inputs go through a dispatcher that picks, by table curvature,
between a closed-form rule (linear), fast scans over one or two micro ILPs
per candidate size (convex/concave), and an unbounded-knapsack style dynamic
program that is optimal for arbitrary tables. Unequal-size inputs are solved
exactly by set-partition search at desk scale, which also powers the
three-way-split hardness gadget.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import ilp_micro
from .cost_model import CostModel, CurvatureKind
from .errors import (
    GridMismatchError,
    GridRangeError,
    InstanceTooLargeError,
    InvalidGadgetError,
    WrongPathError,
)

MAX_EXACT_BLOCKS = 13


@dataclass(frozen=True)
class BlockSet:
    """Multiset of block sizes in LP-size units."""

    sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.sizes:
            raise ValueError("block set must be nonempty")
        if any(x < 1 for x in self.sizes):
            raise ValueError("block sizes must be positive integers")

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def k(self) -> int:
        return len(self.sizes)

    @property
    def equal_size(self) -> tuple[int, int] | None:
        """(size, count) when all blocks share one size, else None."""
        first = self.sizes[0]
        if all(x == first for x in self.sizes):
            return first, len(self.sizes)
        return None


@dataclass(frozen=True)
class AggregationPlan:
    """Assignment of blocks to subproblems.

    ``groups`` partitions the block indices 0..k-1; ``group_sums`` are the
    subproblem sizes in LP units. ``counts`` maps blocks-per-group to the
    number of such groups (populated for equal-size inputs).
    """

    groups: tuple[tuple[int, ...], ...]
    group_sums: tuple[int, ...]
    counts: dict[int, int] | None
    total_cost: float
    solver_path: str

    @property
    def num_groups(self) -> int:
        return len(self.groups)


def evaluate_plan(plan: AggregationPlan, model: CostModel) -> float:
    """Total cost of a plan: the sum of table costs over its nonempty groups."""
    total = 0
    for y in plan.group_sums:
        q, r = divmod(y, model.block_size)
        if r:
            raise GridMismatchError(
                f"group sum {y} is off the grid (block size {model.block_size})"
            )
        total += model.eval(q)
    return total


def _plan_from_steps(
    steps: Iterable[int], model: CostModel, solver_path: str
) -> AggregationPlan:
    """Materialize an equal-size plan from group sizes given in blocks."""
    sizes = sorted(steps, reverse=True)
    groups: list[tuple[int, ...]] = []
    cursor = 0
    total = 0
    counts: dict[int, int] = {}
    for b in sizes:
        groups.append(tuple(range(cursor, cursor + b)))
        cursor += b
        total += model.eval(b)
        counts[b] = counts.get(b, 0) + 1
    return AggregationPlan(
        groups=tuple(groups),
        group_sums=tuple(b * model.block_size for b in sizes),
        counts=counts,
        total_cost=total,
        solver_path=solver_path,
    )


def _require_grid(count: int, model: CostModel) -> None:
    if count < 1:
        raise ValueError("count must be at least 1")
    if count > model.i_max:
        raise GridRangeError(
            f"need costs up to {count} blocks but table covers 1..{model.i_max}"
        )


def _dp_arrays(count: int, model: CostModel) -> tuple[np.ndarray, np.ndarray]:
    """Forward DP over block counts: value and predecessor arrays.

    f[i] is the optimal total cost of i blocks; choice[i] the predecessor
    state. np.argmin returns the first minimum, i.e. the smallest
    predecessor, which prefers fewer, larger groups on ties.
    """
    costs = np.asarray(model.costs[:count], dtype=np.float64)
    f = np.zeros(count + 1)
    choice = np.zeros(count + 1, dtype=np.int64)
    for i in range(1, count + 1):
        vals = f[:i] + costs[i - 1 :: -1]
        j = int(np.argmin(vals))
        f[i] = vals[j]
        choice[i] = j
    return f, choice


def dp_cost_table(count: int, model: CostModel) -> tuple[float, ...]:
    """Optimal cost for every block count 0..count in one DP pass."""
    _require_grid(count, model)
    f, _ = _dp_arrays(count, model)
    return tuple(f.tolist())


def solve_dp(count: int, model: CostModel) -> AggregationPlan:
    """Exact optimum for ``count`` equal blocks under an arbitrary cost table."""
    _require_grid(count, model)
    _, choice = _dp_arrays(count, model)
    steps = []
    i = count
    while i > 0:
        j = int(choice[i])
        steps.append(i - j)
        i = j
    return _plan_from_steps(steps, model, "dp")


def solve_linear(count: int, model: CostModel) -> AggregationPlan:
    """Closed-form rule for linear tables: the intercept sign decides everything.

    Positive fixed cost favors one big subproblem; negative favors all
    singletons.
    """
    if model.curvature.kind is not CurvatureKind.LINEAR:
        raise WrongPathError(f"table classified {model.curvature.kind.value}, not linear")
    _require_grid(count, model)
    if model.i_max < 2:
        raise GridRangeError("need at least 2 samples to estimate the intercept")
    intercept = 2 * model.eval(1) - model.eval(2)
    if intercept >= 0:
        return _plan_from_steps([count], model, "linear")
    return _plan_from_steps([1] * count, model, "linear")


def _scan_two_size_ilps(
    count: int, model: CostModel, ks: Iterable[int]
) -> tuple[tuple[int, ...], int] | None:
    """Best (assignment, k) over two-size equality ILPs with sizes k and k+1 blocks."""
    best: tuple[float, tuple[int, ...], int] | None = None
    for k in ks:
        if not 1 <= k <= count - 1:
            continue
        ilp = ilp_micro.MicroIlp(
            costs=(model.eval(k), model.eval(k + 1)),
            weights=(k, k + 1),
            target=count,
        )
        solved = ilp_micro.solve(ilp)
        if solved is None:
            continue
        assignment, objective = solved
        if best is None or objective < best[0]:
            best = (objective, assignment, k)
    if best is None:
        return None
    return best[1], best[2]


def solve_convex(
    count: int, model: CostModel, force_full_scan: bool = False
) -> AggregationPlan:
    """Fast path for convex tables: at most two group sizes, one block apart.

    The per-unit-cost minimizer i* over [1, count] splits the cases: i* == 1
    means no aggregation, i* == count means full aggregation. Otherwise a
    two-size ILP is solved per candidate size k. With r = i* + 1, once
    count exceeds r^2 - r - 1 every candidate pair is feasible and only
    k in {r-2, r-1, r} can win, so the scan shrinks to three ILPs.
    """
    if model.curvature.kind is not CurvatureKind.CONVEX:
        raise WrongPathError(f"table classified {model.curvature.kind.value}, not convex")
    _require_grid(count, model)
    i_star, _ = model.x_opt(i_limit=count)
    if i_star == 1:
        return _plan_from_steps([1] * count, model, "convex")
    if i_star == count:
        return _plan_from_steps([count], model, "convex")

    r = i_star + 1
    if not force_full_scan and r >= 3 and count > r * r - r - 1:
        ks: Iterable[int] = (r - 2, r - 1, r)
    else:
        ks = range(1, count)
    scanned = _scan_two_size_ilps(count, model, ks)
    if scanned is None:
        # Unreachable for a full scan (k = count - 1 is always feasible);
        # kept as a guard for the restricted candidate set.
        scanned = _scan_two_size_ilps(count, model, range(1, count))
        assert scanned is not None
    (x_small, x_large), k = scanned
    return _plan_from_steps([k] * x_small + [k + 1] * x_large, model, "convex")


def solve_concave(count: int, model: CostModel) -> AggregationPlan:
    """Fast path for concave tables: sizes drawn from {1, k, count} blocks.

    Scans one three-variable ILP per middle size k, plus the two pure
    candidates (all singletons, one full group).
    """
    if model.curvature.kind is not CurvatureKind.CONCAVE:
        raise WrongPathError(f"table classified {model.curvature.kind.value}, not concave")
    _require_grid(count, model)

    best_steps: list[int] = [count]
    best_cost = model.eval(count)
    singles_cost = count * model.eval(1)
    if singles_cost < best_cost:
        best_steps, best_cost = [1] * count, singles_cost
    for k in range(2, count):
        ilp = ilp_micro.MicroIlp(
            costs=(model.eval(1), model.eval(k), model.eval(count)),
            weights=(1, k, count),
            target=count,
        )
        solved = ilp_micro.solve(ilp)
        if solved is None:
            continue
        (x_s, x_mid, x_full), objective = solved
        if objective < best_cost:
            best_cost = objective
            best_steps = [count] * x_full + [k] * x_mid + [1] * x_s
    return _plan_from_steps(best_steps, model, "concave")


def solve_equal(count: int, model: CostModel) -> AggregationPlan:
    """Dispatch on curvature; general or unclassifiable tables fall back to the DP."""
    _require_grid(count, model)
    kind = model.curvature.kind
    if kind is CurvatureKind.LINEAR:
        return solve_linear(count, model)
    if kind is CurvatureKind.CONVEX:
        return solve_convex(count, model)
    if kind is CurvatureKind.CONCAVE:
        return solve_concave(count, model)
    return solve_dp(count, model)


def solve_exact_unequal(blocks: BlockSet, model: CostModel) -> AggregationPlan:
    """Global optimum over all groupings of (possibly unequal) blocks.

    Depth-first search over set partitions; exponential, so capped at
    MAX_EXACT_BLOCKS blocks. Ties resolve to the lexicographically smallest
    sorted group-sum vector, then to canonical index groups.
    """
    if blocks.k > MAX_EXACT_BLOCKS:
        raise InstanceTooLargeError(
            f"{blocks.k} blocks; exact search is capped at {MAX_EXACT_BLOCKS}"
        )
    s = model.block_size
    for x in blocks.sizes:
        if x % s != 0:
            raise GridMismatchError(f"block size {x} is off the grid (block size {s})")
    if blocks.n // s > model.i_max:
        raise GridRangeError(
            f"aggregating all blocks needs P at {blocks.n // s} but table covers 1..{model.i_max}"
        )

    # Descending sizes tighten the increasing-table prune; original indices
    # are restored in the output groups.
    order = sorted(range(blocks.k), key=lambda i: -blocks.sizes[i])
    sizes = [blocks.sizes[i] for i in order]
    monotone = all(b >= a for a, b in zip(model.costs, model.costs[1:]))

    group_sums: list[int] = []
    group_members: list[list[int]] = []
    best: tuple[float, tuple[int, ...], tuple[tuple[int, ...], ...]] | None = None

    def visit(idx: int, partial: float) -> None:
        nonlocal best
        if best is not None and monotone and partial > best[0]:
            return
        if idx == len(sizes):
            if best is not None and partial > best[0]:
                return
            sums_key = tuple(sorted(group_sums))
            groups_key = tuple(sorted(tuple(sorted(order[i] for i in g)) for g in group_members))
            key = (partial, sums_key, groups_key)
            if best is None or key < best:
                best = key
            return
        x = sizes[idx]
        for g, current in enumerate(group_sums):
            delta = model.eval((current + x) // s) - model.eval(current // s)
            group_sums[g] = current + x
            group_members[g].append(idx)
            visit(idx + 1, partial + delta)
            group_members[g].pop()
            group_sums[g] = current
        group_sums.append(x)
        group_members.append([idx])
        visit(idx + 1, partial + model.eval(x // s))
        group_members.pop()
        group_sums.pop()

    visit(0, 0)
    assert best is not None
    _, _, groups_key = best
    groups = tuple(sorted(groups_key, key=lambda g: (-sum(blocks.sizes[i] for i in g), g)))
    sums = tuple(sum(blocks.sizes[i] for i in g) for g in groups)
    total = 0
    for y in sums:
        total += model.eval(y // s)
    counts: dict[int, int] | None = None
    if blocks.equal_size is not None:
        counts = {}
        for g in groups:
            counts[len(g)] = counts.get(len(g), 0) + 1
    return AggregationPlan(
        groups=groups,
        group_sums=sums,
        counts=counts,
        total_cost=total,
        solver_path="exact",
    )


@dataclass(frozen=True)
class HardnessInstance:
    """Aggregation instance encoding a three-way equal-sum split decision.

    Cost table P(x) = a + x^2 with a = n^2 / 9; the split exists exactly when
    the optimal aggregation cost hits 2 n^2 / 3.
    """

    block_sizes: tuple[int, ...]
    n: int
    fixed_cost_a: int
    yes_threshold: int
    model: CostModel


def build_hardness_instance(values: Sequence[int]) -> HardnessInstance:
    """Gadget for a multiset of positive integers whose sum is divisible by 3."""
    blocks = BlockSet(tuple(values))
    n = blocks.n
    if n % 3 != 0:
        raise InvalidGadgetError(f"total size {n} is not divisible by 3")
    a = n * n // 9
    threshold = 2 * n * n // 3
    model = CostModel.from_costs([a + x * x for x in range(1, n + 1)], block_size=1)
    return HardnessInstance(
        block_sizes=blocks.sizes,
        n=n,
        fixed_cost_a=a,
        yes_threshold=threshold,
        model=model,
    )


def check_hardness_instance(inst: HardnessInstance) -> tuple[bool, float]:
    """Solve the gadget exactly; YES iff the optimum equals the threshold."""
    plan = solve_exact_unequal(BlockSet(inst.block_sizes), inst.model)
    return plan.total_cost == inst.yes_threshold, plan.total_cost


def plan_core_to_dict(plan: AggregationPlan) -> dict:
    data = {
        "groups": [list(g) for g in plan.groups],
        "group_sums": list(plan.group_sums),
        "total_cost": plan.total_cost,
        "solver_path": plan.solver_path,
    }
    if plan.counts is not None:
        data["counts"] = sorted(plan.counts.items())
    return data


def plan_core_from_dict(data: dict) -> AggregationPlan:
    counts = None
    if "counts" in data:
        counts = {int(i): int(x) for i, x in data["counts"]}
    return AggregationPlan(
        groups=tuple(tuple(g) for g in data["groups"]),
        group_sums=tuple(data["group_sums"]),
        counts=counts,
        total_cost=data["total_cost"],
        solver_path=data["solver_path"],
    )


def plan_to_dict(
    plan: AggregationPlan, blocks: BlockSet, model_ref: str | None = None
) -> dict:
    data = {"blocks": list(blocks.sizes), "model_ref": model_ref}
    data.update(plan_core_to_dict(plan))
    return data


def plan_from_dict(data: dict) -> tuple[AggregationPlan, BlockSet, str | None]:
    blocks = BlockSet(tuple(data["blocks"]))
    return plan_core_from_dict(data), blocks, data.get("model_ref")


def save_plan(
    path: str | Path,
    plan: AggregationPlan,
    blocks: BlockSet,
    model_ref: str | None = None,
) -> None:
    Path(path).write_text(json.dumps(plan_to_dict(plan, blocks, model_ref), indent=2) + "\n")


def load_plan(path: str | Path) -> tuple[AggregationPlan, BlockSet, str | None]:
    return plan_from_dict(json.loads(Path(path).read_text()))
