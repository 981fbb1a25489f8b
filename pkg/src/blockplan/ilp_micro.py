"""Tiny equality-constrained integer programs (at most three variables).

Instances of the form

    minimize    sum(costs[v] * x[v])
    subject to  sum(weights[v] * x[v]) == target,  x[v] integer in [0, ub[v]]

are solved exactly by enumerating every variable except the one with the
widest range, whose value the equality then forces. At these dimensions
that is O(target) or better, which is all the fast paths need.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .errors import UnsupportedDimensionError

MAX_DIMENSION = 3


@dataclass(frozen=True)
class MicroIlp:
    costs: tuple[float, ...]
    weights: tuple[int, ...]
    target: int
    upper_bounds: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if len(self.costs) != len(self.weights):
            raise ValueError("costs and weights must have the same length")
        if not self.costs:
            raise ValueError("need at least one variable")
        if any(w < 1 for w in self.weights):
            raise ValueError("weights must be positive integers")
        if self.target < 0:
            raise ValueError("target must be nonnegative")
        if not self.upper_bounds:
            bounds = tuple(self.target // w for w in self.weights)
            object.__setattr__(self, "upper_bounds", bounds)
        elif len(self.upper_bounds) != len(self.costs):
            raise ValueError("upper_bounds length must match costs")


def solve(ilp: MicroIlp) -> tuple[tuple[int, ...], float] | None:
    """Exact minimum of a micro ILP, or None when the equality is infeasible.

    Ties break to the lexicographically smallest assignment.
    """
    dim = len(ilp.costs)
    if dim > MAX_DIMENSION:
        raise UnsupportedDimensionError(f"{dim} variables; at most {MAX_DIMENSION} supported")

    bounds = [min(ub, ilp.target // w) for ub, w in zip(ilp.upper_bounds, ilp.weights)]
    # Force the variable with the widest range; enumerate the rest.
    pivot = max(range(dim), key=lambda v: bounds[v])
    others = [v for v in range(dim) if v != pivot]
    w_pivot = ilp.weights[pivot]

    best: tuple[tuple[int, ...], float] | None = None
    for values in product(*(range(bounds[v] + 1) for v in others)):
        remainder = ilp.target - sum(ilp.weights[v] * x for v, x in zip(others, values))
        if remainder < 0 or remainder % w_pivot != 0:
            continue
        x_pivot = remainder // w_pivot
        if x_pivot > ilp.upper_bounds[pivot]:
            continue
        assignment = [0] * dim
        assignment[pivot] = x_pivot
        for v, x in zip(others, values):
            assignment[v] = x
        objective = sum(c * x for c, x in zip(ilp.costs, assignment))
        key = (objective, tuple(assignment))
        if best is None or key < (best[1], best[0]):
            best = (tuple(assignment), objective)
    return best


def feasible(weights: tuple[int, ...], target: int) -> bool:
    """Whether the equality sum(w[v] * x[v]) == target has a nonnegative solution."""
    ilp = MicroIlp(costs=tuple(0.0 for _ in weights), weights=weights, target=target)
    return solve(ilp) is not None
