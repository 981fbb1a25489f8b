"""Brute-force reference implementations used by tests and `--verify`.

Everything here trades speed for being obviously correct: integer partitions
are enumerated outright, set partitions come from restricted growth strings,
and the three-way split decision is a pruned exhaustive search. Intended for
desk-scale inputs only (partitions up to ~20 blocks, set partitions up to
~10 blocks).
"""

from __future__ import annotations

from typing import Iterator, Sequence

from .cost_model import CostModel
from .errors import GridMismatchError


def partitions(n: int, max_part: int | None = None) -> Iterator[tuple[int, ...]]:
    """All integer partitions of ``n`` as descending tuples, largest-first order."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        yield ()
        return
    cap = n if max_part is None else min(max_part, n)
    for first in range(cap, 0, -1):
        for rest in partitions(n - first, first):
            yield (first, *rest)


def best_partition(count: int, model: CostModel) -> tuple[tuple[int, ...], float]:
    """Cheapest integer partition of ``count`` blocks under the cost table.

    Exhaustive scan; ties go to the lexicographically smallest descending
    parts tuple.
    """
    best_parts: tuple[int, ...] | None = None
    best_cost = 0.0
    for parts in partitions(count):
        cost = 0
        for p in parts:
            cost += model.eval(p)
        if best_parts is None or (cost, parts) < (best_cost, best_parts):
            best_parts, best_cost = parts, cost
    assert best_parts is not None
    return best_parts, best_cost


def set_partitions(n: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """All set partitions of {0..n-1} via restricted growth strings.

    Yields Bell(n) partitions, each as a tuple of index groups ordered by
    first appearance.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        yield ()
        return
    a = [0] * n
    b = [1] * n  # b[i] = 1 + max(a[0..i-1])
    while True:
        groups: list[list[int]] = []
        for idx, label in enumerate(a):
            if label == len(groups):
                groups.append([])
            groups[label].append(idx)
        yield tuple(tuple(g) for g in groups)

        if n > 1 and a[n - 1] < b[n - 1]:
            a[n - 1] += 1
            continue
        j = n - 2
        while j > 0 and a[j] == b[j]:
            j -= 1
        if j <= 0:
            return
        a[j] += 1
        grown = max(b[j], a[j] + 1)
        for i in range(j + 1, n):
            a[i] = 0
            b[i] = grown
        # a stays a valid growth string: positions after j restart at 0.


def _group_cost(size_sum: int, model: CostModel) -> float:
    q, r = divmod(size_sum, model.block_size)
    if r:
        raise GridMismatchError(
            f"group sum {size_sum} is not a multiple of block size {model.block_size}"
        )
    return model.eval(q)


def best_set_partition(
    sizes: Sequence[int], model: CostModel
) -> tuple[tuple[tuple[int, ...], ...], float]:
    """Cheapest grouping of blocks with the given sizes; exhaustive over set partitions."""
    best_groups: tuple[tuple[int, ...], ...] | None = None
    best_cost = 0.0
    best_sums: tuple[int, ...] = ()
    for grouping in set_partitions(len(sizes)):
        sums = tuple(sorted(sum(sizes[i] for i in g) for g in grouping))
        cost = 0
        for g in grouping:
            cost += _group_cost(sum(sizes[i] for i in g), model)
        if best_groups is None or (cost, sums) < (best_cost, best_sums):
            best_groups, best_cost, best_sums = grouping, cost, sums
    assert best_groups is not None
    return best_groups, best_cost


def three_partition_decide(values: Sequence[int]) -> bool:
    """Whether the multiset splits into three subsets of equal sum. Exact."""
    total = sum(values)
    if total % 3 != 0:
        return False
    target = total // 3
    items = sorted(values, reverse=True)
    loads = [0, 0, 0]

    def place(idx: int) -> bool:
        if idx == len(items):
            return loads[0] == loads[1] == loads[2] == target
        x = items[idx]
        seen: set[int] = set()
        for b in range(3):
            if loads[b] + x > target or loads[b] in seen:
                continue
            seen.add(loads[b])
            loads[b] += x
            if place(idx + 1):
                loads[b] -= x
                return True
            loads[b] -= x
        return False

    return place(0)
