"""Platform cost tables: the measured solve-time function P over integer block counts.

A :class:`CostModel` tabulates P(i*s) for i = 1..i_max, where ``s`` is the
block size in LP-size units. All planners consume this table directly; no
interpolation or extrapolation happens anywhere downstream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Sequence

from .errors import ClassificationUndefinedError, GridRangeError

DEFAULT_EPS = 1e-9

STATISTICS = ("median", "mean", "max")


class CurvatureKind(str, Enum):
    LINEAR = "linear"
    CONVEX = "convex"
    CONCAVE = "concave"
    GENERAL = "general"


@dataclass(frozen=True)
class Curvature:
    """Curvature classification of a cost table plus the tolerance it was made with."""

    kind: CurvatureKind
    tolerance_eps: float

    def __post_init__(self) -> None:
        if self.tolerance_eps < 0:
            raise ValueError("tolerance_eps must be nonnegative")


def classify(costs: Sequence[float], eps: float = DEFAULT_EPS) -> Curvature:
    """Classify a contiguous cost table as linear/convex/concave/general.

    Uses second differences D_i = P(i+1) - 2 P(i) + P(i-1). The table is
    linear when every |D_i| is negligible against the typical first
    difference of the table; one-sided violations (for the convex and
    concave verdicts) are tolerated up to ``eps`` times the largest cost,
    which is what lets a noisy but genuinely curved measurement keep its
    classification. When both one-sided tests pass, the net slope change
    across the table decides the side.
    """
    if len(costs) < 3:
        raise ClassificationUndefinedError(
            f"curvature needs at least 3 samples, got {len(costs)}"
        )
    if eps < 0:
        raise ValueError("eps must be nonnegative")

    second = [costs[j + 2] - 2 * costs[j + 1] + costs[j] for j in range(len(costs) - 2)]
    value_scale = max(abs(c) for c in costs)
    first = [costs[j + 1] - costs[j] for j in range(len(costs) - 1)]
    slope_scale = sum(abs(d) for d in first) / len(first)

    if all(abs(d) <= eps * slope_scale for d in second):
        return Curvature(CurvatureKind.LINEAR, eps)

    band = eps * value_scale
    convex_ok = all(d >= -band for d in second)
    concave_ok = all(d <= band for d in second)
    if convex_ok and concave_ok:
        # Noise-dominated either way; the telescoped sum of second
        # differences (last slope minus first slope) is the robust signal.
        net = first[-1] - first[0]
        if net > 0:
            return Curvature(CurvatureKind.CONVEX, eps)
        if net < 0:
            return Curvature(CurvatureKind.CONCAVE, eps)
        return Curvature(CurvatureKind.GENERAL, eps)
    if convex_ok:
        return Curvature(CurvatureKind.CONVEX, eps)
    if concave_ok:
        return Curvature(CurvatureKind.CONCAVE, eps)
    return Curvature(CurvatureKind.GENERAL, eps)


@dataclass(frozen=True)
class CostModel:
    """Dense table of platform solve times at integer multiples of the block size.

    ``costs[i - 1]`` is P(i * block_size) for i = 1..i_max, with no gaps.
    Immutable after construction; safe to share across threads.
    """

    block_size: int
    costs: tuple[float, ...]
    curvature: Curvature
    unit: str = "s"
    statistic: str = "median"
    interpolated: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.block_size < 1:
            raise ValueError("block_size must be a positive integer")
        if not self.costs:
            raise ValueError("cost table must be nonempty")
        if any(c <= 0 for c in self.costs):
            raise ValueError("all costs must be strictly positive")

    @classmethod
    def from_costs(
        cls,
        costs: Sequence[float],
        block_size: int = 1,
        eps: float = DEFAULT_EPS,
        unit: str = "s",
        statistic: str = "median",
        interpolated: Sequence[int] = (),
    ) -> "CostModel":
        """Build a model, classifying curvature (General when under 3 samples)."""
        try:
            curv = classify(costs, eps)
        except ClassificationUndefinedError:
            curv = Curvature(CurvatureKind.GENERAL, eps)
        return cls(
            block_size=block_size,
            costs=tuple(costs),
            curvature=curv,
            unit=unit,
            statistic=statistic,
            interpolated=tuple(sorted(interpolated)),
        )

    @property
    def i_max(self) -> int:
        return len(self.costs)

    @property
    def eps(self) -> float:
        return self.curvature.tolerance_eps

    def eval(self, num_blocks: int) -> float:
        """P at ``num_blocks`` blocks; zero blocks cost nothing (no empty subproblem)."""
        if num_blocks == 0:
            return 0
        if not 1 <= num_blocks <= self.i_max:
            raise GridRangeError(
                f"requested {num_blocks} blocks but table covers 1..{self.i_max}"
            )
        return self.costs[num_blocks - 1]

    def ratio(self, num_blocks: int) -> float:
        """Per-size-unit cost P(i*s) / (i*s)."""
        return self.eval(num_blocks) / (num_blocks * self.block_size)

    def x_opt(self, i_limit: int | None = None) -> tuple[int, float]:
        """Block count minimizing per-unit cost, with its per-unit cost.

        Discrete analogue of the least-sloped tangent through the origin.
        Ties break toward fewer blocks. ``i_limit`` restricts the scan to a
        prefix of the grid.
        """
        limit = self.i_max if i_limit is None else min(i_limit, self.i_max)
        if limit < 1:
            raise GridRangeError("x_opt needs at least one sample")
        best_i, best_ratio = 1, self.ratio(1)
        for i in range(2, limit + 1):
            r = self.ratio(i)
            if r < best_ratio:
                best_i, best_ratio = i, r
        return best_i, best_ratio

    def recheck_curvature(self) -> bool:
        """True when the stored classification matches a fresh one at the stored eps."""
        try:
            return classify(self.costs, self.eps) == self.curvature
        except ClassificationUndefinedError:
            return self.curvature.kind is CurvatureKind.GENERAL

    def with_block_size(self, block_size: int) -> "CostModel":
        """View of this table at a coarser block size (must be a multiple of s)."""
        if block_size == self.block_size:
            return self
        if block_size % self.block_size != 0:
            raise GridRangeError(
                f"block size {block_size} is not a multiple of table step {self.block_size}"
            )
        stride = block_size // self.block_size
        costs = self.costs[stride - 1 :: stride]
        if not costs:
            raise GridRangeError(
                f"table covers 1..{self.i_max} steps; no sample at stride {stride}"
            )
        return CostModel.from_costs(
            costs,
            block_size=block_size,
            eps=self.eps,
            unit=self.unit,
            statistic=self.statistic,
        )

    def to_dict(self) -> dict:
        samples = []
        flagged = set(self.interpolated)
        for i, cost in enumerate(self.costs, start=1):
            entry: dict = {"i": i, "cost": cost}
            if i in flagged:
                entry["interpolated"] = True
            samples.append(entry)
        return {
            "block_size": self.block_size,
            "unit": self.unit,
            "samples": samples,
            "statistic": self.statistic,
            "eps": self.eps,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CostModel":
        samples = sorted(data["samples"], key=lambda e: e["i"])
        indices = [e["i"] for e in samples]
        if indices != list(range(1, len(indices) + 1)):
            raise GridRangeError("model samples must cover 1..i_max with no gaps")
        return cls.from_costs(
            [e["cost"] for e in samples],
            block_size=data["block_size"],
            eps=data.get("eps", DEFAULT_EPS),
            unit=data.get("unit", "s"),
            statistic=data.get("statistic", "median"),
            interpolated=[e["i"] for e in samples if e.get("interpolated")],
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "CostModel":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def scaled(self, factor: float) -> "CostModel":
        """Same table with every cost multiplied by ``factor`` (> 0)."""
        if factor <= 0:
            raise ValueError("factor must be positive")
        return replace(
            self,
            costs=tuple(c * factor for c in self.costs),
            curvature=classify([c * factor for c in self.costs], self.eps)
            if len(self.costs) >= 3
            else self.curvature,
        )
