"""Measure a platform's solve-time table by timing probes across LP sizes.

Probes run strictly sequentially on a monotonic clock. The synthetic probe
burns a configurable fixed-plus-polynomial amount of wall-clock time (with
optional seeded noise) and exists so the whole pipeline can be exercised
without a real solver; the external probe times an arbitrary command fed a
generated LP file.
"""

from __future__ import annotations

import json
import random
import shlex
import statistics
import subprocess
import tempfile
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from .cost_model import DEFAULT_EPS, STATISTICS, CostModel
from .errors import CalibrationGapError, ClockError, ProbeError

PROBE_SYNTHETIC = "synthetic"
PROBE_EXTERNAL = "external-command"


@dataclass(frozen=True)
class ProbeSpec:
    """What to run at each probed size.

    Synthetic probes spin for (fixed + linear*size + quad*size^2) ms, times a
    noise factor drawn uniformly from [1-noise, 1+noise]. External probes
    format ``command`` with a generated LP file path and time the child
    process from spawn to exit.
    """

    mode: str = PROBE_SYNTHETIC
    fixed_ms: float = 0.0
    linear_ms: float = 0.0
    quad_ms: float = 0.0
    noise: float = 0.0
    command: str = ""
    coeff_lo: int = 1
    coeff_hi: int = 9
    seed: int = 0

    def __post_init__(self) -> None:
        if self.mode not in (PROBE_SYNTHETIC, PROBE_EXTERNAL):
            raise ValueError(f"unknown probe mode {self.mode!r}")
        if self.mode == PROBE_EXTERNAL and "{lp_file_path}" not in self.command:
            raise ValueError("external command must contain the {lp_file_path} placeholder")
        if not 0 <= self.noise < 1:
            raise ValueError("noise must be in [0, 1)")

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "fixed_ms": self.fixed_ms,
            "linear_ms": self.linear_ms,
            "quad_ms": self.quad_ms,
            "noise": self.noise,
            "command": self.command,
            "coeff_lo": self.coeff_lo,
            "coeff_hi": self.coeff_hi,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ProbeSpec":
        return cls(**data)


@dataclass(frozen=True)
class CalibrationRecord:
    """Raw timings per probed size, kept verbatim for later model fitting."""

    probe_spec: ProbeSpec
    grid: tuple[int, ...]
    repeats: int
    warmups: int
    raw_times: tuple[tuple[float, ...], ...]
    statistic: str = "median"
    timestamp: str = ""
    platform_note: str = ""
    failure: dict | None = None

    def to_dict(self) -> dict:
        return {
            "probe_spec": self.probe_spec.to_dict(),
            "grid": list(self.grid),
            "repeats": self.repeats,
            "warmups": self.warmups,
            "raw_times": [list(times) for times in self.raw_times],
            "statistic": self.statistic,
            "timestamp": self.timestamp,
            "platform_note": self.platform_note,
            "failure": self.failure,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CalibrationRecord":
        return cls(
            probe_spec=ProbeSpec.from_dict(data["probe_spec"]),
            grid=tuple(data["grid"]),
            repeats=data["repeats"],
            warmups=data["warmups"],
            raw_times=tuple(tuple(times) for times in data["raw_times"]),
            statistic=data.get("statistic", "median"),
            timestamp=data.get("timestamp", ""),
            platform_note=data.get("platform_note", ""),
            failure=data.get("failure"),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "CalibrationRecord":
        return cls.from_dict(json.loads(Path(path).read_text()))


def generate_lp_text(size: int, rng: random.Random, coeff_lo: int = 1, coeff_hi: int = 9) -> str:
    """A feasible, bounded LP with ``size`` variables and ``size`` dense rows.

    Plain CPLEX-LP text: nonnegative row coefficients and right-hand sides
    keep the origin feasible; box bounds keep the problem bounded.
    """
    names = [f"x{j}" for j in range(1, size + 1)]
    lines = ["Minimize", " obj: " + " + ".join(
        f"{rng.randint(coeff_lo, coeff_hi)} {x}" for x in names
    )]
    lines.append("Subject To")
    for i in range(1, size + 1):
        row = " + ".join(f"{rng.randint(coeff_lo, coeff_hi)} {x}" for x in names)
        rhs = rng.randint(max(coeff_hi, 1), 10 * max(coeff_hi, 1))
        lines.append(f" c{i}: {row} <= {rhs}")
    lines.append("Bounds")
    for x in names:
        lines.append(f" 0 <= {x} <= 10")
    lines.append("End")
    return "\n".join(lines) + "\n"


def _busy_wait(seconds: float) -> None:
    deadline = time.perf_counter() + seconds
    while time.perf_counter() < deadline:
        pass


def _run_probe_once(spec: ProbeSpec, size: int, rng: random.Random) -> float:
    """One timed probe at the given size; returns wall-clock seconds."""
    if spec.mode == PROBE_SYNTHETIC:
        target_ms = spec.fixed_ms + spec.linear_ms * size + spec.quad_ms * size * size
        factor = 1.0 + rng.uniform(-spec.noise, spec.noise) if spec.noise else 1.0
        start = time.perf_counter()
        _busy_wait(target_ms * factor / 1000.0)
        elapsed = time.perf_counter() - start
    else:
        lp_text = generate_lp_text(size, rng, spec.coeff_lo, spec.coeff_hi)
        with tempfile.NamedTemporaryFile("w", suffix=".lp", delete=False) as fh:
            fh.write(lp_text)
            lp_path = fh.name
        try:
            argv = [tok.replace("{lp_file_path}", lp_path) for tok in shlex.split(spec.command)]
            start = time.perf_counter()
            result = subprocess.run(argv, capture_output=True)
            elapsed = time.perf_counter() - start
            if result.returncode != 0:
                raise ProbeError(
                    f"probe command exited {result.returncode} at size {size}: "
                    f"{result.stderr.decode(errors='replace').strip()[:200]}"
                )
        finally:
            Path(lp_path).unlink(missing_ok=True)
    if elapsed <= 0:
        raise ClockError(f"non-positive probe duration {elapsed!r} at size {size}")
    return elapsed


def run_calibration(
    spec: ProbeSpec,
    grid: Sequence[int],
    repeats: int = 7,
    warmups: int = 1,
    statistic: str = "median",
    platform_note: str = "",
) -> CalibrationRecord:
    """Time the probe at every grid size, sequentially, warmups first.

    A failing probe stops the run; sizes measured so far are kept and the
    failure is recorded on the record rather than fabricated around.
    """
    if not grid:
        raise ValueError("grid must be nonempty")
    if list(grid) != sorted(set(grid)) or grid[0] < 1:
        raise ValueError("grid must be ascending positive sizes")
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    if warmups < 0:
        raise ValueError("warmups must be nonnegative")
    if statistic not in STATISTICS:
        raise ValueError(f"statistic must be one of {STATISTICS}")

    rng = random.Random(spec.seed)
    if spec.mode == PROBE_EXTERNAL:
        _run_probe_once(spec, grid[0], rng)  # smoke probe; raises on failure

    done: list[int] = []
    raw: list[tuple[float, ...]] = []
    failure: dict | None = None
    for size in grid:
        try:
            for _ in range(warmups):
                _run_probe_once(spec, size, rng)
            times = tuple(_run_probe_once(spec, size, rng) for _ in range(repeats))
        except ProbeError as exc:
            failure = {"size": size, "error": str(exc)}
            break
        done.append(size)
        raw.append(times)
    return CalibrationRecord(
        probe_spec=spec,
        grid=tuple(done),
        repeats=repeats,
        warmups=warmups,
        raw_times=tuple(raw),
        statistic=statistic,
        timestamp=datetime.now(timezone.utc).isoformat(),
        platform_note=platform_note,
        failure=failure,
    )


def _collapse(times: Sequence[float], statistic: str) -> float:
    if statistic == "median":
        return statistics.median(times)
    if statistic == "mean":
        return statistics.fmean(times)
    if statistic == "max":
        return max(times)
    raise ValueError(f"statistic must be one of {STATISTICS}")


def fit_model(
    record: CalibrationRecord,
    statistic: str | None = None,
    eps: float = DEFAULT_EPS,
    block_size: int | None = None,
    fill_gaps: bool = False,
    unit: str = "s",
) -> CostModel:
    """Collapse raw timings to one cost per size and classify the table.

    The grid must be contiguous in block-size steps. Gaps are an error
    unless ``fill_gaps`` is set, in which case missing entries are linearly
    interpolated and flagged as such on the model.
    """
    if not record.grid:
        raise CalibrationGapError("record holds no successfully probed sizes")
    stat = statistic or record.statistic
    s = block_size or record.grid[0]
    by_index: dict[int, float] = {}
    for size, times in zip(record.grid, record.raw_times):
        q, r = divmod(size, s)
        if r:
            raise CalibrationGapError(f"probed size {size} is not a multiple of block size {s}")
        by_index[q] = _collapse(times, stat)

    i_max = max(by_index)
    missing = [i for i in range(1, i_max + 1) if i not in by_index]
    if missing and not fill_gaps:
        raise CalibrationGapError(
            f"grid has gaps at block counts {missing}; pass fill_gaps to interpolate"
        )
    if missing and 1 in missing:
        raise CalibrationGapError("cannot interpolate below the smallest probed size")
    for i in missing:
        lo = max(j for j in by_index if j < i)
        hi = min(j for j in by_index if j > i)
        frac = (i - lo) / (hi - lo)
        by_index[i] = by_index[lo] + frac * (by_index[hi] - by_index[lo])

    costs = [by_index[i] for i in range(1, i_max + 1)]
    return CostModel.from_costs(
        costs,
        block_size=s,
        eps=eps,
        unit=unit,
        statistic=stat,
        interpolated=tuple(missing),
    )
