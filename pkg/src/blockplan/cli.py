"""Command-line front end: calibrate, plan, schedule, hardness-demo.

Exit codes are stable for scripting: 0 success, 1 solver/domain error,
2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import aggregator, calibration, oracle, scheduler
from .aggregator import BlockSet
from .cost_model import DEFAULT_EPS, STATISTICS, CostModel
from .errors import BlockplanError, InvalidGadgetError
from .scheduler import PpuSchedule

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def parse_grid(text: str) -> list[int]:
    """Grid spec: '1..12' (inclusive range) or '1,2,3'."""
    try:
        if ".." in text:
            lo_s, hi_s = text.split("..", 1)
            lo, hi = int(lo_s), int(hi_s)
            sizes = list(range(lo, hi + 1))
        else:
            sizes = [int(tok) for tok in text.split(",") if tok]
    except ValueError as exc:
        raise UsageError(f"bad grid spec {text!r}: {exc}") from None
    if not sizes or sizes[0] < 1 or sizes != sorted(set(sizes)):
        raise UsageError(f"grid must be ascending sizes >= 1, got {text!r}")
    return sizes


def parse_block_spec(blocks: str | None, sizes: str | None) -> BlockSet:
    """Block spec: '--blocks 12x1' (count x size) or '--sizes 2,2,5'."""
    if (blocks is None) == (sizes is None):
        raise UsageError("give exactly one of --blocks or --sizes")
    try:
        if blocks is not None:
            count_s, size_s = blocks.lower().split("x", 1)
            count, size = int(count_s), int(size_s)
            if count < 1 or size < 1:
                raise UsageError(f"block spec needs positive count and size: {blocks!r}")
            return BlockSet((size,) * count)
        values = tuple(int(tok) for tok in sizes.split(",") if tok)
        if not values or any(v < 1 for v in values):
            raise UsageError(f"sizes must be positive integers: {sizes!r}")
        return BlockSet(values)
    except ValueError as exc:
        raise UsageError(f"bad block spec: {exc}") from None


def parse_synthetic_spec(text: str, seed: int) -> calibration.ProbeSpec:
    """Synthetic probe spec: 'fixed=9,quad=1[,lin=2][,noise=0.2]' (milliseconds)."""
    params = {"fixed": 0.0, "lin": 0.0, "quad": 0.0, "noise": 0.0}
    for item in text.split(","):
        if not item:
            continue
        if "=" not in item:
            raise UsageError(f"bad synthetic spec item {item!r} (expected key=value)")
        key, value = item.split("=", 1)
        key = key.strip()
        if key == "linear":
            key = "lin"
        if key not in params:
            raise UsageError(f"unknown synthetic parameter {key!r}")
        try:
            params[key] = float(value)
        except ValueError:
            raise UsageError(f"bad value for {key!r}: {value!r}") from None
    return calibration.ProbeSpec(
        mode=calibration.PROBE_SYNTHETIC,
        fixed_ms=params["fixed"],
        linear_ms=params["lin"],
        quad_ms=params["quad"],
        noise=params["noise"],
        seed=seed,
    )


def _load_model(path: str) -> CostModel:
    if not Path(path).exists():
        raise UsageError(f"model file not found: {path}")
    return CostModel.load(path)


def _solve_blocks(
    blocks: BlockSet, model: CostModel, force_dp: bool
) -> aggregator.AggregationPlan:
    uniform = blocks.equal_size
    if uniform is not None and uniform[0] % model.block_size == 0:
        size, count = uniform
        view = model if size == model.block_size else model.with_block_size(size)
        if force_dp:
            return aggregator.solve_dp(count, view)
        return aggregator.solve_equal(count, view)
    if force_dp:
        raise UsageError("--force-dp applies only to equal-size blocks on the model grid")
    return aggregator.solve_exact_unequal(blocks, model)


def _verify_plan(plan: aggregator.AggregationPlan, blocks: BlockSet, model: CostModel) -> None:
    uniform = blocks.equal_size
    if uniform is not None and uniform[0] % model.block_size == 0:
        size, count = uniform
        if count > 20:
            raise BlockplanError(f"--verify supports at most 20 equal blocks, got {count}")
        view = model if size == model.block_size else model.with_block_size(size)
        _, expected = oracle.best_partition(count, view)
    else:
        if blocks.k > 10:
            raise BlockplanError(f"--verify supports at most 10 unequal blocks, got {blocks.k}")
        _, expected = oracle.best_set_partition(blocks.sizes, model)
    if plan.total_cost != expected and abs(plan.total_cost - expected) > 1e-12 * abs(expected):
        raise BlockplanError(
            f"verification failed: plan cost {plan.total_cost} vs exhaustive {expected}"
        )
    print(f"verified against exhaustive search: optimum {expected}")


def render_gantt(sched: PpuSchedule, model: CostModel, width: int = 60) -> str:
    """One text row per unit; segment widths proportional to solve time, '.' idle."""
    wall = sched.wall_clock
    lines = []
    for p in range(sched.m):
        plan = sched.plans[p]
        if wall <= 0:
            bar = "." * width
        else:
            bar_chars: list[str] = []
            elapsed = 0.0
            for g, y in enumerate(plan.group_sums):
                cost = model.eval(y // model.block_size)
                start = round(elapsed / wall * width)
                elapsed += cost
                end = round(elapsed / wall * width)
                bar_chars.append(("#" if g % 2 == 0 else "=") * (end - start))
            bar = "".join(bar_chars)
            bar += "." * (width - len(bar))
        lines.append(f"ppu{p} |{bar}| {sched.per_ppu_serial_time[p]:g} {model.unit}")
    return "\n".join(lines)


def write_schedule_csv(sched: PpuSchedule, model: CostModel, path: str) -> None:
    """CSV of (ppu, group, start, end) in model time units, serial per unit."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ppu", "group", "start", "end"])
        for p in range(sched.m):
            elapsed = 0.0
            for g, y in enumerate(sched.plans[p].group_sums):
                cost = model.eval(y // model.block_size)
                writer.writerow([p, g, elapsed, elapsed + cost])
                elapsed += cost


def cmd_calibrate(args: argparse.Namespace) -> int:
    if (args.synthetic is None) == (args.command is None):
        raise UsageError("give exactly one of --synthetic or --command")
    grid = parse_grid(args.grid)
    if args.synthetic is not None:
        spec = parse_synthetic_spec(args.synthetic, args.seed)
    else:
        spec = calibration.ProbeSpec(
            mode=calibration.PROBE_EXTERNAL, command=args.command, seed=args.seed
        )
    record = calibration.run_calibration(
        spec,
        grid,
        repeats=args.repeats,
        warmups=args.warmups,
        statistic=args.statistic,
        platform_note=args.note,
    )
    if args.record:
        record.save(args.record)
        print(f"calibration record written to {args.record}")
    if record.failure is not None:
        print(
            f"error: probe failed at size {record.failure['size']}: "
            f"{record.failure['error']}",
            file=sys.stderr,
        )
        return EXIT_DOMAIN
    model = calibration.fit_model(
        record,
        statistic=args.statistic,
        eps=args.eps,
        block_size=args.block_size,
        fill_gaps=args.fill_gaps,
    )
    model.save(args.out)
    i_star, per_unit = model.x_opt()
    print(f"probed {len(record.grid)} sizes, statistic {model.statistic}")
    print(f"classification: {model.curvature.kind.value} (eps={model.eps:g})")
    print(f"x_opt: {i_star} blocks (per-unit cost {per_unit:g})")
    print(f"model written to {args.out}")
    return EXIT_OK


def cmd_plan(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    blocks = parse_block_spec(args.blocks, args.sizes)
    plan = _solve_blocks(blocks, model, args.force_dp)
    print(f"solver path: {plan.solver_path}")
    print(f"groups ({plan.num_groups}): sums {list(plan.group_sums)}")
    print(f"total cost: {plan.total_cost:g}")
    if args.verify:
        _verify_plan(plan, blocks, model)
    if args.out:
        aggregator.save_plan(args.out, plan, blocks, model_ref=args.model)
        print(f"plan written to {args.out}")
    return EXIT_OK


def cmd_schedule(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    blocks = parse_block_spec(args.blocks, args.sizes)
    if args.ppus < 1:
        raise UsageError("--ppus must be at least 1")
    sched = scheduler.schedule(blocks, model, args.ppus)
    print(render_gantt(sched, model, width=args.width))
    print(f"wall clock: {sched.wall_clock:g}")
    if args.out:
        scheduler.save_schedule(args.out, sched)
        print(f"schedule written to {args.out}")
    if args.csv:
        write_schedule_csv(sched, model, args.csv)
        print(f"segment csv written to {args.csv}")
    return EXIT_OK


def cmd_hardness_demo(args: argparse.Namespace) -> int:
    try:
        values = [int(tok) for tok in args.set.split(",") if tok]
    except ValueError as exc:
        raise UsageError(f"bad --set: {exc}") from None
    if not values or any(v < 1 for v in values):
        raise UsageError("--set needs positive integers")
    if len(values) > aggregator.MAX_EXACT_BLOCKS:
        raise UsageError(
            f"--set supports at most {aggregator.MAX_EXACT_BLOCKS} values, got {len(values)}"
        )
    try:
        inst = aggregator.build_hardness_instance(values)
    except InvalidGadgetError as exc:
        raise UsageError(str(exc)) from None
    plan = aggregator.solve_exact_unequal(BlockSet(inst.block_sizes), inst.model)
    is_yes = plan.total_cost == inst.yes_threshold
    print(f"n = {inst.n}, fixed cost a = {inst.fixed_cost_a}, threshold = {inst.yes_threshold}")
    print(f"exact optimum: {plan.total_cost:g}")
    print(f"verdict: {'YES' if is_yes else 'NO'} "
          f"(three-way equal split {'exists' if is_yes else 'does not exist'})")
    witness = [sorted(inst.block_sizes[i] for i in g) for g in plan.groups]
    print(f"witness grouping: {witness} with sums {list(plan.group_sums)}")
    if args.verify:
        decided = oracle.three_partition_decide(values)
        if decided != is_yes:
            raise BlockplanError(
                f"verification failed: exhaustive split decision {decided} vs gadget {is_yes}"
            )
        print(f"verified against direct three-way split search: {decided}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockplan",
        description="Plan optimal aggregation of LP blocks into subproblems "
        "from a measured platform cost table.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    cal = sub.add_parser("calibrate", help="time a probe across sizes and fit a cost model")
    cal.add_argument("--synthetic", help="synthetic probe spec, e.g. fixed=9,quad=1,noise=0.2 (ms)")
    cal.add_argument("--command", help="external command template containing {lp_file_path}")
    cal.add_argument("--grid", required=True, help="sizes to probe: '1..12' or '1,2,3'")
    cal.add_argument("--out", required=True, help="output path for the fitted cost model")
    cal.add_argument("--record", help="optional output path for the raw calibration record")
    cal.add_argument("--repeats", type=int, default=7)
    cal.add_argument("--warmups", type=int, default=1)
    cal.add_argument("--statistic", choices=STATISTICS, default="median")
    cal.add_argument("--block-size", type=int, default=None, help="LP-size units per block")
    cal.add_argument("--eps", type=float, default=DEFAULT_EPS, help="classification tolerance")
    cal.add_argument("--fill-gaps", action="store_true", help="interpolate missing grid sizes")
    cal.add_argument("--seed", type=int, default=0)
    cal.add_argument("--note", default="", help="free-text platform note for the record")
    cal.set_defaults(func=cmd_calibrate)

    pln = sub.add_parser("plan", help="compute an optimal aggregation plan")
    pln.add_argument("--model", required=True, help="cost model file from calibrate")
    pln.add_argument("--blocks", help="equal blocks as COUNTxSIZE, e.g. 12x1")
    pln.add_argument("--sizes", help="comma-separated block sizes, e.g. 2,2,5")
    pln.add_argument("--out", help="output path for the plan file")
    pln.add_argument("--force-dp", action="store_true", help="bypass fast paths for cross-checks")
    pln.add_argument("--verify", action="store_true", help="cross-check against exhaustive search")
    pln.set_defaults(func=cmd_plan)

    sch = sub.add_parser("schedule", help="distribute blocks over units and plan each")
    sch.add_argument("--model", required=True)
    sch.add_argument("--blocks")
    sch.add_argument("--sizes")
    sch.add_argument("--ppus", type=int, required=True, help="number of processing units")
    sch.add_argument("--out", help="output path for the schedule file")
    sch.add_argument("--csv", help="output path for (ppu,group,start,end) rows")
    sch.add_argument("--width", type=int, default=60, help="gantt width in characters")
    sch.set_defaults(func=cmd_schedule)

    hard = sub.add_parser(
        "hardness-demo",
        help="decide a three-way equal-sum split via the aggregation gadget",
    )
    hard.add_argument("--set", required=True, help="comma-separated positive integers")
    hard.add_argument("--verify", action="store_true",
                      help="cross-check with a direct three-way split search")
    hard.set_defaults(func=cmd_hardness_demo)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BlockplanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
