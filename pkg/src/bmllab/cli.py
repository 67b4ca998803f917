"""Command-line entry point.

Exit codes: 0 success, 1 runtime error, 2 usage error, 3 classify gave up
(Undetermined).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .classify import ClassifyLimits, Kind
from .constructions import construct_stuck, verify_no_stuck_below_threshold
from .experiments import (
    RNG_NAME,
    Aggregate,
    Bicolor,
    SweepSpec,
    TrialSpec,
    UniformColored,
    evaluate,
    sweep,
)
from .formats import RecordWriter, parse_grid, render, serialize_grid
from .grid import step

EXIT_RUNTIME = 1
EXIT_UNDETERMINED = 3


def _load_config(args):
    if args.grid is not None:
        return parse_grid(Path(args.grid).read_text()), None
    if args.n is None:
        raise _Usage("give --grid FILE or --n with --m (or --red/--blue)")
    if args.m is not None:
        if args.red is not None or args.blue is not None:
            raise _Usage("--m cannot be combined with --red/--blue")
        sampler = UniformColored(args.m)
    elif args.red is not None or args.blue is not None:
        sampler = Bicolor(args.red or 0, args.blue or 0)
    else:
        raise _Usage("give --m or --red/--blue together with --n")
    return sampler.sample(args.n, args.seed), sampler


class _Usage(Exception):
    pass


def _limits(args, n):
    default = ClassifyLimits.default(n)
    return ClassifyLimits(
        max_steps=args.max_steps or default.max_steps,
        max_states=args.max_states or default.max_states,
    )


def cmd_run(args) -> int:
    config, _ = _load_config(args)
    frames = Path(args.emit_frames) if args.emit_frames else None
    ext = "txt" if args.format == "ascii" else "ppm"
    if frames:
        frames.mkdir(parents=True, exist_ok=True)
        (frames / f"frame_{0:06d}.{ext}").write_bytes(render(config, args.format))
    for t in range(1, args.steps + 1):
        config, _ = step(config)
        if frames:
            (frames / f"frame_{t:06d}.{ext}").write_bytes(render(config, args.format))
    if args.out:
        Path(args.out).write_bytes(render(config, args.format))
    elif args.format == "ascii":
        sys.stdout.write(serialize_grid(config))
    else:
        sys.stdout.buffer.write(render(config, "ppm"))
    return 0


def cmd_classify(args) -> int:
    config, sampler = _load_config(args)
    spec = TrialSpec(
        n=config.n,
        sampler=sampler or UniformColored(config.m),
        seed=args.seed,
        limits=_limits(args, config.n),
        monitor=args.monitor,
    )
    result = evaluate(config, spec, keep_log=args.monitor)
    if args.monitor:
        log = open(args.monitor_log, "w") if args.monitor_log else sys.stderr
        try:
            for record in result.monitor_log:
                log.write(json.dumps(record) + "\n")
        finally:
            if log is not sys.stderr:
                log.close()
    RecordWriter(sys.stdout).write(result, sampler="grid" if sampler is None else None)
    return EXIT_UNDETERMINED if result.verdict.kind is Kind.UNDETERMINED else 0


def cmd_construct(args) -> int:
    config = construct_stuck(args.n, args.m, args.diagonal)
    text = serialize_grid(config)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _format_aggregate(agg: Aggregate) -> str:
    fr = " ".join(f"{k}={v:.3f}" for k, v in agg.fractions.items())
    lo, hi = agg.stuck_interval
    if agg.collision_mean is None:
        col = "collisions=n/a"
    else:
        col = f"collisions mean={agg.collision_mean:.3f} median={agg.collision_median} max={agg.collision_max}"
    return f"n={agg.n} m={agg.m} trials={agg.trials} {fr} stuck95=[{lo:.4f},{hi:.4f}] {col}"


def cmd_sweep(args) -> int:
    if args.seed is None:
        raise _Usage("sweep requires --seed")
    if (args.m_list is None) == (args.alpha_list is None):
        raise _Usage("give exactly one of --m-list or --alpha-list")
    limits = None
    if args.max_steps or args.max_states:
        limits = _limits(args, max(args.n))
    spec = SweepSpec(
        n_values=args.n,
        trials=args.trials,
        base_seed=args.seed,
        m_values=args.m_list,
        alpha_values=args.alpha_list,
        sampler=args.sampler,
        limits=limits,
        monitor=args.monitor,
    )
    print(f"# rng: {RNG_NAME}, base seed {args.seed}", file=sys.stderr)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = RecordWriter(out)
        for item in sweep(spec, jobs=args.jobs):
            if isinstance(item, Aggregate):
                print(_format_aggregate(item), file=sys.stderr)
            else:
                writer.write(item)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_enumerate_check(args) -> int:
    report = verify_no_stuck_below_threshold(args.n)
    print(report.summary())
    return 0 if report.passed else EXIT_RUNTIME


def _add_source(p):
    p.add_argument("--grid", help="grid text file to start from")
    p.add_argument("--n", type=int, help="torus side")
    p.add_argument("--m", type=int, help="number of cars, coloured uniformly at random")
    p.add_argument("--red", type=int, help="exact number of red cars (with --blue)")
    p.add_argument("--blue", type=int, help="exact number of blue cars (with --red)")
    p.add_argument("--seed", type=int, default=0)


def _add_limits(p):
    p.add_argument("--max-steps", type=int)
    p.add_argument("--max-states", type=int)
    p.add_argument("--monitor", action="store_true", help="check the diagonal lemmas at every step")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bmllab", description="BML traffic model laboratory")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate a fixed number of steps")
    _add_source(p)
    p.add_argument("--steps", type=int, default=0)
    p.add_argument("--emit-frames", metavar="DIR")
    p.add_argument("--format", choices=("ascii", "ppm"), default="ascii")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("classify", help="decide speed one / stuck / intermediate")
    _add_source(p)
    _add_limits(p)
    p.add_argument("--monitor-log", help="JSONL file for per-step monitor records (default stderr)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("construct", help="build special configurations")
    csub = p.add_subparsers(dest="what", required=True)
    s = csub.add_parser("stuck", help="a stuck configuration with m >= 2N cars")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--diagonal", type=int, default=0)
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_construct)

    p = sub.add_parser("sweep", help="seeded Monte Carlo sweep")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--m-list", type=int, nargs="+")
    p.add_argument("--alpha-list", type=float, nargs="+")
    p.add_argument("--sampler", choices=("uniform", "bicolor"), default="uniform")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", metavar="FILE.csv")
    p.add_argument("--jobs", type=int, default=1)
    _add_limits(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("enumerate-check", help="exhaustively confirm nothing below 2N cars is stuck")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_enumerate_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"bmllab: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"bmllab: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
