"""Command-line interface.

Subcommands: ``match`` (one game, optional replay dump), ``series`` (n games,
CSV stats), ``sweep`` (pessimism-level study), ``replay`` (inspect or verify a
recorded game), ``bench`` (compare the numba and numpy kernel paths).

A ``--config`` file holds ``key=value`` lines using the long option names
(underscores or dashes); command-line flags override it.  Boolean keys take
``true``/``false``.
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np


def parse_levels(text: str) -> list[int]:
    """Accept '0..10' ranges (inclusive) and comma lists like '0,3,5'."""
    text = text.strip()
    if ".." in text:
        lo, _, hi = text.partition("..")
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise argparse.ArgumentTypeError(f"empty level range: {text!r}")
        return list(range(lo, hi + 1))
    return [int(part) for part in text.split(",") if part.strip()]


def _config_tokens(path: str) -> list[str]:
    tokens: list[str] = []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            flag = "--" + key.strip().replace("_", "-")
            value = value.strip()
            if value.lower() == "true":
                tokens.append(flag)
            elif value.lower() == "false":
                continue
            else:
                tokens.extend([flag, value])
    return tokens


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pommer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="key=value file with defaults for this command")

    m = sub.add_parser("match", help="play a single match")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--team-a", default="solo")
    m.add_argument("--team-b", default="baseline")
    m.add_argument("--strict-deadline", action="store_true")
    m.add_argument("--max-steps", type=int, default=800)
    m.add_argument("--budget-ms", type=float, default=100.0)
    m.add_argument("--out", help="write the replay as JSON lines")
    m.add_argument(
        "--dump-scenario",
        help="write the scenario agent 0 rolls from its first observation",
    )
    add_common(m)

    s = sub.add_parser("series", help="play n matches and print stats")
    s.add_argument("--n", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--team-a", default="solo")
    s.add_argument("--team-b", default="baseline")
    s.add_argument("--swap-sides", action="store_true")
    s.add_argument("--strict-deadline", action="store_true")
    s.add_argument("--max-steps", type=int, default=800)
    s.add_argument("--budget-ms", type=float, default=100.0)
    s.add_argument("--workers", type=int, default=None)
    s.add_argument("--out", help="write one CSV row (level column fixed at -1)")
    add_common(s)

    w = sub.add_parser("sweep", help="series per pessimism level")
    w.add_argument("--levels", type=parse_levels, default=list(range(11)))
    w.add_argument("--n", type=int, default=1000)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--opponent", default="baseline")
    w.add_argument("--template", default="solo:level={level}")
    w.add_argument("--no-swap-sides", action="store_true")
    w.add_argument("--strict-deadline", action="store_true")
    w.add_argument("--workers", type=int, default=None)
    w.add_argument("--out", help="write the sweep table as CSV")
    add_common(w)

    r = sub.add_parser("replay", help="inspect or verify a recorded match")
    r.add_argument("--in", dest="infile", required=True)
    r.add_argument("--verify", action="store_true")
    add_common(r)

    b = sub.add_parser("bench", help="compare kernel implementations")
    b.add_argument("--n", type=int, default=200)
    b.add_argument("--horizon", type=int, default=12)
    add_common(b)
    return parser


def _cmd_match(args) -> int:
    from .harness import MatchConfig, run_match

    if args.dump_scenario:
        _dump_first_scenario(args)
    config = MatchConfig(
        seed=args.seed,
        team_a=args.team_a,
        team_b=args.team_b,
        strict_deadline=args.strict_deadline,
        max_steps=args.max_steps,
        budget_ms=args.budget_ms,
    )
    record = run_match(config)
    print(f"seed {record.seed}: {record.outcome} after {len(record.steps)} steps")
    if record.timeout_count:
        print(f"timeouts: {record.timeout_count}")
    if record.error_agent >= 0:
        print(f"agent {record.error_agent} crashed")
    if args.out:
        record.to_jsonl(args.out)
        print(f"replay written to {args.out}")
    return 0


def _dump_first_scenario(args) -> None:
    from .agents import SearchAgent, parse_agent_spec
    from .engine import initial_state, observe
    from .scenario import generate
    from .search import SearchParams
    from .tracker import init_belief, to_search_state

    agent = parse_agent_spec(args.team_a)(0)
    params = agent.params if isinstance(agent, SearchAgent) else SearchParams()
    state = initial_state(args.seed)
    belief = init_belief(observe(state, 0))
    sc = generate(to_search_state(belief), {0}, params.scenario_params())
    sc.to_jsonl(args.dump_scenario)
    print(f"scenario written to {args.dump_scenario}")


def _print_stats(prefix: str, stats) -> None:
    print(
        f"{prefix}wins {stats.wins}  losses {stats.losses}  ties {stats.ties}  "
        f"p50 {stats.p50_ms:.1f} ms  p99 {stats.p99_ms:.1f} ms  "
        f"timeouts {stats.timeout_count}"
    )


def _cmd_series(args) -> int:
    from .harness import run_series, write_sweep_csv

    stats = run_series(
        args.team_a,
        args.team_b,
        args.n,
        base_seed=args.seed,
        swap_sides=args.swap_sides,
        strict_deadline=args.strict_deadline,
        max_steps=args.max_steps,
        budget_ms=args.budget_ms,
        workers=args.workers,
    )
    _print_stats("", stats)
    if args.out:
        write_sweep_csv(args.out, [(-1, stats)])
        print(f"stats written to {args.out}")
    return 0


def _cmd_sweep(args) -> int:
    from .harness import sweep_pessimism, write_sweep_csv

    rows = []
    for level in args.levels:
        row = sweep_pessimism(
            [level],
            args.n,
            opponent=args.opponent,
            base_seed=args.seed,
            agent_template=args.template,
            swap_sides=not args.no_swap_sides,
            strict_deadline=args.strict_deadline,
            workers=args.workers,
        )[0]
        rows.append(row)
        _print_stats(f"level {level}: ", row[1])
        if args.out:
            write_sweep_csv(args.out, rows)  # refresh as levels finish
    if args.out:
        print(f"sweep written to {args.out}")
    return 0


def _cmd_replay(args) -> int:
    from .harness import record_from_jsonl, verify_replay

    record = record_from_jsonl(args.infile)
    print(
        f"seed {record.seed}  {record.team_a} vs {record.team_b}  "
        f"{record.outcome} after {len(record.steps)} steps"
    )
    if args.verify:
        ok = verify_replay(record)
        print("verification:", "ok" if ok else "MISMATCH")
        return 0 if ok else 1
    return 0


def _cmd_bench(args) -> int:
    from . import kernels
    from .engine import initial_state
    from .scenario import PessimismParams, generate

    state = initial_state(0)
    params = PessimismParams(level=3, horizon=args.horizon)
    sc = generate(state, {0}, params)
    occ = np.zeros(state.grid.shape, np.uint8)
    for i in range(1, 4):
        occ[state.agent_pos[i, 0], state.agent_pos[i, 1]] = 1

    results = {}
    for name, impls in kernels.IMPLEMENTATIONS.items():
        if name == "roll_scenario":
            args_tuple = (state.grid, state.hidden_items, state.bombs, state.flames, occ, 3, args.horizon)
        elif name == "surviving_pairs":
            args_tuple = (sc.walls, sc.bombs, sc.flames, sc.occupied_from, True, 1, 1)
        else:
            args_tuple = (sc.walls, sc.bombs, sc.flames, 1, 1)
        row = {}
        for label, fn in impls.items():
            if fn is None:
                continue
            fn(*args_tuple)  # warm up (jit compile, caches)
            start = time.perf_counter()
            for _ in range(args.n):
                fn(*args_tuple)
            row[label] = (time.perf_counter() - start) / args.n * 1e6
        results[name] = row

    print(f"per-call microseconds over {args.n} runs (horizon {args.horizon}):")
    for name, row in results.items():
        parts = [f"{label} {usec:9.1f}" for label, usec in row.items()]
        line = f"  {name:20s} " + "  ".join(parts)
        if "numba" in row and "numpy" in row and row["numba"] > 0:
            line += f"  speedup x{row['numpy'] / row['numba']:.1f}"
        print(line)
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    # pull --config out first so its values become overridable defaults
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        insert_at = 1 if argv and not argv[0].startswith("-") else 0
        argv = argv[:insert_at] + _config_tokens(known.config) + argv[insert_at:]
    args = parser.parse_args(argv)
    handlers = {
        "match": _cmd_match,
        "series": _cmd_series,
        "sweep": _cmd_sweep,
        "replay": _cmd_replay,
        "bench": _cmd_bench,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
