"""Match and series harness.

A match is fully determined by its seed and the two team specs when deadline
enforcement is off: agents receive no deadline, so wall-clock jitter cannot
leak into decisions.  With ``strict_deadline`` on, agents get a decision
budget and overruns are replaced by Stop (and counted), trading replayability
for real-time guarantees.

Replays are JSON lines: one header with the configuration, then one line per
step with the four actions, the per-agent decision latencies in milliseconds,
and the post-step alive flags.
"""
from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .agents import parse_agent_spec
from .constants import MAX_STEPS, Action, Outcome
from .engine import initial_state, observe, outcome, step

DEADLINE_MARGIN_MS = 10.0  # slack handed to agents under strict deadlines


@dataclass(frozen=True)
class MatchConfig:
    seed: int
    team_a: str = "solo"
    team_b: str = "baseline"
    strict_deadline: bool = False
    max_steps: int = MAX_STEPS
    budget_ms: float = 100.0


@dataclass
class MatchRecord:
    seed: int
    team_a: str
    team_b: str
    strict_deadline: bool
    max_steps: int
    budget_ms: float
    outcome: str = Outcome.ONGOING.name
    steps: list = field(default_factory=list)
    timeout_count: int = 0
    error_agent: int = -1

    def team_a_latencies(self) -> list[float]:
        return [s["latencies_ms"][i] for s in self.steps for i in (0, 2)]

    def to_jsonl(self, path) -> None:
        with open(path, "w") as fh:
            header = {
                "seed": self.seed,
                "team_a": self.team_a,
                "team_b": self.team_b,
                "strict_deadline": self.strict_deadline,
                "max_steps": self.max_steps,
                "budget_ms": self.budget_ms,
                "outcome": self.outcome,
                "timeout_count": self.timeout_count,
                "error_agent": self.error_agent,
            }
            fh.write(json.dumps(header) + "\n")
            for s in self.steps:
                fh.write(json.dumps(s) + "\n")


def record_from_jsonl(path) -> MatchRecord:
    with open(path) as fh:
        header = json.loads(fh.readline())
        steps = [json.loads(line) for line in fh if line.strip()]
    return MatchRecord(
        seed=header["seed"],
        team_a=header["team_a"],
        team_b=header["team_b"],
        strict_deadline=header["strict_deadline"],
        max_steps=header["max_steps"],
        budget_ms=header["budget_ms"],
        outcome=header["outcome"],
        steps=steps,
        timeout_count=header["timeout_count"],
        error_agent=header["error_agent"],
    )


def records_equal(a: MatchRecord, b: MatchRecord, ignore_latency: bool = True) -> bool:
    """Replay equality; latencies are wall-clock noise and ignored by
    default."""
    if (a.seed, a.team_a, a.team_b, a.outcome, len(a.steps)) != (
        b.seed, b.team_a, b.team_b, b.outcome, len(b.steps)
    ):
        return False
    for sa, sb in zip(a.steps, b.steps):
        if sa["step"] != sb["step"] or sa["actions"] != sb["actions"] or sa["alive"] != sb["alive"]:
            return False
        if not ignore_latency and sa["latencies_ms"] != sb["latencies_ms"]:
            return False
    return True


def agent_seed(match_seed: int, agent_id: int) -> int:
    # distinct, stable streams per agent within a match
    return int(np.random.SeedSequence([match_seed, agent_id]).generate_state(1)[0])


def run_match(config: MatchConfig) -> MatchRecord:
    factory_a = parse_agent_spec(config.team_a)
    factory_b = parse_agent_spec(config.team_b)
    agents = [
        factory_a(0), factory_b(1), factory_a(2), factory_b(3),
    ]
    for i, agent in enumerate(agents):
        agent.reset(agent_seed(config.seed, i))

    record = MatchRecord(
        seed=config.seed,
        team_a=config.team_a,
        team_b=config.team_b,
        strict_deadline=config.strict_deadline,
        max_steps=config.max_steps,
        budget_ms=config.budget_ms,
    )
    state = initial_state(config.seed)
    while outcome(state, config.max_steps) == Outcome.ONGOING:
        actions = [int(Action.STOP)] * 4
        latencies = [0.0] * 4
        for i in range(4):
            if not state.alive[i]:
                continue
            obs = observe(state, i)
            start = time.monotonic()
            deadline = None
            if config.strict_deadline:
                deadline = start + (config.budget_ms - DEADLINE_MARGIN_MS) / 1000.0
            try:
                action = int(agents[i].act(obs, deadline))
            except Exception:
                record.error_agent = i
                record.outcome = (Outcome.WIN_B if i % 2 == 0 else Outcome.WIN_A).name
                return record
            latencies[i] = (time.monotonic() - start) * 1000.0
            if config.strict_deadline and latencies[i] > config.budget_ms:
                action = int(Action.STOP)
                record.timeout_count += 1
            actions[i] = action
        prev_step = state.step
        state = step(state, actions)
        record.steps.append(
            {
                "step": prev_step,
                "actions": actions,
                "latencies_ms": [round(v, 3) for v in latencies],
                "alive": [bool(v) for v in state.alive],
            }
        )
    record.outcome = outcome(state, config.max_steps).name
    return record


def verify_replay(record: MatchRecord) -> bool:
    """Re-simulate the recorded actions from the seed and check that every
    alive line and the final outcome match."""
    state = initial_state(record.seed)
    for s in record.steps:
        if state.step != s["step"]:
            return False
        state = step(state, s["actions"])
        if [bool(v) for v in state.alive] != s["alive"]:
            return False
    return outcome(state, record.max_steps).name == record.outcome


@dataclass
class SeriesStats:
    n: int = 0
    wins: int = 0
    losses: int = 0
    ties: int = 0
    p50_ms: float = 0.0
    p99_ms: float = 0.0
    timeout_count: int = 0

    @property
    def win_rate(self) -> float:
        return self.wins / self.n if self.n else 0.0

    @property
    def decided_win_rate(self) -> float:
        decided = self.wins + self.losses
        return self.wins / decided if decided else 0.0


def _series_worker(args) -> tuple[str, bool, list[float], int]:
    config, swapped = args
    record = run_match(config)
    return record.outcome, swapped, record.team_a_latencies(), record.timeout_count


def default_workers() -> int:
    raw = os.environ.get("POMMER_WORKERS", "").strip()
    if raw:
        return max(1, int(raw))
    return 1


def run_series(
    team_a: str,
    team_b: str,
    n: int,
    base_seed: int = 0,
    swap_sides: bool = False,
    strict_deadline: bool = False,
    max_steps: int = MAX_STEPS,
    budget_ms: float = 100.0,
    workers: int | None = None,
) -> SeriesStats:
    """Play n matches on seeds base_seed..base_seed+n-1 and tally them for
    the ``team_a`` spec.  With ``swap_sides`` odd seeds put that spec on team
    B, cancelling any side bias.  Seeds are pre-assigned, so results do not
    depend on the worker count."""
    jobs = []
    for i in range(n):
        swapped = swap_sides and i % 2 == 1
        config = MatchConfig(
            seed=base_seed + i,
            team_a=team_b if swapped else team_a,
            team_b=team_a if swapped else team_b,
            strict_deadline=strict_deadline,
            max_steps=max_steps,
            budget_ms=budget_ms,
        )
        jobs.append((config, swapped))

    workers = default_workers() if workers is None else max(1, workers)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_series_worker, jobs, chunksize=8))
    else:
        results = [_series_worker(job) for job in jobs]

    stats = SeriesStats(n=n)
    latencies: list[float] = []
    for outcome_name, swapped, lats, timeouts in results:
        won_name = Outcome.WIN_B.name if swapped else Outcome.WIN_A.name
        lost_name = Outcome.WIN_A.name if swapped else Outcome.WIN_B.name
        if outcome_name == won_name:
            stats.wins += 1
        elif outcome_name == lost_name:
            stats.losses += 1
        else:
            stats.ties += 1
        if not swapped:
            latencies.extend(lats)
            stats.timeout_count += timeouts
    if latencies:
        arr = np.asarray(latencies)
        stats.p50_ms = float(np.percentile(arr, 50))
        stats.p99_ms = float(np.percentile(arr, 99))
    return stats


def sweep_pessimism(
    levels,
    n: int,
    opponent: str = "baseline",
    base_seed: int = 0,
    agent_template: str = "solo:level={level}",
    swap_sides: bool = True,
    strict_deadline: bool = False,
    workers: int | None = None,
) -> list[tuple[int, SeriesStats]]:
    """Run one series per pessimism level against a fixed opponent."""
    rows = []
    for level in levels:
        spec = agent_template.format(level=level)
        stats = run_series(
            spec,
            opponent,
            n,
            base_seed=base_seed,
            swap_sides=swap_sides,
            strict_deadline=strict_deadline,
            workers=workers,
        )
        rows.append((level, stats))
    return rows


SWEEP_COLUMNS = ("level", "wins", "losses", "ties", "p50_ms", "p99_ms", "timeout_count")


def write_sweep_csv(path, rows) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_COLUMNS)
        for level, stats in rows:
            writer.writerow(
                [
                    level,
                    stats.wins,
                    stats.losses,
                    stats.ties,
                    f"{stats.p50_ms:.3f}",
                    f"{stats.p99_ms:.3f}",
                    stats.timeout_count,
                ]
            )
