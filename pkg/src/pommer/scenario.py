"""Deterministic pessimistic scenarios.

A scenario is a branch-free forecast of the board over a fixed horizon:
flames, bomb timers, kicked bombs already in motion and chained explosions are
rolled forward exactly, while the agents not excluded from the scenario are
"smeared" over every cell they could occupy.  Two occupancy modes exist:

* ``BOOLEAN``: occupancy grows for ``level`` steps and then freezes.  A cell
  counts as occupied from the first step the agent could have reached it.
  ``level`` is the pessimism level; level 0 treats the agents as static
  bodies.
* ``EARLIEST``: occupancy grows over the whole horizon and the step of first
  possible occupation is kept per cell, to be compared against own arrival
  times.

Future kicks are never projected: a scenario only extrapolates motion that is
already under way.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from . import kernels
from .constants import PASSAGE, RIGID, WOOD
from .engine import B_COL, B_ROW, GameState
from .kernels import NEVER

DEFAULT_HORIZON = 12  # covers a fresh bomb (10) plus its flames (2)


class OccMode(IntEnum):
    BOOLEAN = 0
    EARLIEST = 1


@dataclass(frozen=True)
class PessimismParams:
    """Knobs for scenario generation."""

    level: int = 3
    horizon: int = DEFAULT_HORIZON
    mode: OccMode = OccMode.BOOLEAN

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if self.level < 0:
            raise ValueError("level must be non-negative")


@dataclass
class Scenario:
    """Rolled-out board sequence for t = 0..horizon."""

    horizon: int
    walls: np.ndarray          # uint8 (T+1, H, W)
    bombs: np.ndarray          # uint8 (T+1, H, W)
    flames: np.ndarray         # uint8 (T+1, H, W) remaining life
    occupied_from: np.ndarray  # int16 (H, W), kernels.NEVER if never occupied
    excluded: tuple[int, ...]
    params: PessimismParams

    @property
    def shape(self) -> tuple[int, int]:
        return self.occupied_from.shape

    def occupied(self, t: int) -> np.ndarray:
        """Boolean occupancy mask at step t."""
        return self.occupied_from <= t

    def blocked(self, t: int) -> np.ndarray:
        """Cells that cannot be entered at step t (walls, flames, occupancy)."""
        return (self.walls[t] == 1) | (self.flames[t] > 0) | self.occupied(t)

    def to_jsonl(self, path) -> None:
        """Dump as JSON lines: a header, then one line per step."""
        with open(path, "w") as fh:
            header = {
                "horizon": self.horizon,
                "shape": list(self.shape),
                "excluded": list(self.excluded),
                "level": self.params.level,
                "mode": self.params.mode.name,
                "occupied_from": self.occupied_from.tolist(),
            }
            fh.write(json.dumps(header) + "\n")
            for t in range(self.horizon + 1):
                line = {
                    "t": t,
                    "walls": self.walls[t].tolist(),
                    "bombs": self.bombs[t].tolist(),
                    "flames": self.flames[t].tolist(),
                }
                fh.write(json.dumps(line) + "\n")


def scenario_from_jsonl(path) -> Scenario:
    with open(path) as fh:
        header = json.loads(fh.readline())
        T = header["horizon"]
        H, W = header["shape"]
        walls = np.zeros((T + 1, H, W), np.uint8)
        bombs = np.zeros((T + 1, H, W), np.uint8)
        flames = np.zeros((T + 1, H, W), np.uint8)
        for _ in range(T + 1):
            line = json.loads(fh.readline())
            t = line["t"]
            walls[t] = np.array(line["walls"], np.uint8)
            bombs[t] = np.array(line["bombs"], np.uint8)
            flames[t] = np.array(line["flames"], np.uint8)
    return Scenario(
        horizon=T,
        walls=walls,
        bombs=bombs,
        flames=flames,
        occupied_from=np.array(header["occupied_from"], np.int16),
        excluded=tuple(header["excluded"]),
        params=PessimismParams(
            level=header["level"], horizon=T, mode=OccMode[header["mode"]]
        ),
    )


def _occupancy_seed(state: GameState, excluded: frozenset[int]) -> np.ndarray:
    occ = np.zeros(state.grid.shape, np.uint8)
    for i in range(4):
        if i in excluded or not state.alive[i]:
            continue
        r, c = int(state.agent_pos[i, 0]), int(state.agent_pos[i, 1])
        occ[r, c] = 1
    return occ


def generate(state: GameState, excluded, params: PessimismParams) -> Scenario:
    """Roll the board forward under ``params`` with the agents in ``excluded``
    removed from occupancy (typically the one being evaluated)."""
    excluded = frozenset(excluded)
    occ = _occupancy_seed(state, excluded)
    expand = params.horizon if params.mode == OccMode.EARLIEST else min(params.level, params.horizon)
    walls_t, bombs_t, flames_t, occ_first = kernels.roll_scenario(
        state.grid,
        state.hidden_items,
        state.bombs,
        state.flames,
        occ,
        expand,
        params.horizon,
    )
    return Scenario(
        horizon=params.horizon,
        walls=walls_t,
        bombs=bombs_t,
        flames=flames_t,
        occupied_from=occ_first,
        excluded=tuple(sorted(excluded)),
        params=params,
    )


def generate_static(
    state: GameState, excluded=None, params: PessimismParams | None = None
) -> Scenario:
    """Scenario in which no agent moves.  With the default ``excluded`` (all
    agents) this is the pure physics projection; with a partial exclusion the
    remaining agents stand as static obstacles."""
    if excluded is None:
        excluded = range(4)
    base = params or PessimismParams()
    static = PessimismParams(level=0, horizon=base.horizon, mode=OccMode.BOOLEAN)
    return generate(state, excluded, static)
