"""Belief tracking under fog of war.

The tracker keeps a per-agent picture of the board assembled from successive
observations: the last seen cell contents, bombs and flames projected forward
while out of view, and the last known position and stats of every agent.
:func:`to_search_state` materialises that picture as a concrete game state the
search can step and roll scenarios from.

Projection is deliberately simple physics: out-of-view bombs tick, slide with
the velocity they had, explode on schedule and chain; projected burned wood
turns into passage because the hidden item is unknown.  Agents are never
simulated: an unseen agent stays where it was last seen until the spot is
observed empty, after which it is unknown and left out of the search state.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import (
    BOARD_SIZE,
    CORNERS,
    DEFAULT_AMMO,
    DEFAULT_BLAST,
    FOG,
    PASSAGE,
    RIGID,
    VEL_DELTAS,
    WOOD,
)
from .engine import (
    B_BLAST,
    B_COL,
    B_OWNER,
    B_ROW,
    B_TIMER,
    B_VEL,
    GameState,
    Observation,
    blast_cells,
    empty_bombs,
)


@dataclass
class Belief:
    self_id: int
    step: int
    grid: np.ndarray       # int8 (H, W), FOG where unknown
    flames: np.ndarray     # int16 (H, W)
    bombs: np.ndarray      # int64 (n, 6), owner always -1
    agent_pos: np.ndarray  # int16 (4, 2), (-1, -1) unknown
    last_seen: np.ndarray  # int16 (4,), -1 never
    alive: np.ndarray      # bool (4,)
    ammo: np.ndarray       # int16 (4,)
    blast: np.ndarray      # int16 (4,)
    can_kick: np.ndarray   # int8 (4,)

    def copy(self) -> "Belief":
        return Belief(
            self_id=self.self_id,
            step=self.step,
            grid=self.grid.copy(),
            flames=self.flames.copy(),
            bombs=self.bombs.copy(),
            agent_pos=self.agent_pos.copy(),
            last_seen=self.last_seen.copy(),
            alive=self.alive.copy(),
            ammo=self.ammo.copy(),
            blast=self.blast.copy(),
            can_kick=self.can_kick.copy(),
        )

    def known_agents(self) -> list[int]:
        """Alive agents with a believed position."""
        return [
            i for i in range(4) if self.alive[i] and self.agent_pos[i, 0] >= 0
        ]


def _window_bounds(obs: Observation) -> tuple[int, int, int, int]:
    known = obs.grid != FOG
    rows = np.flatnonzero(known.any(axis=1))
    cols = np.flatnonzero(known.any(axis=0))
    return int(rows[0]), int(rows[-1]), int(cols[0]), int(cols[-1])


def _overlay(belief: Belief, obs: Observation) -> None:
    r0, r1, c0, c1 = _window_bounds(obs)
    belief.grid[r0 : r1 + 1, c0 : c1 + 1] = obs.grid[r0 : r1 + 1, c0 : c1 + 1]
    belief.flames[r0 : r1 + 1, c0 : c1 + 1] = obs.flames[r0 : r1 + 1, c0 : c1 + 1]

    keep = [
        b for b in belief.bombs if not (r0 <= b[B_ROW] <= r1 and c0 <= b[B_COL] <= c1)
    ]
    owner_at = {
        (int(b[B_ROW]), int(b[B_COL])): int(b[B_OWNER]) for b in belief.bombs
    }
    seen = [
        [int(b[0]), int(b[1]), owner_at.get((int(b[0]), int(b[1])), -1),
         int(b[2]), int(b[3]), int(b[4])]
        for b in obs.bombs
    ]
    rows = keep + [np.array(b, np.int64) for b in seen]
    belief.bombs = np.stack(rows) if rows else empty_bombs()

    belief.alive = obs.alive.copy()
    for i in range(4):
        if obs.visible[i]:
            belief.agent_pos[i] = obs.agent_pos[i]
            belief.last_seen[i] = obs.step
            belief.ammo[i] = obs.ammo[i]
            belief.blast[i] = obs.blast[i]
            belief.can_kick[i] = obs.can_kick[i]
        else:
            pr, pc = int(belief.agent_pos[i, 0]), int(belief.agent_pos[i, 1])
            if pr >= 0 and r0 <= pr <= r1 and c0 <= pc <= c1:
                belief.agent_pos[i] = (-1, -1)  # observed empty: belief falsified
    belief.step = obs.step


def init_belief(obs: Observation) -> Belief:
    H, W = obs.grid.shape
    belief = Belief(
        self_id=obs.self_id,
        step=obs.step,
        grid=np.full((H, W), FOG, np.int8),
        flames=np.zeros((H, W), np.int16),
        bombs=empty_bombs(),
        agent_pos=np.full((4, 2), -1, np.int16),
        last_seen=np.full(4, -1, np.int16),
        alive=np.ones(4, bool),
        ammo=np.full(4, DEFAULT_AMMO, np.int16),
        blast=np.full(4, DEFAULT_BLAST, np.int16),
        can_kick=np.zeros(4, np.int8),
    )
    if obs.step == 0 and (H, W) == (BOARD_SIZE, BOARD_SIZE):
        # spawn corners are public knowledge on the standard board
        belief.agent_pos = np.array(CORNERS, np.int16)
        belief.last_seen[:] = 0
    _overlay(belief, obs)
    return belief


def _project(belief: Belief) -> None:
    """Advance believed flames and bombs one step (no agents involved)."""
    grid = belief.grid
    flames = belief.flames
    H, W = grid.shape
    np.subtract(flames, 1, out=flames, where=flames > 0)

    bombs = belief.bombs
    for i in range(bombs.shape[0]):
        bombs[i, B_TIMER] -= 1
        vel = int(bombs[i, B_VEL])
        if vel != 0:
            dr, dc = VEL_DELTAS[vel]
            nr, nc = int(bombs[i, B_ROW]) + dr, int(bombs[i, B_COL]) + dc
            blocked = (
                not (0 <= nr < H and 0 <= nc < W)
                or grid[nr, nc] not in (PASSAGE, FOG)
                or any(
                    j != i and bombs[j, B_ROW] == nr and bombs[j, B_COL] == nc
                    for j in range(bombs.shape[0])
                )
            )
            if blocked:
                bombs[i, B_VEL] = 0
            else:
                bombs[i, B_ROW], bombs[i, B_COL] = nr, nc

    n = bombs.shape[0]
    exploding = [
        bombs[i, B_TIMER] <= 0 or flames[bombs[i, B_ROW], bombs[i, B_COL]] > 0
        for i in range(n)
    ]
    blast_set: set[tuple[int, int]] = set()
    progress = True
    processed = [False] * n
    while progress:
        progress = False
        for i in range(n):
            if exploding[i] and not processed[i]:
                processed[i] = True
                progress = True
                blast_set.update(
                    blast_cells(grid, int(bombs[i, B_ROW]), int(bombs[i, B_COL]), int(bombs[i, B_BLAST]))
                )
        for i in range(n):
            if not exploding[i] and (int(bombs[i, B_ROW]), int(bombs[i, B_COL])) in blast_set:
                exploding[i] = True
                progress = True
    if any(exploding):
        belief.bombs = bombs[np.array([not e for e in exploding], bool)]
        for r, c in blast_set:
            if grid[r, c] != RIGID:
                if grid[r, c] != FOG:
                    grid[r, c] = PASSAGE  # hidden item unknown; assume none
                flames[r, c] = 2


def update(belief: Belief, obs: Observation, last_action: int | None = None) -> Belief:
    """One-step belief update: project forward, then overlay the new view.

    ``last_action`` is the action the owner of this belief took to get here;
    passing it lets the tracker mark a just-placed bomb as its own, which the
    search needs to separate its pressure from background bombs."""
    if obs.self_id != belief.self_id:
        raise ValueError("observation belongs to a different agent")
    if obs.step != belief.step + 1:
        raise ValueError(
            f"observation step {obs.step} does not follow belief step {belief.step}"
        )
    nxt = belief.copy()
    _project(nxt)
    _overlay(nxt, obs)
    if last_action is not None and int(last_action) == 5:  # PlaceBomb
        r, c = int(obs.agent_pos[obs.self_id, 0]), int(obs.agent_pos[obs.self_id, 1])
        for b in nxt.bombs:
            if int(b[B_ROW]) == r and int(b[B_COL]) == c and int(b[B_OWNER]) < 0:
                b[B_OWNER] = obs.self_id
    return nxt


def _nudge(grid: np.ndarray, taken: set, r: int, c: int) -> tuple[int, int]:
    """Closest standable cell to (r, c), in (distance, row, col) order."""
    H, W = grid.shape
    best = None
    for rr in range(H):
        for cc in range(W):
            if grid[rr, cc] in (RIGID, WOOD) or (rr, cc) in taken:
                continue
            key = (abs(rr - r) + abs(cc - c), rr, cc)
            if best is None or key < best:
                best = key
    if best is None:
        raise RuntimeError("no standable cell on the board")
    return best[1], best[2]


def to_search_state(belief: Belief) -> GameState:
    """Materialise the belief as a concrete state. Unknown cells become
    passage; alive agents without a believed position are left out (marked
    dead), so callers must not treat the result's outcome as the game's."""
    grid = belief.grid.copy()
    grid[grid == FOG] = PASSAGE
    H, W = grid.shape

    agent_pos = np.zeros((4, 2), np.int16)
    alive = np.zeros(4, bool)
    taken: set[tuple[int, int]] = set()
    for i in range(4):
        if not belief.alive[i] or belief.agent_pos[i, 0] < 0:
            continue
        r, c = int(belief.agent_pos[i, 0]), int(belief.agent_pos[i, 1])
        if grid[r, c] in (RIGID, WOOD) or (r, c) in taken:
            r, c = _nudge(grid, taken, r, c)
        alive[i] = True
        agent_pos[i] = (r, c)
        taken.add((r, c))

    ammo = np.where(belief.ammo >= 0, belief.ammo, DEFAULT_AMMO).astype(np.int16)
    blast = np.where(belief.blast >= 0, belief.blast, DEFAULT_BLAST).astype(np.int16)
    kick = belief.can_kick == 1
    return GameState(
        grid=grid,
        hidden_items=np.zeros((H, W), np.int8),
        agent_pos=agent_pos,
        alive=alive,
        ammo=ammo,
        blast=blast,
        can_kick=kick,
        bombs=belief.bombs.copy(),
        flames=belief.flames.copy(),
        step=belief.step,
    )
