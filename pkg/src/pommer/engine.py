"""Deterministic forward model of the team bomber gridworld.

A :class:`GameState` is a value: :func:`step` never mutates its input and the
same (state, actions) pair always produces a bit-identical successor.  Every
rule that the step function applies, including the exact resolution order, is
written out in RULES.md.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import (
    BOARD_SIZE,
    BOMB_LIFE,
    CORNERS,
    DEFAULT_AMMO,
    DEFAULT_BLAST,
    FOG,
    ITEM_AMMO,
    ITEM_KICK,
    ITEM_RANGE,
    MAX_STEPS,
    MOVE_DELTAS,
    NUM_RIGID,
    NUM_WOOD,
    NUM_ITEMS,
    PASSAGE,
    RIGID,
    VEL_DELTAS,
    VIEW_RADIUS,
    WOOD,
    Action,
    Outcome,
)

# bomb array columns
B_ROW, B_COL, B_OWNER, B_TIMER, B_BLAST, B_VEL = range(6)

_DIR_OF_ACTION = {Action.UP: 1, Action.DOWN: 2, Action.LEFT: 3, Action.RIGHT: 4}


class EngineError(RuntimeError):
    """A state handed to the engine violates its invariants."""


def empty_bombs() -> np.ndarray:
    return np.zeros((0, 6), dtype=np.int64)


@dataclass
class GameState:
    """Ground-truth board. Treated as immutable; use :meth:`copy` to branch."""

    grid: np.ndarray          # int8 (H, W) cell codes
    hidden_items: np.ndarray  # int8 (H, W) item revealed when wood burns
    agent_pos: np.ndarray     # int16 (4, 2)
    alive: np.ndarray         # bool (4,)
    ammo: np.ndarray          # int16 (4,)
    blast: np.ndarray         # int16 (4,)
    can_kick: np.ndarray      # bool (4,)
    bombs: np.ndarray = field(default_factory=empty_bombs)  # int64 (n, 6)
    flames: np.ndarray = field(default_factory=lambda: np.zeros((BOARD_SIZE, BOARD_SIZE), np.int16))
    step: int = 0

    @property
    def shape(self) -> tuple[int, int]:
        return self.grid.shape

    def copy(self) -> "GameState":
        return GameState(
            grid=self.grid.copy(),
            hidden_items=self.hidden_items.copy(),
            agent_pos=self.agent_pos.copy(),
            alive=self.alive.copy(),
            ammo=self.ammo.copy(),
            blast=self.blast.copy(),
            can_kick=self.can_kick.copy(),
            bombs=self.bombs.copy(),
            flames=self.flames.copy(),
            step=self.step,
        )


@dataclass
class Observation:
    """One agent's fogged view. Own stats are always present; other agents
    expose position and public stats only while inside the window. The alive
    flags are global, as in the reference environment."""

    self_id: int
    step: int
    grid: np.ndarray       # int8 (H, W), FOG outside the window
    bombs: np.ndarray      # int64 (k, 5): row, col, timer, blast, vel
    flames: np.ndarray     # int16 (H, W), zero outside the window
    agent_pos: np.ndarray  # int16 (4, 2), (-1, -1) when hidden
    ammo: np.ndarray       # int16 (4,), -1 when hidden
    blast: np.ndarray      # int16 (4,), -1 when hidden
    can_kick: np.ndarray   # int8 (4,), -1 hidden / 0 / 1
    alive: np.ndarray      # bool (4,)
    visible: np.ndarray    # bool (4,)


def states_equal(a: GameState, b: GameState) -> bool:
    if a.step != b.step:
        return False
    arrays = (
        (a.grid, b.grid),
        (a.hidden_items, b.hidden_items),
        (a.agent_pos, b.agent_pos),
        (a.alive, b.alive),
        (a.ammo, b.ammo),
        (a.blast, b.blast),
        (a.can_kick, b.can_kick),
        (a.bombs, b.bombs),
        (a.flames, b.flames),
    )
    return all(x.shape == y.shape and np.array_equal(x, y) for x, y in arrays)


def state_fingerprint(state: GameState) -> bytes:
    parts = [
        state.grid.tobytes(), state.hidden_items.tobytes(), state.agent_pos.tobytes(),
        state.alive.tobytes(), state.ammo.tobytes(), state.blast.tobytes(),
        state.can_kick.tobytes(), state.bombs.tobytes(), state.flames.tobytes(),
        state.step.to_bytes(4, "little"),
    ]
    return b"".join(parts)


def validate_state(state: GameState, board_size: int | None = None) -> None:
    """Raise :class:`EngineError` on any invariant violation."""
    H, W = state.grid.shape
    if board_size is not None and (H, W) != (board_size, board_size):
        raise EngineError(f"expected a {board_size}x{board_size} board, got {H}x{W}")
    seen: set[tuple[int, int]] = set()
    for i in range(4):
        r, c = int(state.agent_pos[i, 0]), int(state.agent_pos[i, 1])
        if not state.alive[i]:
            continue
        if not (0 <= r < H and 0 <= c < W):
            raise EngineError(f"agent {i} off board at {(r, c)}")
        if state.grid[r, c] in (RIGID, WOOD):
            raise EngineError(f"agent {i} inside a wall at {(r, c)}")
        if (r, c) in seen:
            raise EngineError(f"two alive agents share cell {(r, c)}")
        seen.add((r, c))
        if state.ammo[i] < 0 or state.blast[i] < 2:
            raise EngineError(f"agent {i} has invalid ammo/blast")
    bomb_cells: set[tuple[int, int]] = set()
    for b in state.bombs:
        r, c = int(b[B_ROW]), int(b[B_COL])
        if not (0 <= r < H and 0 <= c < W):
            raise EngineError(f"bomb off board at {(r, c)}")
        if state.grid[r, c] in (RIGID, WOOD):
            raise EngineError(f"bomb inside a wall at {(r, c)}")
        if (r, c) in bomb_cells:
            raise EngineError(f"two bombs share cell {(r, c)}")
        bomb_cells.add((r, c))
        if not (0 <= b[B_TIMER] <= BOMB_LIFE):
            raise EngineError(f"bomb timer {b[B_TIMER]} out of range")
    if (state.hidden_items[state.grid != WOOD] != 0).any():
        raise EngineError("hidden item outside a wood cell")
    if state.step < 0:
        raise EngineError("negative step counter")


# ---------------------------------------------------------------------------
# board generation
# ---------------------------------------------------------------------------

def _symmetric_cells(rng: np.random.Generator, pool: list[tuple[int, int]], n_pairs: int):
    order = rng.permutation(len(pool))
    return [pool[i] for i in order[:n_pairs]]


def _connected(grid: np.ndarray, corners) -> bool:
    """All corners mutually reachable through non-rigid cells."""
    H, W = grid.shape
    seen = np.zeros((H, W), bool)
    stack = [corners[0]]
    seen[corners[0]] = True
    while stack:
        r, c = stack.pop()
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            nr, nc = r + dr, c + dc
            if 0 <= nr < H and 0 <= nc < W and not seen[nr, nc] and grid[nr, nc] != RIGID:
                seen[nr, nc] = True
                stack.append((nr, nc))
    return all(seen[p] for p in corners)


def initial_state(seed: int, max_attempts: int = 200) -> GameState:
    """Seeded 11x11 starting board: agents in the four corners (teammates
    opposite), diagonally symmetric rigid/wood layout, items hidden under a
    symmetric subset of the wood, and all corners connected through
    non-rigid cells."""
    rng = np.random.default_rng(seed)
    n = BOARD_SIZE
    reserved = set()
    for r, c in CORNERS:
        reserved.add((r, c))
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            nr, nc = r + dr, c + dc
            if 1 <= nr <= n - 2 and 1 <= nc <= n - 2:
                reserved.add((nr, nc))

    # strictly-upper-triangle cells whose mirror is also free; placing the
    # pair (r, c), (c, r) keeps the board symmetric under transposition
    pool = [
        (r, c)
        for r in range(n)
        for c in range(r + 1, n)
        if (r, c) not in reserved and (c, r) not in reserved
    ]

    for _ in range(max_attempts):
        grid = np.zeros((n, n), np.int8)
        hidden = np.zeros((n, n), np.int8)
        order = rng.permutation(len(pool))
        rigid_pairs = [pool[i] for i in order[: NUM_RIGID // 2]]
        wood_pairs = [pool[i] for i in order[NUM_RIGID // 2 : (NUM_RIGID + NUM_WOOD) // 2]]
        for r, c in rigid_pairs:
            grid[r, c] = RIGID
            grid[c, r] = RIGID
        for r, c in wood_pairs:
            grid[r, c] = WOOD
            grid[c, r] = WOOD
        item_idx = rng.permutation(len(wood_pairs))[: NUM_ITEMS // 2]
        for i in item_idx:
            r, c = wood_pairs[i]
            kind = int(rng.integers(ITEM_AMMO, ITEM_KICK + 1))
            hidden[r, c] = kind
            hidden[c, r] = kind
        if _connected(grid, CORNERS):
            break
    else:  # pragma: no cover - connectivity failure is astronomically rare
        grid = np.zeros((n, n), np.int8)
        hidden = np.zeros((n, n), np.int8)

    return GameState(
        grid=grid,
        hidden_items=hidden,
        agent_pos=np.array(CORNERS, np.int16),
        alive=np.ones(4, bool),
        ammo=np.full(4, DEFAULT_AMMO, np.int16),
        blast=np.full(4, DEFAULT_BLAST, np.int16),
        can_kick=np.zeros(4, bool),
        bombs=empty_bombs(),
        flames=np.zeros((n, n), np.int16),
        step=0,
    )


# ---------------------------------------------------------------------------
# transition
# ---------------------------------------------------------------------------

def blast_cells(grid: np.ndarray, r0: int, c0: int, strength: int) -> list[tuple[int, int]]:
    """Cells a bomb at (r0, c0) covers: a cross with arms of strength-1 cells.
    Rigid walls block a ray and are not burned; wood and items are burned and
    absorb the ray."""
    H, W = grid.shape
    cells = [(r0, c0)]
    for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
        for k in range(1, strength):
            rr, cc = r0 + dr * k, c0 + dc * k
            if not (0 <= rr < H and 0 <= cc < W):
                break
            cell = grid[rr, cc]
            if cell == RIGID:
                break
            cells.append((rr, cc))
            if cell != PASSAGE:
                break
    return cells


def _bomb_at(bombs: np.ndarray, r: int, c: int, skip: int = -1) -> int:
    for i in range(bombs.shape[0]):
        if i != skip and bombs[i, B_ROW] == r and bombs[i, B_COL] == c:
            return i
    return -1


def step(state: GameState, actions, require_ongoing: bool = True) -> GameState:
    """One simultaneous step. Resolution order: flame decay; bomb tick and
    slide; agent moves/placements with bounce-back conflict resolution;
    chained explosions; flame deaths; item pickup; step counter.

    ``require_ongoing=False`` skips the terminal-state guard; search states
    built from partial beliefs may lack a whole team yet still need stepping.
    """
    a_alive = [bool(state.alive[i]) for i in range(4)]
    if require_ongoing and (not any(a_alive[0::2]) or not any(a_alive[1::2])):
        raise EngineError("step() called on a terminal state")
    pos = [(int(state.agent_pos[i, 0]), int(state.agent_pos[i, 1])) for i in range(4)]
    occupied = [p for i, p in enumerate(pos) if a_alive[i]]
    if len(set(occupied)) != len(occupied):
        raise EngineError("two alive agents share a cell")

    nxt = state.copy()
    grid = nxt.grid
    flames = nxt.flames
    bombs = nxt.bombs
    H, W = grid.shape

    # (0) flames from two steps ago expire
    np.subtract(flames, 1, out=flames, where=flames > 0)

    # (1) bombs tick; kicked bombs advance one cell or stop
    for i in range(bombs.shape[0]):
        bombs[i, B_TIMER] -= 1
        vel = int(bombs[i, B_VEL])
        if vel != 0:
            dr, dc = VEL_DELTAS[vel]
            nr, nc = int(bombs[i, B_ROW]) + dr, int(bombs[i, B_COL]) + dc
            blocked = not (0 <= nr < H and 0 <= nc < W) or grid[nr, nc] != PASSAGE
            if not blocked and _bomb_at(bombs, nr, nc, skip=i) >= 0:
                blocked = True
            if not blocked:
                for j in range(4):
                    if a_alive[j] and pos[j] == (nr, nc):
                        blocked = True
                        break
            if blocked:
                bombs[i, B_VEL] = 0
            else:
                bombs[i, B_ROW], bombs[i, B_COL] = nr, nc

    # (2) agent movement with bounce-back resolution, then bomb placement
    acts = [Action.STOP if not a_alive[i] else Action(int(actions[i])) for i in range(4)]
    intent: list[tuple[int, int] | None] = [None] * 4
    kick: list[tuple[int, tuple[int, int]] | None] = [None] * 4
    for i in range(4):
        if acts[i] not in _DIR_OF_ACTION:
            continue
        dr, dc = MOVE_DELTAS[acts[i]]
        tr, tc = pos[i][0] + dr, pos[i][1] + dc
        if not (0 <= tr < H and 0 <= tc < W) or grid[tr, tc] in (RIGID, WOOD):
            continue
        b = _bomb_at(bombs, tr, tc)
        if b >= 0:
            br, bc = tr + dr, tc + dc
            can = (
                bool(state.can_kick[i])
                and 0 <= br < H and 0 <= bc < W
                and grid[br, bc] == PASSAGE
                and _bomb_at(bombs, br, bc) < 0
                and not any(a_alive[j] and pos[j] == (br, bc) for j in range(4))
            )
            if not can:
                continue
            kick[i] = (b, (br, bc))
        intent[i] = (tr, tc)

    changed = True
    while changed:
        changed = False
        # same-target conflicts cancel as a group, so no party inherits the cell
        targets: dict[tuple[int, int], list[int]] = {}
        for i in range(4):
            if intent[i] is not None:
                targets.setdefault(intent[i], []).append(i)
        for movers in targets.values():
            if len(movers) > 1:
                for i in movers:
                    intent[i] = None
                    kick[i] = None
                changed = True
        for i in range(4):
            if intent[i] is None:
                continue
            clash = False
            for j in range(4):
                if j == i or not a_alive[j]:
                    continue
                if intent[j] is None and pos[j] == intent[i]:
                    clash = True  # target holds a staying or bounced agent
                elif intent[j] == pos[i] and intent[i] == pos[j]:
                    clash = True  # swap-through is forbidden
            if clash:
                intent[i] = None
                kick[i] = None
                changed = True

    for i in range(4):
        if intent[i] is not None:
            if kick[i] is not None:
                b, (br, bc) = kick[i]
                bombs[b, B_ROW], bombs[b, B_COL] = br, bc
                bombs[b, B_VEL] = _DIR_OF_ACTION[acts[i]]
            pos[i] = intent[i]
            nxt.agent_pos[i, 0], nxt.agent_pos[i, 1] = intent[i]

    new_bombs = []
    for i in range(4):
        if acts[i] == Action.BOMB and a_alive[i] and nxt.ammo[i] > 0:
            if _bomb_at(bombs, pos[i][0], pos[i][1]) < 0 and not any(
                nb[0] == pos[i][0] and nb[1] == pos[i][1] for nb in new_bombs
            ):
                new_bombs.append([pos[i][0], pos[i][1], i, BOMB_LIFE, int(nxt.blast[i]), 0])
                nxt.ammo[i] -= 1
    if new_bombs:
        bombs = np.concatenate([bombs, np.array(new_bombs, np.int64)])
        nxt.bombs = bombs

    # (3) explosions, chained to a fixed point
    n_bombs = bombs.shape[0]
    exploding = [
        bombs[i, B_TIMER] <= 0 or flames[bombs[i, B_ROW], bombs[i, B_COL]] > 0
        for i in range(n_bombs)
    ]
    blast_set: set[tuple[int, int]] = set()
    processed = [False] * n_bombs
    progress = True
    while progress:
        progress = False
        for i in range(n_bombs):
            if exploding[i] and not processed[i]:
                processed[i] = True
                progress = True
                blast_set.update(
                    blast_cells(grid, int(bombs[i, B_ROW]), int(bombs[i, B_COL]), int(bombs[i, B_BLAST]))
                )
        for i in range(n_bombs):
            if not exploding[i] and (int(bombs[i, B_ROW]), int(bombs[i, B_COL])) in blast_set:
                exploding[i] = True
                progress = True
    if any(exploding):
        for i in range(n_bombs):
            if exploding[i]:
                owner = int(bombs[i, B_OWNER])
                if owner >= 0:
                    nxt.ammo[owner] += 1
        nxt.bombs = bombs[np.array([not e for e in exploding], bool)]
        for r, c in blast_set:
            cell = grid[r, c]
            if cell == WOOD:
                grid[r, c] = nxt.hidden_items[r, c]
                nxt.hidden_items[r, c] = 0
            elif ITEM_AMMO <= cell <= ITEM_KICK:
                grid[r, c] = PASSAGE
            flames[r, c] = 2

    # (4) flames kill co-located agents
    for i in range(4):
        if a_alive[i] and flames[pos[i]] > 0:
            nxt.alive[i] = False

    # (5) item pickup by survivors
    for i in range(4):
        if nxt.alive[i]:
            cell = grid[pos[i]]
            if cell == ITEM_AMMO:
                nxt.ammo[i] += 1
            elif cell == ITEM_RANGE:
                nxt.blast[i] += 1
            elif cell == ITEM_KICK:
                nxt.can_kick[i] = True
            if ITEM_AMMO <= cell <= ITEM_KICK:
                grid[pos[i]] = PASSAGE

    # (6)
    nxt.step = state.step + 1
    return nxt


def outcome(state: GameState, max_steps: int = MAX_STEPS) -> Outcome:
    a = bool(state.alive[0] or state.alive[2])
    b = bool(state.alive[1] or state.alive[3])
    if not a and not b:
        return Outcome.TIE
    if a and not b:
        return Outcome.WIN_A
    if b and not a:
        return Outcome.WIN_B
    if state.step >= max_steps:
        return Outcome.TIE
    return Outcome.ONGOING


def observe(state: GameState, agent_id: int, radius: int = VIEW_RADIUS) -> Observation:
    if not state.alive[agent_id]:
        raise EngineError(f"agent {agent_id} is dead and cannot observe")
    H, W = state.grid.shape
    r, c = int(state.agent_pos[agent_id, 0]), int(state.agent_pos[agent_id, 1])
    r0, r1 = max(0, r - radius), min(H - 1, r + radius)
    c0, c1 = max(0, c - radius), min(W - 1, c + radius)

    grid = np.full((H, W), FOG, np.int8)
    grid[r0 : r1 + 1, c0 : c1 + 1] = state.grid[r0 : r1 + 1, c0 : c1 + 1]
    flames = np.zeros((H, W), np.int16)
    flames[r0 : r1 + 1, c0 : c1 + 1] = state.flames[r0 : r1 + 1, c0 : c1 + 1]

    vis_bombs = [
        [int(b[B_ROW]), int(b[B_COL]), int(b[B_TIMER]), int(b[B_BLAST]), int(b[B_VEL])]
        for b in state.bombs
        if r0 <= b[B_ROW] <= r1 and c0 <= b[B_COL] <= c1
    ]
    bombs = np.array(vis_bombs, np.int64) if vis_bombs else np.zeros((0, 5), np.int64)

    agent_pos = np.full((4, 2), -1, np.int16)
    ammo = np.full(4, -1, np.int16)
    blast = np.full(4, -1, np.int16)
    can_kick = np.full(4, -1, np.int8)
    visible = np.zeros(4, bool)
    for i in range(4):
        pr, pc = int(state.agent_pos[i, 0]), int(state.agent_pos[i, 1])
        in_window = state.alive[i] and r0 <= pr <= r1 and c0 <= pc <= c1
        if i == agent_id or in_window:
            visible[i] = True
            agent_pos[i] = (pr, pc)
            ammo[i] = state.ammo[i]
            blast[i] = state.blast[i]
            can_kick[i] = 1 if state.can_kick[i] else 0

    return Observation(
        self_id=agent_id,
        step=state.step,
        grid=grid,
        bombs=bombs,
        flames=flames,
        agent_pos=agent_pos,
        ammo=ammo,
        blast=blast,
        can_kick=can_kick,
        alive=state.alive.copy(),
        visible=visible,
    )
