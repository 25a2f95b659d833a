"""Shared test scaffolding: ASCII boards, belief construction, state walks."""
from __future__ import annotations

import numpy as np

from pommer.constants import (
    DEFAULT_AMMO,
    DEFAULT_BLAST,
    ITEM_AMMO,
    ITEM_KICK,
    ITEM_RANGE,
    PASSAGE,
    RIGID,
    WOOD,
)
from pommer.engine import GameState, empty_bombs
from pommer.tracker import Belief

# ASCII cell legend for board(): agents 0-3 stand on passage
_CELL = {
    ".": PASSAGE,
    "#": RIGID,
    "+": WOOD,
    "a": ITEM_AMMO,
    "r": ITEM_RANGE,
    "k": ITEM_KICK,
}


def board(
    text: str,
    bombs=(),
    flames=(),
    hidden=(),
    ammo=None,
    blast=None,
    can_kick=None,
    alive=None,
    step: int = 0,
) -> GameState:
    """Build a GameState from an ASCII sketch.

    ``text`` rows use the legend above plus digits 0-3 for agents.  ``bombs``
    is an iterable of (row, col, owner, timer, blast, vel) tuples, ``flames``
    of (row, col) or (row, col, life) tuples, ``hidden`` of (row, col, item)
    tuples placed under wood.  Agents absent from the sketch are dead unless
    ``alive`` overrides that.
    """
    rows = [line.strip() for line in text.strip().splitlines()]
    H, W = len(rows), len(rows[0])
    grid = np.zeros((H, W), np.int8)
    agent_pos = np.zeros((4, 2), np.int16)
    seen = [False] * 4
    for r, line in enumerate(rows):
        assert len(line) == W, "ragged ASCII board"
        for c, ch in enumerate(line):
            if ch in "0123":
                i = int(ch)
                agent_pos[i] = (r, c)
                seen[i] = True
            else:
                grid[r, c] = _CELL[ch]

    hidden_items = np.zeros((H, W), np.int8)
    for r, c, item in hidden:
        assert grid[r, c] == WOOD, "hidden item must sit under wood"
        hidden_items[r, c] = item

    flame_arr = np.zeros((H, W), np.int16)
    for spec in flames:
        r, c, *rest = spec
        flame_arr[r, c] = rest[0] if rest else 2

    bomb_rows = [list(b) for b in bombs]
    bomb_arr = np.array(bomb_rows, np.int64) if bomb_rows else empty_bombs()

    alive_arr = np.array(seen if alive is None else alive, bool)
    return GameState(
        grid=grid,
        hidden_items=hidden_items,
        agent_pos=agent_pos,
        alive=alive_arr,
        ammo=np.array(ammo if ammo is not None else [DEFAULT_AMMO] * 4, np.int16),
        blast=np.array(blast if blast is not None else [DEFAULT_BLAST] * 4, np.int16),
        can_kick=np.array(can_kick if can_kick is not None else [False] * 4, bool),
        bombs=bomb_arr,
        flames=flame_arr,
        step=step,
    )


def belief_of(state: GameState, me: int) -> Belief:
    """Omniscient belief over ``state`` (no fog), for driving decide()."""
    pos = state.agent_pos.copy()
    for i in range(4):
        if not state.alive[i]:
            pos[i] = (-1, -1)
    return Belief(
        self_id=me,
        step=state.step,
        grid=state.grid.copy(),
        flames=state.flames.copy(),
        bombs=state.bombs.copy(),
        agent_pos=pos,
        last_seen=np.full(4, state.step, np.int16),
        alive=state.alive.copy(),
        ammo=state.ammo.copy(),
        blast=state.blast.copy(),
        can_kick=state.can_kick.astype(np.int8),
    )


def random_midgame_states(n: int, seed: int = 0, min_step: int = 30, stride: int = 8):
    """Snapshots from seeded baseline self-play, for property sweeps."""
    from pommer.agents import BaselineAgent
    from pommer.constants import Action, Outcome
    from pommer.engine import initial_state, observe, outcome, step
    from pommer.harness import agent_seed

    states = []
    match_seed = seed
    while len(states) < n:
        agents = [BaselineAgent(i) for i in range(4)]
        for i, agent in enumerate(agents):
            agent.reset(agent_seed(match_seed, i))
        state = initial_state(match_seed)
        while outcome(state) == Outcome.ONGOING and len(states) < n:
            actions = [
                int(agents[i].act(observe(state, i))) if state.alive[i] else int(Action.STOP)
                for i in range(4)
            ]
            state = step(state, actions)
            if state.step >= min_step and state.step % stride == 0:
                states.append(state.copy())
        match_seed += 1
    return states
