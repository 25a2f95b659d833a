"""Real-time depth-limited search over pessimistic scenarios.

Two variants share the same objective shape, survive-first with pressure on
the opponents:

    clip(own, s_threshold) * teammate / prod(opponent_j + epsilon)

* ``SOLO`` expands only the searching agent's actions (everyone else stands
  still in the expansion; their influence enters through the scenario smear)
  and scores leaves with surviving (step, position) pair counts.  Opponent
  terms are the normalised static-board ratios, so they live in [0, 1].
* ``JOINT`` expands joint actions of every agent with a believed position and
  scores leaves with horizon-frontier counts under earliest-occupation
  scenarios.  Leaf values are marginalised over the other agents' actions:
  worst case for own team, average for opponents.  Enumeration is anytime:
  combinations are interleaved across own actions so a deadline or leaf
  budget cuts evenly.

When nothing threatens the agent and no opponent is near, a cheaper objective
mode collects items, bombs wood, and walks toward unexplored cells.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .constants import Action, opponents_of, teammate_of
from .engine import B_BLAST, B_COL, B_ROW, GameState, blast_cells, step
from .constants import (
    FOG,
    ITEM_AMMO,
    ITEM_KICK,
    MOVE_DELTAS,
    PASSAGE,
    RIGID,
    WOOD,
)
from .scenario import DEFAULT_HORIZON, OccMode, PessimismParams, generate, generate_static
from .survivability import FrontierStrategy, frontier_score, pair_count, survivability_ratio
from .tracker import Belief, to_search_state


class Variant(IntEnum):
    SOLO = 0
    JOINT = 1


@dataclass(frozen=True)
class SearchParams:
    variant: Variant = Variant.SOLO
    level: int = 3
    horizon: int = DEFAULT_HORIZON
    depth: int = 1
    s_threshold: float | None = 100.0
    epsilon: float = 1e-6
    frontier_strategy: FrontierStrategy = FrontierStrategy.BINARY
    leaf_budget: int | None = None
    interact_radius: int = 6

    def scenario_params(self) -> PessimismParams:
        mode = OccMode.EARLIEST if self.variant == Variant.JOINT else OccMode.BOOLEAN
        return PessimismParams(level=self.level, horizon=self.horizon, mode=mode)


# fixed evaluation order; earlier wins ties
ACTION_ORDER = (
    Action.STOP,
    Action.UP,
    Action.DOWN,
    Action.LEFT,
    Action.RIGHT,
    Action.BOMB,
)


def combine(own: float, teammate: float, opponents, s_threshold, epsilon: float) -> float:
    """The shared objective: clipped own survivability, scaled by the
    teammate's, divided by each opponent's."""
    value = float(own) if s_threshold is None else min(float(own), float(s_threshold))
    value *= float(teammate)
    for o in opponents:
        value /= float(o) + epsilon
    return value


def _team_terminal(state: GameState) -> bool:
    return not (state.alive[0] or state.alive[2]) or not (state.alive[1] or state.alive[3])


def _expired(deadline) -> bool:
    return deadline is not None and time.monotonic() >= deadline


# ---------------------------------------------------------------------------
# solo variant
# ---------------------------------------------------------------------------

def solo_objective(state: GameState, me: int, params: SearchParams) -> float:
    """Leaf value for the solo variant.

    The own term smears everyone else, teammate included, which keeps natural
    spacing inside the team.  Every other agent enters as a counterfactual
    ratio (their survivability divided by what it would be with the viewer
    absent): opponents as a denominator to squeeze, the teammate as a factor
    that only punishes harm the viewer itself causes.  A teammate doomed
    either way scores 1.0, so the viewer still saves itself."""
    if not state.alive[me]:
        return 0.0
    sc_params = params.scenario_params()
    tm = teammate_of(me)
    own_sc = generate(state, {me}, sc_params)
    own = pair_count(own_sc, state.agent_pos[me])
    tm_val = survivability_ratio(state, tm, me, sc_params) if state.alive[tm] else 1.0
    opp_vals = [
        survivability_ratio(state, o, me, sc_params)
        for o in opponents_of(me)
        if state.alive[o]
    ]
    return combine(own, tm_val, opp_vals, params.s_threshold, params.epsilon)


def _changes_state(state: GameState, me: int, action: Action) -> bool:
    """Cheap no-op filter: moves into walls and impossible placements tie
    with Stop, so they never need their own branch."""
    r, c = int(state.agent_pos[me, 0]), int(state.agent_pos[me, 1])
    H, W = state.grid.shape
    if action == Action.BOMB:
        if state.ammo[me] <= 0:
            return False
        return not any(b[B_ROW] == r and b[B_COL] == c for b in state.bombs)
    dr, dc = MOVE_DELTAS[action]
    tr, tc = r + dr, c + dc
    if not (0 <= tr < H and 0 <= tc < W):
        return False
    return state.grid[tr, tc] not in (RIGID, WOOD)


def _contested(state: GameState, me: int, action: Action) -> bool:
    """A move can bounce when another agent starts within one step of the
    target cell."""
    dr, dc = MOVE_DELTAS[action]
    tr, tc = int(state.agent_pos[me, 0]) + dr, int(state.agent_pos[me, 1]) + dc
    for j in range(4):
        if j == me or not state.alive[j]:
            continue
        d = abs(int(state.agent_pos[j, 0]) - tr) + abs(int(state.agent_pos[j, 1]) - tc)
        if d <= 1:
            return True
    return False


def _solo_step(state: GameState, me: int, action: Action) -> GameState:
    actions = [int(Action.STOP)] * 4
    actions[me] = int(action)
    return step(state, actions, require_ongoing=False)


def _solo_value(
    state: GameState, me: int, params: SearchParams, depth: int, deadline
) -> float:
    if depth <= 0 or not state.alive[me]:
        return solo_objective(state, me, params)
    stop_val = _solo_value(_solo_step(state, me, Action.STOP), me, params, depth - 1, deadline)
    best = stop_val
    for action in ACTION_ORDER[1:]:
        if _expired(deadline):
            break
        if not _changes_state(state, me, action):
            continue
        v = _solo_value(_solo_step(state, me, action), me, params, depth - 1, deadline)
        if action != Action.BOMB and _contested(state, me, action):
            v = 0.5 * (v + stop_val)
        if v > best:
            best = v
    return best


def _is_flat(best: float, stop: float) -> bool:
    """Standing still is as good as any action on the objective."""
    return best - stop <= 1e-9 * max(abs(stop), 1.0)


def _solo_decide(state: GameState, me: int, params: SearchParams, deadline):
    if not state.alive[me]:
        return Action.STOP, True
    best_action = Action.STOP
    stop_val = _solo_value(_solo_step(state, me, Action.STOP), me, params, params.depth - 1, deadline)
    best_val = stop_val
    for action in ACTION_ORDER[1:]:
        if _expired(deadline):
            break
        if not _changes_state(state, me, action):
            continue
        v = _solo_value(_solo_step(state, me, action), me, params, params.depth - 1, deadline)
        if action != Action.BOMB and _contested(state, me, action):
            v = 0.5 * (v + stop_val)
        if v > best_val:
            best_val = v
            best_action = action
    return best_action, _is_flat(best_val, stop_val)


def choose_action_solo(
    state: GameState, me: int, params: SearchParams, deadline=None
) -> Action:
    """Depth-limited expansion of own actions; a possibly-blocked move is
    scored as the average of its intended leaf and the stay leaf."""
    return _solo_decide(state, me, params, deadline)[0]


# ---------------------------------------------------------------------------
# joint variant
# ---------------------------------------------------------------------------

def _frontier_value(state: GameState, agent: int, params: SearchParams) -> float:
    """Territory the agent can still claim, measured against the smear of the
    opposing team only (a teammate is not competition)."""
    if not state.alive[agent]:
        return 0.0
    sc = generate(state, {agent, teammate_of(agent)}, params.scenario_params())
    return float(frontier_score(sc, state.agent_pos[agent], params.frontier_strategy))


def _joint_decide(state: GameState, me: int, params: SearchParams, deadline):
    if params.depth != 1:
        raise ValueError("the joint variant only supports depth 1")
    if not state.alive[me]:
        return Action.STOP, True
    others = [i for i in range(4) if i != me and state.alive[i]]
    tm = teammate_of(me)
    opps = [o for o in opponents_of(me) if state.alive[o]]

    own_min = [None] * 6
    tm_min = [None] * 6
    opp_sum = [[0.0] * len(opps) for _ in range(6)]
    counts = [0] * 6
    leaves = 0

    combos = itertools.product(range(6), repeat=len(others))
    done = False
    for combo in combos:
        for a in range(6):
            if _expired(deadline) or (
                params.leaf_budget is not None and leaves >= params.leaf_budget
            ):
                done = True
                break
            actions = [int(Action.STOP)] * 4
            actions[me] = a
            for agent, act in zip(others, combo):
                actions[agent] = act
            child = step(state, actions, require_ongoing=False)
            leaves += 1

            own = _frontier_value(child, me, params)
            own_min[a] = own if own_min[a] is None else min(own_min[a], own)
            if tm in others:
                tv = _frontier_value(child, tm, params)
                tm_min[a] = tv if tm_min[a] is None else min(tm_min[a], tv)
            for k, o in enumerate(opps):
                opp_sum[a][k] += _frontier_value(child, o, params)
            counts[a] += 1
        if done:
            break

    best_action = Action.STOP
    best_val = None
    stop_val = None
    for action in ACTION_ORDER:
        a = int(action)
        if counts[a] == 0:
            continue
        opp_means = [opp_sum[a][k] / counts[a] for k in range(len(opps))]
        tm_val = 1.0 if tm_min[a] is None else tm_min[a]
        v = combine(own_min[a], tm_val, opp_means, params.s_threshold, params.epsilon)
        if action == Action.STOP:
            stop_val = v
        if best_val is None or v > best_val:
            best_val = v
            best_action = action
    if best_val is None:
        return Action.STOP, True
    flat = stop_val is not None and _is_flat(best_val, stop_val)
    return best_action, flat


def choose_action_joint(
    state: GameState, me: int, params: SearchParams, deadline=None
) -> Action:
    """Enumerate joint actions of all believed agents, marginalise, pick the
    best own action.  Anytime: stops at the deadline or leaf budget."""
    return _joint_decide(state, me, params, deadline)[0]


# ---------------------------------------------------------------------------
# objective mode (no threat, no opponent near)
# ---------------------------------------------------------------------------

_OBJECTIVE_LOOKAHEAD = 2  # replan cadence of the objective BFS


def _danger_mask(state: GameState, me: int, params: SearchParams) -> np.ndarray:
    """Cells the agent's own scenario calls lethal or contested soon.

    Derived from the pessimism scenario so the level knob shapes quiet-phase
    movement too: level 0 only respects bodies and imminent flames, higher
    levels keep smear distance from opponents."""
    sc = generate(state, {me, teammate_of(me)}, params.scenario_params())
    k = min(_OBJECTIVE_LOOKAHEAD, sc.horizon)
    mask = (state.flames > 0) | sc.occupied(k)
    for t in range(1, k + 1):
        mask = mask | (sc.flames[t] > 0)
    return mask


def _bfs_step(state: GameState, me: int, targets: np.ndarray, danger: np.ndarray):
    """First move of a shortest safe path to the nearest target, or None."""
    H, W = state.grid.shape
    start = (int(state.agent_pos[me, 0]), int(state.agent_pos[me, 1]))
    bomb_cells = {(int(b[B_ROW]), int(b[B_COL])) for b in state.bombs}
    taken = {
        (int(state.agent_pos[j, 0]), int(state.agent_pos[j, 1]))
        for j in range(4)
        if j != me and state.alive[j]
    }

    def passable(r: int, c: int) -> bool:
        if state.grid[r, c] in (RIGID, WOOD) or danger[r, c]:
            return False
        return (r, c) not in bomb_cells and (r, c) not in taken

    from collections import deque

    first = {start: Action.STOP}
    queue = deque([start])
    while queue:
        r, c = queue.popleft()
        if targets[r, c] and (r, c) != start:
            return first[(r, c)]
        for action in (Action.UP, Action.DOWN, Action.LEFT, Action.RIGHT):
            dr, dc = MOVE_DELTAS[action]
            nr, nc = r + dr, c + dc
            if 0 <= nr < H and 0 <= nc < W and (nr, nc) not in first and passable(nr, nc):
                first[(nr, nc)] = first[(r, c)] if (r, c) != start else action
                queue.append((nr, nc))
    return None


def _bombing_pays(state: GameState, me: int, params: SearchParams) -> bool:
    """Placing here burns wood and leaves a guaranteed escape."""
    if state.ammo[me] <= 0:
        return False
    r, c = int(state.agent_pos[me, 0]), int(state.agent_pos[me, 1])
    if any(b[B_ROW] == r and b[B_COL] == c for b in state.bombs):
        return False
    cells = blast_cells(state.grid, r, c, int(state.blast[me]))
    if not any(state.grid[rr, cc] == WOOD for rr, cc in cells):
        return False
    child = _solo_step(state, me, Action.BOMB)
    sc = generate_static(child, excluded={me}, params=params.scenario_params())
    return pair_count(sc, child.agent_pos[me]) > 0


def _adjacent_mask(cells: np.ndarray) -> np.ndarray:
    near = np.zeros(cells.shape, bool)
    near[:-1] |= cells[1:]
    near[1:] |= cells[:-1]
    near[:, :-1] |= cells[:, 1:]
    near[:, 1:] |= cells[:, :-1]
    return near


def choose_objective_action(
    state: GameState,
    me: int,
    params: SearchParams,
    fog_grid: np.ndarray | None = None,
) -> Action:
    """Quiet-phase policy: grab the nearest item, bomb adjacent wood, move
    toward wood, close on the nearest known opponent, then explore."""
    grid = state.grid
    H, W = grid.shape
    danger = _danger_mask(state, me, params)

    items = (grid >= ITEM_AMMO) & (grid <= ITEM_KICK)
    move = _bfs_step(state, me, items, danger)
    if move is not None:
        return move

    if _bombing_pays(state, me, params):
        return Action.BOMB

    wood = grid == WOOD
    move = _bfs_step(state, me, _adjacent_mask(wood), danger)
    if move is not None:
        return move

    opp_cells = np.zeros((H, W), bool)
    for o in opponents_of(me):
        if state.alive[o]:
            opp_cells[int(state.agent_pos[o, 0]), int(state.agent_pos[o, 1])] = True
    move = _bfs_step(state, me, _adjacent_mask(opp_cells), danger)
    if move is not None:
        return move

    if fog_grid is not None:
        move = _bfs_step(state, me, _adjacent_mask(fog_grid == FOG), danger)
        if move is not None:
            return move
    return Action.STOP


# ---------------------------------------------------------------------------
# top-level decision
# ---------------------------------------------------------------------------

def _threatened(state: GameState, me: int) -> bool:
    r, c = int(state.agent_pos[me, 0]), int(state.agent_pos[me, 1])
    if state.flames[r, c] > 0:
        return True
    for b in state.bombs:
        if (r, c) in blast_cells(state.grid, int(b[B_ROW]), int(b[B_COL]), int(b[B_BLAST])):
            return True
    return False


def _opponent_near(state: GameState, me: int, radius: int) -> bool:
    r, c = int(state.agent_pos[me, 0]), int(state.agent_pos[me, 1])
    for o in opponents_of(me):
        if not state.alive[o]:
            continue
        if max(abs(int(state.agent_pos[o, 0]) - r), abs(int(state.agent_pos[o, 1]) - c)) <= radius:
            return True
    return False


def decide(belief: Belief, params: SearchParams, deadline=None) -> Action:
    """Pick this step's action from a belief.

    Search runs when the agent is threatened or an opponent is near, and its
    action is kept when the objective has gradient or the agent is
    threatened.  A safe, flat landscape defers to the objective mode, so the
    agent farms instead of freezing."""
    state = to_search_state(belief)
    me = belief.self_id
    if not state.alive[me]:
        return Action.STOP
    threatened = _threatened(state, me)
    if threatened or _opponent_near(state, me, params.interact_radius):
        if params.variant == Variant.JOINT:
            action, flat = _joint_decide(state, me, params, deadline)
        else:
            action, flat = _solo_decide(state, me, params, deadline)
        if not flat or threatened:
            return action
    return choose_objective_action(state, me, params, fog_grid=belief.grid)
