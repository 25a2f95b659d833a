"""Pair counts, frontier scores, and the counterfactual influence ratio."""
from collections import deque

import numpy as np
import pytest

from pommer.scenario import PessimismParams, generate, generate_static
from pommer.survivability import (
    FrontierStrategy,
    frontier_score,
    max_pair_count,
    pair_count,
    pair_count_detail,
    survivability_ratio,
)

from helpers import board, random_midgame_states
from oracles import oracle_surviving_pairs


def _random_state(seed: int):
    rng = np.random.default_rng(seed)
    size = int(rng.integers(4, 7))
    rows = []
    for r in range(size):
        rows.append(
            "".join(rng.choice([".", ".", ".", "#", "+"]) for _ in range(size))
        )
    text = "\n".join(rows)
    state = board(text.replace("#", ".", 1))  # keep at least one free cell
    free = np.argwhere(state.grid == 0)
    rng.shuffle(free)
    state.agent_pos[0] = free[0]
    state.alive[0] = True
    if len(free) > 1:
        state.agent_pos[1] = free[1]
        state.alive[1] = True
    bombs = []
    for r, c in free[2 : 2 + int(rng.integers(0, 3))]:
        bombs.append([r, c, -1, int(rng.integers(1, 9)), int(rng.integers(2, 4)), 0])
    if bombs:
        state.bombs = np.array(bombs, np.int64)
    return state, rng


@pytest.mark.parametrize("seed", range(60))
def test_pair_count_matches_oracle(seed):
    state, rng = _random_state(seed)
    params = PessimismParams(level=int(rng.integers(0, 5)), horizon=int(rng.integers(2, 9)))
    sc = generate(state, {0}, params)
    got = pair_count(sc, state.agent_pos[0])
    want = oracle_surviving_pairs(
        sc.walls, sc.bombs, sc.flames, sc.occupied_from, True, state.agent_pos[0]
    )
    assert got == want


def test_pair_count_on_open_board_counts_reachability_balls():
    state = board("""
    .....
    .....
    ..0..
    .....
    ....1
    """, alive=[True, False, False, False])
    T = 4
    sc = generate(state, {0}, PessimismParams(level=0, horizon=T))
    # independent count: with nothing lethal, every (t, cell within t steps) survives
    dist = np.full((5, 5), 99)
    dist[2, 2] = 0
    queue = deque([(2, 2)])
    while queue:
        r, c = queue.popleft()
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            nr, nc = r + dr, c + dc
            if 0 <= nr < 5 and 0 <= nc < 5 and dist[nr, nc] == 99:
                dist[nr, nc] = dist[r, c] + 1
                queue.append((nr, nc))
    want = sum(int((dist <= t).sum()) for t in range(T + 1))
    assert pair_count(sc, (2, 2)) == want


def test_pair_count_zero_when_start_is_lethal():
    state = board("""
    .....
    .....
    ..0..
    .....
    ....1
    """, flames=[(2, 2, 2)])
    sc = generate_static(state, excluded={0})
    assert pair_count(sc, (2, 2)) == 0


def test_pair_count_capped_by_shape():
    state = board("""
    .....
    .....
    ..0..
    .....
    ....1
    """)
    sc = generate(state, {0}, PessimismParams(level=2, horizon=6))
    assert 0 < pair_count(sc, (2, 2)) <= max_pair_count(sc)


def test_pair_count_detail_mask_agrees_with_count():
    state, _ = _random_state(7)
    sc = generate(state, {0}, PessimismParams(level=2, horizon=6))
    count, alive = pair_count_detail(sc, state.agent_pos[0])
    assert count == int(np.asarray(alive).sum())


def test_pairs_require_survival_to_the_horizon():
    # sealed 1x1 pocket with a bomb under the agent: once the blast falls
    # inside the horizon every pair is pruned, before that the agent just
    # sits on its bomb for the whole window
    state = board("""
    .#...
    #0#..
    .#...
    .....
    ....1
    """, bombs=[(1, 1, 0, 6, 2, 0)])
    doomed = generate_static(state, excluded={0}, params=PessimismParams(horizon=12))
    assert pair_count(doomed, (1, 1)) == 0
    safe = generate_static(state, excluded={0}, params=PessimismParams(horizon=3))
    assert pair_count(safe, (1, 1)) == 4


def test_frontier_score_binary_and_margin_small_board():
    state = board("""
    ...
    .0.
    ..1
    """, alive=[True, False, False, False])
    T = 2
    sc = generate(state, {0}, PessimismParams(level=0, horizon=T))
    # arrivals on an empty 3x3 from the centre: 0 / 1 / 2 by Manhattan distance
    assert frontier_score(sc, (1, 1), FrontierStrategy.BINARY) == 9
    # margin: lead = min(NEVER, T+1) - arrival = 3 - d
    assert frontier_score(sc, (1, 1), FrontierStrategy.MARGIN) == 3 + 4 * 2 + 4 * 1


def test_frontier_score_shrinks_under_occupancy():
    state = board("""
    .....
    .....
    ..0.1
    .....
    .....
    """)
    params = PessimismParams(level=4, horizon=4, mode=1)
    open_sc = generate(state, {0, 1}, params)
    contested = generate(state, {0}, params)
    assert frontier_score(contested, (2, 2)) <= frontier_score(open_sc, (2, 2))


def test_ratio_is_one_without_interaction():
    state = board("""
    0....
    .....
    .....
    .....
    ....1
    """)
    params = PessimismParams(horizon=6)
    assert survivability_ratio(state, 1, 0, params) == 1.0


# sealed two-cell pocket for the counterfactual tests: only the bomb owner
# differs between them, and the far-away viewer body is outside the horizon
_POCKET = """
.##....
#1.#...
.##....
.......
.......
.......
......0
"""


def test_ratio_detects_viewer_bomb_pressure():
    # the viewer's bomb burns one pocket cell, so the subject loses pairs it
    # would keep in the counterfactual without the viewer
    state = board(_POCKET, bombs=[(1, 1, 0, 4, 1, 0)])
    params = PessimismParams(horizon=6)
    ratio = survivability_ratio(state, 1, 0, params)
    assert 0.0 < ratio < 1.0


def test_ratio_zero_when_viewer_bomb_dooms_subject():
    # blast 2 covers both pocket cells: no surviving pair remains
    state = board(_POCKET, bombs=[(1, 1, 0, 4, 2, 0)])
    params = PessimismParams(horizon=6)
    assert survivability_ratio(state, 1, 0, params) == 0.0


def test_ratio_ignores_bombs_owned_by_others():
    # same geometry, but the bomb belongs to agent 3: removing viewer 0
    # changes nothing the subject can reach
    state = board(_POCKET, bombs=[(1, 1, 3, 4, 1, 0)])
    params = PessimismParams(horizon=6)
    assert survivability_ratio(state, 1, 0, params) == 1.0


def test_ratio_one_when_subject_is_doomed_anyway():
    # flame on the subject's only cell: zero pairs with or without the viewer
    state = board("""
    .#...
    #1#.0
    .#...
    .....
    .....
    """, flames=[(1, 1, 2)])
    params = PessimismParams(horizon=6)
    assert survivability_ratio(state, 1, 0, params) == 1.0


def test_ratio_stays_in_unit_interval_on_real_states():
    for state in random_midgame_states(12, seed=5):
        params = PessimismParams(horizon=8)
        for subject in range(4):
            if not state.alive[subject]:
                continue
            for viewer in range(4):
                if viewer == subject or not state.alive[viewer]:
                    continue
                ratio = survivability_ratio(state, subject, viewer, params)
                assert 0.0 <= ratio <= 1.0
