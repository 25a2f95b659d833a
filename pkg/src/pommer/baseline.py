"""Rule-based reference opponent.

Reflex rules applied to the raw observation, in priority order: leave
endangered cells, place a bomb next to wood or a nearby enemy when an escape
square exists, chase the nearest visible enemy, otherwise wander among safe
moves.  All randomness comes from the caller-supplied generator, so matches
replay exactly.
"""
from __future__ import annotations

import numpy as np

from .constants import (
    Action,
    ITEM_AMMO,
    ITEM_KICK,
    MOVE_DELTAS,
    PASSAGE,
    opponents_of,
)
from .engine import Observation, blast_cells

_MOVES = (Action.UP, Action.DOWN, Action.LEFT, Action.RIGHT)

FLEE_FUSE = 7  # standing inside a cross this close to detonation triggers evasion
ENTER_FUSE = 3  # only crosses this imminent block movement; slower lanes are entered freely


def _danger(
    obs: Observation, fuse: int = FLEE_FUSE, ignore: frozenset[tuple[int, int]] = frozenset()
) -> np.ndarray:
    mask = obs.flames > 0
    for b in obs.bombs:
        if int(b[2]) > fuse or (int(b[0]), int(b[1])) in ignore:
            continue
        for r, c in blast_cells(obs.grid, int(b[0]), int(b[1]), int(b[3])):
            mask[r, c] = True
    return mask


def _can_outrun(obs: Observation, cross: list[tuple[int, int]], r: int, c: int) -> bool:
    """True when a walk of at most 9 safe steps leaves the planned bomb's cross."""
    imminent = _danger(obs, ENTER_FUSE)
    seen = {(r, c)}
    frontier = [(r, c)]
    for _ in range(9):
        nxt = []
        for fr, fc in frontier:
            for dr, dc in (MOVE_DELTAS[a] for a in _MOVES):
                nr, nc = fr + dr, fc + dc
                if (nr, nc) in seen or not _standable(obs, nr, nc):
                    continue
                if obs.flames[nr, nc] > 0 or imminent[nr, nc]:
                    continue
                if (nr, nc) not in cross:
                    return True
                seen.add((nr, nc))
                nxt.append((nr, nc))
        frontier = nxt
        if not frontier:
            break
    return False


def _standable(obs: Observation, r: int, c: int) -> bool:
    H, W = obs.grid.shape
    if not (0 <= r < H and 0 <= c < W):
        return False
    cell = obs.grid[r, c]
    if cell != PASSAGE and not (ITEM_AMMO <= cell <= ITEM_KICK):
        return False
    if any(b[0] == r and b[1] == c for b in obs.bombs):
        return False
    for j in range(4):
        if j != obs.self_id and obs.visible[j] and tuple(obs.agent_pos[j]) == (r, c):
            return False
    return True


def baseline_action(
    obs: Observation,
    rng: np.random.Generator,
    bomb_prob: float = 1.0,
    chase_prob: float = 0.9,
    own_bombs: frozenset[tuple[int, int]] = frozenset(),
) -> Action:
    me = obs.self_id
    r, c = int(obs.agent_pos[me, 0]), int(obs.agent_pos[me, 1])
    enemies = [
        (int(obs.agent_pos[o, 0]), int(obs.agent_pos[o, 1]))
        for o in opponents_of(me)
        if obs.visible[o]
    ]
    # own fresh bombs are no reason to flee early: stand ground next to them
    # (body-blocking the victim) and slip out on the known fuse
    flee = _danger(obs, FLEE_FUSE, ignore=own_bombs)
    # tunnel vision while hunting; cautious when no enemy is in sight
    imminent = _danger(obs, ENTER_FUSE if enemies else FLEE_FUSE)

    # score = (imminent, flee): never step into an imminent cross willingly,
    # prefer leaving the wider flee region only once already alarmed
    candidates: list[tuple[tuple[int, int], Action]] = []
    if obs.flames[r, c] == 0:
        score = (1 if imminent[r, c] else 0, 1 if flee[r, c] else 0)
        candidates.append((score, Action.STOP))
    for action in _MOVES:
        dr, dc = MOVE_DELTAS[action]
        nr, nc = r + dr, c + dc
        if _standable(obs, nr, nc) and obs.flames[nr, nc] == 0:
            score = (1 if imminent[nr, nc] else 0, 1 if flee[nr, nc] else 0)
            candidates.append((score, action))
    if not candidates:
        return Action.STOP

    if flee[r, c]:
        best = min(score for score, _ in candidates)
        pool = [a for score, a in candidates if score == best]
        return pool[int(rng.integers(len(pool)))]

    wood_target = False
    enemy_near = False
    if obs.ammo[me] > 0 and not any(b[0] == r and b[1] == c for b in obs.bombs):
        cells = blast_cells(obs.grid, r, c, int(obs.blast[me]))
        wood_target = any(obs.grid[rr, cc] == 2 for rr, cc in cells)
        # a bomb is worth an enemy in close quarters or one standing on or
        # beside the would-be cross (the reach grows with blast strength)
        in_reach = set(cells)
        in_reach.update((rr + dr, cc + dc) for rr, cc in cells for dr, dc in ((1,0),(-1,0),(0,1),(0,-1)))
        for o in opponents_of(me):
            if not obs.visible[o]:
                continue
            orr, occ_ = int(obs.agent_pos[o, 0]), int(obs.agent_pos[o, 1])
            if max(abs(orr - r), abs(occ_ - c)) <= 2 or (orr, occ_) in in_reach:
                enemy_near = True
        if (wood_target or enemy_near) and not _can_outrun(obs, cells, r, c):
            wood_target = enemy_near = False
    # an enemy in range always draws a bomb; wood is only worth an occasional one
    if enemy_near or (wood_target and rng.random() < bomb_prob):
        return Action.BOMB

    pool = [a for score, a in candidates if score[0] == 0]
    if not pool:
        pool = [a for _, a in candidates]

    def chase(targets: list[tuple[int, int]]) -> None:
        tr, tc = min(targets, key=lambda p: abs(p[0] - r) + abs(p[1] - c))

        def closer(action: Action) -> int:
            dr, dc = MOVE_DELTAS[action]
            return abs(r + dr - tr) + abs(c + dc - tc)

        best = min(closer(a) for a in pool)
        pool[:] = [a for a in pool if closer(a) == best]

    items = [
        (rr, cc)
        for rr in range(obs.grid.shape[0])
        for cc in range(obs.grid.shape[1])
        if ITEM_AMMO <= obs.grid[rr, cc] <= ITEM_KICK
    ]
    if items:
        chase(items)
    elif enemies and rng.random() < chase_prob:
        chase(enemies)
    return pool[int(rng.integers(len(pool)))]
