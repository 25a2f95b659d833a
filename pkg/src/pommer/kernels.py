"""Hot numeric kernels: scenario rollout and time-expanded reachability.

Each kernel has two interchangeable implementations:

* a scalar-loop version compiled with ``numba.njit`` (the default), and
* a vectorised pure-numpy version used when numba is unavailable or when
  the ``POMMER_NO_NUMBA`` environment variable is set to a truthy value.

Both produce bit-identical outputs (see tests/test_kernels.py) and both are
kept importable so the benchmark can compare them.  ``pommer bench`` reports
the speed ratio.

Array conventions (H = W = 11 in match play; any shape works):

* ``grid``     int8  (H, W)   cell codes from :mod:`pommer.constants`
* ``hidden``   int8  (H, W)   item code revealed when wood burns, 0 if none
* ``bombs``    int64 (n, 6)   columns: row, col, owner, timer, blast, vel
* ``flame``    int16 (H, W)   remaining lethal steps per cell
* ``occ``      uint8 (H, W)   initial occupancy (non-excluded agents)

Rollout outputs, for t = 0..T:

* ``walls_t``  uint8 (T+1, H, W)  1 where rigid or (not yet burned) wood
* ``bombs_t``  uint8 (T+1, H, W)  1 where a bomb sits during step t
* ``flames_t`` uint8 (T+1, H, W)  remaining flame life during step t
* ``occ_first`` int16 (H, W)      step at which a cell is first occupied,
                                  NEVER if it never is
"""
from __future__ import annotations

import os

import numpy as np

from .constants import ITEM_AMMO, ITEM_KICK, PASSAGE, RIGID, WOOD

NEVER = 10_000  # occ_first sentinel, larger than any horizon

# neighbour order: up, down, left, right (also the velocity code order 1..4)
_DR = np.array([-1, 1, 0, 0], dtype=np.int64)
_DC = np.array([0, 0, -1, 1], dtype=np.int64)


def _numba_requested() -> bool:
    flag = os.environ.get("POMMER_NO_NUMBA", "").strip().lower()
    return flag not in {"1", "true", "yes", "on"}


# ---------------------------------------------------------------------------
# scalar-loop implementations (njit-compiled when numba is active)
# ---------------------------------------------------------------------------

def _roll_scenario_loops(grid, hidden, bombs, flame, occ, expand_until, horizon):
    H, W = grid.shape
    T = horizon
    walls_t = np.zeros((T + 1, H, W), np.uint8)
    bombs_t = np.zeros((T + 1, H, W), np.uint8)
    flames_t = np.zeros((T + 1, H, W), np.uint8)
    occ_first = np.full((H, W), NEVER, np.int16)

    g = grid.copy()
    hid = hidden.copy()
    fl = flame.astype(np.int16)
    nb = bombs.shape[0]
    brow = bombs[:, 0].copy()
    bcol = bombs[:, 1].copy()
    btimer = bombs[:, 3].copy()
    bblast = bombs[:, 4].copy()
    bvel = bombs[:, 5].copy()
    balive = np.ones(nb, np.uint8)

    for r in range(H):
        for c in range(W):
            if g[r, c] == RIGID or g[r, c] == WOOD:
                walls_t[0, r, c] = 1
            flames_t[0, r, c] = fl[r, c]
            if occ[r, c] != 0:
                occ_first[r, c] = 0
    for i in range(nb):
        bombs_t[0, brow[i], bcol[i]] = 1

    blast = np.zeros((H, W), np.uint8)
    exploding = np.zeros(nb, np.uint8)
    new_occ = np.zeros((H, W), np.uint8)

    for t in range(1, T + 1):
        # flames from two steps ago expire
        for r in range(H):
            for c in range(W):
                if fl[r, c] > 0:
                    fl[r, c] -= 1

        # bombs tick; moving bombs advance or stop
        for i in range(nb):
            if balive[i] == 0:
                continue
            btimer[i] -= 1
            if bvel[i] != 0:
                nr = brow[i] + _DR[bvel[i] - 1]
                nc = bcol[i] + _DC[bvel[i] - 1]
                blocked = nr < 0 or nr >= H or nc < 0 or nc >= W
                if not blocked and g[nr, nc] != PASSAGE:
                    blocked = True
                if not blocked:
                    for j in range(nb):
                        if balive[j] == 1 and j != i and brow[j] == nr and bcol[j] == nc:
                            blocked = True
                            break
                if blocked:
                    bvel[i] = 0
                else:
                    brow[i] = nr
                    bcol[i] = nc

        # explosions with chains: timer expiry or sitting in flames
        for r in range(H):
            for c in range(W):
                blast[r, c] = 0
        for i in range(nb):
            if balive[i] == 1 and (btimer[i] <= 0 or fl[brow[i], bcol[i]] > 0):
                exploding[i] = 1
            else:
                exploding[i] = 0
        changed = True
        while changed:
            changed = False
            for i in range(nb):
                if balive[i] == 1 and exploding[i] == 1:
                    exploding[i] = 2
                    changed = True
                    r0 = brow[i]
                    c0 = bcol[i]
                    blast[r0, c0] = 1
                    for d in range(4):
                        for k in range(1, bblast[i]):
                            rr = r0 + _DR[d] * k
                            cc = c0 + _DC[d] * k
                            if rr < 0 or rr >= H or cc < 0 or cc >= W:
                                break
                            cell = g[rr, cc]
                            if cell == RIGID:
                                break
                            blast[rr, cc] = 1
                            if cell != PASSAGE:  # wood and items absorb the ray
                                break
            for i in range(nb):
                if balive[i] == 1 and exploding[i] == 0 and blast[brow[i], bcol[i]] == 1:
                    exploding[i] = 1
                    changed = True
        for i in range(nb):
            if exploding[i] == 2:
                balive[i] = 0
        for r in range(H):
            for c in range(W):
                if blast[r, c] == 1:
                    cell = g[r, c]
                    if cell == WOOD:
                        g[r, c] = hid[r, c]
                        hid[r, c] = 0
                    elif ITEM_AMMO <= cell <= ITEM_KICK:
                        g[r, c] = PASSAGE
                    fl[r, c] = 2

        for r in range(H):
            for c in range(W):
                if g[r, c] == RIGID or g[r, c] == WOOD:
                    walls_t[t, r, c] = 1
                flames_t[t, r, c] = fl[r, c]
        for i in range(nb):
            if balive[i] == 1:
                bombs_t[t, brow[i], bcol[i]] = 1

        # occupancy front advances one step of movement
        if t <= expand_until:
            for r in range(H):
                for c in range(W):
                    new_occ[r, c] = 0
            for r in range(H):
                for c in range(W):
                    if occ_first[r, c] < t:
                        for d in range(4):
                            nr = r + _DR[d]
                            nc = c + _DC[d]
                            if nr < 0 or nr >= H or nc < 0 or nc >= W:
                                continue
                            if occ_first[nr, nc] != NEVER:
                                continue
                            if walls_t[t, nr, nc] == 0 and bombs_t[t, nr, nc] == 0 and fl[nr, nc] == 0:
                                new_occ[nr, nc] = 1
            for r in range(H):
                for c in range(W):
                    if new_occ[r, c] == 1:
                        occ_first[r, c] = t

    return walls_t, bombs_t, flames_t, occ_first


def _surviving_pairs_loops(walls_t, bombs_t, flames_t, occ_first, use_occ, sr, sc):
    Tp1, H, W = walls_t.shape
    reach = np.zeros((Tp1, H, W), np.uint8)
    if walls_t[0, sr, sc] == 0 and flames_t[0, sr, sc] == 0 and (
        not use_occ or occ_first[sr, sc] > 0
    ):
        reach[0, sr, sc] = 1

    for t in range(1, Tp1):
        for r in range(H):
            for c in range(W):
                if walls_t[t, r, c] == 1 or flames_t[t, r, c] > 0:
                    continue
                if use_occ and occ_first[r, c] <= t:
                    continue
                if reach[t - 1, r, c] == 1:
                    reach[t, r, c] = 1  # staying on a bomb is allowed
                    continue
                if bombs_t[t, r, c] == 1:
                    continue  # cannot step onto a bomb
                for d in range(4):
                    nr = r + _DR[d]
                    nc = c + _DC[d]
                    if 0 <= nr < H and 0 <= nc < W and reach[t - 1, nr, nc] == 1:
                        reach[t, r, c] = 1
                        break

    alive = np.zeros((Tp1, H, W), np.uint8)
    for r in range(H):
        for c in range(W):
            alive[Tp1 - 1, r, c] = reach[Tp1 - 1, r, c]
    for t in range(Tp1 - 2, -1, -1):
        for r in range(H):
            for c in range(W):
                if reach[t, r, c] == 0:
                    continue
                if alive[t + 1, r, c] == 1:
                    alive[t, r, c] = 1
                    continue
                for d in range(4):
                    nr = r + _DR[d]
                    nc = c + _DC[d]
                    if (
                        0 <= nr < H
                        and 0 <= nc < W
                        and alive[t + 1, nr, nc] == 1
                        and bombs_t[t + 1, nr, nc] == 0
                    ):
                        alive[t, r, c] = 1
                        break

    count = 0
    for t in range(Tp1):
        for r in range(H):
            for c in range(W):
                if alive[t, r, c] == 1:
                    count += 1
    return count, alive


def _reach_with_arrival_loops(walls_t, bombs_t, flames_t, sr, sc):
    Tp1, H, W = walls_t.shape
    reach = np.zeros((Tp1, H, W), np.uint8)
    arrival = np.full((H, W), NEVER, np.int16)
    if walls_t[0, sr, sc] == 0 and flames_t[0, sr, sc] == 0:
        reach[0, sr, sc] = 1
        arrival[sr, sc] = 0

    for t in range(1, Tp1):
        for r in range(H):
            for c in range(W):
                if walls_t[t, r, c] == 1 or flames_t[t, r, c] > 0:
                    continue
                ok = False
                if reach[t - 1, r, c] == 1:
                    ok = True
                elif bombs_t[t, r, c] == 0:
                    for d in range(4):
                        nr = r + _DR[d]
                        nc = c + _DC[d]
                        if 0 <= nr < H and 0 <= nc < W and reach[t - 1, nr, nc] == 1:
                            ok = True
                            break
                if ok:
                    reach[t, r, c] = 1
                    if arrival[r, c] == NEVER:
                        arrival[r, c] = t

    return reach, arrival


# ---------------------------------------------------------------------------
# vectorised pure-numpy implementations
# ---------------------------------------------------------------------------

def _dilate4(mask: np.ndarray) -> np.ndarray:
    """True where any 4-neighbour of ``mask`` is True."""
    out = np.zeros_like(mask)
    out[1:, :] |= mask[:-1, :]
    out[:-1, :] |= mask[1:, :]
    out[:, 1:] |= mask[:, :-1]
    out[:, :-1] |= mask[:, 1:]
    return out


def _roll_scenario_numpy(grid, hidden, bombs, flame, occ, expand_until, horizon):
    H, W = grid.shape
    T = int(horizon)
    walls_t = np.zeros((T + 1, H, W), np.uint8)
    bombs_t = np.zeros((T + 1, H, W), np.uint8)
    flames_t = np.zeros((T + 1, H, W), np.uint8)
    occ_first = np.full((H, W), NEVER, np.int16)

    g = grid.copy()
    hid = hidden.copy()
    fl = flame.astype(np.int16)
    nb = bombs.shape[0]
    brow = [int(v) for v in bombs[:, 0]]
    bcol = [int(v) for v in bombs[:, 1]]
    btimer = [int(v) for v in bombs[:, 3]]
    bblast = [int(v) for v in bombs[:, 4]]
    bvel = [int(v) for v in bombs[:, 5]]
    balive = [True] * nb

    walls_t[0] = (g == RIGID) | (g == WOOD)
    flames_t[0] = fl
    occ_first[occ != 0] = 0
    for i in range(nb):
        bombs_t[0, brow[i], bcol[i]] = 1

    for t in range(1, T + 1):
        np.subtract(fl, 1, out=fl, where=fl > 0)

        for i in range(nb):
            if not balive[i]:
                continue
            btimer[i] -= 1
            if bvel[i] != 0:
                nr = brow[i] + int(_DR[bvel[i] - 1])
                nc = bcol[i] + int(_DC[bvel[i] - 1])
                blocked = not (0 <= nr < H and 0 <= nc < W) or g[nr, nc] != PASSAGE
                if not blocked:
                    for j in range(nb):
                        if balive[j] and j != i and brow[j] == nr and bcol[j] == nc:
                            blocked = True
                            break
                if blocked:
                    bvel[i] = 0
                else:
                    brow[i], bcol[i] = nr, nc

        blast = np.zeros((H, W), bool)
        exploding = [
            balive[i] and (btimer[i] <= 0 or fl[brow[i], bcol[i]] > 0)
            for i in range(nb)
        ]
        done = [False] * nb
        changed = True
        while changed:
            changed = False
            for i in range(nb):
                if balive[i] and exploding[i] and not done[i]:
                    done[i] = True
                    changed = True
                    r0, c0 = brow[i], bcol[i]
                    blast[r0, c0] = True
                    for d in range(4):
                        for k in range(1, bblast[i]):
                            rr = r0 + int(_DR[d]) * k
                            cc = c0 + int(_DC[d]) * k
                            if not (0 <= rr < H and 0 <= cc < W):
                                break
                            cell = g[rr, cc]
                            if cell == RIGID:
                                break
                            blast[rr, cc] = True
                            if cell != PASSAGE:
                                break
            for i in range(nb):
                if balive[i] and not exploding[i] and blast[brow[i], bcol[i]]:
                    exploding[i] = True
                    changed = True
        for i in range(nb):
            if done[i]:
                balive[i] = False
        burned_wood = blast & (g == WOOD)
        burned_item = blast & (g >= ITEM_AMMO) & (g <= ITEM_KICK)
        g[burned_wood] = hid[burned_wood]
        hid[burned_wood] = 0
        g[burned_item] = PASSAGE
        fl[blast] = 2

        walls_t[t] = (g == RIGID) | (g == WOOD)
        flames_t[t] = fl
        for i in range(nb):
            if balive[i]:
                bombs_t[t, brow[i], bcol[i]] = 1

        if t <= expand_until:
            occupied = occ_first < t
            free = (walls_t[t] == 0) & (bombs_t[t] == 0) & (fl == 0)
            cand = _dilate4(occupied) & free & (occ_first == NEVER)
            occ_first[cand] = t

    return walls_t, bombs_t, flames_t, occ_first


def _surviving_pairs_numpy(walls_t, bombs_t, flames_t, occ_first, use_occ, sr, sc):
    Tp1, H, W = walls_t.shape
    tgrid = np.arange(Tp1, dtype=np.int16).reshape(Tp1, 1, 1)
    ok = (walls_t == 0) & (flames_t == 0)
    if use_occ:
        ok &= occ_first[None, :, :] > tgrid
    enterable = ok & (bombs_t == 0)

    reach = np.zeros((Tp1, H, W), bool)
    reach[0, sr, sc] = ok[0, sr, sc]
    for t in range(1, Tp1):
        reach[t] = (reach[t - 1] & ok[t]) | (_dilate4(reach[t - 1]) & enterable[t])

    alive = np.zeros((Tp1, H, W), bool)
    alive[-1] = reach[-1]
    for t in range(Tp1 - 2, -1, -1):
        movable = alive[t + 1] & (bombs_t[t + 1] == 0)
        alive[t] = reach[t] & (alive[t + 1] | _dilate4(movable))

    return int(alive.sum()), alive.astype(np.uint8)


def _reach_with_arrival_numpy(walls_t, bombs_t, flames_t, sr, sc):
    Tp1, H, W = walls_t.shape
    ok = (walls_t == 0) & (flames_t == 0)
    enterable = ok & (bombs_t == 0)

    reach = np.zeros((Tp1, H, W), bool)
    arrival = np.full((H, W), NEVER, np.int16)
    reach[0, sr, sc] = ok[0, sr, sc]
    if reach[0, sr, sc]:
        arrival[sr, sc] = 0
    for t in range(1, Tp1):
        reach[t] = (reach[t - 1] & ok[t]) | (_dilate4(reach[t - 1]) & enterable[t])
        fresh = reach[t] & (arrival == NEVER)
        arrival[fresh] = t

    return reach.astype(np.uint8), arrival


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

NUMBA_ENABLED = _numba_requested()
if NUMBA_ENABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False

if NUMBA_ENABLED:
    _roll_scenario_jit = njit(cache=True)(_roll_scenario_loops)
    _surviving_pairs_jit = njit(cache=True)(_surviving_pairs_loops)
    _reach_with_arrival_jit = njit(cache=True)(_reach_with_arrival_loops)
    roll_scenario = _roll_scenario_jit
    surviving_pairs = _surviving_pairs_jit
    reach_with_arrival = _reach_with_arrival_jit
else:
    _roll_scenario_jit = None
    _surviving_pairs_jit = None
    _reach_with_arrival_jit = None
    roll_scenario = _roll_scenario_numpy
    surviving_pairs = _surviving_pairs_numpy
    reach_with_arrival = _reach_with_arrival_numpy

# name -> {"numba": jitted or None, "numpy": vectorised} for tests and bench
IMPLEMENTATIONS = {
    "roll_scenario": {"numba": _roll_scenario_jit, "numpy": _roll_scenario_numpy},
    "surviving_pairs": {"numba": _surviving_pairs_jit, "numpy": _surviving_pairs_numpy},
    "reach_with_arrival": {
        "numba": _reach_with_arrival_jit,
        "numpy": _reach_with_arrival_numpy,
    },
}


def warmup() -> None:
    """Trigger JIT compilation so the first real decision is not charged for it."""
    grid = np.zeros((5, 5), np.int8)
    hidden = np.zeros((5, 5), np.int8)
    bombs = np.array([[2, 2, 0, 3, 2, 0]], np.int64)
    flame = np.zeros((5, 5), np.int16)
    occ = np.zeros((5, 5), np.uint8)
    occ[0, 0] = 1
    walls_t, bombs_t, flames_t, occ_first = roll_scenario(
        grid, hidden, bombs, flame, occ, 2, 6
    )
    surviving_pairs(walls_t, bombs_t, flames_t, occ_first, True, 4, 4)
    reach_with_arrival(walls_t, bombs_t, flames_t, 4, 4)
