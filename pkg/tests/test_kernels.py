"""The numba and numpy kernel paths must be interchangeable bit for bit."""
import os
import subprocess
import sys

import numpy as np
import pytest

from pommer import kernels
from pommer.constants import ITEM_AMMO, ITEM_KICK, PASSAGE, RIGID, WOOD

needs_numba = pytest.mark.skipif(
    not kernels.NUMBA_ENABLED, reason="numba path disabled in this environment"
)


def random_inputs(seed: int, size: int = 9, horizon: int = 10):
    rng = np.random.default_rng(seed)
    grid = rng.choice(
        np.array([PASSAGE, RIGID, WOOD, ITEM_AMMO], np.int8),
        p=[0.6, 0.15, 0.2, 0.05],
        size=(size, size),
    ).astype(np.int8)
    hidden = np.zeros((size, size), np.int8)
    wood_cells = np.argwhere(grid == WOOD)
    for r, c in wood_cells[: len(wood_cells) // 2]:
        hidden[r, c] = int(rng.integers(ITEM_AMMO, ITEM_KICK + 1))

    free = np.argwhere(grid == PASSAGE)
    rng.shuffle(free)
    n_bombs = int(rng.integers(0, min(4, len(free)) + 1))
    bombs = np.zeros((n_bombs, 6), np.int64)
    for i in range(n_bombs):
        r, c = free[i]
        bombs[i] = (r, c, -1, int(rng.integers(1, 11)), int(rng.integers(2, 5)),
                    int(rng.integers(0, 5)))

    flame = np.where(
        rng.random((size, size)) < 0.05, rng.integers(1, 3, (size, size)), 0
    ).astype(np.int16)
    flame[grid != PASSAGE] = 0

    occ = (rng.random((size, size)) < 0.08).astype(np.uint8)
    occ[grid != PASSAGE] = 0
    expand = int(rng.integers(0, horizon + 1))
    return grid, hidden, bombs, flame, occ, expand, horizon


@needs_numba
@pytest.mark.parametrize("seed", range(40))
def test_roll_scenario_paths_agree(seed):
    args = random_inputs(seed)
    got_nb = kernels.IMPLEMENTATIONS["roll_scenario"]["numba"](*args)
    got_np = kernels.IMPLEMENTATIONS["roll_scenario"]["numpy"](*args)
    for a, b in zip(got_nb, got_np):
        assert a.dtype == b.dtype
        assert np.array_equal(a, b)


@needs_numba
@pytest.mark.parametrize("seed", range(40))
def test_surviving_pairs_paths_agree(seed):
    args = random_inputs(seed)
    walls_t, bombs_t, flames_t, occ_first = kernels.roll_scenario(*args)
    rng = np.random.default_rng(seed + 1000)
    H = walls_t.shape[1]
    for _ in range(5):
        sr, sc = int(rng.integers(0, H)), int(rng.integers(0, H))
        use_occ = bool(rng.integers(0, 2))
        n_nb, alive_nb = kernels.IMPLEMENTATIONS["surviving_pairs"]["numba"](
            walls_t, bombs_t, flames_t, occ_first, use_occ, sr, sc
        )
        n_np, alive_np = kernels.IMPLEMENTATIONS["surviving_pairs"]["numpy"](
            walls_t, bombs_t, flames_t, occ_first, use_occ, sr, sc
        )
        assert int(n_nb) == int(n_np)
        assert np.array_equal(np.asarray(alive_nb, np.uint8), np.asarray(alive_np, np.uint8))


@needs_numba
@pytest.mark.parametrize("seed", range(40))
def test_reach_with_arrival_paths_agree(seed):
    args = random_inputs(seed)
    walls_t, bombs_t, flames_t, _ = kernels.roll_scenario(*args)
    rng = np.random.default_rng(seed + 2000)
    H = walls_t.shape[1]
    for _ in range(5):
        sr, sc = int(rng.integers(0, H)), int(rng.integers(0, H))
        reach_nb, arr_nb = kernels.IMPLEMENTATIONS["reach_with_arrival"]["numba"](
            walls_t, bombs_t, flames_t, sr, sc
        )
        reach_np, arr_np = kernels.IMPLEMENTATIONS["reach_with_arrival"]["numpy"](
            walls_t, bombs_t, flames_t, sr, sc
        )
        assert np.array_equal(np.asarray(reach_nb, np.uint8), np.asarray(reach_np, np.uint8))
        assert np.array_equal(arr_nb, arr_np)


def test_env_flag_selects_numpy_path():
    code = (
        "import pommer.kernels as k;"
        "assert not k.NUMBA_ENABLED;"
        "assert k.roll_scenario is k._roll_scenario_numpy"
    )
    env = dict(os.environ, POMMER_NO_NUMBA="1")
    subprocess.run([sys.executable, "-c", code], check=True, env=env)


def test_warmup_runs():
    kernels.warmup()


def test_never_sentinel_exceeds_horizon():
    assert kernels.NEVER > 800
