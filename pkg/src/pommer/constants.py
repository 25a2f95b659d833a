"""Board codes, action codes, and default rule parameters.

The full rule set (resolution order, conflict handling, kick mechanics,
item behaviour) is documented in RULES.md at the repository root.
"""
from __future__ import annotations

from enum import IntEnum

BOARD_SIZE = 11
MAX_STEPS = 800

# cell codes (int8 in grid arrays)
PASSAGE = 0
RIGID = 1
WOOD = 2
ITEM_AMMO = 3
ITEM_RANGE = 4
ITEM_KICK = 5
FOG = 6

ITEM_CODES = (ITEM_AMMO, ITEM_RANGE, ITEM_KICK)

BOMB_LIFE = 10      # steps from placement to explosion
FLAME_LIFE = 2      # steps a flame cell stays lethal
VIEW_RADIUS = 4     # Chebyshev radius of the observation window

DEFAULT_AMMO = 1
DEFAULT_BLAST = 2

# board generation defaults (diagonally symmetric layout)
NUM_RIGID = 36
NUM_WOOD = 36
NUM_ITEMS = 20

# agent 0 and 2 are team A, 1 and 3 are team B (opposite corners)
CORNERS = ((1, 1), (9, 1), (9, 9), (1, 9))


class Action(IntEnum):
    STOP = 0
    UP = 1
    DOWN = 2
    LEFT = 3
    RIGHT = 4
    BOMB = 5


# action -> (drow, dcol); BOMB does not move
MOVE_DELTAS = ((0, 0), (-1, 0), (1, 0), (0, -1), (0, 1), (0, 0))

# bomb velocity codes: 0 = at rest, 1..4 = moving up/down/left/right
VEL_DELTAS = ((0, 0), (-1, 0), (1, 0), (0, -1), (0, 1))


class Outcome(IntEnum):
    ONGOING = 0
    WIN_A = 1
    WIN_B = 2
    TIE = 3


def team_of(agent_id: int) -> int:
    """0 for team A (agents 0, 2), 1 for team B (agents 1, 3)."""
    return agent_id % 2


def teammate_of(agent_id: int) -> int:
    return (agent_id + 2) % 4


def opponents_of(agent_id: int) -> tuple[int, int]:
    return ((agent_id + 1) % 4, (agent_id + 3) % 4)
