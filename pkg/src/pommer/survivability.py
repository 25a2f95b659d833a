"""Survivability measures evaluated on scenarios.

Two measures are provided:

* :func:`pair_count` counts the (step, position) pairs an agent can still be
  at while guaranteed to survive to the end of the scenario.  It combines a
  forward reachability pass with a backward pruning pass, so a pair only
  counts when some move sequence through it avoids every projected flame and
  every possibly-occupied cell up to the horizon.
* :func:`frontier_score` scores the positions reachable at the final step.
  Each frontier cell counts if the agent's first possible arrival beats the
  earliest possible occupation by the non-excluded agents (``BINARY``), or
  contributes the size of that time lead (``MARGIN``).

:func:`survivability_ratio` normalises another agent's pair count by how well
that agent would do if the evaluating agent vanished, which isolates the
influence exerted by the evaluator from board luck.
"""
from __future__ import annotations

from dataclasses import replace
from enum import IntEnum

import numpy as np

from . import kernels
from .engine import B_OWNER, GameState
from .kernels import NEVER
from .scenario import PessimismParams, Scenario, generate_static


class FrontierStrategy(IntEnum):
    BINARY = 0
    MARGIN = 1


def pair_count(sc: Scenario, pos) -> int:
    """Surviving (step, position) pairs for an agent starting at ``pos``."""
    count, _ = kernels.surviving_pairs(
        sc.walls, sc.bombs, sc.flames, sc.occupied_from, True, int(pos[0]), int(pos[1])
    )
    return int(count)


def pair_count_detail(sc: Scenario, pos):
    """Pair count plus the surviving (t, r, c) mask, for inspection."""
    count, alive = kernels.surviving_pairs(
        sc.walls, sc.bombs, sc.flames, sc.occupied_from, True, int(pos[0]), int(pos[1])
    )
    return int(count), alive


def max_pair_count(sc: Scenario) -> int:
    """Upper bound of :func:`pair_count` for this scenario's shape."""
    H, W = sc.shape
    return (sc.horizon + 1) * H * W


def frontier_score(
    sc: Scenario, pos, strategy: FrontierStrategy = FrontierStrategy.BINARY
) -> int:
    """Score the cells reachable at the horizon against earliest occupation."""
    reach, arrival = kernels.reach_with_arrival(
        sc.walls, sc.bombs, sc.flames, int(pos[0]), int(pos[1])
    )
    frontier = reach[sc.horizon] == 1
    occ = np.minimum(sc.occupied_from.astype(np.int64), sc.horizon + 1)
    arr = arrival.astype(np.int64)
    if strategy == FrontierStrategy.BINARY:
        return int(np.count_nonzero(frontier & (arr < occ)))
    lead = np.clip(occ - arr, 0, sc.horizon + 1)
    return int(lead[frontier].sum())


def survivability_ratio(
    state: GameState, subject: int, viewer: int, params: PessimismParams
) -> float:
    """Subject pair count with everyone else static, divided by the same
    count in the counterfactual world without the viewer: the viewer's body
    and the bombs the viewer owns are removed, so the ratio isolates exactly
    the influence the viewer exerts.  Works for opponents (pressure to
    maximise) and the teammate alike (harm to avoid); a subject that is
    equally well off without the viewer scores 1.0, and so does a subject
    whose baseline count is zero (nothing the viewer can influence)."""
    pos = state.agent_pos[subject]
    with_viewer = generate_static(state, excluded={subject}, params=params)
    num = pair_count(with_viewer, pos)
    absent = replace(state, bombs=state.bombs[state.bombs[:, B_OWNER] != viewer])
    without_viewer = generate_static(absent, excluded={subject, viewer}, params=params)
    den = pair_count(without_viewer, pos)
    if den == 0:
        return 1.0
    return min(num / den, 1.0)
