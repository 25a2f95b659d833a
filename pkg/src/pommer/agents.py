"""Agent wrappers and the textual agent-spec format.

A spec is ``name`` or ``name:key=value,key=value``.  Names: ``baseline``,
``solo``, ``joint``, ``stop``.  Search keys: ``level``, ``horizon``,
``depth``, ``sth`` (``none`` disables clipping), ``eps``, ``strategy``
(``binary``/``margin``), ``leaf_budget`` (``none`` removes the cap),
``radius``.  Baseline keys: ``bomb_prob``, ``chase_prob``.
"""
from __future__ import annotations

import numpy as np

from .baseline import ENTER_FUSE, baseline_action
from .constants import Action, BOMB_LIFE
from .engine import Observation
from .search import SearchParams, Variant, decide
from .survivability import FrontierStrategy
from .tracker import init_belief, update

# default leaf cap for joint-action search: unbounded enumeration against
# three live opponents is 6^4 leaves per decision, far past the 100 ms frame
JOINT_LEAF_BUDGET = 250


class StopAgent:
    """Stands still; a deterministic punching bag for tests."""

    def __init__(self, agent_id: int):
        self.agent_id = agent_id

    def reset(self, seed: int) -> None:
        pass

    def act(self, obs: Observation, deadline=None) -> Action:
        return Action.STOP


class BaselineAgent:
    def __init__(self, agent_id: int, bomb_prob: float = 1.0, chase_prob: float = 0.9):
        self.agent_id = agent_id
        self.bomb_prob = bomb_prob
        self.chase_prob = chase_prob
        self._rng = np.random.default_rng(0)
        self._own_bombs: dict[tuple[int, int], int] = {}  # cell -> detonation step

    def reset(self, seed: int) -> None:
        self._rng = np.random.default_rng(seed)
        self._own_bombs = {}

    def act(self, obs: Observation, deadline=None) -> Action:
        # own bombs stay calm until the fuse is short (ENTER_FUSE handles the
        # exit); only those still far from detonation are ignored when fleeing
        self._own_bombs = {
            cell: at for cell, at in self._own_bombs.items() if at > obs.step
        }
        calm = frozenset(
            cell for cell, at in self._own_bombs.items() if at - obs.step > ENTER_FUSE
        )
        action = baseline_action(
            obs, self._rng, self.bomb_prob, self.chase_prob, own_bombs=calm
        )
        if action == Action.BOMB:
            me = obs.self_id
            cell = (int(obs.agent_pos[me, 0]), int(obs.agent_pos[me, 1]))
            self._own_bombs[cell] = obs.step + BOMB_LIFE
        return action


class SearchAgent:
    def __init__(self, agent_id: int, params: SearchParams):
        self.agent_id = agent_id
        self.params = params
        self._belief = None
        self._last_action = None

    def reset(self, seed: int) -> None:
        self._belief = None
        self._last_action = None

    def act(self, obs: Observation, deadline=None) -> Action:
        if self._belief is None:
            self._belief = init_belief(obs)
        else:
            self._belief = update(self._belief, obs, last_action=self._last_action)
        action = decide(self._belief, self.params, deadline)
        self._last_action = int(action)
        return action


def _parse_kv(text: str) -> dict:
    out = {}
    if not text:
        return out
    for part in text.split(","):
        if not part:
            continue
        key, _, value = part.partition("=")
        out[key.strip()] = value.strip()
    return out


def _search_params(variant: Variant, kv: dict) -> SearchParams:
    kwargs = {"variant": variant}
    if "level" in kv:
        kwargs["level"] = int(kv.pop("level"))
    if "horizon" in kv:
        kwargs["horizon"] = int(kv.pop("horizon"))
    if "depth" in kv:
        kwargs["depth"] = int(kv.pop("depth"))
    if "sth" in kv:
        raw = kv.pop("sth")
        kwargs["s_threshold"] = None if raw.lower() == "none" else float(raw)
    if "eps" in kv:
        kwargs["epsilon"] = float(kv.pop("eps"))
    if "strategy" in kv:
        kwargs["frontier_strategy"] = FrontierStrategy[kv.pop("strategy").upper()]
    if "leaf_budget" in kv:
        raw = kv.pop("leaf_budget")
        kwargs["leaf_budget"] = None if raw.lower() == "none" else int(raw)
    elif variant is Variant.JOINT:
        kwargs["leaf_budget"] = JOINT_LEAF_BUDGET
    if "radius" in kv:
        kwargs["interact_radius"] = int(kv.pop("radius"))
    if kv:
        raise ValueError(f"unknown search option(s): {sorted(kv)}")
    return SearchParams(**kwargs)


def parse_agent_spec(spec: str):
    """Return a factory mapping an agent id to a ready agent instance."""
    name, _, rest = spec.partition(":")
    name = name.strip().lower()
    kv = _parse_kv(rest)
    if name == "stop":
        if kv:
            raise ValueError("stop takes no options")
        return lambda agent_id: StopAgent(agent_id)
    if name == "baseline":
        bomb_prob = float(kv.pop("bomb_prob", 1.0))
        chase_prob = float(kv.pop("chase_prob", 0.9))
        if kv:
            raise ValueError(f"unknown baseline option(s): {sorted(kv)}")
        return lambda agent_id: BaselineAgent(agent_id, bomb_prob, chase_prob)
    if name in ("solo", "joint"):
        variant = Variant.SOLO if name == "solo" else Variant.JOINT
        params = _search_params(variant, kv)
        return lambda agent_id: SearchAgent(agent_id, params)
    raise ValueError(f"unknown agent spec: {spec!r}")
