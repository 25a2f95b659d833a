"""Deterministic team bomber gridworld with real-time survivability search."""

from .constants import Action, Outcome
from .engine import GameState, Observation, initial_state, observe, outcome, step
from .scenario import OccMode, PessimismParams, Scenario, generate, generate_static
from .search import SearchParams, Variant, decide
from .survivability import FrontierStrategy, frontier_score, pair_count, survivability_ratio
from .tracker import Belief, init_belief, to_search_state, update

__version__ = "0.1.0"

__all__ = [
    "Action",
    "Belief",
    "FrontierStrategy",
    "GameState",
    "Observation",
    "OccMode",
    "Outcome",
    "PessimismParams",
    "Scenario",
    "SearchParams",
    "Variant",
    "decide",
    "frontier_score",
    "generate",
    "generate_static",
    "init_belief",
    "initial_state",
    "observe",
    "survivability_ratio",
    "outcome",
    "pair_count",
    "step",
    "to_search_state",
    "update",
    "__version__",
]
