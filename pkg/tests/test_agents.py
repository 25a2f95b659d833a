"""Agent-spec parsing pins."""
import pytest

from pommer.agents import (
    JOINT_LEAF_BUDGET,
    BaselineAgent,
    SearchAgent,
    StopAgent,
    parse_agent_spec,
)
from pommer.search import Variant
from pommer.survivability import FrontierStrategy


def _agent(spec, agent_id=0):
    return parse_agent_spec(spec)(agent_id)


def test_bare_names_build_the_right_agents():
    assert isinstance(_agent("stop"), StopAgent)
    assert isinstance(_agent("baseline"), BaselineAgent)
    assert isinstance(_agent("solo"), SearchAgent)
    assert isinstance(_agent("joint"), SearchAgent)


def test_solo_defaults():
    params = _agent("solo").params
    assert params.variant is Variant.SOLO
    assert params.level == 3
    assert params.horizon == 12
    assert params.depth == 1
    assert params.s_threshold == 100.0
    assert params.leaf_budget is None


def test_joint_defaults_to_a_leaf_budget():
    # unbounded joint enumeration cannot hold the real-time frame, so the
    # bare spec caps it; an explicit value or "none" overrides
    assert _agent("joint").params.leaf_budget == JOINT_LEAF_BUDGET
    assert _agent("joint:leaf_budget=64").params.leaf_budget == 64
    assert _agent("joint:leaf_budget=none").params.leaf_budget is None
    assert _agent("solo:leaf_budget=none").params.leaf_budget is None


def test_search_options_parse():
    params = _agent("solo:level=5,horizon=10,sth=none,eps=0.001,radius=8").params
    assert params.level == 5
    assert params.horizon == 10
    assert params.s_threshold is None
    assert params.epsilon == 0.001
    assert params.interact_radius == 8
    assert _agent("solo:sth=50").params.s_threshold == 50.0
    strategy = _agent("joint:strategy=margin").params.frontier_strategy
    assert strategy is FrontierStrategy.MARGIN


def test_baseline_options_parse():
    agent = _agent("baseline:bomb_prob=0.25,chase_prob=0.5")
    assert agent.bomb_prob == 0.25
    assert agent.chase_prob == 0.5


def test_bad_specs_raise():
    with pytest.raises(ValueError):
        parse_agent_spec("wanderer")
    with pytest.raises(ValueError):
        parse_agent_spec("solo:speed=9")
    with pytest.raises(ValueError):
        parse_agent_spec("baseline:level=3")
    with pytest.raises(ValueError):
        parse_agent_spec("stop:level=3")
