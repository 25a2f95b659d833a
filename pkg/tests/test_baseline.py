"""Behavioural pins for the rule-based reference opponent."""
import numpy as np

from pommer.agents import BaselineAgent
from pommer.baseline import baseline_action
from pommer.constants import Action, Outcome
from pommer.engine import initial_state, observe, outcome, step
from pommer.harness import agent_seed

from helpers import board


def _obs(state, me=0):
    return observe(state, me)


def test_flees_a_covered_cell_through_the_only_exit():
    # bomb cross reaches the agent inside flee range; Right is the one
    # neighbour outside the cross, so no rng is involved
    state = board("""
    #####
    #0..#
    #.###
    #.###
    #####
    """, bombs=[(3, 1, 0, 5, 3, 0)])
    rng = np.random.default_rng(0)
    assert baseline_action(_obs(state), rng) == Action.RIGHT


def test_ignores_slow_fuses():
    # same cross with a lazy timer: nothing to flee, and with no wood or
    # enemy around the agent never bombs either
    state = board("""
    #####
    #0..#
    #.###
    #.###
    #####
    """, bombs=[(3, 1, 0, 10, 3, 0)])
    for seed in range(20):
        action = baseline_action(_obs(state), np.random.default_rng(seed))
        assert action != Action.BOMB


def test_never_bombs_without_a_target():
    state = board("""
    .....
    .0...
    .....
    .....
    .....
    """)
    for seed in range(50):
        action = baseline_action(_obs(state), np.random.default_rng(seed))
        assert action != Action.BOMB


def test_walks_toward_a_visible_item():
    state = board("""
    .....
    .....
    ..0.a
    .....
    .....
    """)
    rng = np.random.default_rng(3)
    assert baseline_action(_obs(state), rng) == Action.RIGHT


def test_bombs_adjacent_wood_when_escape_exists():
    state = board("""
    .....
    .0+..
    .....
    .....
    .....
    """)
    rng = np.random.default_rng(1)
    assert baseline_action(_obs(state), rng, bomb_prob=1.0) == Action.BOMB


def test_holds_fire_when_the_blast_would_trap_it():
    # the cross covers the whole two-cell pocket, so bombing is suicide
    state = board("""
    .##..
    #0+#.
    .##..
    """)
    rng = np.random.default_rng(1)
    assert baseline_action(_obs(state), rng, bomb_prob=1.0) == Action.STOP


def test_bombs_an_enemy_in_close_quarters():
    state = board("""
    .....
    .0.1.
    .....
    .....
    .....
    """)
    rng = np.random.default_rng(2)
    assert baseline_action(_obs(state), rng) == Action.BOMB


def test_chases_a_visible_enemy():
    state = board("""
    .......
    .0...1.
    .......
    .......
    .......
    .......
    .......
    """)
    rng = np.random.default_rng(4)
    assert baseline_action(_obs(state), rng, chase_prob=1.0) == Action.RIGHT


def test_same_seed_same_choices():
    # two exits tie, so the pick is random but seed-determined
    state = board("""
    #####
    #.0.#
    #.#.#
    #...#
    #####
    """, bombs=[(1, 2, 0, 5, 4, 0)])
    first = BaselineAgent(0)
    second = BaselineAgent(0)
    first.reset(agent_seed(9, 0))
    second.reset(agent_seed(9, 0))
    obs = _obs(state)
    assert [first.act(obs) for _ in range(10)] == [second.act(obs) for _ in range(10)]


def test_self_play_match_is_reproducible():
    def run(match_seed):
        agents = [BaselineAgent(i) for i in range(4)]
        for i, agent in enumerate(agents):
            agent.reset(agent_seed(match_seed, i))
        state = initial_state(match_seed)
        trace = []
        while outcome(state) == Outcome.ONGOING and state.step < 120:
            acts = [
                int(agents[i].act(observe(state, i))) if state.alive[i] else 0
                for i in range(4)
            ]
            trace.append(tuple(acts))
            state = step(state, acts)
        return trace, state

    trace_a, end_a = run(21)
    trace_b, end_b = run(21)
    assert trace_a == trace_b
    assert end_a.step == end_b.step and (end_a.alive == end_b.alive).all()
