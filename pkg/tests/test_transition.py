import random

import pytest

from ddparse.errors import IllegalAction, InvalidCount, NonProjective, TerminalState
from ddparse.transition import (
    Action,
    ParserState,
    apply,
    initial_state,
    legal_actions,
    oracle_actions,
    replay,
)

from util import enumerate_valid_trees, random_projective_tree, tree_from_heads


def test_initial_state():
    state = initial_state(1)
    assert state.stack == (0,)
    assert state.buffer == (1,)
    assert initial_state(3).buffer == (1, 2, 3)


def test_initial_state_rejects_zero():
    with pytest.raises(InvalidCount):
        initial_state(0)


def test_legal_actions_initial_only_shift():
    assert legal_actions(initial_state(3)) == {Action.SHIFT}


def test_legal_actions_two_on_stack_with_buffer():
    state = ParserState(stack=(0, 1, 2), buffer=(3,), arcs=frozenset())
    assert legal_actions(state) == {Action.SHIFT, Action.LEFT_ARC, Action.RIGHT_ARC}


def test_legal_actions_root_arc_forbidden_while_buffer_nonempty():
    state = ParserState(stack=(0, 1), buffer=(2,), arcs=frozenset())
    assert legal_actions(state) == {Action.SHIFT}


def test_legal_actions_terminal_state_raises():
    with pytest.raises(TerminalState):
        legal_actions(ParserState(stack=(0,), buffer=(), arcs=frozenset({(0, 1)})))


def test_apply_shift():
    state = ParserState(stack=(0,), buffer=(1, 2), arcs=frozenset())
    out = apply(state, Action.SHIFT)
    assert (out.stack, out.buffer, out.arcs) == ((0, 1), (2,), frozenset())


def test_apply_right_arc():
    state = ParserState(stack=(0, 1, 2), buffer=(), arcs=frozenset())
    out = apply(state, Action.RIGHT_ARC)
    assert (out.stack, out.arcs) == ((0, 1), frozenset({(1, 2)}))


def test_apply_left_arc():
    state = ParserState(stack=(0, 1, 2), buffer=(), arcs=frozenset())
    out = apply(state, Action.LEFT_ARC)
    assert (out.stack, out.arcs) == ((0, 2), frozenset({(2, 1)}))


def test_apply_illegal_action_raises():
    with pytest.raises(IllegalAction):
        apply(initial_state(2), Action.LEFT_ARC)


def test_oracle_example_tree():
    tree = tree_from_heads([2, 0, 2])  # {0->2, 2->1, 2->3}
    assert oracle_actions(tree) == [
        Action.SHIFT, Action.SHIFT, Action.LEFT_ARC,
        Action.SHIFT, Action.RIGHT_ARC, Action.RIGHT_ARC,
    ]


def test_oracle_smallest_tree():
    assert oracle_actions(tree_from_heads([0])) == [Action.SHIFT, Action.RIGHT_ARC]


def test_oracle_rejects_non_projective():
    tree = tree_from_heads([4, 0, 1, 2])  # the is_projective false example
    with pytest.raises(NonProjective):
        oracle_actions(tree)


def test_oracle_roundtrip_exhaustive_small_k():
    for k in range(1, 6):
        for tree in enumerate_valid_trees(k, projective_only=True):
            actions = oracle_actions(tree)
            assert len(actions) == 2 * k
            assert sum(1 for a in actions if a is Action.SHIFT) == k
            state = replay(k, actions)
            assert state.arcs == frozenset((a.head, a.dependent) for a in tree.arcs)


def _check_state_invariants(state: ParserState, k: int):
    dependents = [d for _, d in state.arcs]
    everything = list(state.stack) + list(state.buffer) + dependents
    assert sorted(everything) == list(range(k + 1))


def test_random_walks_preserve_invariants_and_terminate_in_2k():
    rng = random.Random(11)
    for _ in range(200):
        k = rng.randint(1, 12)
        state = initial_state(k)
        steps = 0
        while not state.is_terminal:
            choice = rng.choice(sorted(legal_actions(state), key=lambda a: a.value))
            state = apply(state, choice)
            steps += 1
            _check_state_invariants(state, k)
        assert steps == 2 * k
        heads = {}
        for h, d in state.arcs:
            heads[d] = h
        assert sorted(heads) == list(range(1, k + 1))


def test_oracle_roundtrip_random_larger_trees():
    rng = random.Random(5)
    for _ in range(100):
        tree = random_valid_tree(rng.randint(1, 12), rng, projective=True)
        state = replay(tree.k, oracle_actions(tree))
        assert state.arcs == frozenset((a.head, a.dependent) for a in tree.arcs)
