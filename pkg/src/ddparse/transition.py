"""Arc-standard transition system over EDUs and the static training oracle.

States are immutable values; ``apply`` returns a new state.  The artificial
root starts on the stack and may only receive its single dependent once the
buffer is empty, which guarantees single-root trees.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import IllegalAction, InvalidCount, NonProjective, TerminalState
from .treebank import DiscourseTree


class Action(enum.Enum):
    SHIFT = "Shift"
    LEFT_ARC = "LeftArc"
    RIGHT_ARC = "RightArc"

    def __str__(self) -> str:
        return self.value


# Fixed ordering for deterministic tie-breaking: Shift < LeftArc < RightArc.
ACTION_ORDER = (Action.SHIFT, Action.LEFT_ARC, Action.RIGHT_ARC)
ACTION_LABELS = tuple(a.value for a in ACTION_ORDER)


@dataclass(frozen=True)
class ParserState:
    stack: tuple[int, ...]
    buffer: tuple[int, ...]
    arcs: frozenset[tuple[int, int]]  # unlabeled (head, dependent) pairs

    @property
    def is_terminal(self) -> bool:
        return not self.buffer and self.stack == (0,)

    def top(self) -> int | None:
        return self.stack[-1] if self.stack else None

    def second(self) -> int | None:
        return self.stack[-2] if len(self.stack) >= 2 else None

    def front(self) -> int | None:
        return self.buffer[0] if self.buffer else None


def initial_state(k: int) -> ParserState:
    if k < 1:
        raise InvalidCount(f"need at least one EDU, got {k}")
    return ParserState(stack=(0,), buffer=tuple(range(1, k + 1)), arcs=frozenset())


def legal_actions(state: ParserState) -> set[Action]:
    """Actions applicable in ``state``.

    Shift needs a non-empty buffer.  LeftArc needs two stack items with a
    non-root second.  RightArc needs two stack items, and when the second is
    the root the buffer must be empty (the root attaches last).
    """
    if state.is_terminal:
        raise TerminalState("no actions in a terminal state")
    legal = set()
    if state.buffer:
        legal.add(Action.SHIFT)
    if len(state.stack) >= 2:
        second = state.stack[-2]
        if second != 0:
            legal.add(Action.LEFT_ARC)
            legal.add(Action.RIGHT_ARC)
        elif not state.buffer:
            legal.add(Action.RIGHT_ARC)
    return legal


def apply(state: ParserState, action: Action) -> ParserState:
    if action not in legal_actions(state):
        raise IllegalAction(action, state)
    stack, buffer, arcs = state.stack, state.buffer, state.arcs
    if action is Action.SHIFT:
        return ParserState(stack + buffer[:1], buffer[1:], arcs)
    top, second = stack[-1], stack[-2]
    if action is Action.LEFT_ARC:
        return ParserState(stack[:-2] + (top,), buffer, arcs | {(top, second)})
    return ParserState(stack[:-1], buffer, arcs | {(second, top)})


def oracle_actions(tree: DiscourseTree) -> list[Action]:
    """Convert a gold tree into the action sequence that derives it.

    Static rule: LeftArc when the gold head of the stack's second item is the
    top; else RightArc when the gold head of the top is the second item and
    all gold dependents of the top are attached; else Shift.  Raises
    NonProjective when the walk gets stuck (no derivation exists).
    """
    head_of = tree.head_map()
    deps_of: dict[int, set[int]] = {}
    for dep, head in head_of.items():
        deps_of.setdefault(head, set()).add(dep)

    state = initial_state(tree.k)
    actions: list[Action] = []
    while not state.is_terminal:
        top, second = state.top(), state.second()
        attached = {dep for _, dep in state.arcs}
        if second is not None and second != 0 and head_of.get(second) == top:
            action = Action.LEFT_ARC
        elif (
            second is not None
            and head_of.get(top) == second
            and deps_of.get(top, set()) <= attached
            and (second != 0 or not state.buffer)
        ):
            action = Action.RIGHT_ARC
        elif state.buffer:
            action = Action.SHIFT
        else:
            raise NonProjective(tree.doc_id)
        state = apply(state, action)
        actions.append(action)

    gold = frozenset((a.head, a.dependent) for a in tree.arcs)
    if state.arcs != gold:
        raise NonProjective(tree.doc_id)
    return actions


def replay(k: int, actions) -> ParserState:
    """Apply a full action sequence from the initial state."""
    state = initial_state(k)
    for action in actions:
        state = apply(state, action)
    return state
