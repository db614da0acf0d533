"""Quest evaluation: how player actions move a quest between states.

A quest's inventory is a multiset of item names kept as a sorted tuple of
(name, count) pairs so that equal inventories compare and serialize equal.
"""

from __future__ import annotations

from dataclasses import replace

from .model import (
    Answer,
    Combine,
    CombineItems,
    FetchItem,
    PickUp,
    QuestAction,
    QuestState,
    QuestStatus,
    Question,
)


class KindMismatch(Exception):
    """Raised when an action does not fit the quest kind."""


def inventory_from(items: dict[str, int]) -> tuple[tuple[str, int], ...]:
    return tuple(sorted((name, count) for name, count in items.items() if count > 0))


def inventory_dict(inventory: tuple[tuple[str, int], ...]) -> dict[str, int]:
    return {name: count for name, count in inventory}


def _add(inventory: tuple[tuple[str, int], ...], item: str) -> tuple[tuple[str, int], ...]:
    items = inventory_dict(inventory)
    items[item] = items.get(item, 0) + 1
    return inventory_from(items)


def _holds_all(inventory: tuple[tuple[str, int], ...], needed: tuple[str, ...]) -> bool:
    items = inventory_dict(inventory)
    for name in needed:
        if items.get(name, 0) < 1:
            return False
        items[name] -= 1
    return True


def _consume(inventory: tuple[tuple[str, int], ...], needed: tuple[str, ...]) -> tuple[tuple[str, int], ...]:
    items = inventory_dict(inventory)
    for name in needed:
        items[name] -= 1
    return inventory_from(items)


def evaluate_quest(state: QuestState, action: QuestAction) -> QuestState:
    """Apply one action to an open (or failed, for retries) quest.

    Fetch completes when the named item lands in the inventory; combine
    consumes its inputs and adds the output once everything needed is held;
    a question completes on the right answer, fails on a wrong one, and a
    failed question accepts another attempt. A completed quest never changes.
    """
    if state.status is QuestStatus.COMPLETED:
        return state
    spec = state.spec
    if isinstance(spec, FetchItem):
        if not isinstance(action, PickUp):
            raise KindMismatch("fetch quests take PickUp actions")
        inventory = _add(state.inventory, action.item)
        status = QuestStatus.COMPLETED if action.item == spec.item else state.status
        return replace(state, inventory=inventory, status=status)
    if isinstance(spec, CombineItems):
        if not isinstance(action, Combine):
            raise KindMismatch("combine quests take Combine actions")
        if sorted(action.items) != sorted(spec.inputs):
            return state  # wrong recipe: nothing happens
        if not _holds_all(state.inventory, spec.inputs):
            return state  # missing ingredients: still open
        inventory = _add(_consume(state.inventory, spec.inputs), spec.output)
        return replace(state, inventory=inventory, status=QuestStatus.COMPLETED)
    if isinstance(spec, Question):
        if not isinstance(action, Answer):
            raise KindMismatch("question quests take Answer actions")
        if action.index == spec.correct:
            return replace(state, status=QuestStatus.COMPLETED)
        return replace(state, status=QuestStatus.FAILED)
    raise TypeError(f"unknown quest spec: {spec!r}")
