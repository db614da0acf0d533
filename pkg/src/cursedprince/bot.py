"""A deterministic scripted player: always attacks physically, answers
quests correctly, takes the first weapon, and advances through text.

Used to prove the bundled campaign is completable, to generate replay input
files, and to drive balance simulations.
"""

from __future__ import annotations

from dataclasses import dataclass

from .questscript.model import CombineItems, FetchItem, Question
from .session import (
    BattleScreen,
    Event,
    ExitedScreen,
    LoseScreen,
    MainMenuScreen,
    QuestScreen,
    SessionState,
    WinScreen,
    handle_input,
)


@dataclass(frozen=True)
class BotStep:
    choice: str
    screen_kind: str
    events: tuple


def bot_choice(state: SessionState) -> str | None:
    """The bot's move on the current screen, or None when finished."""
    screen = state.screen
    if isinstance(screen, (WinScreen, ExitedScreen)):
        return None
    if isinstance(screen, MainMenuScreen):
        return "play"
    if isinstance(screen, LoseScreen):
        return "continue"
    if isinstance(screen, BattleScreen):
        target = screen.battle.alive_enemies()[0]
        return f"physical {target.id}"
    if isinstance(screen, QuestScreen):
        spec = screen.state.spec
        if isinstance(spec, FetchItem):
            return "pickup"
        if isinstance(spec, CombineItems):
            return "combine"
        if isinstance(spec, Question):
            return f"answer {spec.correct + 1}"
    view_inputs = ("take 1",) if screen.KIND == "weapon_select" else ("next",)
    return view_inputs[0]


def play_through(state: SessionState, max_steps: int = 10_000) -> tuple[SessionState, list[BotStep]]:
    """Drive a session with the bot until it wins (or runs out of steps)."""
    steps: list[BotStep] = []
    for _ in range(max_steps):
        choice = bot_choice(state)
        if choice is None:
            return state, steps
        state, events = handle_input(state, choice)
        steps.append(BotStep(choice=choice, screen_kind=state.screen.KIND, events=tuple(events)))
    raise RuntimeError("bot did not finish the campaign within the step budget")


def bot_event_log(steps: list[BotStep]) -> list[tuple]:
    """Flat, comparable record of a playthrough."""
    return [(s.choice, s.screen_kind, s.events) for s in steps]
