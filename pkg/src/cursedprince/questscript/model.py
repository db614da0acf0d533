"""Data model for campaign scripts: chapters, scenes, quests, diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from ..rules import Archetype, Weapon


class Npc(str, Enum):
    KING = "King"
    QUEEN = "Queen"
    WITCH = "Witch"
    GUARD = "Guard"


class Severity(str, Enum):
    ERROR = "Error"
    WARNING = "Warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    line: int
    column: int
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity.value.lower()}: {self.message}"


# --- scenes ----------------------------------------------------------------


@dataclass(frozen=True)
class Narration:
    text: str


@dataclass(frozen=True)
class Dialog:
    npc: Npc
    lines: tuple[str, ...]


@dataclass(frozen=True)
class WeaponChoice:
    options: tuple[Weapon, ...]

    def __post_init__(self) -> None:
        if not self.options:
            raise ValueError("weapon choice needs at least one option")


@dataclass(frozen=True)
class FetchItem:
    item: str
    hint: str | None = None


@dataclass(frozen=True)
class CombineItems:
    inputs: tuple[str, ...]
    output: str

    def __post_init__(self) -> None:
        if len(self.inputs) < 2:
            raise ValueError("combine needs at least two inputs")


@dataclass(frozen=True)
class Question:
    prompt: str
    choices: tuple[str, ...]
    correct: int

    def __post_init__(self) -> None:
        if len(self.choices) < 2:
            raise ValueError("question needs at least two choices")


QuestSpec = Union[FetchItem, CombineItems, Question]


@dataclass(frozen=True)
class Quest:
    spec: QuestSpec


@dataclass(frozen=True)
class Battle:
    enemy: Archetype
    level: int
    count: int

    def __post_init__(self) -> None:
        if self.level < 1:
            raise ValueError("battle level must be >= 1")
        if self.count < 1:
            raise ValueError("battle count must be >= 1")


Scene = Union[Narration, Dialog, WeaponChoice, Quest, Battle]


@dataclass(frozen=True)
class Chapter:
    name: str
    scenes: tuple[Scene, ...]


@dataclass(frozen=True)
class CampaignScript:
    title: str
    chapters: tuple[Chapter, ...]


# --- quest runtime state ---------------------------------------------------


class QuestStatus(str, Enum):
    OPEN = "Open"
    COMPLETED = "Completed"
    FAILED = "Failed"


@dataclass(frozen=True)
class QuestState:
    """A quest in play: its spec, status, and the items held against it."""

    spec: QuestSpec
    status: QuestStatus = QuestStatus.OPEN
    inventory: tuple[tuple[str, int], ...] = ()


@dataclass(frozen=True)
class PickUp:
    item: str


@dataclass(frozen=True)
class Combine:
    items: tuple[str, ...]


@dataclass(frozen=True)
class Answer:
    index: int


QuestAction = Union[PickUp, Combine, Answer]
