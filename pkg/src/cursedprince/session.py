"""Single-player game flow: a finite state machine over menu and scenes.

A SessionState is an immutable value; handle_input maps (state, labelled
choice) to the next state plus emitted events. Every legal input is listed
by current_view, illegal ones raise and leave the state untouched, and no
transition is driven by time. Scene completion emits one Autosave event.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Union

from .questscript.model import (
    Battle,
    CampaignScript,
    CombineItems,
    Dialog,
    FetchItem,
    Narration,
    Npc,
    Quest,
    QuestState,
    QuestStatus,
    Question,
    Scene,
    Severity,
    WeaponChoice,
)
from .questscript.quests import Answer, Combine, PickUp, evaluate_quest, inventory_dict, inventory_from
from .questscript.validator import validate_campaign
from .rng import derive
from .rules import (
    AttackKind,
    BattleState,
    Combatant,
    Side,
    Weapon,
    new_prince,
    play_player_action,
    spawn,
    start_battle,
)


class SessionError(Exception):
    pass


class InvalidCampaign(SessionError):
    pass


class IllegalInput(SessionError):
    """Input not legal on the current screen; the state is unchanged."""


class NoSave(IllegalInput):
    """'continue' pressed with nothing to resume."""


# ---------------------------------------------------------------------------
# Screens
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MainMenuScreen:
    KIND = "main_menu"


@dataclass(frozen=True)
class AboutScreen:
    KIND = "about"


@dataclass(frozen=True)
class NarrationScreen:
    text: str
    KIND = "narration"


@dataclass(frozen=True)
class DialogScreen:
    npc: Npc
    lines: tuple[str, ...]
    cursor: int
    KIND = "dialog"


@dataclass(frozen=True)
class WeaponSelectScreen:
    options: tuple[Weapon, ...]
    KIND = "weapon_select"


@dataclass(frozen=True)
class QuestScreen:
    state: QuestState
    KIND = "quest"


@dataclass(frozen=True)
class BattleScreen:
    battle: BattleState
    KIND = "battle"


@dataclass(frozen=True)
class ChapterCompleteScreen:
    chapter: str
    exp_gained: int
    monsters_defeated: int
    next_chapter: Optional[str]
    KIND = "chapter_complete"


@dataclass(frozen=True)
class WinScreen:
    KIND = "win"


@dataclass(frozen=True)
class LoseScreen:
    KIND = "lose"


@dataclass(frozen=True)
class ExitedScreen:
    KIND = "exited"


Screen = Union[
    MainMenuScreen,
    AboutScreen,
    NarrationScreen,
    DialogScreen,
    WeaponSelectScreen,
    QuestScreen,
    BattleScreen,
    ChapterCompleteScreen,
    WinScreen,
    LoseScreen,
    ExitedScreen,
]

MAIN_MENU_INPUTS = ("play", "continue", "multiplayer", "about", "exit")

ABOUT_TEXT = (
    "The Cursed Prince",
    "A turn-based royal adventure: fight back from the forest to the palace.",
    "Single player follows the storyline; multiplayer is a co-op monster arena.",
)


# ---------------------------------------------------------------------------
# Events
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Autosave:
    chapter: int
    scene: int


@dataclass(frozen=True)
class MultiplayerRequested:
    pass


Event = Union[Autosave, MultiplayerRequested]


# ---------------------------------------------------------------------------
# Session state
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SessionState:
    screen: Screen
    campaign: CampaignScript
    party: tuple[Combatant, ...]
    progress: tuple[int, int]
    last_reached: tuple[int, int]
    quest_states: tuple[tuple[tuple[int, int], QuestState], ...]
    items: tuple[tuple[str, int], ...]
    seed: int
    save_slot: Optional[str] = None
    chapter_exp: int = 0
    chapter_kills: int = 0

    def scene_at(self, pos: tuple[int, int]) -> Scene:
        ci, si = pos
        return self.campaign.chapters[ci].scenes[si]

    def quest_state_at(self, pos: tuple[int, int]) -> Optional[QuestState]:
        for key, state in self.quest_states:
            if key == pos:
                return state
        return None


@dataclass(frozen=True)
class PartyLine:
    name: str
    hp: int
    max_hp: int
    level: int
    exp: int


@dataclass(frozen=True)
class ViewModel:
    kind: str
    text: tuple[str, ...]
    inputs: tuple[str, ...]
    party: tuple[PartyLine, ...]


def new_session(campaign: CampaignScript, seed: int) -> SessionState:
    """Fresh session at the main menu. The campaign must validate cleanly."""
    errors = [d for d in validate_campaign(campaign) if d.severity is Severity.ERROR]
    if errors:
        raise InvalidCampaign("; ".join(str(d) for d in errors))
    return SessionState(
        screen=MainMenuScreen(),
        campaign=campaign,
        party=(new_prince(),),
        progress=(0, 0),
        last_reached=(0, 0),
        quest_states=(),
        items=(),
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Views and legal inputs
# ---------------------------------------------------------------------------


def _quest_inputs(state: QuestState) -> tuple[str, ...]:
    if state.status is QuestStatus.COMPLETED:
        return ()
    spec = state.spec
    if isinstance(spec, FetchItem):
        return ("pickup",)
    if isinstance(spec, CombineItems):
        return ("combine",)
    return tuple(f"answer {i + 1}" for i in range(len(spec.choices)))


def legal_inputs(s: SessionState) -> tuple[str, ...]:
    """Exactly the inputs handle_input accepts on the current screen."""
    screen = s.screen
    if isinstance(screen, MainMenuScreen):
        return MAIN_MENU_INPUTS
    if isinstance(screen, AboutScreen):
        return ("back",)
    if isinstance(screen, (NarrationScreen, DialogScreen, ChapterCompleteScreen)):
        return ("next",)
    if isinstance(screen, WeaponSelectScreen):
        return tuple(f"take {i + 1}" for i in range(len(screen.options)))
    if isinstance(screen, QuestScreen):
        return _quest_inputs(screen.state)
    if isinstance(screen, BattleScreen):
        targets = screen.battle.alive_enemies()
        return tuple(
            f"{kind.value} {enemy.id}"
            for kind in (AttackKind.PHYSICAL, AttackKind.MAGIC)
            for enemy in targets
        )
    if isinstance(screen, WinScreen):
        return ("return",)
    if isinstance(screen, LoseScreen):
        return ("continue",)
    return ()  # Exited


def _party_lines(s: SessionState) -> tuple[PartyLine, ...]:
    return tuple(
        PartyLine(name=c.name, hp=c.hp, max_hp=c.stats.max_hp, level=c.level, exp=c.exp)
        for c in s.party
    )


def _weapon_label(w: Weapon) -> str:
    if w.attack_bonus:
        return f"{w.name} (atk +{w.attack_bonus})"
    return f"{w.name} (mag +{w.magic_bonus})"


def _screen_text(s: SessionState) -> tuple[str, ...]:
    screen = s.screen
    if isinstance(screen, MainMenuScreen):
        return (s.campaign.title,)
    if isinstance(screen, AboutScreen):
        return ABOUT_TEXT
    if isinstance(screen, NarrationScreen):
        return (screen.text,)
    if isinstance(screen, DialogScreen):
        return (f"{screen.npc.value}: {screen.lines[screen.cursor]}",)
    if isinstance(screen, WeaponSelectScreen):
        lines = ["Choose your weapon:"]
        lines += [f"{i + 1}) {_weapon_label(w)}" for i, w in enumerate(screen.options)]
        return tuple(lines)
    if isinstance(screen, QuestScreen):
        spec = screen.state.spec
        if isinstance(spec, FetchItem):
            lines = [f"Quest: find the {spec.item}."]
            if spec.hint:
                lines.append(f"Hint: {spec.hint}")
        elif isinstance(spec, CombineItems):
            lines = [f"Quest: combine {' + '.join(spec.inputs)} into {spec.output}."]
            held = inventory_dict(screen.state.inventory)
            have = [i for i in spec.inputs if held.get(i, 0) > 0]
            lines.append("Carrying: " + (", ".join(have) if have else "nothing useful"))
        else:
            lines = [spec.prompt]
            lines += [f"{i + 1}) {choice}" for i, choice in enumerate(spec.choices)]
            if screen.state.status is QuestStatus.FAILED:
                lines.append("Wrong answer. Try again.")
        return tuple(lines)
    if isinstance(screen, BattleScreen):
        battle = screen.battle
        lines = [f"Round {battle.round}"]
        lines += [f"{e.name} ({e.id}): {e.hp}/{e.stats.max_hp} hp" for e in battle.alive_enemies()]
        lines += list(battle.log[-4:])
        return tuple(lines)
    if isinstance(screen, ChapterCompleteScreen):
        lines = [
            f"Chapter complete: {screen.chapter}",
            f"EXP gained: {screen.exp_gained}",
            f"Monsters defeated: {screen.monsters_defeated}",
        ]
        if screen.next_chapter:
            lines.append(f"Next chapter: {screen.next_chapter}")
        return tuple(lines)
    if isinstance(screen, WinScreen):
        return ("The witch is defeated and the curse is broken.", "The kingdom is whole again.")
    if isinstance(screen, LoseScreen):
        return ("The prince has fallen.", "Continue to retry from the last scene you reached.")
    return ()


def current_view(s: SessionState) -> ViewModel:
    """Pure projection of a state into what a renderer needs."""
    return ViewModel(
        kind=s.screen.KIND,
        text=_screen_text(s),
        inputs=legal_inputs(s),
        party=_party_lines(s),
    )


# ---------------------------------------------------------------------------
# Transitions
# ---------------------------------------------------------------------------


def _screen_for_scene(s: SessionState, pos: tuple[int, int]) -> tuple[Screen, SessionState]:
    """Build the screen for a scene, registering quest state if needed."""
    scene = s.scene_at(pos)
    if isinstance(scene, Narration):
        return NarrationScreen(scene.text), s
    if isinstance(scene, Dialog):
        return DialogScreen(scene.npc, scene.lines, 0), s
    if isinstance(scene, WeaponChoice):
        return WeaponSelectScreen(scene.options), s
    if isinstance(scene, Quest):
        state = s.quest_state_at(pos)
        if state is None:
            state = QuestState(spec=scene.spec, inventory=s.items)
            entries = dict(s.quest_states)
            entries[pos] = state
            s = replace(s, quest_states=tuple(sorted(entries.items())))
        return QuestScreen(state), s
    if isinstance(scene, Battle):
        enemies = tuple(
            spawn(scene.enemy, scene.level, f"e{i + 1}", Side.ENEMY) for i in range(scene.count)
        )
        battle = start_battle(s.party, enemies, derive(s.seed, pos[0], pos[1]))
        if battle.winner is not None:
            # enemies cannot all die before a player acts, but a party can
            raise SessionError("party wiped before acting")
        return BattleScreen(battle), s
    raise TypeError(f"unknown scene: {scene!r}")


def _enter_scene(s: SessionState, pos: tuple[int, int]) -> SessionState:
    screen, s = _screen_for_scene(s, pos)
    return replace(s, screen=screen, progress=pos, last_reached=max(s.last_reached, pos))


def _complete_scene(s: SessionState) -> tuple[SessionState, list[Event]]:
    """Advance past the just-finished scene at s.progress."""
    ci, si = s.progress
    events: list[Event] = [Autosave(chapter=ci, scene=si)]
    chapter = s.campaign.chapters[ci]
    if si + 1 < len(chapter.scenes):
        return _enter_scene(s, (ci, si + 1)), events
    if ci + 1 < len(s.campaign.chapters):
        next_name = s.campaign.chapters[ci + 1].name
        screen = ChapterCompleteScreen(
            chapter=chapter.name,
            exp_gained=s.chapter_exp,
            monsters_defeated=s.chapter_kills,
            next_chapter=next_name,
        )
        pos = (ci + 1, 0)
        return replace(s, screen=screen, progress=pos, last_reached=max(s.last_reached, pos)), events
    # last scene of the last chapter: the campaign is won
    return replace(s, screen=WinScreen()), events


def _restart(s: SessionState) -> SessionState:
    """'play' from the menu: a fresh run with the same campaign and seed."""
    fresh = replace(
        s,
        party=(new_prince(),),
        progress=(0, 0),
        last_reached=(0, 0),
        quest_states=(),
        items=(),
        chapter_exp=0,
        chapter_kills=0,
    )
    return _enter_scene(fresh, (0, 0))


def _handle_quest_input(s: SessionState, screen: QuestScreen, label: str) -> tuple[SessionState, list[Event]]:
    spec = screen.state.spec
    if isinstance(spec, FetchItem):
        action = PickUp(spec.item)
    elif isinstance(spec, CombineItems):
        action = Combine(spec.inputs)
    else:
        action = Answer(int(label.split()[1]) - 1)
    after = evaluate_quest(screen.state, action)
    entries = dict(s.quest_states)
    entries[s.progress] = after
    s = replace(s, quest_states=tuple(sorted(entries.items())))
    if after.status is QuestStatus.COMPLETED:
        s = replace(s, items=after.inventory)
        return _complete_scene(s)
    return replace(s, screen=QuestScreen(after)), []


def _handle_battle_input(s: SessionState, screen: BattleScreen, label: str) -> tuple[SessionState, list[Event]]:
    kind_word, target_id = label.split()
    battle = play_player_action(screen.battle, AttackKind(kind_word), target_id)
    if battle.winner is None:
        return replace(s, screen=BattleScreen(battle)), []
    # earned experience sticks whether the battle was won or lost
    s = replace(
        s,
        party=battle.party,
        chapter_exp=s.chapter_exp + sum(n for _, n in battle.exp_gained),
        chapter_kills=s.chapter_kills + battle.kills,
    )
    if battle.winner is Side.PLAYER:
        return _complete_scene(s)
    return replace(s, screen=LoseScreen()), []


def handle_input(s: SessionState, label: str) -> tuple[SessionState, list[Event]]:
    """Total transition function over (screen, labelled input).

    Raises IllegalInput (state unchanged) for anything the current view does
    not offer; NoSave for 'continue' with nothing to resume. The win screen
    accepts any input and returns to the main menu.
    """
    screen = s.screen
    if isinstance(screen, WinScreen):
        return replace(s, screen=MainMenuScreen()), []
    allowed = legal_inputs(s)
    if label not in allowed:
        raise IllegalInput(f"input {label!r} is not available on {screen.KIND}")
    if isinstance(screen, MainMenuScreen):
        if label == "play":
            return _restart(s), []
        if label == "continue":
            if s.last_reached == (0, 0):
                raise NoSave("no progress to resume")
            return _enter_scene(s, s.last_reached), []
        if label == "multiplayer":
            return s, [MultiplayerRequested()]
        if label == "about":
            return replace(s, screen=AboutScreen()), []
        return replace(s, screen=ExitedScreen()), []
    if isinstance(screen, AboutScreen):
        return replace(s, screen=MainMenuScreen()), []
    if isinstance(screen, NarrationScreen):
        return _complete_scene(s)
    if isinstance(screen, DialogScreen):
        if screen.cursor + 1 < len(screen.lines):
            return replace(s, screen=replace(screen, cursor=screen.cursor + 1)), []
        return _complete_scene(s)
    if isinstance(screen, WeaponSelectScreen):
        index = int(label.split()[1]) - 1
        weapon = screen.options[index]
        party = (replace(s.party[0], weapon=weapon),) + s.party[1:]
        return _complete_scene(replace(s, party=party))
    if isinstance(screen, QuestScreen):
        return _handle_quest_input(s, screen, label)
    if isinstance(screen, BattleScreen):
        return _handle_battle_input(s, screen, label)
    if isinstance(screen, ChapterCompleteScreen):
        s = replace(s, chapter_exp=0, chapter_kills=0)
        return _enter_scene(s, s.progress), []
    if isinstance(screen, LoseScreen):
        party = tuple(replace(c, hp=c.stats.max_hp) for c in s.party)
        s = replace(s, party=party, progress=s.last_reached)
        return _enter_scene(s, s.last_reached), []
    raise IllegalInput(f"no inputs are available on {screen.KIND}")
