"""Canonical structured-text codec shared by save files and the wire protocol.

Every domain value maps to plain JSON types and back. Canonical encoding is
UTF-8 JSON with sorted keys and no whitespace, so equal values always encode
to identical bytes. Ordered collections are arrays (JSON objects would lose
order under key sorting). Decoding validates shapes and raises DecodeError.
"""

from __future__ import annotations

import json
from typing import Any

from .questscript.model import (
    Battle,
    CampaignScript,
    Chapter,
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
    WeaponChoice,
)
from .rules import (
    Archetype,
    AttackKind,
    AttackOutcome,
    BattleResult,
    BattleState,
    Combatant,
    LevelUpReport,
    Side,
    Stats,
    Weapon,
)
from .session import (
    AboutScreen,
    Autosave,
    BattleScreen,
    ChapterCompleteScreen,
    DialogScreen,
    Event,
    ExitedScreen,
    LoseScreen,
    MainMenuScreen,
    MultiplayerRequested,
    NarrationScreen,
    PartyLine,
    QuestScreen,
    Screen,
    SessionState,
    ViewModel,
    WeaponSelectScreen,
    WinScreen,
)


class DecodeError(ValueError):
    """Structurally invalid document for the requested type."""


def canonical_json(value: Any) -> bytes:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def _need(obj: Any, key: str) -> Any:
    if not isinstance(obj, dict) or key not in obj:
        raise DecodeError(f"missing field {key!r}")
    return obj[key]


def _need_int(obj: Any, key: str) -> int:
    value = _need(obj, key)
    if not isinstance(value, int) or isinstance(value, bool):
        raise DecodeError(f"field {key!r} must be an integer")
    return value


def _need_str(obj: Any, key: str) -> str:
    value = _need(obj, key)
    if not isinstance(value, str):
        raise DecodeError(f"field {key!r} must be a string")
    return value


def _need_list(obj: Any, key: str) -> list:
    value = _need(obj, key)
    if not isinstance(value, list):
        raise DecodeError(f"field {key!r} must be an array")
    return value


def _enum(cls, value):
    try:
        return cls(value)
    except ValueError as exc:
        raise DecodeError(f"bad {cls.__name__} value {value!r}") from exc


# --- rules values ------------------------------------------------------------


def stats_to_jsonable(stats: Stats) -> dict:
    return {
        "max_hp": stats.max_hp,
        "attack": stats.attack,
        "magic": stats.magic,
        "defense": stats.defense,
        "resist": stats.resist,
        "speed": stats.speed,
    }


def stats_from_jsonable(obj: Any) -> Stats:
    try:
        return Stats(**{k: _need_int(obj, k) for k in ("max_hp", "attack", "magic", "defense", "resist", "speed")})
    except ValueError as exc:
        raise DecodeError(str(exc)) from exc


def weapon_to_jsonable(weapon: Weapon | None) -> dict | None:
    if weapon is None:
        return None
    return {"name": weapon.name, "attack_bonus": weapon.attack_bonus, "magic_bonus": weapon.magic_bonus}


def weapon_from_jsonable(obj: Any) -> Weapon | None:
    if obj is None:
        return None
    try:
        return Weapon(
            name=_need_str(obj, "name"),
            attack_bonus=_need_int(obj, "attack_bonus"),
            magic_bonus=_need_int(obj, "magic_bonus"),
        )
    except ValueError as exc:
        raise DecodeError(str(exc)) from exc


def combatant_to_jsonable(c: Combatant) -> dict:
    return {
        "id": c.id,
        "archetype": c.archetype.value,
        "name": c.name,
        "level": c.level,
        "exp": c.exp,
        "hp": c.hp,
        "stats": stats_to_jsonable(c.stats),
        "weapon": weapon_to_jsonable(c.weapon),
        "side": c.side.value,
    }


def combatant_from_jsonable(obj: Any) -> Combatant:
    try:
        return Combatant(
            id=_need_str(obj, "id"),
            archetype=_enum(Archetype, _need_str(obj, "archetype")),
            name=_need_str(obj, "name"),
            level=_need_int(obj, "level"),
            exp=_need_int(obj, "exp"),
            hp=_need_int(obj, "hp"),
            stats=stats_from_jsonable(_need(obj, "stats")),
            weapon=weapon_from_jsonable(_need(obj, "weapon")),
            side=_enum(Side, _need_str(obj, "side")),
        )
    except ValueError as exc:
        raise DecodeError(str(exc)) from exc


def outcome_to_jsonable(outcome: AttackOutcome) -> dict:
    return {
        "kind": outcome.kind.value,
        "damage": outcome.damage,
        "defender_hp_after": outcome.defender_hp_after,
        "defeated": outcome.defeated,
    }


def outcome_from_jsonable(obj: Any) -> AttackOutcome:
    defeated = _need(obj, "defeated")
    if not isinstance(defeated, bool):
        raise DecodeError("field 'defeated' must be a boolean")
    return AttackOutcome(
        kind=_enum(AttackKind, _need_str(obj, "kind")),
        damage=_need_int(obj, "damage"),
        defender_hp_after=_need_int(obj, "defender_hp_after"),
        defeated=defeated,
    )


def _pairs_to_jsonable(pairs: tuple[tuple[str, int], ...]) -> list:
    return [[name, count] for name, count in pairs]


def _pairs_from_jsonable(value: Any) -> tuple[tuple[str, int], ...]:
    if not isinstance(value, list):
        raise DecodeError("expected an array of [name, count] pairs")
    out = []
    for entry in value:
        if not (isinstance(entry, list) and len(entry) == 2 and isinstance(entry[0], str) and isinstance(entry[1], int)):
            raise DecodeError("expected [name, count] pair")
        out.append((entry[0], entry[1]))
    return tuple(out)


def battle_state_to_jsonable(b: BattleState) -> dict:
    return {
        "party": [combatant_to_jsonable(c) for c in b.party],
        "enemies": [combatant_to_jsonable(c) for c in b.enemies],
        "seed": b.seed,
        "round": b.round,
        "pending": list(b.pending),
        "transcript": [outcome_to_jsonable(o) for o in b.transcript],
        "log": list(b.log),
        "exp_gained": _pairs_to_jsonable(b.exp_gained),
        "levels_gained": _pairs_to_jsonable(b.levels_gained),
        "kills": b.kills,
        "winner": b.winner.value if b.winner else None,
    }


def battle_state_from_jsonable(obj: Any) -> BattleState:
    winner = _need(obj, "winner")
    pending = _need_list(obj, "pending")
    if not all(isinstance(p, str) for p in pending):
        raise DecodeError("pending must hold combatant ids")
    return BattleState(
        party=tuple(combatant_from_jsonable(c) for c in _need_list(obj, "party")),
        enemies=tuple(combatant_from_jsonable(c) for c in _need_list(obj, "enemies")),
        seed=_need_int(obj, "seed"),
        round=_need_int(obj, "round"),
        pending=tuple(pending),
        transcript=tuple(outcome_from_jsonable(o) for o in _need_list(obj, "transcript")),
        log=tuple(str(line) for line in _need_list(obj, "log")),
        exp_gained=_pairs_from_jsonable(_need(obj, "exp_gained")),
        levels_gained=_pairs_from_jsonable(_need(obj, "levels_gained")),
        kills=_need_int(obj, "kills"),
        winner=_enum(Side, winner) if winner is not None else None,
    )


def battle_result_to_jsonable(result: BattleResult) -> dict:
    return {
        "winner": result.winner.value,
        "turns": result.turns,
        "survivors": [combatant_to_jsonable(c) for c in result.survivors],
        "exp_awards": [
            [pid, {"levels_gained": r.levels_gained, "new_level": r.new_level, "exp_remainder": r.exp_remainder}]
            for pid, r in sorted(result.exp_awards.items())
        ],
        "transcript": [outcome_to_jsonable(o) for o in result.transcript],
    }


# --- campaign scripts ---------------------------------------------------------


def scene_to_jsonable(scene: Scene) -> dict:
    if isinstance(scene, Narration):
        return {"k": "narration", "text": scene.text}
    if isinstance(scene, Dialog):
        return {"k": "dialog", "npc": scene.npc.value, "lines": list(scene.lines)}
    if isinstance(scene, WeaponChoice):
        return {"k": "weapons", "options": [weapon_to_jsonable(w) for w in scene.options]}
    if isinstance(scene, Quest):
        return {"k": "quest", "spec": quest_spec_to_jsonable(scene.spec)}
    if isinstance(scene, Battle):
        return {"k": "battle", "enemy": scene.enemy.value, "level": scene.level, "count": scene.count}
    raise TypeError(f"unknown scene: {scene!r}")


def scene_from_jsonable(obj: Any) -> Scene:
    kind = _need_str(obj, "k")
    try:
        if kind == "narration":
            return Narration(_need_str(obj, "text"))
        if kind == "dialog":
            return Dialog(
                npc=_enum(Npc, _need_str(obj, "npc")),
                lines=tuple(str(x) for x in _need_list(obj, "lines")),
            )
        if kind == "weapons":
            options = []
            for w in _need_list(obj, "options"):
                weapon = weapon_from_jsonable(w)
                if weapon is None:
                    raise DecodeError("weapon option cannot be null")
                options.append(weapon)
            return WeaponChoice(tuple(options))
        if kind == "quest":
            return Quest(quest_spec_from_jsonable(_need(obj, "spec")))
        if kind == "battle":
            return Battle(
                enemy=_enum(Archetype, _need_str(obj, "enemy")),
                level=_need_int(obj, "level"),
                count=_need_int(obj, "count"),
            )
    except ValueError as exc:
        raise DecodeError(str(exc)) from exc
    raise DecodeError(f"unknown scene kind {kind!r}")


def quest_spec_to_jsonable(spec) -> dict:
    if isinstance(spec, FetchItem):
        return {"k": "fetch", "item": spec.item, "hint": spec.hint}
    if isinstance(spec, CombineItems):
        return {"k": "combine", "inputs": list(spec.inputs), "output": spec.output}
    if isinstance(spec, Question):
        return {"k": "question", "prompt": spec.prompt, "choices": list(spec.choices), "correct": spec.correct}
    raise TypeError(f"unknown quest spec: {spec!r}")


def quest_spec_from_jsonable(obj: Any):
    kind = _need_str(obj, "k")
    try:
        if kind == "fetch":
            hint = _need(obj, "hint")
            if hint is not None and not isinstance(hint, str):
                raise DecodeError("hint must be a string or null")
            return FetchItem(item=_need_str(obj, "item"), hint=hint)
        if kind == "combine":
            return CombineItems(
                inputs=tuple(str(x) for x in _need_list(obj, "inputs")),
                output=_need_str(obj, "output"),
            )
        if kind == "question":
            return Question(
                prompt=_need_str(obj, "prompt"),
                choices=tuple(str(x) for x in _need_list(obj, "choices")),
                correct=_need_int(obj, "correct"),
            )
    except ValueError as exc:
        raise DecodeError(str(exc)) from exc
    raise DecodeError(f"unknown quest kind {kind!r}")


def campaign_to_jsonable(script: CampaignScript) -> dict:
    return {
        "title": script.title,
        "chapters": [
            {"name": ch.name, "scenes": [scene_to_jsonable(s) for s in ch.scenes]}
            for ch in script.chapters
        ],
    }


def campaign_from_jsonable(obj: Any) -> CampaignScript:
    chapters = []
    for ch in _need_list(obj, "chapters"):
        chapters.append(
            Chapter(
                name=_need_str(ch, "name"),
                scenes=tuple(scene_from_jsonable(s) for s in _need_list(ch, "scenes")),
            )
        )
    if not chapters:
        raise DecodeError("campaign needs at least one chapter")
    return CampaignScript(title=_need_str(obj, "title"), chapters=tuple(chapters))


def quest_state_to_jsonable(state: QuestState) -> dict:
    return {
        "spec": quest_spec_to_jsonable(state.spec),
        "status": state.status.value,
        "inventory": _pairs_to_jsonable(state.inventory),
    }


def quest_state_from_jsonable(obj: Any) -> QuestState:
    return QuestState(
        spec=quest_spec_from_jsonable(_need(obj, "spec")),
        status=_enum(QuestStatus, _need_str(obj, "status")),
        inventory=_pairs_from_jsonable(_need(obj, "inventory")),
    )


# --- screens and sessions -----------------------------------------------------


def screen_to_jsonable(screen: Screen) -> dict:
    if isinstance(screen, MainMenuScreen):
        return {"k": "main_menu"}
    if isinstance(screen, AboutScreen):
        return {"k": "about"}
    if isinstance(screen, NarrationScreen):
        return {"k": "narration", "text": screen.text}
    if isinstance(screen, DialogScreen):
        return {"k": "dialog", "npc": screen.npc.value, "lines": list(screen.lines), "cursor": screen.cursor}
    if isinstance(screen, WeaponSelectScreen):
        return {"k": "weapon_select", "options": [weapon_to_jsonable(w) for w in screen.options]}
    if isinstance(screen, QuestScreen):
        return {"k": "quest", "state": quest_state_to_jsonable(screen.state)}
    if isinstance(screen, BattleScreen):
        return {"k": "battle", "battle": battle_state_to_jsonable(screen.battle)}
    if isinstance(screen, ChapterCompleteScreen):
        return {
            "k": "chapter_complete",
            "chapter": screen.chapter,
            "exp_gained": screen.exp_gained,
            "monsters_defeated": screen.monsters_defeated,
            "next_chapter": screen.next_chapter,
        }
    if isinstance(screen, WinScreen):
        return {"k": "win"}
    if isinstance(screen, LoseScreen):
        return {"k": "lose"}
    if isinstance(screen, ExitedScreen):
        return {"k": "exited"}
    raise TypeError(f"unknown screen: {screen!r}")


def screen_from_jsonable(obj: Any) -> Screen:
    kind = _need_str(obj, "k")
    if kind == "main_menu":
        return MainMenuScreen()
    if kind == "about":
        return AboutScreen()
    if kind == "narration":
        return NarrationScreen(_need_str(obj, "text"))
    if kind == "dialog":
        return DialogScreen(
            npc=_enum(Npc, _need_str(obj, "npc")),
            lines=tuple(str(x) for x in _need_list(obj, "lines")),
            cursor=_need_int(obj, "cursor"),
        )
    if kind == "weapon_select":
        options = []
        for w in _need_list(obj, "options"):
            weapon = weapon_from_jsonable(w)
            if weapon is None:
                raise DecodeError("weapon option cannot be null")
            options.append(weapon)
        return WeaponSelectScreen(tuple(options))
    if kind == "quest":
        return QuestScreen(quest_state_from_jsonable(_need(obj, "state")))
    if kind == "battle":
        return BattleScreen(battle_state_from_jsonable(_need(obj, "battle")))
    if kind == "chapter_complete":
        next_chapter = _need(obj, "next_chapter")
        if next_chapter is not None and not isinstance(next_chapter, str):
            raise DecodeError("next_chapter must be a string or null")
        return ChapterCompleteScreen(
            chapter=_need_str(obj, "chapter"),
            exp_gained=_need_int(obj, "exp_gained"),
            monsters_defeated=_need_int(obj, "monsters_defeated"),
            next_chapter=next_chapter,
        )
    if kind == "win":
        return WinScreen()
    if kind == "lose":
        return LoseScreen()
    if kind == "exited":
        return ExitedScreen()
    raise DecodeError(f"unknown screen kind {kind!r}")


def _pos_to_jsonable(pos: tuple[int, int]) -> list:
    return [pos[0], pos[1]]


def _pos_from_jsonable(value: Any) -> tuple[int, int]:
    if not (isinstance(value, list) and len(value) == 2 and all(isinstance(v, int) for v in value)):
        raise DecodeError("expected a [chapter, scene] position")
    return value[0], value[1]


def session_to_jsonable(s: SessionState) -> dict:
    return {
        "screen": screen_to_jsonable(s.screen),
        "campaign": campaign_to_jsonable(s.campaign),
        "party": [combatant_to_jsonable(c) for c in s.party],
        "progress": _pos_to_jsonable(s.progress),
        "last_reached": _pos_to_jsonable(s.last_reached),
        "quests": [[_pos_to_jsonable(pos), quest_state_to_jsonable(q)] for pos, q in s.quest_states],
        "items": _pairs_to_jsonable(s.items),
        "seed": s.seed,
        "save_slot": s.save_slot,
        "chapter_exp": s.chapter_exp,
        "chapter_kills": s.chapter_kills,
    }


def session_from_jsonable(obj: Any) -> SessionState:
    quests = []
    for entry in _need_list(obj, "quests"):
        if not (isinstance(entry, list) and len(entry) == 2):
            raise DecodeError("quest entry must be a [position, state] pair")
        quests.append((_pos_from_jsonable(entry[0]), quest_state_from_jsonable(entry[1])))
    save_slot = _need(obj, "save_slot")
    if save_slot is not None and not isinstance(save_slot, str):
        raise DecodeError("save_slot must be a string or null")
    state = SessionState(
        screen=screen_from_jsonable(_need(obj, "screen")),
        campaign=campaign_from_jsonable(_need(obj, "campaign")),
        party=tuple(combatant_from_jsonable(c) for c in _need_list(obj, "party")),
        progress=_pos_from_jsonable(_need(obj, "progress")),
        last_reached=_pos_from_jsonable(_need(obj, "last_reached")),
        quest_states=tuple(quests),
        items=_pairs_from_jsonable(_need(obj, "items")),
        seed=_need_int(obj, "seed"),
        save_slot=save_slot,
        chapter_exp=_need_int(obj, "chapter_exp"),
        chapter_kills=_need_int(obj, "chapter_kills"),
    )
    ci, si = state.progress
    if not (0 <= ci < len(state.campaign.chapters) and 0 <= si < len(state.campaign.chapters[ci].scenes)):
        raise DecodeError("progress points outside the campaign")
    return state


def view_to_jsonable(view: ViewModel) -> dict:
    return {
        "kind": view.kind,
        "text": list(view.text),
        "inputs": list(view.inputs),
        "party": [
            {"name": p.name, "hp": p.hp, "max_hp": p.max_hp, "level": p.level, "exp": p.exp}
            for p in view.party
        ],
    }


def event_to_jsonable(event: Event) -> dict:
    if isinstance(event, Autosave):
        return {"e": "autosave", "chapter": event.chapter, "scene": event.scene}
    if isinstance(event, MultiplayerRequested):
        return {"e": "multiplayer_requested"}
    raise TypeError(f"unknown event: {event!r}")
