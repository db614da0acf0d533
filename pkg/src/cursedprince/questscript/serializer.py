"""Canonical text form for campaign scripts.

One scene per line, two-space indent, stable key order: parsing the output
reproduces the script exactly, and equal scripts serialize byte-identically.
Strings must stay newline-free, which the grammar cannot represent anyway.
"""

from __future__ import annotations

from ..rules import Weapon
from .model import (
    Battle,
    CampaignScript,
    Chapter,
    CombineItems,
    Dialog,
    FetchItem,
    Narration,
    Quest,
    Question,
    Scene,
    WeaponChoice,
)


def _quote(text: str) -> str:
    if "\n" in text or "\r" in text:
        raise ValueError("questscript strings cannot contain newlines")
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _weapon(weapon: Weapon) -> str:
    if weapon.attack_bonus > 0:
        return f"{_quote(weapon.name)} (atk +{weapon.attack_bonus})"
    return f"{_quote(weapon.name)} (mag +{weapon.magic_bonus})"


def scene_line(scene: Scene) -> str:
    if isinstance(scene, Narration):
        return f"narration {_quote(scene.text)}"
    if isinstance(scene, Dialog):
        lines = " ".join(_quote(line) for line in scene.lines)
        return f"dialog npc={scene.npc.value} {lines}"
    if isinstance(scene, WeaponChoice):
        return "weapons " + ", ".join(_weapon(w) for w in scene.options)
    if isinstance(scene, Quest):
        spec = scene.spec
        if isinstance(spec, FetchItem):
            line = f"quest fetch item={_quote(spec.item)}"
            if spec.hint is not None:
                line += f" hint={_quote(spec.hint)}"
            return line
        if isinstance(spec, CombineItems):
            inputs = ",".join(_quote(i) for i in spec.inputs)
            return f"quest combine {inputs} -> {_quote(spec.output)}"
        if isinstance(spec, Question):
            choices = ",".join(_quote(c) for c in spec.choices)
            return f"quest question {_quote(spec.prompt)} choices={choices} correct={spec.correct}"
    if isinstance(scene, Battle):
        return f"battle monster={scene.enemy.value} level={scene.level} count={scene.count}"
    raise TypeError(f"unknown scene type: {scene!r}")


def serialize_campaign(script: CampaignScript) -> str:
    out = [f"campaign {_quote(script.title)}"]
    for chapter in script.chapters:
        out.append(f"chapter {_quote(chapter.name)} {{")
        for scene in chapter.scenes:
            out.append(f"  {scene_line(scene)}")
        out.append("}")
    return "\n".join(out) + "\n"


def scene_position(script: CampaignScript, chapter_index: int, scene_index: int | None = None) -> tuple[int, int]:
    """(line, column) of a chapter or scene within the canonical text."""
    line = 1  # campaign header
    for ci, chapter in enumerate(script.chapters):
        line += 1  # chapter line
        if ci == chapter_index and scene_index is None:
            return line, 1
        for si in range(len(chapter.scenes)):
            line += 1
            if ci == chapter_index and si == scene_index:
                return line, 3
        line += 1  # closing brace
    raise IndexError("no such chapter/scene")
