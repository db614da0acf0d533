"""Cross-scene campaign checks that the grammar alone cannot express.

Positions in the returned diagnostics index into the canonical serialized
form of the script (see serializer.scene_position), so tooling can point at
a concrete line even for scripts that were built in memory.
"""

from __future__ import annotations

from ..rules import Archetype
from .model import (
    Battle,
    CampaignScript,
    CombineItems,
    Diagnostic,
    Narration,
    Quest,
    Question,
    Severity,
)
from .serializer import scene_position


def validate_campaign(script: CampaignScript) -> list[Diagnostic]:
    """Return diagnostics: storyline and difficulty errors, flavour warnings.

    Errors: the campaign must end with a Witch battle; each chapter's
    hardest battle must be at least as hard as the previous chapter's
    (difficulty never decreases); question answers must index a choice;
    combine inputs must be distinct. Warning: a chapter with no narration.
    """
    diagnostics: list[Diagnostic] = []

    def err(ci: int, si: int | None, message: str) -> None:
        line, col = scene_position(script, ci, si)
        diagnostics.append(Diagnostic(Severity.ERROR, line, col, message))

    def warn(ci: int, message: str) -> None:
        line, col = scene_position(script, ci, None)
        diagnostics.append(Diagnostic(Severity.WARNING, line, col, message))

    previous_max: int | None = None
    for ci, chapter in enumerate(script.chapters):
        battle_levels = [s.level for s in chapter.scenes if isinstance(s, Battle)]
        if not battle_levels:
            err(ci, None, f"chapter {chapter.name!r} has no battle scene")
        else:
            chapter_max = max(battle_levels)
            if previous_max is not None and chapter_max < previous_max:
                err(
                    ci,
                    None,
                    f"non-decreasing difficulty violated: chapter {chapter.name!r} "
                    f"peaks at level {chapter_max}, previous chapter at {previous_max}",
                )
            previous_max = chapter_max
        if not any(isinstance(s, Narration) for s in chapter.scenes):
            warn(ci, f"chapter {chapter.name!r} has no narration")
        for si, scene in enumerate(chapter.scenes):
            if isinstance(scene, Quest) and isinstance(scene.spec, Question):
                if not 0 <= scene.spec.correct < len(scene.spec.choices):
                    err(ci, si, f"question correct index {scene.spec.correct} is out of range")
            if isinstance(scene, Quest) and isinstance(scene.spec, CombineItems):
                if len(set(scene.spec.inputs)) != len(scene.spec.inputs):
                    err(ci, si, "combine inputs must be distinct")

    last_chapter = script.chapters[-1]
    last_scene = last_chapter.scenes[-1] if last_chapter.scenes else None
    if not (isinstance(last_scene, Battle) and last_scene.enemy is Archetype.WITCH):
        err(
            len(script.chapters) - 1,
            len(last_chapter.scenes) - 1 if last_chapter.scenes else None,
            "campaign must end with Witch battle",
        )
    return diagnostics
