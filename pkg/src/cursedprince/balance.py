"""Balance simulation: auto-play every battle scene many times and report
win rates, battle lengths, and levels per chapter.

The simulated party follows a linear playthrough: it levels, equips the
first offered weapon, and carries hp from scene to scene exactly as the
always-physical bot would, so the numbers reflect what a real run sees.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .questscript.model import Battle, CampaignScript, Severity, WeaponChoice
from .questscript.validator import validate_campaign
from .rng import derive
from .rules import (
    AttackKind,
    BattleState,
    Combatant,
    Side,
    new_prince,
    play_player_action,
    spawn,
    start_battle,
)
from .session import InvalidCampaign


@dataclass(frozen=True)
class ChapterBalance:
    name: str
    battles: int
    win_rate: float
    mean_turns: float
    mean_final_level: float


@dataclass(frozen=True)
class BalanceReport:
    battles_per_scene: int
    seed: int
    chapters: tuple[ChapterBalance, ...]


def _auto_battle(party: tuple[Combatant, ...], enemies: tuple[Combatant, ...], seed: int) -> BattleState:
    state = start_battle(party, enemies, seed)
    while state.winner is None:
        target = state.alive_enemies()[0]
        state = play_player_action(state, AttackKind.PHYSICAL, target.id)
    return state


def simulate_balance(n: int, seed: int, campaign: CampaignScript) -> BalanceReport:
    """Run n auto-played battles per battle scene; deterministic in (n, seed)."""
    if n < 1:
        raise ValueError("battles per scene must be >= 1")
    errors = [d for d in validate_campaign(campaign) if d.severity is Severity.ERROR]
    if errors:
        raise InvalidCampaign("; ".join(str(d) for d in errors))

    party: tuple[Combatant, ...] = (new_prince(),)
    chapters: list[ChapterBalance] = []
    for ci, chapter in enumerate(campaign.chapters):
        wins = 0
        total_battles = 0
        turn_sum = 0
        level_sum = 0
        for si, scene in enumerate(chapter.scenes):
            if isinstance(scene, WeaponChoice):
                party = (replace(party[0], weapon=scene.options[0]),) + party[1:]
                continue
            if not isinstance(scene, Battle):
                continue
            enemies = tuple(
                spawn(scene.enemy, scene.level, f"e{i + 1}", Side.ENEMY) for i in range(scene.count)
            )
            for i in range(n):
                outcome = _auto_battle(party, enemies, derive(seed, ci, si, i))
                total_battles += 1
                turn_sum += outcome.round
                if outcome.winner is Side.PLAYER:
                    wins += 1
                    level_sum += outcome.party[0].level
                else:
                    level_sum += party[0].level
            # advance the linear party along the canonical run; a loss heals
            # up and moves on, mirroring lose-and-continue
            canonical = _auto_battle(party, enemies, derive(seed, ci, si))
            if canonical.winner is Side.PLAYER:
                party = canonical.party
            else:
                party = tuple(replace(c, hp=c.stats.max_hp) for c in party)
        chapters.append(
            ChapterBalance(
                name=chapter.name,
                battles=total_battles,
                win_rate=wins / total_battles if total_battles else 0.0,
                mean_turns=turn_sum / total_battles if total_battles else 0.0,
                mean_final_level=level_sum / total_battles if total_battles else 0.0,
            )
        )
    return BalanceReport(battles_per_scene=n, seed=seed, chapters=tuple(chapters))


def render_report(report: BalanceReport) -> str:
    """Aligned text table, stable across runs for equal reports."""
    header = f"{'chapter':<18} {'battles':>7} {'win rate':>9} {'mean turns':>11} {'mean level':>11}"
    rows = [header, "-" * len(header)]
    for ch in report.chapters:
        rows.append(
            f"{ch.name:<18} {ch.battles:>7d} {ch.win_rate:>9.2f} {ch.mean_turns:>11.2f} {ch.mean_final_level:>11.2f}"
        )
    return "\n".join(rows)
