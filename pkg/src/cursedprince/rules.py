"""Core combat and progression rules.

Everything in here is a pure function over immutable values: attack
resolution, experience and level-up, turn order, and whole battles. The
same battle inputs plus the same seed always produce the same transcript,
which is what makes replays, saves, and the multiplayer server auditable.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Iterator, Optional, Sequence

from .rng import derive


class RulesError(Exception):
    """Base class for rule violations."""


class DeadCombatant(RulesError):
    pass


class NotAPlayer(RulesError):
    pass


class EmptyBattle(RulesError):
    pass


class InvalidTarget(RulesError):
    pass


class ActionFeedExhausted(RulesError):
    pass


class Side(str, Enum):
    PLAYER = "player"
    ENEMY = "enemy"


class Archetype(str, Enum):
    PRINCE = "Prince"
    MONSTER = "Monster"
    WITCH = "Witch"


class AttackKind(str, Enum):
    PHYSICAL = "physical"
    MAGIC = "magic"


@dataclass(frozen=True)
class Stats:
    """Combat stats; two armours: defense blocks physical, resist blocks magic."""

    max_hp: int
    attack: int
    magic: int
    defense: int
    resist: int
    speed: int

    def __post_init__(self) -> None:
        if self.max_hp < 1:
            raise ValueError("max_hp must be >= 1")
        for name in ("attack", "magic", "defense", "resist", "speed"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class Weapon:
    name: str
    attack_bonus: int = 0
    magic_bonus: int = 0

    def __post_init__(self) -> None:
        if self.attack_bonus < 0 or self.magic_bonus < 0:
            raise ValueError("weapon bonuses must be >= 0")
        if self.attack_bonus == 0 and self.magic_bonus == 0:
            raise ValueError("a weapon must grant at least one positive bonus")


@dataclass(frozen=True)
class Combatant:
    id: str
    archetype: Archetype
    name: str
    level: int
    exp: int
    hp: int
    stats: Stats
    side: Side
    weapon: Optional[Weapon] = None

    def __post_init__(self) -> None:
        if self.level < 1:
            raise ValueError("level must be >= 1")
        if self.exp < 0:
            raise ValueError("exp must be >= 0")
        if not 0 <= self.hp <= self.stats.max_hp:
            raise ValueError("hp must lie in [0, max_hp]")

    @property
    def alive(self) -> bool:
        return self.hp > 0


@dataclass(frozen=True)
class AttackOutcome:
    kind: AttackKind
    damage: int
    defender_hp_after: int
    defeated: bool


@dataclass(frozen=True)
class LevelUpReport:
    levels_gained: int
    new_level: int
    exp_remainder: int


@dataclass(frozen=True)
class BattleResult:
    winner: Side
    turns: int
    survivors: tuple[Combatant, ...]
    exp_awards: dict[str, LevelUpReport]
    transcript: tuple[AttackOutcome, ...]


# ---------------------------------------------------------------------------
# Archetype stat tables
# ---------------------------------------------------------------------------

# Base stats at level 1 and per-level growth. The prince's growth doubles as
# the level-up table applied by award_exp; monsters grow slower so that a
# levelling player pulls ahead of a same-level monster.
_BASE_STATS = {
    Archetype.PRINCE: Stats(max_hp=30, attack=8, magic=8, defense=3, resist=2, speed=5),
    Archetype.MONSTER: Stats(max_hp=20, attack=5, magic=3, defense=1, resist=1, speed=3),
    Archetype.WITCH: Stats(max_hp=40, attack=2, magic=3, defense=0, resist=6, speed=5),
}

PLAYER_GROWTH = {"max_hp": 10, "attack": 2, "magic": 2, "defense": 1, "resist": 1, "speed": 0}
_ENEMY_GROWTH = {"max_hp": 5, "attack": 1, "magic": 1, "defense": 1, "resist": 1, "speed": 0}

# Flavour names for monster levels used when spawning from campaign scenes.
MONSTER_NAMES = {1: "Imp", 2: "Gremlin", 3: "Ghoul", 4: "Ogre", 5: "Wraith"}

EXP_PER_MONSTER_LEVEL = 10
EXP_THRESHOLD_PER_LEVEL = 50


def exp_to_next(level: int) -> int:
    """Experience needed to advance from `level` to `level + 1`."""
    return EXP_THRESHOLD_PER_LEVEL * level


def stats_for(archetype: Archetype, level: int) -> Stats:
    """Stat block for an archetype at a level, from base plus growth."""
    if level < 1:
        raise ValueError("level must be >= 1")
    base = _BASE_STATS[archetype]
    growth = PLAYER_GROWTH if archetype is Archetype.PRINCE else _ENEMY_GROWTH
    steps = level - 1
    return Stats(
        max_hp=base.max_hp + growth["max_hp"] * steps,
        attack=base.attack + growth["attack"] * steps,
        magic=base.magic + growth["magic"] * steps,
        defense=base.defense + growth["defense"] * steps,
        resist=base.resist + growth["resist"] * steps,
        speed=base.speed + growth["speed"] * steps,
    )


def spawn(
    archetype: Archetype,
    level: int,
    combatant_id: str,
    side: Side,
    name: str | None = None,
    weapon: Weapon | None = None,
) -> Combatant:
    """Create a fresh full-hp combatant from the archetype tables."""
    stats = stats_for(archetype, level)
    if name is None:
        if archetype is Archetype.MONSTER:
            name = MONSTER_NAMES.get(level, f"Monster L{level}")
        elif archetype is Archetype.WITCH:
            name = "The Witch"
        else:
            name = "The Prince"
    return Combatant(
        id=combatant_id,
        archetype=archetype,
        name=name,
        level=level,
        exp=0,
        hp=stats.max_hp,
        stats=stats,
        side=side,
        weapon=weapon,
    )


def new_prince(combatant_id: str = "prince") -> Combatant:
    return spawn(Archetype.PRINCE, 1, combatant_id, Side.PLAYER)


# ---------------------------------------------------------------------------
# Attack resolution and experience
# ---------------------------------------------------------------------------


def resolve_attack(attacker: Combatant, defender: Combatant, kind: AttackKind) -> AttackOutcome:
    """Resolve one attack. Physical: attack+bonus minus defense; magic hits
    twice as hard but is blunted by resist. Damage never drops below 1."""
    if not attacker.alive:
        raise DeadCombatant(f"attacker {attacker.id} has 0 hp")
    if not defender.alive:
        raise DeadCombatant(f"defender {defender.id} has 0 hp")
    atk_bonus = attacker.weapon.attack_bonus if attacker.weapon else 0
    mag_bonus = attacker.weapon.magic_bonus if attacker.weapon else 0
    if kind is AttackKind.PHYSICAL:
        damage = max(1, attacker.stats.attack + atk_bonus - defender.stats.defense)
    else:
        damage = max(1, 2 * (attacker.stats.magic + mag_bonus) - defender.stats.resist)
    hp_after = max(0, defender.hp - damage)
    return AttackOutcome(kind=kind, damage=damage, defender_hp_after=hp_after, defeated=hp_after == 0)


def award_exp(combatant: Combatant, defeated_monster_level: int) -> tuple[Combatant, LevelUpReport]:
    """Grant kill experience and apply any level-ups.

    Gain is 10 per monster level. Each time the running total reaches the
    current level's threshold (50 x level) the threshold is spent, the level
    rises, stats grow, and hp snaps to the new maximum.
    """
    if combatant.side is not Side.PLAYER:
        raise NotAPlayer(f"{combatant.id} is not on the player side")
    if defeated_monster_level < 1:
        raise ValueError("monster level must be >= 1")
    exp = combatant.exp + EXP_PER_MONSTER_LEVEL * defeated_monster_level
    level = combatant.level
    stats = combatant.stats
    hp = combatant.hp
    gained = 0
    while exp >= exp_to_next(level):
        exp -= exp_to_next(level)
        level += 1
        gained += 1
        stats = Stats(
            max_hp=stats.max_hp + PLAYER_GROWTH["max_hp"],
            attack=stats.attack + PLAYER_GROWTH["attack"],
            magic=stats.magic + PLAYER_GROWTH["magic"],
            defense=stats.defense + PLAYER_GROWTH["defense"],
            resist=stats.resist + PLAYER_GROWTH["resist"],
            speed=stats.speed + PLAYER_GROWTH["speed"],
        )
        hp = stats.max_hp
    updated = replace(combatant, exp=exp, level=level, stats=stats, hp=hp)
    return updated, LevelUpReport(levels_gained=gained, new_level=level, exp_remainder=exp)


def turn_order(combatants: Sequence[Combatant]) -> list[str]:
    """Ids in acting order: fastest first, players win ties, then ascending id."""
    if not combatants:
        raise EmptyBattle("no combatants")
    for c in combatants:
        if not c.alive:
            raise DeadCombatant(f"{c.id} has 0 hp")
    ranked = sorted(combatants, key=lambda c: (-c.stats.speed, 0 if c.side is Side.PLAYER else 1, c.id))
    return [c.id for c in ranked]


# ---------------------------------------------------------------------------
# Battle engine
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BattleState:
    """A battle in progress; stepped one player action at a time.

    `pending` holds the ids still to act this round. Enemy turns are played
    automatically, so whenever a caller sees a state with no winner, the head
    of `pending` is a player-side combatant waiting for an action.
    """

    party: tuple[Combatant, ...]
    enemies: tuple[Combatant, ...]
    seed: int
    round: int
    pending: tuple[str, ...]
    transcript: tuple[AttackOutcome, ...] = ()
    log: tuple[str, ...] = ()
    exp_gained: tuple[tuple[str, int], ...] = ()
    levels_gained: tuple[tuple[str, int], ...] = ()
    kills: int = 0
    winner: Optional[Side] = None

    def combatant(self, combatant_id: str) -> Optional[Combatant]:
        for c in self.party + self.enemies:
            if c.id == combatant_id:
                return c
        return None

    def alive_party(self) -> list[Combatant]:
        return [c for c in self.party if c.alive]

    def alive_enemies(self) -> list[Combatant]:
        return [c for c in self.enemies if c.alive]

    def next_actor(self) -> Optional[Combatant]:
        """Player combatant whose action is awaited, or None if over."""
        if self.winner is not None or not self.pending:
            return None
        return self.combatant(self.pending[0])


def _bump(pairs: tuple[tuple[str, int], ...], key: str, amount: int) -> tuple[tuple[str, int], ...]:
    found = False
    out = []
    for k, v in pairs:
        if k == key:
            out.append((k, v + amount))
            found = True
        else:
            out.append((k, v))
    if not found:
        out.append((key, amount))
    return tuple(out)


def _replace_combatant(group: tuple[Combatant, ...], updated: Combatant) -> tuple[Combatant, ...]:
    return tuple(updated if c.id == updated.id else c for c in group)


def start_battle(
    party: Sequence[Combatant], enemies: Sequence[Combatant], seed: int
) -> BattleState:
    """Open a battle and auto-play enemy turns up to the first player turn."""
    if not party or not enemies:
        raise EmptyBattle("both sides must be non-empty")
    for c in list(party) + list(enemies):
        if not c.alive:
            raise DeadCombatant(f"{c.id} has 0 hp at battle start")
    state = BattleState(
        party=tuple(party),
        enemies=tuple(enemies),
        seed=seed,
        round=1,
        pending=tuple(turn_order(list(party) + list(enemies))),
    )
    return _advance(state)


def _attack_log_line(attacker: Combatant, defender: Combatant, outcome: AttackOutcome) -> str:
    verb = "strikes" if outcome.kind is AttackKind.PHYSICAL else "blasts"
    line = f"{attacker.name} {verb} {defender.name} for {outcome.damage}"
    if outcome.defeated:
        line += f"; {defender.name} falls"
    return line


def _apply_attack(state: BattleState, attacker: Combatant, defender: Combatant, kind: AttackKind) -> BattleState:
    outcome = resolve_attack(attacker, defender, kind)
    hurt = replace(defender, hp=outcome.defender_hp_after)
    party, enemies = state.party, state.enemies
    exp_gained, levels_gained, kills = state.exp_gained, state.levels_gained, state.kills
    if hurt.side is Side.ENEMY:
        enemies = _replace_combatant(enemies, hurt)
    else:
        party = _replace_combatant(party, hurt)
    log = state.log + (_attack_log_line(attacker, defender, outcome),)
    if outcome.defeated and hurt.side is Side.ENEMY and attacker.side is Side.PLAYER:
        killer = next(c for c in party if c.id == attacker.id)
        promoted, report = award_exp(killer, hurt.level)
        party = _replace_combatant(party, promoted)
        exp_gained = _bump(exp_gained, killer.id, EXP_PER_MONSTER_LEVEL * hurt.level)
        kills += 1
        if report.levels_gained:
            levels_gained = _bump(levels_gained, killer.id, report.levels_gained)
            log = log + (f"{promoted.name} reaches level {report.new_level}",)
    state = replace(
        state,
        party=party,
        enemies=enemies,
        transcript=state.transcript + (outcome,),
        log=log,
        exp_gained=exp_gained,
        levels_gained=levels_gained,
        kills=kills,
    )
    if not any(c.alive for c in state.enemies):
        return replace(state, winner=Side.PLAYER, pending=())
    if not any(c.alive for c in state.party):
        return replace(state, winner=Side.ENEMY, pending=())
    return state


def _monster_action(state: BattleState, actor: Combatant) -> BattleState:
    """Fixed enemy policy: magic iff it out-scores attack; seeded target pick."""
    kind = AttackKind.MAGIC if actor.stats.magic > actor.stats.attack else AttackKind.PHYSICAL
    targets = state.alive_party()
    pick = derive(state.seed, state.round, actor.id) % len(targets)
    return _apply_attack(state, actor, targets[pick], kind)


def _advance(state: BattleState) -> BattleState:
    """Play automatic turns until a player must act or the battle ends."""
    while state.winner is None:
        if not state.pending:
            state = replace(
                state,
                round=state.round + 1,
                pending=tuple(turn_order(state.alive_party() + state.alive_enemies())),
            )
            continue
        actor = state.combatant(state.pending[0])
        if actor is None or not actor.alive:
            state = replace(state, pending=state.pending[1:])
            continue
        if actor.side is Side.PLAYER:
            return state
        state = _monster_action(replace(state, pending=state.pending[1:]), actor)
    return state


def play_player_action(state: BattleState, kind: AttackKind, target_id: str) -> BattleState:
    """Apply the pending player's attack, then auto-play to the next player turn."""
    actor = state.next_actor()
    if actor is None:
        raise RulesError("battle is over or no player action is pending")
    target = state.combatant(target_id)
    if target is None or target.side is not Side.ENEMY or not target.alive:
        raise InvalidTarget(f"no attackable enemy with id {target_id!r}")
    state = _apply_attack(replace(state, pending=state.pending[1:]), actor, target, kind)
    return _advance(state)


def battle_result(state: BattleState) -> BattleResult:
    """Freeze a finished battle into its result value."""
    if state.winner is None:
        raise RulesError("battle has not finished")
    levels = dict(state.levels_gained)
    awards = {
        c.id: LevelUpReport(levels_gained=levels.get(c.id, 0), new_level=c.level, exp_remainder=c.exp)
        for c in state.party
        if c.id in dict(state.exp_gained) or c.id in levels
    }
    return BattleResult(
        winner=state.winner,
        turns=state.round,
        survivors=tuple(c for c in state.party + state.enemies if c.alive),
        exp_awards=awards,
        transcript=state.transcript,
    )


def run_battle(
    party: Sequence[Combatant],
    enemies: Sequence[Combatant],
    player_actions: Iterable[tuple[AttackKind, str]],
    seed: int,
) -> BattleResult:
    """Run a whole battle from an ordered feed of player actions.

    The feed must yield one (kind, target id) per player turn; running dry
    raises ActionFeedExhausted. Battles always terminate because damage is
    at least 1 per attack.
    """
    state = start_battle(party, enemies, seed)
    feed: Iterator[tuple[AttackKind, str]] = iter(player_actions)
    while state.winner is None:
        try:
            kind, target_id = next(feed)
        except StopIteration:
            raise ActionFeedExhausted("player action feed ran out") from None
        state = play_player_action(state, kind, target_id)
    return battle_result(state)
