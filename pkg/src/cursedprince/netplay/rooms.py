"""Arena room rules: joining, wave spawning, and the deterministic tick.

A Room is an immutable value and apply_tick is a pure function, so a
recorded (initial room, per-tick action queues) log replays to identical
broadcasts byte for byte. The server layer owns the clock and the sockets;
nothing in here does IO.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Sequence

from ..codec import combatant_to_jsonable
from ..rng import derive
from ..rules import (
    Archetype,
    AttackKind,
    Combatant,
    Side,
    award_exp,
    resolve_attack,
    spawn,
    stats_for,
)
from .profiles import PlayerProfile


class RoomError(Exception):
    pass


class NameTaken(RoomError):
    pass


class RoomClosed(RoomError):
    pass


class NotFighting(RoomError):
    pass


class Phase(str, Enum):
    LOBBY = "lobby"
    FIGHTING = "fighting"
    WAVE_CLEARED = "wave_cleared"
    CLOSED = "closed"


Broadcast = dict[str, Any]
QueuedAction = tuple[str, AttackKind, str]  # player id, kind, target id


@dataclass(frozen=True)
class Room:
    id: str
    seed: int
    players: tuple[Combatant, ...] = ()
    monsters: tuple[Combatant, ...] = ()
    wave: int = 1
    tick: int = 0
    phase: Phase = Phase.LOBBY
    # per-monster ids of players who damaged it this wave, in join order
    damagers: tuple[tuple[str, tuple[str, ...]], ...] = ()
    # exp earned by each player during the current wave
    wave_exp: tuple[tuple[str, int], ...] = ()

    def player(self, player_id: str) -> Combatant | None:
        for c in self.players:
            if c.id == player_id:
                return c
        return None

    def monster(self, monster_id: str) -> Combatant | None:
        for c in self.monsters:
            if c.id == monster_id:
                return c
        return None

    def alive_players(self) -> list[Combatant]:
        return [c for c in self.players if c.alive]

    def alive_monsters(self) -> list[Combatant]:
        return [c for c in self.monsters if c.alive]


def new_room(room_id: str, seed: int) -> Room:
    return Room(id=room_id, seed=seed)


def room_snapshot(room: Room) -> dict:
    return {
        "id": room.id,
        "phase": room.phase.value,
        "wave": room.wave,
        "tick": room.tick,
        "seed": room.seed,
        "players": [combatant_to_jsonable(c) for c in room.players],
        "monsters": [combatant_to_jsonable(c) for c in room.monsters],
    }


def _room_state_broadcast(room: Room) -> Broadcast:
    return {"t": "room_state", "room": room_snapshot(room)}


def arena_combatant(profile: PlayerProfile) -> Combatant:
    """Materialize a profile as a fresh full-hp prince of its level."""
    stats = stats_for(Archetype.PRINCE, profile.level)
    return Combatant(
        id=profile.name,
        archetype=Archetype.PRINCE,
        name=profile.name,
        level=profile.level,
        exp=0,
        hp=stats.max_hp,
        stats=stats,
        side=Side.PLAYER,
    )


def _spawn_wave(wave: int) -> tuple[Combatant, ...]:
    """Wave w fields w+1 monsters of level w."""
    return tuple(
        spawn(Archetype.MONSTER, wave, f"w{wave}m{i + 1}", Side.ENEMY) for i in range(wave + 1)
    )


def join_room(room: Room, profile: PlayerProfile, connection_id: str = "") -> tuple[Room, list[Broadcast]]:
    """Add a player; mid-wave joins enter the current fight at full hp."""
    if room.phase is Phase.CLOSED:
        raise RoomClosed(f"room {room.id!r} is closed")
    if room.player(profile.name) is not None:
        raise NameTaken(f"name {profile.name!r} is already in room {room.id!r}")
    joined = replace(room, players=room.players + (arena_combatant(profile),))
    return joined, [_room_state_broadcast(joined)]


def leave_room(room: Room, player_id: str) -> tuple[Room, list[Broadcast]]:
    """Drop a player; an emptied room closes."""
    players = tuple(c for c in room.players if c.id != player_id)
    if len(players) == len(room.players):
        return room, []
    room = replace(room, players=players)
    if not players:
        room = replace(room, phase=Phase.CLOSED, monsters=())
        return room, []
    if room.phase is Phase.FIGHTING and not room.alive_players():
        room = _reset_to_lobby(room)
        return room, [{"t": "defeat"}, _room_state_broadcast(room)]
    return room, [_room_state_broadcast(room)]


def start_room(room: Room) -> tuple[Room, list[Broadcast]]:
    """Any lobby member may start: spawns wave 1 and opens the fight."""
    if room.phase is Phase.CLOSED:
        raise RoomClosed(f"room {room.id!r} is closed")
    if room.phase is not Phase.LOBBY or not room.players:
        return room, []
    room = replace(
        room,
        phase=Phase.FIGHTING,
        monsters=_spawn_wave(room.wave),
        players=tuple(replace(c, hp=c.stats.max_hp) for c in room.players),
        damagers=(),
        wave_exp=(),
    )
    return room, [_room_state_broadcast(room)]


def _reset_to_lobby(room: Room) -> Room:
    return replace(room, phase=Phase.LOBBY, wave=1, monsters=(), damagers=(), wave_exp=())


def _attack_event(actor: Combatant, target: Combatant, kind: AttackKind, damage: int, hp_after: int) -> dict:
    return {
        "type": "attack",
        "actor": actor.id,
        "target": target.id,
        "kind": kind.value,
        "damage": damage,
        "hp": hp_after,
        "defeated": hp_after == 0,
    }


def apply_tick(room: Room, actions: Sequence[QueuedAction]) -> tuple[Room, list[Broadcast]]:
    """Advance the room by one tick.

    Queued player actions resolve in arrival order, then every living
    monster strikes a seeded target. A monster's defeat grants its full exp
    to every player who damaged it this wave. Clearing the wave heals the
    party and spawns the next one; a wiped party drops the room back to the
    lobby with profiles keeping what they earned.
    """
    if room.phase is Phase.WAVE_CLEARED:
        room = replace(room, phase=Phase.FIGHTING)
    if room.phase is not Phase.FIGHTING:
        raise NotFighting(f"room {room.id!r} is not fighting")
    tick = room.tick + 1
    players = list(room.players)
    monsters = list(room.monsters)
    damagers = {mid: list(pids) for mid, pids in room.damagers}
    wave_exp = dict(room.wave_exp)
    events: list[dict] = []

    def put_player(updated: Combatant) -> None:
        for i, c in enumerate(players):
            if c.id == updated.id:
                players[i] = updated
                return

    def put_monster(updated: Combatant) -> None:
        for i, c in enumerate(monsters):
            if c.id == updated.id:
                monsters[i] = updated
                return

    # 1. player intents in arrival order; stale ones are dropped
    for player_id, kind, target_id in actions:
        actor = next((c for c in players if c.id == player_id), None)
        target = next((c for c in monsters if c.id == target_id), None)
        if actor is None or not actor.alive or target is None or not target.alive:
            continue
        outcome = resolve_attack(actor, target, kind)
        target = replace(target, hp=outcome.defender_hp_after)
        put_monster(target)
        credited = damagers.setdefault(target_id, [])
        if player_id not in credited:
            credited.append(player_id)
        events.append(_attack_event(actor, target, kind, outcome.damage, outcome.defender_hp_after))
        if outcome.defeated:
            # full award to every player who damaged it, in join order
            for candidate in [p.id for p in players if p.id in credited]:
                fighter = next(c for c in players if c.id == candidate)
                promoted, _ = award_exp(fighter, target.level)
                put_player(promoted)
                gained = 10 * target.level
                wave_exp[candidate] = wave_exp.get(candidate, 0) + gained
                events.append(
                    {
                        "type": "exp",
                        "player": candidate,
                        "gained": gained,
                        "level": promoted.level,
                        "monster": target_id,
                    }
                )

    # 2. each living monster acts once, target picked from the seeded stream
    for monster in list(monsters):
        current = next(c for c in monsters if c.id == monster.id)
        if not current.alive:
            continue
        alive = [p for p in players if p.alive]
        if not alive:
            break
        kind = AttackKind.MAGIC if current.stats.magic > current.stats.attack else AttackKind.PHYSICAL
        victim = alive[derive(room.seed, tick, current.id) % len(alive)]
        outcome = resolve_attack(current, victim, kind)
        victim = replace(victim, hp=outcome.defender_hp_after)
        put_player(victim)
        events.append(_attack_event(current, victim, kind, outcome.damage, outcome.defender_hp_after))

    hp_map = {c.id: c.hp for c in players + monsters}
    broadcasts: list[Broadcast] = [{"t": "state_delta", "tick": tick, "events": events, "hp": hp_map}]
    room = replace(
        room,
        tick=tick,
        players=tuple(players),
        monsters=tuple(monsters),
        damagers=tuple((mid, tuple(pids)) for mid, pids in damagers.items()),
        wave_exp=tuple(sorted(wave_exp.items())),
    )

    if not room.alive_players():
        room = _reset_to_lobby(room)
        broadcasts.append({"t": "defeat"})
        broadcasts.append(_room_state_broadcast(room))
    elif not room.alive_monsters():
        awards = [
            {"player": c.id, "exp": wave_exp.get(c.id, 0), "level": c.level}
            for c in room.players
        ]
        cleared = room.wave
        next_wave = cleared + 1
        room = replace(
            room,
            phase=Phase.WAVE_CLEARED,
            wave=next_wave,
            monsters=_spawn_wave(next_wave),
            players=tuple(replace(c, hp=c.stats.max_hp) for c in room.players),
            damagers=(),
            wave_exp=(),
        )
        broadcasts.append({"t": "wave_cleared", "wave": cleared, "awards": awards})
        broadcasts.append(_room_state_broadcast(room))
    return room, broadcasts
