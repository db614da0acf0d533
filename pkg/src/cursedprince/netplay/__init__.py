"""Multiplayer arena: wire protocol, room rules, profiles, and the server."""

from .profiles import PlayerProfile, ProfileStore, StoreUnavailable, level_for_total_exp, record_result
from .protocol import (
    MalformedMessage,
    NetMessage,
    ProtocolError,
    UnknownType,
    decode_message,
    encode_message,
)
from .rooms import (
    NameTaken,
    NotFighting,
    Phase,
    Room,
    RoomClosed,
    apply_tick,
    arena_combatant,
    join_room,
    leave_room,
    new_room,
    room_snapshot,
    start_room,
)
from .server import GameServer, create_app

__all__ = [
    "GameServer",
    "MalformedMessage",
    "NameTaken",
    "NetMessage",
    "NotFighting",
    "Phase",
    "PlayerProfile",
    "ProfileStore",
    "ProtocolError",
    "Room",
    "RoomClosed",
    "StoreUnavailable",
    "UnknownType",
    "apply_tick",
    "arena_combatant",
    "create_app",
    "decode_message",
    "encode_message",
    "join_room",
    "leave_room",
    "level_for_total_exp",
    "new_room",
    "record_result",
    "room_snapshot",
    "start_room",
]
