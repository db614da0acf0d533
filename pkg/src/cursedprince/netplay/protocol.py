"""Wire protocol: one JSON document per WebSocket text frame.

Every message is an object with a type tag `t`, a per-direction sequence
number `seq` (strictly +1 per message on a connection), and the payload
fields registered below. Decoding is strict: unknown types, missing or
mistyped fields, and stray extra fields are all rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from ..codec import canonical_json


class ProtocolError(Exception):
    pass


class MalformedMessage(ProtocolError):
    """Undecodable or schema-violating frame; connection-fatal."""


class UnknownType(ProtocolError):
    """Well-formed frame with an unregistered type tag."""


@dataclass(frozen=True)
class NetMessage:
    t: str
    seq: int
    payload: dict[str, Any] = field(default_factory=dict)


# field name -> expected JSON shape
_STR = "string"
_INT = "integer"
_OBJ = "object"
_LIST = "array"

CLIENT_MESSAGES: dict[str, dict[str, str]] = {
    "hello": {"name": _STR},
    "join": {"room": _STR},
    "start": {},
    "action": {"kind": _STR, "target": _STR},
    "bye": {},
    "sp_new": {"seed": _INT},
    "sp_continue": {},
    "sp_input": {"choice": _STR},
}

SERVER_MESSAGES: dict[str, dict[str, str]] = {
    "welcome": {"player_id": _STR, "profile": _OBJ},
    "room_state": {"room": _OBJ},
    "state_delta": {"tick": _INT, "events": _LIST, "hp": _OBJ},
    "wave_cleared": {"wave": _INT, "awards": _LIST},
    "defeat": {},
    "protocol_error": {"reason": _STR},
    "bye": {},
    "sp_view": {"view": _OBJ, "events": _LIST},
    "sp_error": {"reason": _STR},
}

MESSAGE_SCHEMAS: dict[str, dict[str, str]] = {**CLIENT_MESSAGES, **SERVER_MESSAGES}

ACTION_KINDS = ("physical", "magic")


def _shape_of(value: Any) -> str:
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, str):
        return _STR
    if isinstance(value, int):
        return _INT
    if isinstance(value, dict):
        return _OBJ
    if isinstance(value, list):
        return _LIST
    return type(value).__name__


def _check_payload(t: str, payload: dict[str, Any]) -> None:
    schema = MESSAGE_SCHEMAS[t]
    for name, shape in schema.items():
        if name not in payload:
            raise MalformedMessage(f"message {t!r} is missing field {name!r}")
        if _shape_of(payload[name]) != shape:
            raise MalformedMessage(f"field {name!r} of {t!r} must be {shape}")
    for name in payload:
        if name not in schema:
            raise MalformedMessage(f"message {t!r} has unexpected field {name!r}")
    if t == "action" and payload["kind"] not in ACTION_KINDS:
        raise MalformedMessage("field 'kind' of 'action' must be 'physical' or 'magic'")


def decode_message(data: bytes | str) -> NetMessage:
    """Strictly decode one frame into a NetMessage."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedMessage("frame is not UTF-8") from exc
    try:
        document = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedMessage(f"frame is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise MalformedMessage("frame must be a JSON object")
    t = document.pop("t", None)
    if not isinstance(t, str):
        raise MalformedMessage("message is missing field 't'")
    seq = document.pop("seq", None)
    if not isinstance(seq, int) or isinstance(seq, bool):
        raise MalformedMessage("message is missing field 'seq'")
    if t not in MESSAGE_SCHEMAS:
        raise UnknownType(f"unknown message type {t!r}")
    _check_payload(t, document)
    return NetMessage(t=t, seq=seq, payload=document)


def encode_message(message: NetMessage) -> bytes:
    """Canonical bytes for a well-formed message; decode(encode(m)) == m."""
    if message.t not in MESSAGE_SCHEMAS:
        raise UnknownType(f"unknown message type {message.t!r}")
    _check_payload(message.t, message.payload)
    document = {"t": message.t, "seq": message.seq, **message.payload}
    return canonical_json(document)
