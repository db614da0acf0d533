"""Versioned, checksummed save files (.cpsav).

Layout: 4-byte ASCII magic `CPSV`, 1 version byte, 4-byte big-endian CRC-32
of the body, then the body itself: the canonical JSON session document in
UTF-8. Equal states produce byte-identical files; any body corruption is
caught by the checksum before decoding is attempted.
"""

from __future__ import annotations

import json
import struct
import zlib

from .codec import DecodeError, canonical_json, session_from_jsonable, session_to_jsonable
from .session import ExitedScreen, SessionState

MAGIC = b"CPSV"
CURRENT_VERSION = 1
HEADER = struct.Struct(">4sBI")  # magic, version, crc32(body)


class SaveError(Exception):
    pass


class UnknownVersion(SaveError):
    pass


class ChecksumMismatch(SaveError):
    pass


class MalformedBody(SaveError):
    pass


def save_session(state: SessionState) -> bytes:
    """Encode a session; deterministic bytes for equal states."""
    if isinstance(state.screen, ExitedScreen):
        raise SaveError("an exited session cannot be saved")
    body = canonical_json(session_to_jsonable(state))
    return HEADER.pack(MAGIC, CURRENT_VERSION, zlib.crc32(body)) + body


def load_session(data: bytes) -> SessionState:
    """Decode save bytes, verifying version, then checksum, then the body."""
    if len(data) < HEADER.size or data[:4] != MAGIC:
        raise MalformedBody("not a save file (bad magic)")
    magic, version, crc = HEADER.unpack_from(data)
    if version != CURRENT_VERSION:
        raise UnknownVersion(f"unsupported save version {version}")
    body = data[HEADER.size:]
    if zlib.crc32(body) != crc:
        raise ChecksumMismatch("save body does not match its checksum")
    try:
        document = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedBody(f"save body is not valid JSON: {exc}") from exc
    try:
        return session_from_jsonable(document)
    except DecodeError as exc:
        raise MalformedBody(str(exc)) from exc


BODY_OFFSET = HEADER.size
