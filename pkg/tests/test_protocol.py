"""Wire message codec tests: round trips, strictness, canonical bytes."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cursedprince.netplay.protocol import (
    MESSAGE_SCHEMAS,
    MalformedMessage,
    NetMessage,
    UnknownType,
    decode_message,
    encode_message,
)

SAMPLES = [
    NetMessage("hello", 1, {"name": "ayu"}),
    NetMessage("join", 2, {"room": "arena"}),
    NetMessage("start", 3, {}),
    NetMessage("action", 4, {"kind": "physical", "target": "w1m1"}),
    NetMessage("welcome", 1, {"player_id": "ayu", "profile": {"name": "ayu"}}),
    NetMessage("state_delta", 2, {"tick": 7, "events": [], "hp": {"ayu": 30}}),
    NetMessage("wave_cleared", 3, {"wave": 1, "awards": [{"player": "ayu", "exp": 20}]}),
    NetMessage("protocol_error", 4, {"reason": "bad seq"}),
    NetMessage("sp_input", 5, {"choice": "play"}),
    NetMessage("sp_view", 6, {"view": {"kind": "main_menu"}, "events": []}),
    NetMessage("bye", 7, {}),
    NetMessage("defeat", 8, {}),
]


@pytest.mark.parametrize("message", SAMPLES, ids=lambda m: f"{m.t}-{m.seq}")
def test_round_trip(message):
    assert decode_message(encode_message(message)) == message


def test_canonical_encoding_is_stable():
    m = NetMessage("action", 9, {"target": "w1m2", "kind": "magic"})
    assert encode_message(m) == encode_message(m)
    assert encode_message(m) == b'{"kind":"magic","seq":9,"t":"action","target":"w1m2"}'


def test_empty_bytes_malformed():
    with pytest.raises(MalformedMessage):
        decode_message(b"")


def test_join_missing_room_names_field():
    with pytest.raises(MalformedMessage, match="room"):
        decode_message(b'{"t":"join","seq":1}')


def test_unknown_type():
    with pytest.raises(UnknownType):
        decode_message(b'{"t":"warp","seq":1}')


def test_extra_field_rejected():
    with pytest.raises(MalformedMessage, match="unexpected"):
        decode_message(b'{"t":"start","seq":1,"cheat":true}')


def test_wrong_type_rejected():
    with pytest.raises(MalformedMessage, match="seed"):
        decode_message(b'{"t":"sp_new","seq":1,"seed":"zero"}')


def test_bool_is_not_an_integer():
    with pytest.raises(MalformedMessage):
        decode_message(b'{"t":"sp_new","seq":1,"seed":true}')


def test_action_kind_vocabulary_enforced():
    with pytest.raises(MalformedMessage, match="kind"):
        decode_message(b'{"t":"action","seq":1,"kind":"psychic","target":"x"}')


def test_missing_seq_rejected():
    with pytest.raises(MalformedMessage, match="seq"):
        decode_message(b'{"t":"start"}')


def test_non_object_rejected():
    with pytest.raises(MalformedMessage):
        decode_message(b"[1,2,3]")


def test_invalid_utf8_rejected():
    with pytest.raises(MalformedMessage):
        decode_message(b"\xff\xfe")


@given(data=st.binary(max_size=256))
@settings(max_examples=200, deadline=None)
def test_decode_never_raises_unexpected(data):
    try:
        message = decode_message(data)
    except (MalformedMessage, UnknownType):
        return
    assert message.t in MESSAGE_SCHEMAS
