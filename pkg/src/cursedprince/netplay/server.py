"""Authoritative game server: arena rooms plus single-player sessions.

Clients speak the JSON frame protocol over one WebSocket. The server owns
all game state: arena intents are queued and resolved on the room's tick,
and the single-player story runs server-side with views streamed back, so
every number a client displays originated here.

Each room is driven by exactly one executor task consuming an ordered
queue of connection events and tick events; socket handlers only enqueue.
"""

from __future__ import annotations

import asyncio
import logging
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles

from ..codec import event_to_jsonable, view_to_jsonable
from ..questscript.default_campaign import default_campaign
from ..rules import AttackKind
from ..saves import SaveError, load_session, save_session
from ..session import (
    Autosave,
    IllegalInput,
    MainMenuScreen,
    NoSave,
    SessionState,
    current_view,
    handle_input,
    new_session,
)
from .profiles import ProfileStore
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
    Phase,
    Room,
    RoomClosed,
    apply_tick,
    join_room,
    leave_room,
    new_room,
    start_room,
)

logger = logging.getLogger(__name__)

DEFAULT_TICK_MS = 500


@dataclass
class Connection:
    socket: WebSocket
    conn_id: int
    name: Optional[str] = None
    room_id: Optional[str] = None
    out_seq: int = 0
    in_seq: int = 0
    session: Optional[SessionState] = None
    closed: bool = False

    async def send(self, t: str, **payload: Any) -> None:
        if self.closed:
            return
        self.out_seq += 1
        frame = encode_message(NetMessage(t=t, seq=self.out_seq, payload=payload))
        try:
            await self.socket.send_text(frame.decode("utf-8"))
        except Exception:
            self.closed = True


@dataclass
class RoomRuntime:
    room: Room
    queue: asyncio.Queue = field(default_factory=asyncio.Queue)
    members: dict[int, Connection] = field(default_factory=dict)
    pending: list[tuple[str, AttackKind, str]] = field(default_factory=list)
    executor: Optional[asyncio.Task] = None
    ticker: Optional[asyncio.Task] = None


class GameServer:
    def __init__(self, store: ProfileStore, tick_ms: int = DEFAULT_TICK_MS, seed: int = 0):
        self.store = store
        self.tick_ms = tick_ms
        self.seed = seed
        self.rooms: dict[str, RoomRuntime] = {}
        self.campaign = default_campaign()
        self._next_conn_id = 0

    # -- room machinery -----------------------------------------------------

    def _runtime(self, room_id: str) -> RoomRuntime:
        runtime = self.rooms.get(room_id)
        if runtime is None or runtime.room.phase is Phase.CLOSED:
            runtime = RoomRuntime(room=new_room(room_id, seed=self.seed or hash(room_id) & 0xFFFF))
            self.rooms[room_id] = runtime
            runtime.executor = asyncio.create_task(self._run_room(room_id, runtime))
            runtime.ticker = asyncio.create_task(self._run_ticker(runtime))
        return runtime

    async def _run_ticker(self, runtime: RoomRuntime) -> None:
        try:
            while True:
                await asyncio.sleep(self.tick_ms / 1000)
                await runtime.queue.put(("tick",))
        except asyncio.CancelledError:
            pass

    async def _broadcast(self, runtime: RoomRuntime, broadcasts: list[dict]) -> None:
        for message in broadcasts:
            payload = {k: v for k, v in message.items() if k != "t"}
            for member in list(runtime.members.values()):
                await member.send(message["t"], **payload)

    def _record_awards(self, broadcasts: list[dict]) -> None:
        for message in broadcasts:
            if message["t"] != "state_delta":
                continue
            for event in message["events"]:
                if event.get("type") == "exp":
                    self.store.upsert(event["player"], exp_delta=event["gained"], monsters_delta=1)

    async def _run_room(self, room_id: str, runtime: RoomRuntime) -> None:
        try:
            while True:
                item = await runtime.queue.get()
                kind = item[0]
                if kind == "join":
                    conn: Connection = item[1]
                    try:
                        room, broadcasts = join_room(runtime.room, self.store.get_or_default(conn.name))
                    except (NameTaken, RoomClosed) as exc:
                        await conn.send("protocol_error", reason=type(exc).__name__.lower())
                        continue
                    runtime.room = room
                    runtime.members[conn.conn_id] = conn
                    conn.room_id = room_id
                    await self._broadcast(runtime, broadcasts)
                elif kind == "leave":
                    conn = item[1]
                    if runtime.members.pop(conn.conn_id, None) is None:
                        continue
                    conn.room_id = None
                    room, broadcasts = leave_room(runtime.room, conn.name)
                    runtime.room = room
                    await self._broadcast(runtime, broadcasts)
                    if room.phase is Phase.CLOSED:
                        break
                elif kind == "start":
                    room, broadcasts = start_room(runtime.room)
                    runtime.room = room
                    await self._broadcast(runtime, broadcasts)
                elif kind == "action":
                    runtime.pending.append(item[1])
                elif kind == "tick":
                    if runtime.room.phase in (Phase.FIGHTING, Phase.WAVE_CLEARED):
                        actions = runtime.pending[:]
                        runtime.pending.clear()
                        room, broadcasts = apply_tick(runtime.room, actions)
                        runtime.room = room
                        self._record_awards(broadcasts)
                        await self._broadcast(runtime, broadcasts)
        except asyncio.CancelledError:
            pass
        finally:
            if runtime.ticker is not None:
                runtime.ticker.cancel()
            if self.rooms.get(room_id) is runtime:
                del self.rooms[room_id]

    # -- single-player over the wire -----------------------------------------

    async def _send_view(self, conn: Connection, events: list) -> None:
        assert conn.session is not None
        await conn.send(
            "sp_view",
            view=view_to_jsonable(current_view(conn.session)),
            events=[event_to_jsonable(e) for e in events],
        )

    async def _handle_sp(self, conn: Connection, message: NetMessage) -> None:
        if conn.name is None:
            await conn.send("protocol_error", reason="hello required")
            return
        if message.t == "sp_new":
            conn.session = new_session(self.campaign, seed=message.payload["seed"])
            await self._send_view(conn, [])
            return
        if message.t == "sp_continue":
            data = self.store.get_save(conn.name)
            if data is None:
                await conn.send("sp_error", reason="no save")
                return
            try:
                conn.session = load_session(data)
            except SaveError as exc:
                await conn.send("sp_error", reason=f"unreadable save: {exc}")
                return
            await self._send_view(conn, [])
            return
        # sp_input
        if conn.session is None:
            await conn.send("sp_error", reason="no session: send sp_new first")
            return
        choice = message.payload["choice"]
        try:
            state, events = handle_input(conn.session, choice)
        except NoSave:
            # fresh menu 'continue': fall back to the durable slot
            data = self.store.get_save(conn.name)
            if data is None:
                await conn.send("sp_error", reason="no save")
                return
            try:
                state, events = load_session(data), []
            except SaveError as exc:
                await conn.send("sp_error", reason=f"unreadable save: {exc}")
                return
        except IllegalInput as exc:
            await conn.send("sp_error", reason=str(exc))
            return
        conn.session = state
        if any(isinstance(e, Autosave) for e in events):
            self.store.set_save(conn.name, save_session(state))
        await self._send_view(conn, events)

    # -- connection lifecycle --------------------------------------------------

    async def handle_socket(self, socket: WebSocket) -> None:
        await socket.accept()
        self._next_conn_id += 1
        conn = Connection(socket=socket, conn_id=self._next_conn_id)
        try:
            while True:
                raw = await socket.receive_text()
                try:
                    message = decode_message(raw)
                except (MalformedMessage, UnknownType) as exc:
                    await conn.send("protocol_error", reason=str(exc))
                    break
                if message.seq != conn.in_seq + 1:
                    await conn.send(
                        "protocol_error",
                        reason=f"bad seq {message.seq} (expected {conn.in_seq + 1})",
                    )
                    break
                conn.in_seq = message.seq
                if not await self._dispatch(conn, message):
                    break
        except WebSocketDisconnect:
            pass
        finally:
            await self._drop(conn)
            try:
                await socket.close()
            except Exception:
                pass

    async def _dispatch(self, conn: Connection, message: NetMessage) -> bool:
        """Route one message; returns False to close the connection."""
        t = message.t
        if t == "hello":
            if conn.name is not None:
                await conn.send("protocol_error", reason="already greeted")
                return True
            conn.name = message.payload["name"]
            profile = self.store.get_or_default(conn.name)
            await conn.send("welcome", player_id=conn.name, profile=profile.to_jsonable())
            return True
        if t == "bye":
            await conn.send("bye")
            return False
        if t.startswith("sp_"):
            await self._handle_sp(conn, message)
            return True
        if conn.name is None:
            await conn.send("protocol_error", reason="hello required")
            return True
        if t == "join":
            if conn.room_id is not None:
                await conn.send("protocol_error", reason="already in a room")
                return True
            runtime = self._runtime(message.payload["room"])
            await runtime.queue.put(("join", conn))
            return True
        if t == "start":
            if conn.room_id is None:
                await conn.send("protocol_error", reason="join a room first")
                return True
            await self.rooms[conn.room_id].queue.put(("start",))
            return True
        if t == "action":
            if conn.room_id is None:
                await conn.send("protocol_error", reason="join a room first")
                return True
            action = (conn.name, AttackKind(message.payload["kind"]), message.payload["target"])
            await self.rooms[conn.room_id].queue.put(("action", action))
            return True
        # client sent a server-only message type
        await conn.send("protocol_error", reason=f"unexpected message type {t!r}")
        return True

    async def _drop(self, conn: Connection) -> None:
        conn.closed = True
        if conn.room_id is not None and conn.room_id in self.rooms:
            await self.rooms[conn.room_id].queue.put(("leave", conn))

    async def shutdown(self) -> None:
        for runtime in list(self.rooms.values()):
            if runtime.ticker is not None:
                runtime.ticker.cancel()
            if runtime.executor is not None:
                runtime.executor.cancel()


def create_app(
    db_path: str,
    tick_ms: int = DEFAULT_TICK_MS,
    web_dir: str | None = None,
    seed: int = 0,
) -> FastAPI:
    """Build the ASGI app: /ws protocol endpoint plus static client assets."""

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        await app.state.game.shutdown()
        app.state.store.close()

    app = FastAPI(title="cursedprince server", lifespan=lifespan)
    app.state.store = ProfileStore(db_path)
    app.state.game = GameServer(app.state.store, tick_ms=tick_ms, seed=seed)

    @app.websocket("/ws")
    async def websocket_endpoint(socket: WebSocket) -> None:
        await app.state.game.handle_socket(socket)

    if web_dir is not None and Path(web_dir).is_dir():
        app.mount("/", StaticFiles(directory=web_dir, html=True), name="web")
    else:

        @app.get("/")
        async def index() -> PlainTextResponse:
            return PlainTextResponse(
                "cursedprince server\n\n"
                "WebSocket endpoint: /ws\n"
                "Build the browser client (frontend/) and pass --web to serve it here.\n"
            )

    return app
