/**
 * Connection discipline: hello on open, sequence watermarks both ways,
 * state transitions from room phases, and visible rejection of sends
 * while disconnected (never queued).
 */
import { describe, expect, it } from "vitest";

import { ConnectionState, GameConnection, SocketLike } from "../src/connection.js";
import { ServerMessage, parseServerMessage } from "../src/protocol.js";

class FakeSocket implements SocketLike {
  sent: string[] = [];
  closed = false;
  onopen: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.closed = true;
    this.onclose?.();
  }

  open(): void {
    this.onopen?.();
  }

  deliver(doc: Record<string, unknown>): void {
    this.onmessage?.({ data: JSON.stringify(doc) });
  }
}

function harness() {
  const socket = new FakeSocket();
  const states: ConnectionState[] = [];
  const messages: ServerMessage[] = [];
  const notices: string[] = [];
  const conn = new GameConnection(
    "ws://test/ws",
    "ayu",
    {
      onState: (s) => states.push(s),
      onMessage: (m) => messages.push(m),
      onNotice: (n) => notices.push(n),
    },
    () => socket,
  );
  return { socket, conn, states, messages, notices };
}

describe("GameConnection", () => {
  it("sends hello with seq 1 on open", () => {
    const { socket, conn } = harness();
    conn.connect();
    socket.open();
    expect(JSON.parse(socket.sent[0])).toEqual({ t: "hello", seq: 1, name: "ayu" });
  });

  it("numbers outgoing frames consecutively", () => {
    const { socket, conn } = harness();
    conn.connect();
    socket.open();
    conn.send("sp_new", { seed: 0 });
    conn.sendInput("play");
    expect(socket.sent.map((f) => JSON.parse(f).seq)).toEqual([1, 2, 3]);
  });

  it("accepts in-order server frames and tracks the watermark", () => {
    const { socket, conn, messages } = harness();
    conn.connect();
    socket.open();
    socket.deliver({ t: "welcome", seq: 1, player_id: "ayu", profile: { name: "ayu" } });
    socket.deliver({ t: "sp_error", seq: 2, reason: "x" });
    expect(messages.map((m) => m.t)).toEqual(["welcome", "sp_error"]);
    expect(conn.inSeq).toBe(2);
    expect(conn.welcomed).toBe(true);
  });

  it("disconnects on a server seq gap", () => {
    const { socket, conn, notices } = harness();
    conn.connect();
    socket.open();
    socket.deliver({ t: "welcome", seq: 1, player_id: "ayu", profile: { name: "ayu" } });
    socket.deliver({ t: "sp_error", seq: 3, reason: "x" }); // gap
    expect(socket.closed).toBe(true);
    expect(conn.state).toBe("disconnected");
    expect(notices.some((n) => n.includes("seq"))).toBe(true);
  });

  it("disconnects on unparseable frames", () => {
    const { socket, conn } = harness();
    conn.connect();
    socket.open();
    socket.onmessage?.({ data: "{nope" });
    expect(socket.closed).toBe(true);
    expect(conn.state).toBe("disconnected");
  });

  it("rejects sends while disconnected instead of queueing", () => {
    const { socket, conn, notices } = harness();
    expect(conn.sendInput("play")).toBe(false);
    expect(notices.length).toBe(1);
    expect(socket.sent).toEqual([]);
  });

  it("derives in_room and fighting from room phases", () => {
    const { socket, conn, states } = harness();
    conn.connect();
    socket.open();
    socket.deliver({ t: "welcome", seq: 1, player_id: "ayu", profile: { name: "ayu" } });
    socket.deliver({ t: "room_state", seq: 2, room: { id: "a", phase: "lobby", wave: 1, tick: 0, seed: 0, players: [], monsters: [] } });
    socket.deliver({ t: "room_state", seq: 3, room: { id: "a", phase: "fighting", wave: 1, tick: 0, seed: 0, players: [], monsters: [] } });
    expect(states).toEqual(["connecting", "in_room", "fighting"]);
    expect(conn.state).toBe("fighting");
  });

  it("surfaces server protocol errors as notices", () => {
    const { socket, conn, notices } = harness();
    conn.connect();
    socket.open();
    socket.deliver({ t: "protocol_error", seq: 1, reason: "nametaken" });
    expect(notices.some((n) => n.includes("nametaken"))).toBe(true);
  });
});

describe("parseServerMessage", () => {
  it("rejects unknown types", () => {
    expect(() => parseServerMessage(JSON.stringify({ t: "warp", seq: 1 }))).toThrow(/unknown/);
  });

  it("rejects frames without seq", () => {
    expect(() => parseServerMessage(JSON.stringify({ t: "bye" }))).toThrow(/seq/);
  });

  it("rejects non-objects", () => {
    expect(() => parseServerMessage("[1,2]")).toThrow();
  });
});
