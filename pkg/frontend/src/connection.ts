/**
 * Connection lifecycle and protocol discipline.
 *
 * Holds the socket, the per-direction sequence counters, and the coarse
 * state (disconnected / connecting / in_room / fighting). Inputs sent while
 * disconnected are rejected with a visible notice, never queued: correctness
 * over latency for a turn-and-tick game. No game state lives here; the
 * server's broadcasts are the only source of truth.
 */

import { ServerMessage, WireError, encodeClientMessage, parseServerMessage } from "./protocol.js";

export type ConnectionState = "disconnected" | "connecting" | "in_room" | "fighting";

/** The subset of the browser WebSocket API the client uses; `ws` matches it. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ConnectionEvents {
  onState: (state: ConnectionState) => void;
  onMessage: (message: ServerMessage) => void;
  /** User-visible notices: rejected inputs, protocol errors, disconnects. */
  onNotice: (text: string) => void;
}

export class GameConnection {
  state: ConnectionState = "disconnected";
  welcomed = false;
  outSeq = 0;
  inSeq = 0; // incoming watermark: last sequence number accepted

  private socket: SocketLike | null = null;

  constructor(
    private readonly endpoint: string,
    private readonly name: string,
    private readonly events: ConnectionEvents,
    private readonly factory: SocketFactory = (url) =>
      new WebSocket(url) as unknown as SocketLike,
  ) {}

  connect(): void {
    if (this.state !== "disconnected") return;
    this.setState("connecting");
    this.outSeq = 0;
    this.inSeq = 0;
    this.welcomed = false;
    let socket: SocketLike;
    try {
      socket = this.factory(this.endpoint);
    } catch (err) {
      this.setState("disconnected");
      this.events.onNotice(`cannot open ${this.endpoint}: ${String(err)}`);
      return;
    }
    this.socket = socket;
    socket.onopen = () => this.push("hello", { name: this.name });
    socket.onmessage = (ev) => this.receive(String(ev.data));
    socket.onerror = () => {
      if (this.state === "connecting") this.events.onNotice("connection failed");
    };
    socket.onclose = () => this.dropped();
  }

  disconnect(): void {
    this.socket?.close();
  }

  /** Send one frame; returns false (with a notice) when not connected. */
  send(t: string, payload: Record<string, unknown> = {}): boolean {
    if (this.state === "disconnected" || this.socket === null) {
      this.events.onNotice(`not connected: ${t} was not sent`);
      return false;
    }
    return this.push(t, payload);
  }

  sendInput(choice: string): boolean {
    return this.send("sp_input", { choice });
  }

  sendAction(kind: "physical" | "magic", target: string): boolean {
    return this.send("action", { kind, target });
  }

  private push(t: string, payload: Record<string, unknown>): boolean {
    if (this.socket === null) return false;
    this.outSeq += 1;
    try {
      this.socket.send(encodeClientMessage(t, this.outSeq, payload));
      return true;
    } catch (err) {
      this.events.onNotice(`send failed: ${String(err)}`);
      return false;
    }
  }

  private receive(raw: string): void {
    let message: ServerMessage;
    try {
      message = parseServerMessage(raw);
    } catch (err) {
      this.violation(err instanceof WireError ? err.message : String(err));
      return;
    }
    if (message.seq !== this.inSeq + 1) {
      this.violation(`server seq ${message.seq}, expected ${this.inSeq + 1}`);
      return;
    }
    this.inSeq = message.seq;
    if (message.t === "welcome") this.welcomed = true;
    if (message.t === "room_state") {
      this.setState(message.room.phase === "fighting" ? "fighting" : "in_room");
    }
    if (message.t === "protocol_error") this.events.onNotice(`server: ${message.reason}`);
    this.events.onMessage(message);
  }

  private violation(reason: string): void {
    this.events.onNotice(`protocol violation: ${reason}`);
    this.socket?.close();
  }

  private dropped(): void {
    if (this.state === "disconnected") return;
    this.socket = null;
    this.setState("disconnected");
    this.events.onNotice("disconnected from server");
  }

  private setState(state: ConnectionState): void {
    if (this.state !== state) {
      this.state = state;
      this.events.onState(state);
    }
  }
}
