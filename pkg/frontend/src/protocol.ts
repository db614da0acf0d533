/**
 * Wire protocol types and strict parsing for server frames.
 *
 * One JSON object per WebSocket text frame. Every frame carries `t` and a
 * per-direction `seq` that must step by exactly one; the connection layer
 * enforces the watermark and drops the link on violations.
 */

export interface PartyLine {
  name: string;
  hp: number;
  max_hp: number;
  level: number;
  exp: number;
}

export interface ViewModel {
  kind: string;
  text: string[];
  inputs: string[];
  party: PartyLine[];
}

export interface WireCombatant {
  id: string;
  name: string;
  archetype: string;
  level: number;
  exp: number;
  hp: number;
  side: string;
  stats: { max_hp: number; attack: number; magic: number; defense: number; resist: number; speed: number };
  weapon: { name: string; attack_bonus: number; magic_bonus: number } | null;
}

export interface RoomSnapshot {
  id: string;
  phase: string;
  wave: number;
  tick: number;
  seed: number;
  players: WireCombatant[];
  monsters: WireCombatant[];
}

export interface Profile {
  name: string;
  total_exp: number;
  level: number;
  monsters_defeated: number;
}

export type ServerMessage =
  | { t: "welcome"; seq: number; player_id: string; profile: Profile }
  | { t: "room_state"; seq: number; room: RoomSnapshot }
  | { t: "state_delta"; seq: number; tick: number; events: DeltaEvent[]; hp: Record<string, number> }
  | { t: "wave_cleared"; seq: number; wave: number; awards: WaveAward[] }
  | { t: "defeat"; seq: number }
  | { t: "protocol_error"; seq: number; reason: string }
  | { t: "bye"; seq: number }
  | { t: "sp_view"; seq: number; view: ViewModel; events: SessionEvent[] }
  | { t: "sp_error"; seq: number; reason: string };

export interface DeltaEvent {
  type: string;
  actor?: string;
  target?: string;
  kind?: string;
  damage?: number;
  hp?: number;
  defeated?: boolean;
  player?: string;
  gained?: number;
  level?: number;
  monster?: string;
}

export interface WaveAward {
  player: string;
  exp: number;
  level: number;
}

export interface SessionEvent {
  e: string;
  chapter?: number;
  scene?: number;
}

const SERVER_TYPES = new Set([
  "welcome",
  "room_state",
  "state_delta",
  "wave_cleared",
  "defeat",
  "protocol_error",
  "bye",
  "sp_view",
  "sp_error",
]);

export class WireError extends Error {}

/** Parse and shape-check one incoming frame. Throws WireError on garbage. */
export function parseServerMessage(raw: string): ServerMessage {
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch {
    throw new WireError("frame is not valid JSON");
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new WireError("frame must be a JSON object");
  }
  const msg = doc as Record<string, unknown>;
  if (typeof msg.t !== "string") throw new WireError("frame is missing 't'");
  if (typeof msg.seq !== "number" || !Number.isInteger(msg.seq)) {
    throw new WireError("frame is missing 'seq'");
  }
  if (!SERVER_TYPES.has(msg.t)) throw new WireError(`unknown server message ${JSON.stringify(msg.t)}`);
  return msg as unknown as ServerMessage;
}

/** Encode one outgoing frame with its sequence number. */
export function encodeClientMessage(t: string, seq: number, payload: Record<string, unknown>): string {
  return JSON.stringify({ t, seq, ...payload });
}
