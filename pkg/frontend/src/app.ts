/**
 * Application shell: one socket, one event loop, render-on-message.
 *
 * The story panel shows server-driven single-player views; choosing
 * "multiplayer" on the main menu (signalled back by the server as a
 * session event) switches to the arena panel. Reconnecting is always a
 * visible, explicit act; nothing is sent while disconnected.
 */

import { GameConnection } from "./connection.js";
import { ArenaModel, renderArena, renderView } from "./render.js";
import { DeltaEvent, ServerMessage, ViewModel } from "./protocol.js";

type Panel = "story" | "arena";

interface AppState {
  connection: GameConnection | null;
  panel: Panel;
  view: ViewModel | null;
  arena: ArenaModel;
  notices: string[];
  roomName: string;
  joined: boolean;
}

const state: AppState = {
  connection: null,
  panel: "story",
  view: null,
  arena: { room: null, hp: {}, lastTick: null, banner: null, log: [] },
  notices: [],
  roomName: "arena",
  joined: false,
};

function notice(text: string): void {
  state.notices.push(text);
  if (state.notices.length > 4) state.notices.shift();
  paint();
}

function describeEvent(event: DeltaEvent): string {
  if (event.type === "attack") {
    const fall = event.defeated ? " - defeated" : "";
    return `${event.actor} hits ${event.target} for ${event.damage}${fall}`;
  }
  if (event.type === "exp") {
    return `${event.player} gains ${event.gained} exp (level ${event.level})`;
  }
  return JSON.stringify(event);
}

function onServerMessage(message: ServerMessage): void {
  switch (message.t) {
    case "welcome":
      state.connection?.send("sp_new", { seed: Date.now() % 0xffffffff });
      break;
    case "sp_view":
      state.view = message.view;
      for (const event of message.events) {
        if (event.e === "multiplayer_requested") {
          state.panel = "arena";
          if (!state.joined) {
            state.connection?.send("join", { room: state.roomName });
            state.joined = true;
          }
        }
      }
      break;
    case "sp_error":
      notice(message.reason);
      return;
    case "room_state":
      state.arena.room = message.room;
      state.arena.hp = {};
      for (const combatant of [...message.room.players, ...message.room.monsters]) {
        state.arena.hp[combatant.id] = combatant.hp;
      }
      state.panel = "arena";
      break;
    case "state_delta":
      state.arena.lastTick = message.tick;
      state.arena.hp = { ...state.arena.hp, ...message.hp };
      for (const event of message.events) state.arena.log.push(describeEvent(event));
      state.arena.log = state.arena.log.slice(-40);
      break;
    case "wave_cleared":
      state.arena.banner = `Wave ${message.wave} cleared!`;
      break;
    case "defeat":
      state.arena.banner = "The party has fallen. Back to the lobby.";
      break;
    case "bye":
    case "protocol_error":
      break;
  }
  paint();
}

function connect(endpoint: string, name: string): void {
  state.connection = new GameConnection(endpoint, name, {
    onState: () => paint(),
    onMessage: onServerMessage,
    onNotice: notice,
  });
  state.connection.connect();
  paint();
}

function paint(): void {
  const root = document.getElementById("app");
  if (!root) return;
  root.replaceChildren();

  const status = document.createElement("div");
  status.className = "status-bar";
  const connState = state.connection?.state ?? "disconnected";
  status.textContent = `connection: ${connState}`;
  status.dataset.connection = connState;
  root.appendChild(status);

  for (const text of state.notices) {
    const line = document.createElement("p");
    line.className = "notice";
    line.textContent = text;
    root.appendChild(line);
  }

  if (state.connection === null || connState === "disconnected") {
    renderConnectForm(root);
    return;
  }

  if (state.panel === "arena") {
    const back = document.createElement("button");
    back.className = "panel-switch";
    back.textContent = "story";
    back.addEventListener("click", () => {
      state.panel = "story";
      paint();
    });
    root.appendChild(back);
    const mount = document.createElement("div");
    root.appendChild(mount);
    renderArena(state.arena, mount, {
      onStart: () => state.connection?.send("start"),
      onAction: (kind, target) => state.connection?.sendAction(kind, target),
    });
    return;
  }

  if (state.view !== null) {
    const mount = document.createElement("div");
    root.appendChild(mount);
    renderView({ view: state.view, connection: connState, lastTick: state.arena.lastTick }, mount, (choice) => {
      state.connection?.sendInput(choice);
    });
  }
}

function renderConnectForm(root: HTMLElement): void {
  const form = document.createElement("form");
  form.className = "connect-form";
  const nameInput = document.createElement("input");
  nameInput.placeholder = "your name";
  nameInput.value = localStorage.getItem("cursedprince-name") ?? "";
  const roomInput = document.createElement("input");
  roomInput.placeholder = "arena room";
  roomInput.value = state.roomName;
  const button = document.createElement("button");
  button.textContent = state.connection === null ? "connect" : "reconnect";
  form.append(nameInput, roomInput, button);
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const name = nameInput.value.trim();
    if (!name) {
      notice("enter a name first");
      return;
    }
    localStorage.setItem("cursedprince-name", name);
    state.roomName = roomInput.value.trim() || "arena";
    state.joined = false;
    const proto = location.protocol === "https:" ? "wss" : "ws";
    connect(`${proto}://${location.host}/ws`, name);
  });
  root.appendChild(form);
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  paint();
}
