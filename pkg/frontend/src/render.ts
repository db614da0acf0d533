/**
 * Screen rendering: a pure projection of the latest model into the DOM.
 *
 * The one invariant that matters: the controls offered are exactly the
 * view's available inputs (one button per label, `data-input` attribute),
 * so the client can never offer an illegal move. Unknown screen kinds get
 * a diagnostic screen instead of a crash.
 */

import { PartyLine, RoomSnapshot, ViewModel } from "./protocol.js";
import { ConnectionState } from "./connection.js";

export interface ScreenModel {
  view: ViewModel;
  connection: ConnectionState;
  lastTick: number | null;
}

export type InputHandler = (choice: string) => void;

const KNOWN_KINDS = new Set([
  "main_menu",
  "about",
  "narration",
  "dialog",
  "weapon_select",
  "quest",
  "battle",
  "chapter_complete",
  "win",
  "lose",
  "exited",
]);

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function hpBar(line: PartyLine): HTMLElement {
  const wrap = el("div", "hp-line");
  wrap.appendChild(el("span", "hp-name", `${line.name}  L${line.level}  exp ${line.exp}`));
  const bar = el("div", "hp-bar");
  const fill = el("div", "hp-fill");
  const ratio = line.max_hp > 0 ? line.hp / line.max_hp : 0;
  fill.style.width = `${Math.round(ratio * 100)}%`;
  if (ratio <= 0.25) fill.classList.add("hp-low");
  bar.appendChild(fill);
  wrap.appendChild(bar);
  wrap.appendChild(el("span", "hp-nums", `${line.hp}/${line.max_hp}`));
  return wrap;
}

function controls(inputs: string[], onInput: InputHandler): HTMLElement {
  const box = el("div", "controls");
  for (const label of inputs) {
    const button = el("button", "control", label);
    button.dataset.input = label;
    button.addEventListener("click", () => onInput(label));
    box.appendChild(button);
  }
  return box;
}

/** Render one single-player screen. Controls always mirror view.inputs. */
export function renderView(model: ScreenModel, root: HTMLElement, onInput: InputHandler): void {
  const { view } = model;
  root.replaceChildren();
  const kind = KNOWN_KINDS.has(view.kind) ? view.kind : "unknown";
  const screen = el("section", `screen screen-${kind}`);
  screen.dataset.kind = view.kind;

  if (kind === "unknown") {
    screen.appendChild(el("h2", "screen-title", "Unknown screen"));
    screen.appendChild(
      el("pre", "diagnostic", JSON.stringify(view, null, 2)),
    );
  } else if (kind === "main_menu") {
    screen.appendChild(el("h1", "screen-title", view.text[0] ?? "Main Menu"));
    for (const line of view.text.slice(1)) screen.appendChild(el("p", "story", line));
  } else if (kind === "dialog") {
    const line = view.text[0] ?? "";
    const split = line.indexOf(":");
    const speaker = split > 0 ? line.slice(0, split) : "";
    screen.appendChild(el("h2", "speaker", speaker));
    screen.appendChild(el("p", "story", split > 0 ? line.slice(split + 1).trim() : line));
  } else if (kind === "weapon_select") {
    screen.appendChild(el("h2", "screen-title", view.text[0] ?? "Choose your weapon"));
    const cards = el("div", "weapon-cards");
    for (const line of view.text.slice(1)) cards.appendChild(el("div", "weapon-card", line));
    screen.appendChild(cards);
  } else if (kind === "battle") {
    screen.appendChild(el("h2", "screen-title", view.text[0] ?? "Battle"));
    const enemies = el("div", "enemy-list");
    for (const line of view.text.slice(1)) enemies.appendChild(el("p", "battle-line", line));
    screen.appendChild(enemies);
  } else if (kind === "chapter_complete") {
    screen.appendChild(el("h2", "screen-title", view.text[0] ?? "Chapter complete"));
    for (const line of view.text.slice(1)) screen.appendChild(el("p", "summary", line));
  } else {
    const titles: Record<string, string> = {
      about: "About",
      narration: "",
      quest: "Quest",
      win: "Victory",
      lose: "Defeat",
      exited: "Goodbye",
    };
    const title = titles[kind];
    if (title) screen.appendChild(el("h2", "screen-title", title));
    for (const line of view.text) screen.appendChild(el("p", "story", line));
  }

  if (view.party.length > 0) {
    const party = el("div", "party");
    for (const line of view.party) party.appendChild(hpBar(line));
    screen.appendChild(party);
  }
  screen.appendChild(controls(view.inputs, onInput));
  root.appendChild(screen);
}

// ---------------------------------------------------------------------------
// Arena (multiplayer) panel
// ---------------------------------------------------------------------------

export interface ArenaModel {
  room: RoomSnapshot | null;
  hp: Record<string, number>;
  lastTick: number | null;
  banner: string | null;
  log: string[];
}

export interface ArenaHandlers {
  onStart: () => void;
  onAction: (kind: "physical" | "magic", target: string) => void;
}

/** Render the co-op arena. Attack controls exist only for living monsters. */
export function renderArena(model: ArenaModel, root: HTMLElement, handlers: ArenaHandlers): void {
  root.replaceChildren();
  const panel = el("section", "screen screen-arena");
  panel.dataset.kind = "arena";
  if (model.room === null) {
    panel.appendChild(el("p", "story", "Not in a room."));
    root.appendChild(panel);
    return;
  }
  const room = model.room;
  panel.appendChild(el("h2", "screen-title", `Arena ${room.id}: wave ${room.wave} (${room.phase})`));
  if (model.banner) panel.appendChild(el("p", "banner", model.banner));
  if (model.lastTick !== null) panel.appendChild(el("p", "tick", `tick ${model.lastTick}`));

  const party = el("div", "party");
  for (const player of room.players) {
    const hp = model.hp[player.id] ?? player.hp;
    party.appendChild(
      hpBar({ name: player.name, hp, max_hp: player.stats.max_hp, level: player.level, exp: player.exp }),
    );
  }
  panel.appendChild(party);

  const monsters = el("div", "enemy-list");
  const actions = el("div", "controls");
  if (room.phase === "lobby") {
    const start = el("button", "control", "start");
    start.dataset.input = "start";
    start.addEventListener("click", handlers.onStart);
    actions.appendChild(start);
  }
  for (const monster of room.monsters) {
    const hp = model.hp[monster.id] ?? monster.hp;
    const line = el("p", "battle-line", `${monster.name} (${monster.id}): ${hp}/${monster.stats.max_hp} hp`);
    if (hp <= 0) line.classList.add("dead");
    monsters.appendChild(line);
    if (hp > 0 && (room.phase === "fighting" || room.phase === "wave_cleared")) {
      for (const kind of ["physical", "magic"] as const) {
        const button = el("button", "control", `${kind} ${monster.id}`);
        button.dataset.input = `${kind} ${monster.id}`;
        button.addEventListener("click", () => handlers.onAction(kind, monster.id));
        actions.appendChild(button);
      }
    }
  }
  panel.appendChild(monsters);
  panel.appendChild(actions);

  const log = el("div", "battle-log");
  for (const line of model.log.slice(-8)) log.appendChild(el("p", "battle-line", line));
  panel.appendChild(log);
  root.appendChild(panel);
}
