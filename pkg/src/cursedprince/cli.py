"""Command-line surface: play, replay, validate, simulate, serve.

The terminal renderer is a thin shell over session ViewModels: it prints
the view's text, one numbered choice per line, and accepts either the
number or the exact label on standard input. All game logic stays in the
session module so replays and tests exercise the same code paths.

Exit codes: 0 success, 1 campaign validation errors or a failed run,
2 usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .balance import render_report, simulate_balance
from .questscript.default_campaign import default_campaign
from .questscript.model import CampaignScript, Severity
from .questscript.parser import parse_campaign
from .questscript.validator import validate_campaign
from .saves import SaveError, load_session, save_session
from .session import (
    Autosave,
    IllegalInput,
    MultiplayerRequested,
    NoSave,
    SessionState,
    current_view,
    handle_input,
    new_session,
)

SCREEN_TAGS = {
    "main_menu": "MainMenu",
    "about": "About",
    "narration": "Narration",
    "dialog": "Dialog",
    "weapon_select": "WeaponSelect",
    "quest": "Quest",
    "battle": "Battle",
    "chapter_complete": "ChapterComplete",
    "win": "Win",
    "lose": "Lose",
    "exited": "Exited",
}


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from exc
    if value < 1:
        raise argparse.ArgumentTypeError("value must be >= 1")
    return value


def _load_campaign(path: str | None) -> CampaignScript | None:
    """Load and fully validate a campaign; print diagnostics on failure."""
    if path is None:
        return default_campaign()
    try:
        source = Path(path).read_bytes()
    except OSError as exc:
        print(f"cannot read {path}: {exc}", file=sys.stderr)
        return None
    parsed = parse_campaign(source)
    if not isinstance(parsed, CampaignScript):
        for diagnostic in parsed:
            print(f"{path}:{diagnostic}", file=sys.stderr)
        return None
    errors = [d for d in validate_campaign(parsed) if d.severity is Severity.ERROR]
    if errors:
        for diagnostic in errors:
            print(f"{path}:{diagnostic}", file=sys.stderr)
        return None
    return parsed


def _render(view) -> None:
    print()
    for line in view.text:
        print(line)
    if view.party:
        print("-" * 40)
        for member in view.party:
            print(
                f"{member.name}: hp {member.hp}/{member.max_hp}  "
                f"level {member.level}  exp {member.exp}"
            )
    if view.inputs:
        print("-" * 40)
        for i, label in enumerate(view.inputs):
            print(f"  {i + 1}) {label}")


def _read_choice(view) -> str | None:
    """Read a labelled choice; numbers select by position. None on EOF."""
    while True:
        try:
            raw = input("> ").strip()
        except EOFError:
            return None
        if not raw:
            continue
        if raw.isdigit():
            index = int(raw) - 1
            if 0 <= index < len(view.inputs):
                return view.inputs[index]
            print(f"pick a number between 1 and {len(view.inputs)}")
            continue
        return raw


def _save_to(path: Path, state: SessionState) -> None:
    path.write_bytes(save_session(state))


def cmd_play(args: argparse.Namespace) -> int:
    campaign = _load_campaign(args.campaign)
    if campaign is None:
        return 1
    save_path = Path(args.save)
    state = new_session(campaign, seed=args.seed)
    while True:
        view = current_view(state)
        _render(view)
        if view.kind == "exited":
            return 0
        choice = _read_choice(view)
        if choice is None:
            return 0
        try:
            state, events = handle_input(state, choice)
        except NoSave:
            if save_path.exists():
                try:
                    state = load_session(save_path.read_bytes())
                except SaveError as exc:
                    print(f"cannot resume: {exc}", file=sys.stderr)
                continue
            print("nothing to continue: no save yet")
            continue
        except IllegalInput as exc:
            print(f"illegal input: {exc}")
            continue
        for event in events:
            if isinstance(event, Autosave):
                _save_to(save_path, state)
            elif isinstance(event, MultiplayerRequested):
                print("multiplayer runs on the arena server: try `cursedprince serve`")


def cmd_replay(args: argparse.Namespace) -> int:
    campaign = _load_campaign(args.campaign)
    if campaign is None:
        return 1
    try:
        lines = Path(args.inputs).read_text("utf-8").splitlines()
    except OSError as exc:
        print(f"cannot read {args.inputs}: {exc}", file=sys.stderr)
        return 1
    state = new_session(campaign, seed=args.seed)
    for lineno, line in enumerate(lines, start=1):
        choice = line.split("#", 1)[0].strip()
        if not choice:
            continue
        try:
            state, _ = handle_input(state, choice)
        except IllegalInput as exc:
            print(f"{args.inputs}:{lineno}: {exc}", file=sys.stderr)
            return 1
    print(SCREEN_TAGS[current_view(state).kind])
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        source = Path(args.campaign).read_bytes()
    except OSError as exc:
        print(f"cannot read {args.campaign}: {exc}", file=sys.stderr)
        return 1
    parsed = parse_campaign(source)
    if isinstance(parsed, CampaignScript):
        diagnostics = validate_campaign(parsed)
    else:
        diagnostics = parsed
    for diagnostic in sorted(diagnostics, key=lambda d: (d.line, d.column)):
        print(f"{args.campaign}:{diagnostic}")
    errors = sum(1 for d in diagnostics if d.severity is Severity.ERROR)
    warnings = len(diagnostics) - errors
    print(f"{errors} errors, {warnings} warnings")
    return 1 if errors else 0


def cmd_simulate(args: argparse.Namespace) -> int:
    campaign = _load_campaign(args.campaign)
    if campaign is None:
        return 1
    report = simulate_balance(args.battles, args.seed, campaign)
    print(render_report(report))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .netplay.server import create_app

    web_dir = args.web
    if web_dir is None:
        candidate = Path.cwd() / "frontend" / "dist"
        if candidate.is_dir():
            web_dir = str(candidate)
    app = create_app(db_path=args.db, tick_ms=args.tick_ms, web_dir=web_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cursedprince",
        description="Deterministic RPG engine and co-op arena server.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    play = sub.add_parser("play", help="play the campaign in the terminal")
    play.add_argument("--campaign", help="questscript file (bundled campaign if omitted)")
    play.add_argument("--save", default="cursedprince.cpsav", help="save file path")
    play.add_argument("--seed", type=int, default=0)
    play.set_defaults(func=cmd_play)

    replay = sub.add_parser("replay", help="feed scripted inputs and print the final screen")
    replay.add_argument("--inputs", required=True, help="one labelled choice per line; # comments")
    replay.add_argument("--seed", type=int, required=True)
    replay.add_argument("--campaign")
    replay.set_defaults(func=cmd_replay)

    validate = sub.add_parser("validate", help="check a campaign file")
    validate.add_argument("campaign")
    validate.set_defaults(func=cmd_validate)

    simulate = sub.add_parser("simulate", help="auto-play battles and report balance")
    simulate.add_argument("--battles", type=_positive_int, required=True, help="runs per battle scene")
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--campaign")
    simulate.set_defaults(func=cmd_simulate)

    serve = sub.add_parser("serve", help="run the multiplayer arena server")
    serve.add_argument("--port", type=int, required=True)
    serve.add_argument("--db", required=True, help="player profile database file")
    serve.add_argument("--tick-ms", type=int, default=500)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--web", help="directory of built browser-client assets")
    serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
