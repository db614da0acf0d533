"""Parser for the questscript campaign format.

The format is line-oriented UTF-8 text:

    campaign "Title"
    chapter "Name" {
      narration "..."
      dialog npc=Guard "line" "line"
      weapons "Sword" (atk +4), "Staff" (mag +4)
      quest fetch item="Thing" hint="Where to look"
      quest combine "A","B" -> "C"
      quest question "Prompt?" choices="No","Yes" correct=1
      battle monster=Monster level=1 count=2
    }

Strings are double-quoted with \\ and \" escapes, `#` comments run to end
of line, and question `correct` indexes choices from 0. Errors never raise:
they come back as positioned diagnostics and the parser resynchronises at
the next scene or chapter so one typo does not hide the rest.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from ..rules import Archetype, Weapon
from .model import (
    Battle,
    CampaignScript,
    Chapter,
    CombineItems,
    Diagnostic,
    Dialog,
    FetchItem,
    Narration,
    Npc,
    Quest,
    Question,
    Scene,
    Severity,
    WeaponChoice,
)

SCENE_KEYWORDS = ("narration", "dialog", "weapons", "quest", "battle")
MAX_INT_LITERAL = 1_000_000

_ENEMY_ARCHETYPES = {"Monster": Archetype.MONSTER, "Witch": Archetype.WITCH}
_NPCS = {n.value: n for n in Npc}


@dataclass(frozen=True)
class _Token:
    kind: str  # word | string | int | punct | eof
    value: Union[str, int]
    line: int
    col: int


def _is_word_start(ch: str) -> bool:
    return ch.isascii() and (ch.isalpha() or ch == "_")


def _is_word_char(ch: str) -> bool:
    return ch.isascii() and (ch.isalnum() or ch == "_")


def _lex(source: str) -> tuple[list[_Token], list[Diagnostic]]:
    tokens: list[_Token] = []
    diagnostics: list[Diagnostic] = []
    line, col, i = 1, 1, 0
    n = len(source)

    def err(message: str, at_line: int, at_col: int) -> None:
        diagnostics.append(Diagnostic(Severity.ERROR, at_line, at_col, message))

    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
                col += 1
            continue
        start_line, start_col = line, col
        if ch == '"':
            i += 1
            col += 1
            parts: list[str] = []
            closed = False
            while i < n:
                c = source[i]
                if c == "\n":
                    break
                if c == '"':
                    i += 1
                    col += 1
                    closed = True
                    break
                if c == "\\":
                    if i + 1 < n and source[i + 1] in ('"', "\\"):
                        parts.append(source[i + 1])
                        i += 2
                        col += 2
                        continue
                    err("invalid escape sequence", line, col)
                    i += 1
                    col += 1
                    continue
                parts.append(c)
                i += 1
                col += 1
            if not closed:
                err("unterminated string", start_line, start_col)
            tokens.append(_Token("string", "".join(parts), start_line, start_col))
            continue
        if ch in "0123456789":
            j = i
            while j < n and source[j] in "0123456789":
                j += 1
            text = source[i:j]
            value = int(text) if len(text) <= 12 else MAX_INT_LITERAL + 1
            if value > MAX_INT_LITERAL:
                err("integer literal too large", start_line, start_col)
                value = MAX_INT_LITERAL
            tokens.append(_Token("int", value, start_line, start_col))
            col += j - i
            i = j
            continue
        if _is_word_start(ch):
            j = i
            while j < n and _is_word_char(source[j]):
                j += 1
            tokens.append(_Token("word", source[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if ch == "-" and i + 1 < n and source[i + 1] == ">":
            tokens.append(_Token("punct", "->", start_line, start_col))
            i += 2
            col += 2
            continue
        if ch in "{}(),=+":
            tokens.append(_Token("punct", ch, start_line, start_col))
            i += 1
            col += 1
            continue
        err(f"unexpected character {ch!r}", start_line, start_col)
        i += 1
        col += 1
    tokens.append(_Token("eof", "", line, col))
    return tokens, diagnostics


class _Parser:
    def __init__(self, tokens: list[_Token], diagnostics: list[Diagnostic]):
        self.tokens = tokens
        self.pos = 0
        self.diagnostics = diagnostics

    # -- token helpers ------------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at_word(self, *values: str) -> bool:
        tok = self.peek()
        return tok.kind == "word" and tok.value in values

    def at_punct(self, value: str) -> bool:
        tok = self.peek()
        return tok.kind == "punct" and tok.value == value

    def error(self, message: str, tok: _Token | None = None) -> None:
        tok = tok or self.peek()
        self.diagnostics.append(Diagnostic(Severity.ERROR, tok.line, tok.col, message))

    def expect_word(self, value: str) -> bool:
        if self.at_word(value):
            self.advance()
            return True
        self.error(f"expected '{value}'")
        return False

    def expect_punct(self, value: str) -> bool:
        if self.at_punct(value):
            self.advance()
            return True
        self.error(f"expected '{value}'")
        return False

    def expect_string(self, what: str) -> str | None:
        if self.peek().kind == "string":
            return str(self.advance().value)
        self.error(f"expected {what} string")
        return None

    def expect_int(self, what: str) -> int | None:
        if self.peek().kind == "int":
            return int(self.advance().value)
        self.error(f"expected {what} integer")
        return None

    def expect_key(self, key: str) -> bool:
        return self.expect_word(key) and self.expect_punct("=")

    def sync_to_scene(self) -> None:
        """Skip forward to the next scene keyword, '}', or 'chapter'."""
        self.advance()
        while self.peek().kind != "eof":
            if self.at_word(*SCENE_KEYWORDS) or self.at_word("chapter") or self.at_punct("}"):
                return
            self.advance()

    # -- grammar ------------------------------------------------------------

    def campaign(self) -> CampaignScript | None:
        if not self.at_word("campaign"):
            self.error("expected 'campaign' header")
            return None
        self.advance()
        title = self.expect_string("campaign title")
        if title is None:
            return None
        chapters: list[Chapter] = []
        while self.at_word("chapter"):
            chapter = self.chapter()
            if chapter is not None:
                chapters.append(chapter)
        if self.peek().kind != "eof":
            self.error("expected 'chapter' or end of file")
        if not chapters:
            self.error("campaign needs at least one chapter")
            return None
        return CampaignScript(title=title, chapters=tuple(chapters))

    def chapter(self) -> Chapter | None:
        self.advance()  # 'chapter'
        name = self.expect_string("chapter name")
        if name is None or not self.expect_punct("{"):
            self.sync_to_scene()
            if name is None:
                return None
        scenes: list[Scene] = []
        while not self.at_punct("}") and self.peek().kind != "eof" and not self.at_word("chapter"):
            before = self.pos
            scene = self.scene()
            if scene is not None:
                scenes.append(scene)
            elif self.pos == before:
                self.sync_to_scene()
        if self.at_punct("}"):
            self.advance()
        else:
            self.error("expected '}' to close chapter")
        if not scenes:
            self.error("chapter needs at least one scene")
            return None
        return Chapter(name=name, scenes=tuple(scenes))

    def scene(self) -> Scene | None:
        tok = self.peek()
        if self.at_word("narration"):
            self.advance()
            text = self.expect_string("narration")
            return None if text is None else Narration(text)
        if self.at_word("dialog"):
            return self.dialog_scene()
        if self.at_word("weapons"):
            return self.weapons_scene()
        if self.at_word("quest"):
            return self.quest_scene()
        if self.at_word("battle"):
            return self.battle_scene()
        self.error(f"expected a scene ({', '.join(SCENE_KEYWORDS)})", tok)
        return None

    def dialog_scene(self) -> Dialog | None:
        self.advance()
        if not self.expect_key("npc"):
            return None
        npc_tok = self.peek()
        if npc_tok.kind != "word":
            self.error("expected npc name")
            return None
        self.advance()
        npc = _NPCS.get(str(npc_tok.value))
        if npc is None:
            allowed = ", ".join(sorted(_NPCS))
            self.error(f"unknown npc {npc_tok.value!r} (expected one of {allowed})", npc_tok)
            return None
        lines: list[str] = []
        while self.peek().kind == "string":
            lines.append(str(self.advance().value))
        if not lines:
            self.error("dialog needs at least one line")
            return None
        return Dialog(npc=npc, lines=tuple(lines))

    def weapons_scene(self) -> WeaponChoice | None:
        self.advance()
        options: list[Weapon] = []
        first = self.weapon()
        if first is None:
            return None
        options.append(first)
        while self.at_punct(","):
            self.advance()
            weapon = self.weapon()
            if weapon is None:
                return None
            options.append(weapon)
        if len(options) < 2:
            self.error("weapon choice needs at least two options")
            return None
        return WeaponChoice(options=tuple(options))

    def weapon(self) -> Weapon | None:
        tok = self.peek()
        name = self.expect_string("weapon name")
        if name is None or not self.expect_punct("("):
            return None
        slot_tok = self.peek()
        if not self.at_word("atk", "mag"):
            self.error("expected 'atk' or 'mag'")
            return None
        slot = str(self.advance().value)
        if not self.expect_punct("+"):
            return None
        bonus = self.expect_int("bonus")
        if bonus is None or not self.expect_punct(")"):
            return None
        if bonus < 1:
            self.error("weapon bonus must be at least 1", tok)
            return None
        if slot == "atk":
            return Weapon(name, attack_bonus=bonus)
        return Weapon(name, magic_bonus=bonus)

    def quest_scene(self) -> Quest | None:
        self.advance()
        tok = self.peek()
        if self.at_word("fetch"):
            self.advance()
            if not self.expect_key("item"):
                return None
            item = self.expect_string("item name")
            if item is None:
                return None
            hint = None
            if self.at_word("hint"):
                if not self.expect_key("hint"):
                    return None
                hint = self.expect_string("hint")
                if hint is None:
                    return None
            return Quest(FetchItem(item=item, hint=hint))
        if self.at_word("combine"):
            self.advance()
            inputs: list[str] = []
            first = self.expect_string("input item")
            if first is None:
                return None
            inputs.append(first)
            while self.at_punct(","):
                self.advance()
                item = self.expect_string("input item")
                if item is None:
                    return None
                inputs.append(item)
            if len(inputs) < 2:
                self.error("combine needs at least two inputs", tok)
                return None
            if len(set(inputs)) != len(inputs):
                self.error("combine inputs must be distinct", tok)
                return None
            if not self.expect_punct("->"):
                return None
            output = self.expect_string("output item")
            if output is None:
                return None
            return Quest(CombineItems(inputs=tuple(inputs), output=output))
        if self.at_word("question"):
            self.advance()
            prompt = self.expect_string("question prompt")
            if prompt is None or not self.expect_key("choices"):
                return None
            choices: list[str] = []
            first = self.expect_string("choice")
            if first is None:
                return None
            choices.append(first)
            while self.at_punct(","):
                self.advance()
                choice = self.expect_string("choice")
                if choice is None:
                    return None
                choices.append(choice)
            if len(choices) < 2:
                self.error("question needs at least two choices", tok)
                return None
            if not self.expect_key("correct"):
                return None
            correct = self.expect_int("correct index")
            if correct is None:
                return None
            return Quest(Question(prompt=prompt, choices=tuple(choices), correct=correct))
        self.error("expected 'fetch', 'combine', or 'question'", tok)
        return None

    def battle_scene(self) -> Battle | None:
        tok = self.peek()
        self.advance()
        if not self.expect_key("monster"):
            return None
        kind_tok = self.peek()
        if kind_tok.kind != "word":
            self.error("expected enemy archetype")
            return None
        self.advance()
        enemy = _ENEMY_ARCHETYPES.get(str(kind_tok.value))
        if enemy is None:
            self.error(f"unknown enemy archetype {kind_tok.value!r} (expected Monster or Witch)", kind_tok)
            return None
        if not self.expect_key("level"):
            return None
        level = self.expect_int("level")
        if level is None:
            return None
        if not self.expect_key("count"):
            return None
        count = self.expect_int("count")
        if count is None:
            return None
        if level < 1:
            self.error("battle level must be at least 1", tok)
            return None
        if count < 1:
            self.error("battle count must be at least 1", tok)
            return None
        return Battle(enemy=enemy, level=level, count=count)


def parse_campaign(source: str | bytes) -> CampaignScript | list[Diagnostic]:
    """Parse campaign text into a script, or a non-empty diagnostic list.

    Never raises on bad input: malformed bytes, stray characters, and
    grammar errors all surface as Error diagnostics with 1-based positions.
    """
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            prefix = source[: exc.start]
            line = prefix.count(b"\n") + 1
            col = exc.start - (prefix.rfind(b"\n") + 1) + 1
            return [Diagnostic(Severity.ERROR, line, max(col, 1), "source is not valid UTF-8")]
    tokens, diagnostics = _lex(source)
    parser = _Parser(tokens, diagnostics)
    script = parser.campaign()
    errors = [d for d in parser.diagnostics if d.severity is Severity.ERROR]
    if errors or script is None:
        if not errors:
            errors = [Diagnostic(Severity.ERROR, 1, 1, "could not parse campaign")]
        return errors
    return script
