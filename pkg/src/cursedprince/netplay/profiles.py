"""Durable player profiles: an append-and-compact JSON-lines file.

One record per line keyed by player name; the last line for a name wins.
Writes are flushed and fsynced so a killed server loses nothing it ack'd,
and the file is compacted on open once stale lines outnumber live ones.
Each profile also carries the player's single story-mode save slot.
"""

from __future__ import annotations

import base64
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Optional

from ..rules import exp_to_next


class StoreUnavailable(Exception):
    pass


def level_for_total_exp(total_exp: int) -> int:
    """Level implied by lifetime exp under the standard thresholds."""
    level, remaining = 1, total_exp
    while remaining >= exp_to_next(level):
        remaining -= exp_to_next(level)
        level += 1
    return level


@dataclass(frozen=True)
class PlayerProfile:
    name: str
    total_exp: int = 0
    level: int = 1
    monsters_defeated: int = 0

    def to_jsonable(self) -> dict:
        return {
            "name": self.name,
            "total_exp": self.total_exp,
            "level": self.level,
            "monsters_defeated": self.monsters_defeated,
        }


class ProfileStore:
    """Single-writer store; callers must serialize access themselves."""

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self._profiles: dict[str, PlayerProfile] = {}
        self._saves: dict[str, bytes] = {}
        self._handle: Optional[IO[str]] = None
        self._stale = 0
        self._load()
        if self._stale > max(len(self._profiles), 16):
            self.compact()
        self._handle = open(self.path, "a", encoding="utf-8")

    def _load(self) -> None:
        if not self.path.exists():
            return
        try:
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        record = json.loads(line)
                        name = record["name"]
                        if name in self._profiles:
                            self._stale += 1
                        self._profiles[name] = PlayerProfile(
                            name=name,
                            total_exp=int(record["total_exp"]),
                            level=int(record["level"]),
                            monsters_defeated=int(record["monsters_defeated"]),
                        )
                        save_b64 = record.get("save")
                        if save_b64:
                            self._saves[name] = base64.b64decode(save_b64)
                        else:
                            self._saves.pop(name, None)
                    except (KeyError, ValueError, TypeError):
                        self._stale += 1  # skip torn or foreign lines
        except OSError as exc:
            raise StoreUnavailable(f"cannot read profile store: {exc}") from exc

    def _append(self, profile: PlayerProfile) -> None:
        if self._handle is None:
            raise StoreUnavailable("profile store is closed")
        record = profile.to_jsonable()
        save = self._saves.get(profile.name)
        record["save"] = base64.b64encode(save).decode("ascii") if save else None
        try:
            self._handle.write(json.dumps(record, sort_keys=True) + "\n")
            self._handle.flush()
            os.fsync(self._handle.fileno())
        except (OSError, ValueError) as exc:
            raise StoreUnavailable(f"cannot write profile store: {exc}") from exc
        if profile.name in self._profiles:
            self._stale += 1
        self._profiles[profile.name] = profile

    def get(self, name: str) -> Optional[PlayerProfile]:
        return self._profiles.get(name)

    def get_or_default(self, name: str) -> PlayerProfile:
        return self._profiles.get(name, PlayerProfile(name=name))

    def upsert(self, name: str, exp_delta: int = 0, monsters_delta: int = 0) -> PlayerProfile:
        """Apply deltas and persist; level is recomputed from lifetime exp."""
        current = self.get_or_default(name)
        total = current.total_exp + exp_delta
        updated = PlayerProfile(
            name=name,
            total_exp=total,
            level=level_for_total_exp(total),
            monsters_defeated=current.monsters_defeated + monsters_delta,
        )
        self._append(updated)
        return updated

    def set_save(self, name: str, data: bytes) -> None:
        """Persist the one story-mode save slot for this profile."""
        self._saves[name] = data
        self._append(self.get_or_default(name))

    def get_save(self, name: str) -> Optional[bytes]:
        return self._saves.get(name)

    def names(self) -> list[str]:
        return sorted(self._profiles)

    def compact(self) -> None:
        """Rewrite the file to one live line per profile."""
        tmp = self.path.with_suffix(self.path.suffix + ".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            for name in sorted(self._profiles):
                record = self._profiles[name].to_jsonable()
                save = self._saves.get(name)
                record["save"] = base64.b64encode(save).decode("ascii") if save else None
                fh.write(json.dumps(record, sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, self.path)
        self._stale = 0
        if self._handle is not None:
            self._handle.close()
            self._handle = open(self.path, "a", encoding="utf-8")

    def close(self) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None


def record_result(store: ProfileStore, name: str, exp_delta: int = 0, monsters_delta: int = 0) -> PlayerProfile:
    """Durable upsert of a player's results; read-after-write consistent."""
    return store.upsert(name, exp_delta=exp_delta, monsters_delta=monsters_delta)
