"""The built-in campaign: the prince's road from the forest back to the palace."""

from __future__ import annotations

from importlib import resources

from .model import CampaignScript
from .parser import parse_campaign

_cached: CampaignScript | None = None


def default_campaign_source() -> str:
    """Canonical text of the bundled campaign."""
    return resources.files(__package__).joinpath("default.quest").read_text("utf-8")


def default_campaign() -> CampaignScript:
    """Parsed bundled campaign: three chapters ending at the Witch."""
    global _cached
    if _cached is None:
        script = parse_campaign(default_campaign_source())
        if not isinstance(script, CampaignScript):
            raise RuntimeError(f"bundled campaign failed to parse: {script}")
        _cached = script
    return _cached
