"""questscript: the campaign DSL, its parser, validator, and quest rules."""

from .default_campaign import default_campaign, default_campaign_source
from .model import (
    Answer,
    Battle,
    CampaignScript,
    Chapter,
    Combine,
    CombineItems,
    Diagnostic,
    Dialog,
    FetchItem,
    Narration,
    Npc,
    PickUp,
    Quest,
    QuestAction,
    QuestSpec,
    QuestState,
    QuestStatus,
    Question,
    Scene,
    Severity,
    WeaponChoice,
)
from .parser import parse_campaign
from .quests import KindMismatch, evaluate_quest, inventory_dict, inventory_from
from .serializer import scene_position, serialize_campaign
from .validator import validate_campaign

__all__ = [
    "Answer",
    "Battle",
    "CampaignScript",
    "Chapter",
    "Combine",
    "CombineItems",
    "Diagnostic",
    "Dialog",
    "FetchItem",
    "KindMismatch",
    "Narration",
    "Npc",
    "PickUp",
    "Quest",
    "QuestAction",
    "QuestSpec",
    "QuestState",
    "QuestStatus",
    "Question",
    "Scene",
    "Severity",
    "WeaponChoice",
    "default_campaign",
    "default_campaign_source",
    "evaluate_quest",
    "inventory_dict",
    "inventory_from",
    "parse_campaign",
    "scene_position",
    "serialize_campaign",
    "validate_campaign",
]
