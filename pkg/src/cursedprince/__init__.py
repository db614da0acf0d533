"""cursedprince: a headless, deterministic RPG engine and arena server.

Core pieces: combat and progression rules, the questscript campaign DSL,
the single-player session state machine with versioned saves, the
multiplayer arena server and its wire protocol, and a CLI tying them
together.
"""

from .questscript import (
    CampaignScript,
    default_campaign,
    parse_campaign,
    serialize_campaign,
    validate_campaign,
)
from .rules import (
    Archetype,
    AttackKind,
    BattleResult,
    Combatant,
    Side,
    Stats,
    Weapon,
    award_exp,
    resolve_attack,
    run_battle,
    turn_order,
)
from .saves import load_session, save_session
from .session import SessionState, current_view, handle_input, new_session

__version__ = "0.1.0"

__all__ = [
    "Archetype",
    "AttackKind",
    "BattleResult",
    "CampaignScript",
    "Combatant",
    "SessionState",
    "Side",
    "Stats",
    "Weapon",
    "award_exp",
    "current_view",
    "default_campaign",
    "handle_input",
    "load_session",
    "new_session",
    "parse_campaign",
    "resolve_attack",
    "run_battle",
    "save_session",
    "serialize_campaign",
    "turn_order",
    "validate_campaign",
]
