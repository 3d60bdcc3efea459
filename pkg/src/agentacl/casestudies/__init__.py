"""Executable case-study applications: a tic-tac-toe game protecting its
history, a calendar, a travel service, and a payment wallet.

Each application contributes the four pieces an application owes the
engine: resource type trees, actions, a permission function for its API
endpoints, and (for the game) a custom difference function. Web mapping
configurations and HTML page snapshots for the game and calendar live in
``data/``.
"""

from __future__ import annotations

import json
from datetime import date
from importlib import resources
from pathlib import Path

from ..difference import DifferenceEngine, DifferenceFunction
from ..gate import ApiGate
from ..model import (
    WILDCARD,
    AccessNeed,
    ResourceValueSpec,
    load_forest,
    rvs,
)
from ..web import DomSnapshot, WebMappingConfig, parse_web_config
from ..web.rvss import MONTH_NAMES

APPLICATIONS = ("tictactoe", "calendar", "expedia", "wallet")

GAME_PAGE_URL = "http://localhost/tictactoe"


def _data_text(name: str) -> str:
    return (resources.files(__package__) / "data" / name).read_text(encoding="utf-8")


def game_forest():
    return load_forest(_data_text("game.forest.json"))


def calendar_forest():
    return load_forest(_data_text("calendar.forest.json"))


def expedia_forest():
    return load_forest(_data_text("expedia.forest.json"))


def wallet_forest():
    return load_forest(_data_text("wallet.forest.json"))


# -- tic-tac-toe ----------------------------------------------------------------

def game_permission_function(endpoint_name: str, args) -> AccessNeed:
    """Maps every game endpoint; unknown endpoints need the concrete game id
    (or everything, when no id argument is present)."""
    raw = str(args.get("game_id", "?"))
    game_id = WILDCARD if raw == "?" else raw
    if endpoint_name == "get_games":
        resource = rvs(("GameId", WILDCARD), tree="Game")
    else:
        resource = rvs(("GameId", game_id), tree="Game")
    action = "write" if "delete" in endpoint_name else "read"
    return AccessNeed.of((resource, action))


def _game_difference(
    need: ResourceValueSpec, have: ResourceValueSpec
) -> set[ResourceValueSpec]:
    # empty iff have is the wildcard or exactly the needed id; conservative
    # for a wildcard need, which would require tracking the existing games
    nseg, hseg = need.segments[0], have.segments[0]
    if hseg.is_wildcard or hseg.value == nseg.value:
        return set()
    return {need}


GAME_DIFFERENCE = DifferenceFunction(applies_to="Game", evaluate=_game_difference)


# -- calendar --------------------------------------------------------------------

CALENDAR_ENDPOINTS = (
    "get_calendar_events",
    "check_availability",
    "add_event",
    "update_event",
)


def _calendar_action(endpoint_name: str) -> str:
    if any(k in endpoint_name for k in ("reserve", "create", "add")):
        return "create"
    if any(k in endpoint_name for k in ("update", "edit", "modify")):
        return "write"
    return "read"


def calendar_permission_function(endpoint_name: str, args) -> AccessNeed | None:
    """Rounds the [start_date, end_date] span up to the deepest calendar
    level on which both endpoints agree; spans crossing years need the whole
    tree. Unknown endpoints are unmapped (broad fallback applies)."""
    if endpoint_name not in CALENDAR_ENDPOINTS:
        return None
    start = date.fromisoformat(str(args["start_date"]))
    end = date.fromisoformat(str(args.get("end_date", args["start_date"])))
    if start.year != end.year:
        segments = [("Year", WILDCARD)]
    elif start.month != end.month:
        segments = [("Year", str(start.year))]
    elif start.day != end.day:
        segments = [("Year", str(start.year)), ("Month", MONTH_NAMES[start.month - 1])]
    else:
        segments = [
            ("Year", str(start.year)),
            ("Month", MONTH_NAMES[start.month - 1]),
            ("Day", str(start.day)),
        ]
    return AccessNeed.of((rvs(*segments, tree="Calendar"), _calendar_action(endpoint_name)))


# -- expedia ----------------------------------------------------------------------

def expedia_permission_function(endpoint_name: str, args) -> AccessNeed | None:
    """Search and info endpoints read flight data; booking creates the
    specific flight being booked."""
    if endpoint_name in ("search_flights", "get_flight_info"):
        need = rvs(("Destination", WILDCARD), ("Flight", WILDCARD), tree="Travel")
        return AccessNeed.of((need, "read"))
    if endpoint_name == "book_flight":
        raw = str(args.get("flight", "?"))
        flight = WILDCARD if raw == "?" else raw
        need = rvs(("Destination", WILDCARD), ("Flight", flight), tree="Travel")
        return AccessNeed.of((need, "create"))
    return None


# -- wallet ----------------------------------------------------------------------

def wallet_permission_function(endpoint_name: str, args) -> AccessNeed | None:
    """Query endpoints read the credit card resource."""
    if endpoint_name in ("get_credit_cards", "get_credit_card"):
        raw = str(args.get("card", "?"))
        card = WILDCARD if raw == "?" else raw
        return AccessNeed.of((rvs(("CreditCard", card), tree="Wallet"), "read"))
    return None


PERMISSION_FUNCTIONS = {
    "tictactoe": game_permission_function,
    "calendar": calendar_permission_function,
    "expedia": expedia_permission_function,
    "wallet": wallet_permission_function,
}

FOREST_LOADERS = {
    "tictactoe": game_forest,
    "calendar": calendar_forest,
    "expedia": expedia_forest,
    "wallet": wallet_forest,
}


def install_case_studies(engine: DifferenceEngine, gate: ApiGate | None = None) -> None:
    """Register all four applications on an engine (and gate, if given)."""
    for app, loader in FOREST_LOADERS.items():
        engine.add_forest(app, loader())
    engine.register_difference("tictactoe", GAME_DIFFERENCE)
    if gate is not None:
        for app, fn in PERMISSION_FUNCTIONS.items():
            gate.register_permission_function(app, fn)


# -- pages and web configs ---------------------------------------------------------

def game_web_config() -> WebMappingConfig:
    return parse_web_config(_data_text("game.web.json"))[""]


def outlook_web_config() -> tuple[str, WebMappingConfig]:
    configs = parse_web_config(_data_text("outlook.web.json"))
    [(url, config)] = configs.items()
    return url, config


def game_page() -> DomSnapshot:
    return DomSnapshot.parse(_data_text("game.html"))


def outlook_page(month: str = "june") -> DomSnapshot:
    return DomSnapshot.parse(_data_text(f"outlook_{month}.html"))


def write_demo_config(dest_dir: Path | str) -> Path:
    """Materialize a ready-to-serve directory: forests, web configs, and a
    service configuration wired to the case-study permission functions."""
    dest = Path(dest_dir)
    (dest / "forests").mkdir(parents=True, exist_ok=True)
    (dest / "web").mkdir(parents=True, exist_ok=True)
    (dest / "data").mkdir(parents=True, exist_ok=True)
    for name in ("game", "calendar", "expedia", "wallet"):
        (dest / "forests" / f"{name}.forest.json").write_text(
            _data_text(f"{name}.forest.json"), encoding="utf-8"
        )
    for name in ("game.web.json", "outlook.web.json"):
        (dest / "web" / name).write_text(_data_text(name), encoding="utf-8")
    for name in ("game.html", "outlook_june.html", "outlook_july.html"):
        (dest / "web" / name).write_text(_data_text(name), encoding="utf-8")
    config = {
        "listen": "127.0.0.1:8422",
        "data_dir": "data",
        "applications": [
            {
                "id": "tictactoe",
                "forest": "forests/game.forest.json",
                "permission_function": "agentacl.casestudies:game_permission_function",
                "difference_functions": ["agentacl.casestudies:GAME_DIFFERENCE"],
                "web_configs": [{"path": "web/game.web.json", "url": GAME_PAGE_URL}],
                "mode": "ask",
            },
            {
                "id": "calendar",
                "forest": "forests/calendar.forest.json",
                "permission_function": "agentacl.casestudies:calendar_permission_function",
                "web_configs": ["web/outlook.web.json"],
                "mode": "ask",
            },
            {
                "id": "expedia",
                "forest": "forests/expedia.forest.json",
                "permission_function": "agentacl.casestudies:expedia_permission_function",
                "mode": "ask",
            },
            {
                "id": "wallet",
                "forest": "forests/wallet.forest.json",
                "permission_function": "agentacl.casestudies:wallet_permission_function",
                "mode": "ask",
            },
        ],
    }
    config_path = dest / "config.json"
    config_path.write_text(json.dumps(config, indent=2), encoding="utf-8")
    return config_path
