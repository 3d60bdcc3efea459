"""Shared fixtures: forests, engines, and brute-force oracles.

The oracles concretize specs over small finite universes and stay
independent of the difference-engine code paths they check.
"""

from __future__ import annotations

import json

import pytest

from agentacl import (
    DifferenceEngine,
    Permission,
    ResourceValueSpec,
    load_forest,
    parse_rvs,
    validate_rvs,
)
from agentacl.casestudies import install_case_studies
from agentacl.model import new_permission_id
from agentacl.web.rvss import MONTH_NAMES

INTERVAL_FOREST_JSON = json.dumps(
    {
        "trees": {"Calendar": {"name": "Interval", "kind": "interval"}},
        "actions": ["read"],
    }
)

# Universe members are root-anchored paths. The universe is prefix closed:
# a bare (Year, 2026) member models year-level resources that live under no
# month, because a parent denotes a superset of its children's union.
GAME_UNIVERSE = [(("GameId", str(i)),) for i in range(1, 6)]
CALENDAR_UNIVERSE = [(("Year", "2026"),)] + [
    (("Year", "2026"), ("Month", m)) for m in MONTH_NAMES
]
INTERVAL_UNIVERSE_LO, INTERVAL_UNIVERSE_HI = 0, 1000


def covers_member(spec: ResourceValueSpec, member) -> bool:
    """Whether a spec's denoted set contains one concrete universe member.

    A member is a full path of (node, value) pairs; a spec covers it when
    the spec is a prefix of the path with matching nodes and each spec value
    is the wildcard or the member's exact value.
    """
    if len(spec.segments) > len(member):
        return False
    for seg, (node, value) in zip(spec.segments, member):
        if seg.node_name != node:
            return False
        if seg.is_wildcard:
            continue
        if seg.value != value:
            return False
    return True


def concrete(spec: ResourceValueSpec, universe) -> frozenset:
    return frozenset(m for m in universe if covers_member(spec, m))


def concrete_union(specs, universe) -> frozenset:
    out = set()
    for spec in specs:
        out |= concrete(spec, universe)
    return frozenset(out)


def concrete_interval(spec: ResourceValueSpec) -> frozenset:
    """Integer set denoted by a single-segment interval spec over the test
    universe, treating intervals as half-open."""
    seg = spec.segments[-1]
    if seg.is_wildcard:
        return frozenset(range(INTERVAL_UNIVERSE_LO, INTERVAL_UNIVERSE_HI))
    lo, hi = (int(x) for x in seg.value.split("-"))
    return frozenset(range(lo, hi))


@pytest.fixture()
def engine() -> DifferenceEngine:
    e = DifferenceEngine()
    install_case_studies(e)
    e.add_forest("unixcal", load_forest(INTERVAL_FOREST_JSON))
    return e


@pytest.fixture()
def plain_engine() -> DifferenceEngine:
    """Case-study forests but no custom difference functions registered."""
    e = DifferenceEngine()
    from agentacl.casestudies import FOREST_LOADERS

    for app, loader in FOREST_LOADERS.items():
        e.add_forest(app, loader())
    e.add_forest("unixcal", load_forest(INTERVAL_FOREST_JSON))
    return e


def perm(engine: DifferenceEngine, app: str, text: str, action: str) -> Permission:
    """A validated permission for snapshot-building in tests."""
    resolved = validate_rvs(parse_rvs(text), engine.forest(app))
    return Permission(id=new_permission_id(), rvs=resolved, action=action)
