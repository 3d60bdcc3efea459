"""Resource-centric access control for autonomous agents.

Permissions pair a resource value specification (a root-anchored path in an
application's resource type tree, with a literal or wildcard value at each
node) with an action. API calls and web page elements are checked against
the active grants by iteratively subtracting what each grant covers.
"""

from .errors import AccessControlError
from .model import (
    WILDCARD,
    AccessNeed,
    Permission,
    ResourceForest,
    ResourceTypeNode,
    ResourceTypeTree,
    ResourceValueSpec,
    Segment,
    describe_permission,
    describe_rvs,
    forest_to_json,
    load_forest,
    parse_rvs,
    render_rvs,
    rvs,
    validate_rvs,
)
from .difference import (
    DifferenceEngine,
    DifferenceFunction,
    interval_difference,
    order_independence_violations,
    tree_difference,
)
from .checker import (
    ActiveSnapshot,
    CheckResult,
    check_access,
    detect_redundancy,
    get_resources,
)
from .store import AuditRecord, PermissionStore, replay_audit
from .gate import AgentDirective, ApiGate, GateDecision

__version__ = "0.1.0"

__all__ = [
    "AccessControlError",
    "WILDCARD",
    "AccessNeed",
    "Permission",
    "ResourceForest",
    "ResourceTypeNode",
    "ResourceTypeTree",
    "ResourceValueSpec",
    "Segment",
    "describe_permission",
    "describe_rvs",
    "forest_to_json",
    "load_forest",
    "parse_rvs",
    "render_rvs",
    "rvs",
    "validate_rvs",
    "DifferenceEngine",
    "DifferenceFunction",
    "interval_difference",
    "order_independence_violations",
    "tree_difference",
    "ActiveSnapshot",
    "CheckResult",
    "check_access",
    "detect_redundancy",
    "get_resources",
    "AuditRecord",
    "PermissionStore",
    "replay_audit",
    "AgentDirective",
    "ApiGate",
    "GateDecision",
]
