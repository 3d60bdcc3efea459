"""Interception of agent API calls.

Each application registers a permission function mapping (endpoint name,
argument values) to the sufficient permissions for that call. The gate
computes the need, checks it against a fresh snapshot, records the outcome
in the audit log, and on denial applies the application's handling mode.
The gate only decides; it never executes endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional

from .checker import CheckResult, check_access, failed_check
from .difference import DifferenceEngine
from .errors import PermissionFunctionError, UnknownApplicationError
from .model import (
    WILDCARD,
    AccessNeed,
    ResourceValueSpec,
    Segment,
    render_rvs,
)
from .store import HANDLING_MODES, PermissionStore

# Returns the sufficient permissions for a call, or None for an endpoint the
# application has not mapped (the broad built-in fallback then applies).
PermissionFunction = Callable[[str, Mapping[str, object]], Optional[AccessNeed]]

ALLOW = "allow"
DENY = "deny"


@dataclass(frozen=True)
class AgentDirective:
    """What a denied agent should do next, per the active handling mode."""

    mode: str
    ask_message: str | None = None
    skip_message: str | None = None
    suggested_permissions: tuple[tuple[ResourceValueSpec, str], ...] = ()
    auto_deployed: tuple[str, ...] = ()
    retry: bool = False

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "ask_message": self.ask_message,
            "skip_message": self.skip_message,
            "suggested_permissions": [
                {"rvs": render_rvs(r), "action": a}
                for r, a in self.suggested_permissions
            ],
            "auto_deployed": list(self.auto_deployed),
            "retry": self.retry,
        }


@dataclass(frozen=True)
class GateDecision:
    outcome: str
    check: CheckResult
    directive: AgentDirective | None = None
    message: str | None = None

    @property
    def allowed(self) -> bool:
        return self.outcome == ALLOW

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome,
            "message": self.message,
            "check": self.check.to_json(),
            "directive": self.directive.to_json() if self.directive else None,
        }


def unmet_pairs(result: CheckResult) -> list[tuple[ResourceValueSpec, str]]:
    """The remaining (spec, action) pairs of a denial, deduplicated.

    Per-need order is preserved; within one need the remaining specs sort
    by their rendered form so the output is deterministic.
    """
    pairs: list[tuple[ResourceValueSpec, str]] = []
    for outcome in result.per_need:
        if outcome.satisfied:
            continue
        for spec in sorted(outcome.remaining, key=render_rvs):
            pair = (spec, outcome.action)
            if pair not in pairs:
                pairs.append(pair)
    return pairs


def denial_message(result: CheckResult) -> str:
    """Stable agent-facing error line: ``permission denied: missing [...]``."""
    pairs = unmet_pairs(result)
    listing = ", ".join(f"{action} on {render_rvs(spec)}" for spec, action in pairs)
    if not pairs and result.diagnostic:
        return f"permission denied: {result.diagnostic}"
    return f"permission denied: missing [{listing}]"


class ApiGate:
    """Decision point for agent API calls against one store and engine."""

    def __init__(self, engine: DifferenceEngine, store: PermissionStore):
        self._engine = engine
        self._store = store
        self._functions: dict[str, PermissionFunction] = {}

    @property
    def store(self) -> PermissionStore:
        return self._store

    @property
    def engine(self) -> DifferenceEngine:
        return self._engine

    def register_permission_function(
        self, app: str, fn: PermissionFunction
    ) -> None:
        self._engine.forest(app)  # raises UnknownApplicationError
        self._functions[app] = fn

    def fallback_need(self, app: str, endpoint_name: str) -> AccessNeed:
        """Broadest possible requirement: every tree's root at the wildcard,
        once per declared action, so unmapped calls stay blocked unless the
        agent holds wide grants."""
        forest = self._engine.forest(app)
        pairs = []
        for action in forest.actions:
            for tree in forest.trees.values():
                spec = ResourceValueSpec(
                    (Segment(tree.root.name, WILDCARD),), tree_name=tree.tree_name
                )
                pairs.append((spec, action))
        return AccessNeed.of(*pairs)

    def intercept(
        self, app: str, endpoint_name: str, args: Mapping[str, object]
    ) -> GateDecision:
        """Check one API call and record the outcome.

        Allowing returns control to the caller, which then executes the
        wrapped endpoint itself. Every call appends exactly one
        access_allowed or access_denied audit record.
        """
        if app not in self._functions:
            raise UnknownApplicationError(
                f"no permission function registered for {app!r}"
            )
        fn = self._functions[app]
        snapshot = self._store.capture_snapshot(app)
        failure: str | None = None
        needs: AccessNeed | None = None
        try:
            needs = fn(endpoint_name, args)
            if needs is None:
                needs = self.fallback_need(app, endpoint_name)
            elif not isinstance(needs, AccessNeed):
                raise PermissionFunctionError(
                    f"permission function for {app!r} returned {type(needs).__name__}"
                )
        except PermissionFunctionError as exc:
            failure = str(exc)
        except Exception as exc:
            failure = f"permission function raised {type(exc).__name__}: {exc}"

        if failure is not None:
            result = failed_check(snapshot.snapshot_id, failure)
        else:
            result = check_access(self._engine, app, needs, snapshot)

        detail = {
            "endpoint": endpoint_name,
            "args": dict(args),
            "check": result.to_json(),
        }
        if failure is not None:
            detail["failed"] = True
        kind = "access_allowed" if result.granted else "access_denied"
        self._store.append_audit(kind, app, detail, actor="agent")

        if result.granted:
            return GateDecision(outcome=ALLOW, check=result)
        directive = self.apply_mode(self._store.mode(app), result, app)
        return GateDecision(
            outcome=DENY,
            check=result,
            directive=directive,
            message=denial_message(result),
        )

    def apply_mode(self, mode: str, denial: CheckResult, app: str) -> AgentDirective:
        """Turn a denial into the mode's directive.

        ask lists every unmet pair for the user; skip instructs a workaround;
        infer suggests exactly the remaining pairs without deploying; yolo
        deploys them (origin auto_deployed), logs the deployment, and asks
        for one retry, which then succeeds because the suggestions equal the
        remaining need.
        """
        if mode not in HANDLING_MODES:
            raise ValueError(f"unknown handling mode {mode!r}")
        if denial.granted:
            raise ValueError("apply_mode requires a denied check")
        pairs = unmet_pairs(denial)
        listing = ", ".join(f"{a} on {render_rvs(r)}" for r, a in pairs)
        if mode == "ask":
            return AgentDirective(
                mode="ask",
                ask_message=(
                    f"Access denied. Ask the user to grant: {listing or denial.diagnostic}"
                ),
            )
        if mode == "skip":
            return AgentDirective(
                mode="skip",
                skip_message=(
                    "Access denied. Do not retry this call; work around it without "
                    f"[{listing}] or ask the user how to proceed."
                ),
            )
        if mode == "infer":
            return AgentDirective(
                mode="infer",
                suggested_permissions=tuple(pairs),
                retry=False,
            )
        # yolo: deploy the remaining pairs and retry once
        deployed: list[str] = []
        for spec, action in pairs:
            perm, _ = self._store.add_permission(
                app, spec, action, origin="auto_deployed", actor="system"
            )
            self._store.append_audit(
                "perm_auto_deployed", app, perm.to_json(), actor="system"
            )
            deployed.append(perm.id)
        return AgentDirective(
            mode="yolo",
            suggested_permissions=tuple(pairs),
            auto_deployed=tuple(deployed),
            retry=bool(deployed),
        )
