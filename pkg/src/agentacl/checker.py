"""Per-action permission checking by iterative subtraction of grants.

For each needed (spec, action) pair the checker starts from the full need,
subtracts what every grant of that action covers, and allows the access
only when nothing remains for every pair. Any evaluator error denies the
access (fail closed).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from .difference import DifferenceEngine
from .model import (
    AccessNeed,
    Permission,
    ResourceValueSpec,
    render_rvs,
    validate_rvs,
)

GRANTED = "granted"
DENIED = "denied"


@dataclass(frozen=True)
class ActiveSnapshot:
    """Immutable view of the active permissions at a point in time."""

    permissions: tuple[Permission, ...]
    snapshot_id: int


@dataclass(frozen=True)
class NeedOutcome:
    """Result for one (spec, action) pair of an access need."""

    rvs: ResourceValueSpec
    action: str
    remaining: frozenset[ResourceValueSpec]
    satisfied: bool
    diagnostic: str | None = None

    def remaining_rendered(self) -> list[str]:
        return sorted(render_rvs(r) for r in self.remaining)

    def to_json(self) -> dict:
        out = {
            "rvs": render_rvs(self.rvs),
            "action": self.action,
            "satisfied": self.satisfied,
            "remaining": self.remaining_rendered(),
        }
        if self.diagnostic is not None:
            out["diagnostic"] = self.diagnostic
        return out


@dataclass(frozen=True)
class CheckResult:
    decision: str
    per_need: tuple[NeedOutcome, ...]
    snapshot_id: int
    diagnostic: str | None = None

    @property
    def granted(self) -> bool:
        return self.decision == GRANTED

    def to_json(self) -> dict:
        out = {
            "decision": self.decision,
            "snapshot_id": self.snapshot_id,
            "needs": [n.to_json() for n in self.per_need],
        }
        if self.diagnostic is not None:
            out["diagnostic"] = self.diagnostic
        return out


Needs = Union[AccessNeed, Iterable[tuple[ResourceValueSpec, str]]]


def _pairs(needs: Needs) -> tuple[tuple[ResourceValueSpec, str], ...]:
    if isinstance(needs, AccessNeed):
        return needs.pairs
    return tuple(needs)


def get_resources(snapshot: ActiveSnapshot, action: str) -> list[ResourceValueSpec]:
    """Specs of exactly the grants for this action, in grant order."""
    return [p.rvs for p in snapshot.permissions if p.action == action]


def check_access(
    engine: DifferenceEngine,
    app_id: str,
    needs: Needs,
    snapshot: ActiveSnapshot,
) -> CheckResult:
    """Decide whether the snapshot's grants cover every needed pair.

    An empty needs collection is vacuously granted. Evaluator errors leave
    the full need as remaining and deny, with the error as diagnostic.
    """
    forest = engine.forest(app_id)
    outcomes: list[NeedOutcome] = []
    for need_rvs, action in _pairs(needs):
        diagnostic = None
        try:
            resolved = validate_rvs(need_rvs, forest)
            if action not in forest.actions:
                raise ValueError(f"undeclared action {action!r}")
            remaining: set[ResourceValueSpec] = {resolved}
            for have in get_resources(snapshot, action):
                nxt: set[ResourceValueSpec] = set()
                for item in remaining:
                    nxt |= engine.resolve(app_id, item, have)
                remaining = nxt
                if not remaining:
                    break
        except Exception as exc:  # fail closed on any evaluator error
            remaining = {need_rvs}
            diagnostic = f"{type(exc).__name__}: {exc}"
        outcomes.append(
            NeedOutcome(
                rvs=need_rvs,
                action=action,
                remaining=frozenset(remaining),
                satisfied=not remaining,
                diagnostic=diagnostic,
            )
        )
    decision = GRANTED if all(o.satisfied for o in outcomes) else DENIED
    return CheckResult(
        decision=decision, per_need=tuple(outcomes), snapshot_id=snapshot.snapshot_id
    )


def failed_check(snapshot_id: int, diagnostic: str) -> CheckResult:
    """A fail-closed denial used when the needs themselves are unknowable."""
    return CheckResult(
        decision=DENIED, per_need=(), snapshot_id=snapshot_id, diagnostic=diagnostic
    )


def detect_redundancy(
    engine: DifferenceEngine,
    app_id: str,
    candidate: Permission,
    snapshot: ActiveSnapshot,
) -> list[Permission]:
    """Existing same-action grants that already cover the candidate.

    Surfaced as warnings only; a covered permission may still be created
    and the overlapping grants coexist.
    """
    covering = []
    for existing in snapshot.permissions:
        if existing.action != candidate.action:
            continue
        if not engine.resolve(app_id, candidate.rvs, existing.rvs):
            covering.append(existing)
    return covering
