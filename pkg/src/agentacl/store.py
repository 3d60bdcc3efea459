"""Active permission store with snapshot semantics and append-only audit log.

The audit file is the source of truth: newline-delimited JSON with a
version header line, one record per line. On startup the in-memory state
(active permissions, handling modes) is rebuilt by replaying the file.
Mutations serialize through one lock; readers work from immutable
snapshots and never block.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .checker import ActiveSnapshot, check_access, detect_redundancy
from .difference import DifferenceEngine
from .errors import NotFoundError, UndeclaredActionError
from .model import (
    Permission,
    ResourceValueSpec,
    new_permission_id,
    parse_rvs,
    validate_rvs,
)

AUDIT_KINDS = (
    "perm_created",
    "perm_removed",
    "access_allowed",
    "access_denied",
    "mode_changed",
    "perm_auto_deployed",
)

ACTORS = ("user", "system", "agent")

HANDLING_MODES = ("ask", "skip", "infer", "yolo")

DEFAULT_MODE = "ask"

AUDIT_SCHEMA = "agentacl-audit"
AUDIT_VERSION = 1


@dataclass(frozen=True)
class AuditRecord:
    seq: int
    timestamp: datetime
    kind: str
    subject: str
    detail: dict
    actor: str

    def to_json(self) -> dict:
        return {
            "seq": self.seq,
            "timestamp": self.timestamp.isoformat(),
            "kind": self.kind,
            "subject": self.subject,
            "detail": self.detail,
            "actor": self.actor,
        }

    @classmethod
    def from_json(cls, data: dict) -> "AuditRecord":
        return cls(
            seq=data["seq"],
            timestamp=datetime.fromisoformat(data["timestamp"]),
            kind=data["kind"],
            subject=data["subject"],
            detail=data["detail"],
            actor=data["actor"],
        )


class PermissionStore:
    """Holds active permissions per application plus the global audit trail.

    ``audit_path=None`` keeps everything in memory (tests, replay); with a
    path, every record is flushed to disk before the triggering operation
    returns.
    """

    def __init__(self, engine: DifferenceEngine, audit_path: Path | str | None = None):
        self._engine = engine
        self._lock = threading.RLock()
        self._perms: dict[str, dict[str, Permission]] = {}
        self._owner: dict[str, str] = {}  # permission id -> app
        self._modes: dict[str, str] = {}
        self._records: list[AuditRecord] = []
        self._seq = 0
        self._version = 0
        self._path = Path(audit_path) if audit_path is not None else None
        self._fh = None
        if self._path is not None:
            if self._path.exists():
                self._load(self._path)
            self._path.parent.mkdir(parents=True, exist_ok=True)
            fresh = not self._path.exists() or self._path.stat().st_size == 0
            self._fh = open(self._path, "a", encoding="utf-8")
            if fresh:
                header = {"schema": AUDIT_SCHEMA, "version": AUDIT_VERSION}
                self._fh.write(json.dumps(header) + "\n")
                self._fh.flush()
                os.fsync(self._fh.fileno())

    # -- persistence ---------------------------------------------------------

    def _load(self, path: Path) -> None:
        with open(path, encoding="utf-8") as fh:
            header_line = fh.readline()
            if not header_line.strip():
                return
            header = json.loads(header_line)
            if header.get("schema") != AUDIT_SCHEMA:
                raise ValueError(f"not an audit file: {path}")
            for line in fh:
                if not line.strip():
                    continue
                record = AuditRecord.from_json(json.loads(line))
                self._records.append(record)
                self._seq = max(self._seq, record.seq)
                self._materialize(record)

    def _materialize(self, record: AuditRecord) -> None:
        if record.kind == "perm_created":
            perm = Permission.from_json(record.detail)
            self._perms.setdefault(record.subject, {})[perm.id] = perm
            self._owner[perm.id] = record.subject
            self._version += 1
        elif record.kind == "perm_removed":
            perm_id = record.detail["id"]
            app = self._owner.pop(perm_id, None)
            if app is not None:
                self._perms.get(app, {}).pop(perm_id, None)
            self._version += 1
        elif record.kind == "mode_changed":
            self._modes[record.subject] = record.detail["mode"]

    def close(self) -> None:
        with self._lock:
            if self._fh is not None:
                self._fh.close()
                self._fh = None

    def __enter__(self) -> "PermissionStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- audit -----------------------------------------------------------------

    def append_audit(self, kind: str, subject: str, detail: dict, actor: str) -> int:
        """Append one immutable record; returns its sequence number."""
        if kind not in AUDIT_KINDS:
            raise ValueError(f"unknown audit kind {kind!r}")
        if actor not in ACTORS:
            raise ValueError(f"unknown actor {actor!r}")
        with self._lock:
            self._seq += 1
            record = AuditRecord(
                seq=self._seq,
                timestamp=datetime.now(timezone.utc),
                kind=kind,
                subject=subject,
                detail=detail,
                actor=actor,
            )
            if self._fh is not None:
                self._fh.write(json.dumps(record.to_json()) + "\n")
                self._fh.flush()
                os.fsync(self._fh.fileno())
            self._records.append(record)
            return record.seq

    def query_audit(
        self,
        kind: str | None = None,
        app: str | None = None,
        after_seq: int | None = None,
        since: datetime | None = None,
        until: datetime | None = None,
        limit: int | None = None,
    ) -> list[AuditRecord]:
        with self._lock:
            records = list(self._records)
        out = []
        for r in records:
            if kind is not None and r.kind != kind:
                continue
            if app is not None and r.subject != app:
                continue
            if after_seq is not None and r.seq <= after_seq:
                continue
            if since is not None and r.timestamp < since:
                continue
            if until is not None and r.timestamp > until:
                continue
            out.append(r)
            if limit is not None and len(out) >= limit:
                break
        return out

    # -- permissions -------------------------------------------------------------

    def add_permission(
        self,
        app: str,
        spec: ResourceValueSpec | str,
        action: str,
        origin: str = "manual",
        actor: str = "user",
    ) -> tuple[Permission, list[Permission]]:
        """Create a grant; returns it plus redundancy warnings.

        The audit record is durable before the permission becomes visible
        to snapshots. Redundancy (an existing same-action grant already
        covering the new one) is a warning, never a rejection.
        """
        if isinstance(spec, str):
            spec = parse_rvs(spec)
        forest = self._engine.forest(app)
        resolved = validate_rvs(spec, forest)
        if action not in forest.actions:
            raise UndeclaredActionError(
                f"action {action!r} is not declared by application {app!r}"
            )
        with self._lock:
            snapshot = self._snapshot_locked(app)
            perm = Permission(
                id=new_permission_id(), rvs=resolved, action=action, origin=origin
            )
            warnings = detect_redundancy(self._engine, app, perm, snapshot)
            self.append_audit("perm_created", app, perm.to_json(), actor)
            self._perms.setdefault(app, {})[perm.id] = perm
            self._owner[perm.id] = app
            self._version += 1
            return perm, warnings

    def remove_permission(self, perm_id: str, actor: str = "user") -> Permission:
        """Remove a grant. Coverage by other overlapping grants persists."""
        with self._lock:
            app = self._owner.get(perm_id)
            if app is None:
                raise NotFoundError(f"no permission with id {perm_id!r}")
            perm = self._perms[app][perm_id]
            self.append_audit("perm_removed", app, perm.to_json(), actor)
            del self._perms[app][perm_id]
            del self._owner[perm_id]
            self._version += 1
            return perm

    def get_permission(self, perm_id: str) -> tuple[str, Permission]:
        with self._lock:
            app = self._owner.get(perm_id)
            if app is None:
                raise NotFoundError(f"no permission with id {perm_id!r}")
            return app, self._perms[app][perm_id]

    def permissions(self, app: str | None = None) -> list[tuple[str, Permission]]:
        with self._lock:
            out = []
            for app_id, perms in self._perms.items():
                if app is not None and app_id != app:
                    continue
                out.extend((app_id, p) for p in perms.values())
            return out

    def _snapshot_locked(self, app: str) -> ActiveSnapshot:
        perms = tuple(self._perms.get(app, {}).values())
        return ActiveSnapshot(permissions=perms, snapshot_id=self._version)

    def capture_snapshot(self, app: str) -> ActiveSnapshot:
        """Atomic view of one application's grants in creation order."""
        with self._lock:
            return self._snapshot_locked(app)

    # -- handling modes ------------------------------------------------------------

    def mode(self, app: str) -> str:
        with self._lock:
            return self._modes.get(app, DEFAULT_MODE)

    def mode_is_set(self, app: str) -> bool:
        """Whether any mode_changed record exists for this application."""
        with self._lock:
            return app in self._modes

    def set_mode(self, app: str, mode: str, actor: str = "user") -> None:
        if mode not in HANDLING_MODES:
            raise ValueError(f"unknown handling mode {mode!r}")
        with self._lock:
            self.append_audit("mode_changed", app, {"mode": mode}, actor)
            self._modes[app] = mode


@dataclass(frozen=True)
class Divergence:
    seq: int
    reason: str


@dataclass(frozen=True)
class ReplayReport:
    records: int
    accesses: int
    divergences: tuple[Divergence, ...]

    @property
    def ok(self) -> bool:
        return not self.divergences


def replay_audit(engine: DifferenceEngine, path: Path | str) -> ReplayReport:
    """Rebuild store state from an audit file and re-run every access.

    Walks the records in order, maintaining the active permissions exactly
    as the lifecycle records describe, and re-checks each recorded access
    against that state, reporting any decision or remaining-set mismatch.
    """
    perms: dict[str, dict[str, Permission]] = {}
    divergences: list[Divergence] = []
    records = 0
    accesses = 0
    with open(path, encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        if header.get("schema") != AUDIT_SCHEMA:
            raise ValueError(f"not an audit file: {path}")
        for line in fh:
            if not line.strip():
                continue
            record = AuditRecord.from_json(json.loads(line))
            records += 1
            if record.kind == "perm_created":
                perm = Permission.from_json(record.detail)
                perms.setdefault(record.subject, {})[perm.id] = perm
            elif record.kind == "perm_removed":
                perms.get(record.subject, {}).pop(record.detail["id"], None)
            elif record.kind in ("access_allowed", "access_denied"):
                accesses += 1
                recorded = record.detail.get("check", {})
                expected_decision = (
                    "granted" if record.kind == "access_allowed" else "denied"
                )
                if record.detail.get("failed"):
                    if expected_decision != "denied":
                        divergences.append(
                            Divergence(record.seq, "failed check recorded as allowed")
                        )
                    continue
                needs = [
                    (parse_rvs(n["rvs"]), n["action"])
                    for n in recorded.get("needs", [])
                ]
                snapshot = ActiveSnapshot(
                    permissions=tuple(perms.get(record.subject, {}).values()),
                    snapshot_id=record.seq,
                )
                result = check_access(engine, record.subject, needs, snapshot)
                if result.decision != expected_decision:
                    divergences.append(
                        Divergence(
                            record.seq,
                            f"decision {result.decision} != recorded {expected_decision}",
                        )
                    )
                    continue
                for outcome, recorded_need in zip(result.per_need, recorded.get("needs", [])):
                    if outcome.remaining_rendered() != recorded_need.get("remaining", []):
                        divergences.append(
                            Divergence(
                                record.seq,
                                f"remaining for {recorded_need['rvs']} differs: "
                                f"{outcome.remaining_rendered()} != {recorded_need.get('remaining')}",
                            )
                        )
    return ReplayReport(
        records=records, accesses=accesses, divergences=tuple(divergences)
    )
