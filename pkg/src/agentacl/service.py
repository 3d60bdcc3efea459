"""JSON-over-HTTP service exposing the engine to dashboards and agent hosts.

Single process, no authentication: the deployment model trusts everything
on the management side, so this service must only ever listen on loopback
or behind an authenticating proxy.
"""

from __future__ import annotations

import importlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .difference import DifferenceEngine, DifferenceFunction
from .errors import (
    AccessControlError,
    NotFoundError,
    ServiceConfigError,
    UnknownApplicationError,
)
from .gate import ApiGate
from .model import describe_permission, forest_to_json, load_forest
from .store import HANDLING_MODES, PermissionStore
from .web import (
    DomSnapshot,
    WebMappingConfig,
    compute_mask,
    normalize_url,
    parse_web_config,
)

DEFAULT_LISTEN = "127.0.0.1:8422"

LISTEN_ENV = "AGENTACL_LISTEN"
DATA_DIR_ENV = "AGENTACL_DATA_DIR"


@dataclass
class AppEntry:
    id: str
    forest_path: Path
    permission_function: str | None = None
    difference_functions: list[str] = field(default_factory=list)
    web_configs: list[dict] = field(default_factory=list)  # {"path":..., "url":?}
    mode: str = "ask"


@dataclass
class ServiceConfig:
    listen: str
    data_dir: Path
    applications: list[AppEntry]
    static_dir: Path | None = None

    @property
    def host(self) -> str:
        return self.listen.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        return int(self.listen.rsplit(":", 1)[1])


def load_service_config(path: Path | str) -> ServiceConfig:
    """Read a service configuration file; relative paths resolve against the
    file's directory. AGENTACL_LISTEN / AGENTACL_DATA_DIR override."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ServiceConfigError(f"cannot read service config {path}: {exc}") from exc
    base = path.parent
    listen = os.environ.get(LISTEN_ENV) or data.get("listen", DEFAULT_LISTEN)
    data_dir = Path(os.environ.get(DATA_DIR_ENV) or base / data.get("data_dir", "data"))
    if not data_dir.is_absolute():
        data_dir = base / data_dir
    apps = []
    for raw in data.get("applications", []):
        if "id" not in raw or "forest" not in raw:
            raise ServiceConfigError("application entries need 'id' and 'forest'")
        web_configs = []
        for entry in raw.get("web_configs", []):
            if isinstance(entry, str):
                entry = {"path": entry}
            elif not (isinstance(entry, dict) and "path" in entry):
                raise ServiceConfigError(f"bad web_configs entry {entry!r}")
            resolved = dict(entry)
            if not Path(resolved["path"]).is_absolute():
                resolved["path"] = str(base / resolved["path"])
            web_configs.append(resolved)
        mode = raw.get("mode", "ask")
        if mode not in HANDLING_MODES:
            raise ServiceConfigError(f"unknown handling mode {mode!r}")
        apps.append(
            AppEntry(
                id=raw["id"],
                forest_path=base / raw["forest"],
                permission_function=raw.get("permission_function"),
                difference_functions=list(raw.get("difference_functions", [])),
                web_configs=web_configs,
                mode=mode,
            )
        )
    if not apps:
        raise ServiceConfigError("service config declares no applications")
    static_dir = data.get("static_dir")
    return ServiceConfig(
        listen=listen,
        data_dir=data_dir,
        applications=apps,
        static_dir=(base / static_dir) if static_dir else None,
    )


def _import_spec(spec: str):
    module_name, _, attr = spec.partition(":")
    if not module_name or not attr:
        raise ServiceConfigError(f"import spec must be 'module:attr', got {spec!r}")
    try:
        module = importlib.import_module(module_name)
        return getattr(module, attr)
    except (ImportError, AttributeError) as exc:
        raise ServiceConfigError(f"cannot import {spec!r}: {exc}") from exc


class Runtime:
    """Everything the endpoints need, built once from a ServiceConfig."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.engine = DifferenceEngine()
        config.data_dir.mkdir(parents=True, exist_ok=True)
        self.audit_path = config.data_dir / "audit.ndjson"
        self.store = PermissionStore(self.engine, self.audit_path)
        self.gate = ApiGate(self.engine, self.store)
        self.web_configs: dict[str, tuple[str, WebMappingConfig]] = {}
        for app in config.applications:
            forest = load_forest(app.forest_path.read_bytes())
            self.engine.add_forest(app.id, forest)
            for spec in app.difference_functions:
                fn = _import_spec(spec)
                if not isinstance(fn, DifferenceFunction):
                    raise ServiceConfigError(
                        f"{spec!r} is not a DifferenceFunction"
                    )
                self.engine.register_difference(app.id, fn)
            if app.permission_function:
                self.gate.register_permission_function(
                    app.id, _import_spec(app.permission_function)
                )
            for entry in app.web_configs:
                parsed = parse_web_config(Path(entry["path"]).read_bytes())
                for url, web_config in parsed.items():
                    if not url:
                        url = normalize_url(entry.get("url", ""))
                        if not url:
                            raise ServiceConfigError(
                                f"web config {entry['path']!r} has no URL; "
                                "bind one with {'path': ..., 'url': ...}"
                            )
                    self.web_configs[url] = (app.id, web_config)
            # apply the config default only where the audit log has not
            # recorded an explicit choice
            if not self.store.mode_is_set(app.id) and app.mode != "ask":
                self.store.set_mode(app.id, app.mode, actor="system")

    def close(self) -> None:
        self.store.close()


class PermissionBody(BaseModel):
    app: str
    rvs: str
    action: str


class CheckBody(BaseModel):
    app: str
    endpoint: str
    args: dict = {}


class EvaluateDomBody(BaseModel):
    url: str
    html: str


class ModeBody(BaseModel):
    app: str
    mode: str


def create_app(runtime: Runtime) -> FastAPI:
    app = FastAPI(title="agentacl", version="0.1.0")

    @app.exception_handler(AccessControlError)
    async def _engine_error(request, exc: AccessControlError):
        status = 404 if isinstance(exc, (NotFoundError, UnknownApplicationError)) else 400
        return JSONResponse(
            status_code=status,
            content={"error": str(exc), "type": type(exc).__name__},
        )

    @app.get("/api/trees")
    def get_trees():
        return {
            app_id: forest_to_json(runtime.engine.forest(app_id))
            for app_id in runtime.engine.applications()
        }

    @app.get("/api/permissions")
    def list_permissions(app_id: str | None = Query(default=None, alias="app")):
        return [
            dict(perm.to_json(), app=owner)
            for owner, perm in runtime.store.permissions(app_id)
        ]

    @app.post("/api/permissions")
    def create_permission(body: PermissionBody):
        perm, warnings = runtime.store.add_permission(body.app, body.rvs, body.action)
        return {
            "id": perm.id,
            "permission": dict(perm.to_json(), app=body.app),
            "warnings": [dict(w.to_json(), app=body.app) for w in warnings],
        }

    @app.delete("/api/permissions/{perm_id}")
    def delete_permission(perm_id: str):
        removed = runtime.store.remove_permission(perm_id)
        return {"removed": removed.to_json()}

    @app.get("/api/permissions/rendered")
    def rendered_permissions(app_id: str | None = Query(default=None, alias="app")):
        return [
            {"id": perm.id, "app": owner, "text": describe_permission(perm)}
            for owner, perm in runtime.store.permissions(app_id)
        ]

    @app.post("/api/check")
    def check(body: CheckBody):
        decision = runtime.gate.intercept(body.app, body.endpoint, body.args)
        return decision.to_json()

    @app.post("/api/evaluate-dom")
    def evaluate_dom(body: EvaluateDomBody):
        url = normalize_url(body.url)
        entry = runtime.web_configs.get(url)
        if entry is None:
            raise HTTPException(
                status_code=404, detail=f"no web mapping configuration for {url!r}"
            )
        app_id, config = entry
        dom = DomSnapshot.parse(body.html)
        snapshot = runtime.store.capture_snapshot(app_id)
        plan = compute_mask(runtime.engine, app_id, config, dom, snapshot)
        return plan.to_json()

    @app.get("/api/logs")
    def get_logs(
        kind: str | None = None,
        app_id: str | None = Query(default=None, alias="app"),
        after_seq: int | None = None,
        limit: int | None = None,
    ):
        records = runtime.store.query_audit(
            kind=kind, app=app_id, after_seq=after_seq, limit=limit
        )
        return [r.to_json() for r in records]

    @app.get("/api/mode")
    def get_mode(app_id: str = Query(alias="app")):
        runtime.engine.forest(app_id)  # 404 on unknown app
        return {"app": app_id, "mode": runtime.store.mode(app_id)}

    @app.put("/api/mode")
    def put_mode(body: ModeBody):
        runtime.engine.forest(body.app)
        if body.mode not in HANDLING_MODES:
            raise HTTPException(status_code=400, detail=f"unknown mode {body.mode!r}")
        runtime.store.set_mode(body.app, body.mode)
        return {"app": body.app, "mode": runtime.store.mode(body.app)}

    if runtime.config.static_dir and runtime.config.static_dir.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount(
            "/", StaticFiles(directory=runtime.config.static_dir, html=True), name="ui"
        )

    return app
