"""Command line interface: serve the HTTP API, validate configuration
files, run one-off access checks, and replay audit logs."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .errors import AccessControlError
from .model import load_forest
from .service import Runtime, create_app, load_service_config
from .store import replay_audit
from .web import parse_web_config


@click.group()
def main():
    """Resource-centric access control for autonomous agents."""


@main.command()
@click.option(
    "--config",
    "config_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Service configuration file.",
)
@click.option("--listen", default=None, help="Override host:port from the config.")
def serve(config_path: Path, listen: str | None):
    """Run the HTTP service (dashboard + agent hosts talk to this)."""
    import uvicorn

    try:
        config = load_service_config(config_path)
        if listen:
            config.listen = listen
        runtime = Runtime(config)
    except (AccessControlError, OSError) as exc:
        raise click.ClickException(str(exc))
    app = create_app(runtime)
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    finally:
        runtime.close()


def _sniff_and_validate(path: Path) -> list[str]:
    """Validate one file as a tree definition or a web mapping config.
    Returns a list of problems (empty when the file is fine)."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        return [f"{path}: unreadable: {exc}"]
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        return [f"{path}:{exc.lineno}: not valid JSON: {exc.msg}"]
    try:
        if isinstance(data, dict) and "trees" in data:
            load_forest(text)
        else:
            parse_web_config(text)
    except AccessControlError as exc:
        return [f"{path}: {exc}"]
    return []


@main.command()
@click.argument(
    "paths", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path)
)
def validate(paths: tuple[Path, ...]):
    """Validate tree-definition and web mapping files; nonzero exit on error."""
    problems: list[str] = []
    for path in paths:
        found = _sniff_and_validate(path)
        if found:
            problems.extend(found)
            for line in found:
                click.echo(f"FAIL {line}", err=True)
        else:
            click.echo(f"OK   {path}")
    if problems:
        sys.exit(1)


@main.command()
@click.option(
    "--config",
    "config_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
)
@click.option("--app", "app_id", required=True, help="Application id.")
@click.option("--endpoint", required=True, help="Endpoint name to check.")
@click.option("--args", "args_json", default="{}", help="Call arguments as JSON.")
def check(config_path: Path, app_id: str, endpoint: str, args_json: str):
    """Run one gate decision and print it as JSON."""
    try:
        args = json.loads(args_json)
    except json.JSONDecodeError as exc:
        raise click.ClickException(f"--args is not valid JSON: {exc}")
    try:
        runtime = Runtime(load_service_config(config_path))
    except (AccessControlError, OSError) as exc:
        raise click.ClickException(str(exc))
    try:
        decision = runtime.gate.intercept(app_id, endpoint, args)
    except AccessControlError as exc:
        raise click.ClickException(str(exc))
    finally:
        runtime.close()
    click.echo(json.dumps(decision.to_json(), indent=2, sort_keys=True))
    sys.exit(0 if decision.allowed else 2)


@main.command()
@click.option(
    "--config",
    "config_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Service configuration (supplies forests and difference functions).",
)
@click.argument("audit_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
def replay(config_path: Path, audit_file: Path):
    """Rebuild the store from an audit file and re-run every recorded access,
    reporting decision divergences."""
    try:
        config = load_service_config(config_path)
    except AccessControlError as exc:
        raise click.ClickException(str(exc))
    # build just the engine pieces; never touch the live audit file
    from .difference import DifferenceEngine, DifferenceFunction
    from .service import _import_spec

    engine = DifferenceEngine()
    for app in config.applications:
        engine.add_forest(app.id, load_forest(app.forest_path.read_bytes()))
        for spec in app.difference_functions:
            fn = _import_spec(spec)
            if isinstance(fn, DifferenceFunction):
                engine.register_difference(app.id, fn)
    try:
        report = replay_audit(engine, audit_file)
    except (AccessControlError, ValueError, OSError) as exc:
        raise click.ClickException(str(exc))
    for divergence in report.divergences:
        click.echo(f"DIVERGENCE seq={divergence.seq}: {divergence.reason}", err=True)
    click.echo(
        f"replayed {report.records} records ({report.accesses} accesses): "
        f"{len(report.divergences)} divergences"
    )
    sys.exit(0 if report.ok else 1)


if __name__ == "__main__":
    main()
