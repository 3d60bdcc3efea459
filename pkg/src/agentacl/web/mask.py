"""Web mapping configurations and mask plan computation.

A configuration associates extended selectors with actions and with spec
templates, separately. An element's requirements are the cross product of
the actions and the evaluated templates whose selectors match it, plus any
``data-ac4a-*`` annotations on the element itself. Elements matching
nothing stay visible; any evaluation failure blocks the element.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from urllib.parse import urlsplit

from ..checker import ActiveSnapshot, check_access
from ..difference import DifferenceEngine
from ..errors import WebConfigFormatError
from ..model import ResourceValueSpec, parse_rvs
from .dom import DomElement, DomSnapshot
from .rvss import ResourceValueStringSpec, evaluate_rvss, parse_rvss
from .selectors import ExtendedSelector, parse_selector

# Reference overlay style for consumers that render the plan.
MASK_OVERLAY_CSS = """\
[data-access-blocked] {
  position: relative;
}
[data-access-blocked]::after {
  content: "\\1F6AB";
  position: absolute;
  inset: 0;
  display: flex;
  align-items: center;
  justify-content: center;
  background: #1a1a1a;
  color: #fff;
  font-size: 1.5em;
  z-index: 9999;
}
"""

RESOURCE_ATTR = "data-ac4a-resource"
ACTION_ATTR = "data-ac4a-action"
STATIC_ATTR = "data-ac4a-static"


@dataclass(frozen=True)
class WebMappingConfig:
    """Per-URL mapping of selectors to actions and to spec templates."""

    url_pattern: str
    verified: bool
    action_map: tuple[tuple[str, tuple[ExtendedSelector, ...]], ...]
    data_map: tuple[tuple[ResourceValueStringSpec, tuple[ExtendedSelector, ...]], ...]

    def actions(self) -> tuple[str, ...]:
        return tuple(action for action, _ in self.action_map)


def normalize_url(url: str) -> str:
    """scheme + host + path; query and fragment dropped."""
    parts = urlsplit(url)
    if not parts.scheme and not parts.netloc:
        return parts.path
    return f"{parts.scheme}://{parts.netloc}{parts.path}"


def _parse_one_config(obj: dict, url: str) -> WebMappingConfig:
    where = url or "<config>"
    verified = obj.get("verified", False)
    if not isinstance(verified, bool):
        raise WebConfigFormatError(f"{where}: 'verified' must be a boolean")
    action_map: list[tuple[str, tuple[ExtendedSelector, ...]]] = []
    data_map: list[tuple[ResourceValueStringSpec, tuple[ExtendedSelector, ...]]] = []

    def parse_selector_list(key: str, value) -> tuple[ExtendedSelector, ...]:
        if not isinstance(value, list) or not all(isinstance(s, str) for s in value):
            raise WebConfigFormatError(
                f"{where}: {key!r} must map to a list of selector strings"
            )
        return tuple(parse_selector(s) for s in value)

    for key, value in obj.items():
        if key == "verified":
            continue
        if key == "data":
            if not isinstance(value, dict):
                raise WebConfigFormatError(f"{where}: 'data' must be an object")
            for template_text, selectors in value.items():
                template = parse_rvss(template_text)
                data_map.append((template, parse_selector_list(template_text, selectors)))
        elif "(" in key:
            # a spec template used directly as a key (compact form)
            template = parse_rvss(key)
            data_map.append((template, parse_selector_list(key, value)))
        else:
            action_map.append((key, parse_selector_list(key, value)))

    action_selector_sources = {
        sel.source for _, sels in action_map for sel in sels
    }
    for template, sels in data_map:
        for sel in sels:
            if sel.source not in action_selector_sources:
                raise WebConfigFormatError(
                    f"{where}: data selector {sel.source!r} has no action mapping"
                )
    return WebMappingConfig(
        url_pattern=url,
        verified=verified,
        action_map=tuple(action_map),
        data_map=tuple(data_map),
    )


def parse_web_config(document: bytes | str) -> dict[str, WebMappingConfig]:
    """Parse a web mapping document, eagerly syntax-checking every selector
    and template.

    Two shapes are accepted: a top-level map from URL to configuration
    object, or a single bare configuration object (returned under the key
    ``""``; the caller binds it to a URL).
    """
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise WebConfigFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or not data:
        raise WebConfigFormatError("top level must be a non-empty object")
    if all(isinstance(v, dict) for v in data.values()) and "data" not in data:
        return {
            normalize_url(url): _parse_one_config(obj, normalize_url(url))
            for url, obj in data.items()
        }
    return {"": _parse_one_config(data, "")}


@dataclass(frozen=True)
class MaskReason:
    action: str
    rvs_text: str
    error: str | None = None

    def to_json(self) -> dict:
        out = {"action": self.action, "rvs": self.rvs_text}
        if self.error is not None:
            out["error"] = self.error
        return out


@dataclass(frozen=True)
class BlockedElement:
    path: str
    reasons: tuple[MaskReason, ...]

    def to_json(self) -> dict:
        return {"path": self.path, "reasons": [r.to_json() for r in self.reasons]}


@dataclass(frozen=True)
class MaskPlan:
    blocked: tuple[BlockedElement, ...]
    evaluated_at: int

    def to_json(self) -> dict:
        return {"blocked": [b.to_json() for b in self.blocked]}

    def json_str(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def blocked_paths(self) -> list[str]:
        return [b.path for b in self.blocked]


def _annotation_requirements(
    el: DomElement, dom: DomSnapshot
) -> tuple[list[tuple[ResourceValueSpec, str]], list[MaskReason]]:
    """Needs contributed by data-ac4a-* attributes on one element."""
    resource_text = el.attrs.get(RESOURCE_ATTR)
    action_text = el.attrs.get(ACTION_ATTR)
    if resource_text is None and action_text is None:
        return [], []
    if resource_text is None or action_text is None:
        return [], [
            MaskReason(
                action=action_text or "?",
                rvs_text=resource_text or "?",
                error="incomplete data-ac4a annotation (needs both resource and action)",
            )
        ]
    actions = [a.strip() for a in action_text.split(",") if a.strip()]
    if not actions:
        return [], [
            MaskReason(action="?", rvs_text=resource_text, error="empty data-ac4a-action")
        ]
    static = el.attrs.get(STATIC_ATTR, "true").lower() != "false"
    try:
        if static:
            spec = parse_rvs(resource_text)
        else:
            spec = evaluate_rvss(parse_rvss(resource_text), dom)
    except Exception as exc:
        return [], [
            MaskReason(action=a, rvs_text=resource_text, error=str(exc)) for a in actions
        ]
    return [(spec, a) for a in actions], []


def compute_mask(
    engine: DifferenceEngine,
    app_id: str,
    config: WebMappingConfig,
    dom: DomSnapshot,
    snapshot: ActiveSnapshot,
) -> MaskPlan:
    """Which elements the agent must not see, given the active permissions.

    Pure function of its inputs: repeated calls on the same snapshot yield
    identical plans.
    """
    el_actions: dict[str, list[str]] = {}
    for action, selectors in config.action_map:
        for selector in selectors:
            for el in selector.match(dom):
                actions = el_actions.setdefault(el.path_str, [])
                if action not in actions:
                    actions.append(action)

    el_templates: dict[str, list[ResourceValueStringSpec]] = {}
    for template, selectors in config.data_map:
        for selector in selectors:
            for el in selector.match(dom):
                templates = el_templates.setdefault(el.path_str, [])
                if template not in templates:
                    templates.append(template)

    # evaluate each template once per snapshot; extractions are element
    # independent (they select from the whole document)
    template_values: dict[ResourceValueStringSpec, ResourceValueSpec | Exception] = {}

    def template_value(template: ResourceValueStringSpec):
        if template not in template_values:
            try:
                template_values[template] = evaluate_rvss(template, dom)
            except Exception as exc:
                template_values[template] = exc
        return template_values[template]

    blocked: list[BlockedElement] = []
    for el in dom.elements:
        path = el.path_str
        needs: list[tuple[ResourceValueSpec, str]] = []
        failures: list[MaskReason] = []
        actions = el_actions.get(path, [])
        templates = el_templates.get(path, [])
        for action in actions:
            for template in templates:
                value = template_value(template)
                if isinstance(value, Exception):
                    failures.append(
                        MaskReason(
                            action=action, rvs_text=template.source, error=str(value)
                        )
                    )
                else:
                    needs.append((value, action))
        annotation_needs, annotation_failures = _annotation_requirements(el, dom)
        needs.extend(annotation_needs)
        failures.extend(annotation_failures)

        reasons: list[MaskReason] = list(failures)
        if needs:
            result = check_access(engine, app_id, needs, snapshot)
            for outcome in result.per_need:
                if outcome.satisfied:
                    continue
                for rendered in outcome.remaining_rendered():
                    reason = MaskReason(action=outcome.action, rvs_text=rendered)
                    if outcome.diagnostic is not None:
                        reason = MaskReason(
                            action=outcome.action,
                            rvs_text=rendered,
                            error=outcome.diagnostic,
                        )
                    if reason not in reasons:
                        reasons.append(reason)
        if reasons:
            blocked.append(BlockedElement(path=path, reasons=tuple(reasons)))
    return MaskPlan(blocked=tuple(blocked), evaluated_at=snapshot.snapshot_id)


def reevaluate_triggers(
    previous: MaskPlan | None, dom_changed: bool, permissions_changed: bool
) -> bool:
    """A plan must be recomputed whenever the DOM or the grants changed."""
    return bool(dom_changed or permissions_changed)
