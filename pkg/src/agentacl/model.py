"""Resource type trees, resource value specifications, and permissions.

The textual grammar for a resource value specification is::

    spec    := segment ("::" segment)*
    segment := (Tree ":")? Node "(" value ")"
    value   := "?" | one or more characters other than ")"

``?`` is the wildcard (all possible values of that node); every other value
is an opaque literal taken verbatim. Node and tree names may not contain any
of ``: ( ) ? ,``. A tree prefix may appear on any segment but all prefixes
in one spec must agree; rendering puts it on the first segment only.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Mapping, Union

from .errors import (
    AmbiguousRootError,
    DuplicateSiblingError,
    EmptyActionSetError,
    ForestFormatError,
    NotAChildError,
    RvsSyntaxError,
    UnknownNodeError,
    UnknownTreeError,
)

RESERVED_NAME_CHARS = frozenset(":()?,")

VALUE_KINDS = ("enum", "interval")

PERMISSION_ORIGINS = ("manual", "inferred", "auto_deployed")


class _Wildcard:
    """Singleton sentinel for the ``?`` value."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "WILDCARD"

    def __reduce__(self):
        return (_Wildcard, ())


WILDCARD = _Wildcard()

Value = Union[str, _Wildcard]


@dataclass(frozen=True)
class Segment:
    """One (node name, value) step of a resource value specification."""

    node_name: str
    value: Value

    @property
    def is_wildcard(self) -> bool:
        return self.value is WILDCARD


@dataclass(frozen=True)
class ResourceValueSpec:
    """A root-anchored path of segments denoting a set of resource values."""

    segments: tuple[Segment, ...]
    tree_name: str | None = None

    def __post_init__(self):
        if not self.segments:
            raise ValueError("a resource value specification needs at least one segment")

    def __str__(self) -> str:
        return render_rvs(self)

    def with_tree(self, tree_name: str) -> "ResourceValueSpec":
        return replace(self, tree_name=tree_name)

    def node_path(self) -> tuple[str, ...]:
        return tuple(s.node_name for s in self.segments)


def rvs(*pairs: tuple[str, Value], tree: str | None = None) -> ResourceValueSpec:
    """Convenience constructor: ``rvs(("Year", "2026"), ("Month", WILDCARD))``."""
    return ResourceValueSpec(tuple(Segment(n, v) for n, v in pairs), tree_name=tree)


def _check_name(name: str, what: str, offset: int) -> str:
    name = name.strip()
    if not name:
        raise RvsSyntaxError(f"empty {what} name", offset)
    for ch in name:
        if ch in RESERVED_NAME_CHARS:
            raise RvsSyntaxError(f"reserved character {ch!r} in {what} name", offset)
    return name


def parse_rvs(text: str) -> ResourceValueSpec:
    """Parse the textual form of a resource value specification.

    Accepts both the prefixed (``Game:GameId(?)``) and unprefixed
    (``Year(2026)::Month(June)``) forms; a prefix may repeat on later
    segments as long as it names the same tree.
    """
    if not text or not text.strip():
        raise RvsSyntaxError("empty specification", 0)
    segments: list[Segment] = []
    tree_name: str | None = None
    i = 0
    n = len(text)
    while True:
        while i < n and text[i].isspace():
            i += 1
        head_start = i
        open_paren = text.find("(", i)
        if open_paren == -1:
            raise RvsSyntaxError("expected '(' after node name", n)
        head = text[head_start:open_paren]
        if ":" in head:
            prefix, _, node = head.partition(":")
            prefix = _check_name(prefix, "tree", head_start)
            if tree_name is not None and prefix != tree_name:
                raise RvsSyntaxError(
                    f"conflicting tree prefixes {tree_name!r} and {prefix!r}", head_start
                )
            tree_name = prefix
        else:
            node = head
        node = _check_name(node, "node", head_start)
        close_paren = text.find(")", open_paren + 1)
        if close_paren == -1:
            raise RvsSyntaxError("missing ')'", n)
        raw_value = text[open_paren + 1 : close_paren]
        if raw_value == "":
            raise RvsSyntaxError("empty value (use '?' for the wildcard)", open_paren + 1)
        value: Value = WILDCARD if raw_value == "?" else raw_value
        segments.append(Segment(node, value))
        i = close_paren + 1
        while i < n and text[i].isspace():
            i += 1
        if i == n:
            break
        if not text.startswith("::", i):
            raise RvsSyntaxError("expected '::' between segments", i)
        i += 2
        if i >= n or text[i:].isspace():
            raise RvsSyntaxError("dangling '::'", i)
    return ResourceValueSpec(tuple(segments), tree_name=tree_name)


def render_rvs(spec: ResourceValueSpec) -> str:
    """Canonical textual form; ``parse_rvs(render_rvs(x))`` equals ``x``."""
    parts = []
    for idx, seg in enumerate(spec.segments):
        value = "?" if seg.is_wildcard else seg.value
        prefix = f"{spec.tree_name}:" if idx == 0 and spec.tree_name else ""
        parts.append(f"{prefix}{seg.node_name}({value})")
    return "::".join(parts)


@dataclass(frozen=True)
class ResourceTypeNode:
    """A node of a resource type tree.

    ``recursive_self`` marks a node that may repeat along a path (a child
    edge back to a node of the same name), which keeps infinite trees
    representable with finite structure. ``kind`` drives the built-in
    difference helpers: ``enum`` values compare as exact strings,
    ``interval`` values parse as ``lo-hi`` integer ranges.
    """

    name: str
    children: tuple["ResourceTypeNode", ...] = ()
    recursive_self: bool = False
    kind: str = "enum"

    def child_names(self) -> tuple[str, ...]:
        names = tuple(c.name for c in self.children)
        if self.recursive_self:
            names = names + (self.name,)
        return names

    def step(self, name: str) -> "ResourceTypeNode | None":
        """The node reached by following a child edge named ``name``."""
        if self.recursive_self and name == self.name:
            return self
        for child in self.children:
            if child.name == name:
                return child
        return None


@dataclass(frozen=True)
class ResourceTypeTree:
    tree_name: str
    root: ResourceTypeNode

    def all_node_names(self) -> frozenset[str]:
        names: set[str] = set()
        stack = [self.root]
        while stack:
            node = stack.pop()
            names.add(node.name)
            stack.extend(node.children)
        return frozenset(names)


@dataclass(frozen=True)
class ResourceForest:
    """All resource type trees and actions declared by one application."""

    trees: Mapping[str, ResourceTypeTree]
    actions: tuple[str, ...]

    def tree(self, name: str) -> ResourceTypeTree:
        try:
            return self.trees[name]
        except KeyError:
            raise UnknownTreeError(f"unknown tree {name!r}") from None


def validate_rvs(spec: ResourceValueSpec, forest: ResourceForest) -> ResourceValueSpec:
    """Check that ``spec`` is a root-anchored path in one of the forest's trees.

    Returns a copy with ``tree_name`` resolved. Literal values are never
    inspected: any string is legal at any node, only the node path matters.
    """
    if spec.tree_name is not None:
        if spec.tree_name not in forest.trees:
            raise UnknownTreeError(f"unknown tree {spec.tree_name!r}", 0)
        tree = forest.trees[spec.tree_name]
    else:
        root_name = spec.segments[0].node_name
        matches = [t for t in forest.trees.values() if t.root.name == root_name]
        if not matches:
            raise UnknownTreeError(f"no tree has root node {root_name!r}", 0)
        if len(matches) > 1:
            names = sorted(t.tree_name for t in matches)
            raise AmbiguousRootError(
                f"root node {root_name!r} matches multiple trees: {', '.join(names)}", 0
            )
        tree = matches[0]

    first = spec.segments[0].node_name
    if first != tree.root.name:
        if first in tree.all_node_names():
            raise NotAChildError(
                f"{first!r} is not the root of tree {tree.tree_name!r}", 0
            )
        raise UnknownNodeError(
            f"{first!r} is not a node of tree {tree.tree_name!r}", 0
        )
    node = tree.root
    for i, seg in enumerate(spec.segments[1:], start=1):
        nxt = node.step(seg.node_name)
        if nxt is None:
            if seg.node_name in tree.all_node_names():
                raise NotAChildError(
                    f"{seg.node_name!r} is not a child of {node.name!r}", i
                )
            raise UnknownNodeError(
                f"{seg.node_name!r} is not a node of tree {tree.tree_name!r}", i
            )
        node = nxt
    return spec.with_tree(tree.tree_name)


def node_kinds_along(spec: ResourceValueSpec, forest: ResourceForest) -> tuple[str, ...]:
    """Value kind (enum/interval) at each segment of a validated spec."""
    tree = forest.tree(spec.tree_name)
    kinds = [tree.root.kind]
    node = tree.root
    for seg in spec.segments[1:]:
        node = node.step(seg.node_name)
        if node is None:  # pragma: no cover - callers validate first
            raise UnknownNodeError(f"{seg.node_name!r} not reachable")
        kinds.append(node.kind)
    return tuple(kinds)


# -- tree-definition documents ------------------------------------------------

def _parse_node(obj, where: str) -> ResourceTypeNode:
    if not isinstance(obj, dict):
        raise ForestFormatError(f"{where}: node must be an object")
    name = obj.get("name")
    if not isinstance(name, str) or not name.strip():
        raise ForestFormatError(f"{where}: node needs a non-empty 'name'")
    name = name.strip()
    bad = RESERVED_NAME_CHARS.intersection(name)
    if bad:
        raise ForestFormatError(
            f"{where}: node name {name!r} contains reserved character {sorted(bad)[0]!r}"
        )
    recursive = obj.get("recursive", False)
    if not isinstance(recursive, bool):
        raise ForestFormatError(f"{where}: 'recursive' must be a boolean")
    kind = obj.get("kind", "enum")
    if kind not in VALUE_KINDS:
        raise ForestFormatError(f"{where}: unknown value kind {kind!r}")
    raw_children = obj.get("children", [])
    if not isinstance(raw_children, list):
        raise ForestFormatError(f"{where}: 'children' must be a list")
    children = tuple(
        _parse_node(c, f"{where}/{name}") for c in raw_children
    )
    seen: set[str] = set()
    for child in children:
        if child.name in seen:
            raise DuplicateSiblingError(
                f"{where}/{name}: duplicate sibling node {child.name!r}"
            )
        seen.add(child.name)
    unknown = set(obj) - {"name", "recursive", "kind", "children"}
    if unknown:
        raise ForestFormatError(f"{where}: unknown node keys {sorted(unknown)}")
    return ResourceTypeNode(name=name, children=children, recursive_self=recursive, kind=kind)


def load_forest(document: bytes | str) -> ResourceForest:
    """Load and fully validate a tree-definition document.

    Format: ``{"trees": {"<name>": <node>}, "actions": ["read", ...]}`` where
    ``<node>`` is ``{"name": str, "recursive": bool?, "kind": "enum"|"interval"?,
    "children": [<node>...]}``.
    """
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ForestFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ForestFormatError("top level must be an object")
    raw_trees = data.get("trees")
    if not isinstance(raw_trees, dict) or not raw_trees:
        raise ForestFormatError("'trees' must be a non-empty object")
    trees: dict[str, ResourceTypeTree] = {}
    for tree_name, node_obj in raw_trees.items():
        if not tree_name.strip():
            raise ForestFormatError("tree names must be non-empty")
        bad = RESERVED_NAME_CHARS.intersection(tree_name)
        if bad:
            raise ForestFormatError(
                f"tree name {tree_name!r} contains reserved character {sorted(bad)[0]!r}"
            )
        trees[tree_name] = ResourceTypeTree(tree_name, _parse_node(node_obj, tree_name))
    raw_actions = data.get("actions")
    if raw_actions is None or raw_actions == []:
        raise EmptyActionSetError("'actions' must be a non-empty list")
    if not isinstance(raw_actions, list) or not all(
        isinstance(a, str) and a.strip() for a in raw_actions
    ):
        raise ForestFormatError("'actions' must be a list of non-empty strings")
    if len(set(raw_actions)) != len(raw_actions):
        raise ForestFormatError("duplicate action names")
    unknown = set(data) - {"trees", "actions"}
    if unknown:
        raise ForestFormatError(f"unknown top-level keys {sorted(unknown)}")
    return ResourceForest(trees=trees, actions=tuple(raw_actions))


def _node_to_json(node: ResourceTypeNode) -> dict:
    out: dict = {"name": node.name}
    if node.recursive_self:
        out["recursive"] = True
    if node.kind != "enum":
        out["kind"] = node.kind
    if node.children:
        out["children"] = [_node_to_json(c) for c in node.children]
    return out


def forest_to_json(forest: ResourceForest) -> dict:
    """Serialize back to the tree-definition document shape."""
    return {
        "trees": {name: _node_to_json(t.root) for name, t in forest.trees.items()},
        "actions": list(forest.actions),
    }


# -- permissions ---------------------------------------------------------------

_CROCKFORD = "0123456789ABCDEFGHJKMNPQRSTVWXYZ"


def new_permission_id() -> str:
    """ULID-style sortable opaque id: 48-bit ms timestamp + 80 random bits."""
    value = (int(time.time() * 1000) & (2**48 - 1)) << 80
    value |= int.from_bytes(os.urandom(10), "big")
    chars = []
    for _ in range(26):
        chars.append(_CROCKFORD[value & 0x1F])
        value >>= 5
    return "".join(reversed(chars))


@dataclass(frozen=True)
class Permission:
    """A grant of one action over the resource set denoted by one spec."""

    id: str
    rvs: ResourceValueSpec
    action: str
    created_at: datetime = field(
        default_factory=lambda: datetime.now(timezone.utc)
    )
    origin: str = "manual"

    def __post_init__(self):
        if self.origin not in PERMISSION_ORIGINS:
            raise ValueError(f"unknown permission origin {self.origin!r}")

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "rvs": render_rvs(self.rvs),
            "action": self.action,
            "created_at": self.created_at.isoformat(),
            "origin": self.origin,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Permission":
        return cls(
            id=data["id"],
            rvs=parse_rvs(data["rvs"]),
            action=data["action"],
            created_at=datetime.fromisoformat(data["created_at"]),
            origin=data["origin"],
        )


@dataclass(frozen=True)
class AccessNeed:
    """The sufficient permissions for one access: a set of (spec, action) pairs."""

    pairs: tuple[tuple[ResourceValueSpec, str], ...]

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("an access need must contain at least one pair")

    @classmethod
    def of(cls, *pairs: tuple[ResourceValueSpec, str]) -> "AccessNeed":
        deduped: list[tuple[ResourceValueSpec, str]] = []
        for pair in pairs:
            if pair not in deduped:
                deduped.append(pair)
        return cls(tuple(deduped))


def describe_rvs(spec: ResourceValueSpec) -> str:
    """Template-based natural-language phrasing of a spec."""
    clauses = []
    for seg in spec.segments:
        if seg.is_wildcard:
            clauses.append(f"{seg.node_name} is any value")
        else:
            clauses.append(f"{seg.node_name} is {seg.value}")
    where = " and ".join(clauses)
    tree = spec.tree_name or spec.segments[0].node_name
    return f"{tree} resources where {where}"


def describe_permission(permission: Permission) -> str:
    return f"Allow {permission.action} access to {describe_rvs(permission.rvs)}."
