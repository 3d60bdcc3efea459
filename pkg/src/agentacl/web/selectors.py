"""Extended CSS selectors: tag/id/class/attribute compounds, child and
descendant combinators, plus a ``:contains('text')`` predicate that matches
case-sensitively against an element's concatenated descendant text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import SelectorSyntaxError
from .dom import DomElement, DomSnapshot

_TAG_RE = re.compile(r"[A-Za-z][\w-]*")
_IDENT_RE = re.compile(r"[\w-]+")
_TRAILING_CONTAINS_RE = re.compile(r":contains\(\s*(['\"]).*?\1\s*\)\s*$")


@dataclass(frozen=True)
class AttrPredicate:
    name: str
    op: str  # 'exists' | '=' | '*='
    value: str | None = None


@dataclass(frozen=True)
class Compound:
    tag: str | None = None
    ids: tuple[str, ...] = ()
    classes: tuple[str, ...] = ()
    attrs: tuple[AttrPredicate, ...] = ()
    contains: str | None = None


@dataclass(frozen=True)
class ExtendedSelector:
    source: str
    parts: tuple[tuple[str, Compound], ...]  # (combinator, compound); first combinator is ""

    @property
    def contains(self) -> str | None:
        return self.parts[-1][1].contains

    @property
    def base(self) -> str:
        """The selector text without its trailing :contains predicate."""
        m = _TRAILING_CONTAINS_RE.search(self.source)
        if self.contains is not None and m:
            return self.source[: m.start()].strip()
        return self.source.strip()

    def match(self, dom: DomSnapshot) -> list[DomElement]:
        """All matching elements in document order."""
        return [el for el in dom.elements if self.matches_element(el)]

    def matches_element(self, el: DomElement) -> bool:
        return self._match_upto(el, len(self.parts) - 1)

    def _match_upto(self, el: DomElement, idx: int) -> bool:
        if not _compound_matches(el, self.parts[idx][1]):
            return False
        if idx == 0:
            return True
        combinator = self.parts[idx][0]
        if combinator == ">":
            return el.parent is not None and self._match_upto(el.parent, idx - 1)
        ancestor = el.parent
        while ancestor is not None:
            if self._match_upto(ancestor, idx - 1):
                return True
            ancestor = ancestor.parent
        return False


def _compound_matches(el: DomElement, c: Compound) -> bool:
    if c.tag is not None and el.tag != c.tag:
        return False
    for wanted in c.ids:
        if el.attrs.get("id") != wanted:
            return False
    classes = el.classes
    for cls in c.classes:
        if cls not in classes:
            return False
    for pred in c.attrs:
        value = el.attrs.get(pred.name)
        if value is None:
            return False
        if pred.op == "=" and value != pred.value:
            return False
        if pred.op == "*=" and pred.value not in value:
            return False
    if c.contains is not None and c.contains not in el.text():
        return False
    return True


def _skip_ws(text: str, i: int) -> int:
    while i < len(text) and text[i].isspace():
        i += 1
    return i


def _quoted(text: str, i: int) -> tuple[str, int]:
    quote = text[i]
    if quote not in "'\"":
        raise SelectorSyntaxError("expected quoted string", i)
    end = text.find(quote, i + 1)
    if end == -1:
        raise SelectorSyntaxError("unterminated string", i)
    return text[i + 1 : end], end + 1


def _parse_attr(text: str, i: int) -> tuple[AttrPredicate, int]:
    i = _skip_ws(text, i)
    m = _IDENT_RE.match(text, i)
    if not m:
        raise SelectorSyntaxError("expected attribute name", i)
    name = m.group(0).lower()
    i = _skip_ws(text, m.end())
    if i < len(text) and text[i] == "]":
        return AttrPredicate(name, "exists"), i + 1
    if text.startswith("*=", i):
        op, i = "*=", i + 2
    elif i < len(text) and text[i] == "=":
        op, i = "=", i + 1
    else:
        raise SelectorSyntaxError("expected ']', '=' or '*=' in attribute", i)
    i = _skip_ws(text, i)
    if i < len(text) and text[i] in "'\"":
        value, i = _quoted(text, i)
    else:
        m = _IDENT_RE.match(text, i)
        if not m:
            raise SelectorSyntaxError("expected attribute value", i)
        value, i = m.group(0), m.end()
    i = _skip_ws(text, i)
    if i >= len(text) or text[i] != "]":
        raise SelectorSyntaxError("missing ']' after attribute", i)
    return AttrPredicate(name, op, value), i + 1


def _parse_compound(text: str, i: int) -> tuple[Compound, int]:
    tag = None
    ids: list[str] = []
    classes: list[str] = []
    attrs: list[AttrPredicate] = []
    contains = None
    start = i
    m = _TAG_RE.match(text, i)
    if m:
        tag = m.group(0).lower()
        i = m.end()
    while i < len(text):
        ch = text[i]
        if ch == "#":
            m = _IDENT_RE.match(text, i + 1)
            if not m:
                raise SelectorSyntaxError("expected id after '#'", i)
            ids.append(m.group(0))
            i = m.end()
        elif ch == ".":
            m = _IDENT_RE.match(text, i + 1)
            if not m:
                raise SelectorSyntaxError("expected class name after '.'", i)
            classes.append(m.group(0))
            i = m.end()
        elif ch == "[":
            pred, i = _parse_attr(text, i + 1)
            attrs.append(pred)
        elif ch == ":":
            m = _IDENT_RE.match(text, i + 1)
            name = m.group(0) if m else ""
            if name != "contains":
                raise SelectorSyntaxError(f"unknown pseudo-class ':{name}'", i)
            i = m.end()
            if i >= len(text) or text[i] != "(":
                raise SelectorSyntaxError("expected '(' after :contains", i)
            i = _skip_ws(text, i + 1)
            contains, i = _quoted(text, i)
            i = _skip_ws(text, i)
            if i >= len(text) or text[i] != ")":
                raise SelectorSyntaxError("missing ')' after :contains", i)
            i += 1
        else:
            break
    if i == start:
        raise SelectorSyntaxError("expected a selector", i)
    return Compound(tag, tuple(ids), tuple(classes), tuple(attrs), contains), i


def match_selector(selector: ExtendedSelector, dom: DomSnapshot) -> list[str]:
    """Id-paths of all matching elements in document order."""
    return [el.path_str for el in selector.match(dom)]


def parse_selector(text: str) -> ExtendedSelector:
    """Parse an extended selector, rejecting anything outside the supported
    grammar (so typos like ``:contians`` fail eagerly)."""
    if not text or not text.strip():
        raise SelectorSyntaxError("empty selector", 0)
    i = _skip_ws(text, 0)
    compound, i = _parse_compound(text, i)
    parts: list[tuple[str, Compound]] = [("", compound)]
    while True:
        ws_start = i
        i = _skip_ws(text, i)
        if i >= len(text):
            break
        if text[i] == ">":
            combinator = ">"
            i = _skip_ws(text, i + 1)
        elif i > ws_start:
            combinator = " "
        else:
            raise SelectorSyntaxError(f"unexpected character {text[i]!r}", i)
        compound, i = _parse_compound(text, i)
        parts.append((combinator, compound))
    for _, c in parts[:-1]:
        if c.contains is not None:
            raise SelectorSyntaxError(
                ":contains is only supported on the final compound", 0
            )
    return ExtendedSelector(source=text, parts=tuple(parts))
