"""Resource value string specifications: extracting values from a page.

A template looks like a resource value specification, but any value may be
an extraction program::

    $data{css selector}{list transformation}[index](value transformation)@attr

The selected element's attribute (or ``text``) is turned into a list by the
list transformation (default: a singleton of the raw string), indexed, and
optionally refined by a value transformation. Transform names come from a
fixed registry; unknown names are parse errors.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Union

from ..errors import ExtractionError, TemplateSyntaxError
from ..model import WILDCARD, ResourceValueSpec, Segment, _Wildcard
from .dom import DomSnapshot
from .selectors import ExtendedSelector, parse_selector

MONTH_NAMES = (
    "January",
    "February",
    "March",
    "April",
    "May",
    "June",
    "July",
    "August",
    "September",
    "October",
    "November",
    "December",
)


def number_to_month(raw: str) -> str:
    """Zero-padded or bare 1-12 to the English month name."""
    try:
        number = int(raw.strip())
    except ValueError:
        raise ExtractionError(f"not a month number: {raw!r}") from None
    if not 1 <= number <= 12:
        raise ExtractionError(f"month number out of range: {raw!r}")
    return MONTH_NAMES[number - 1]


LIST_TRANSFORMS: dict[str, Callable[[str], list[str]]] = {
    "split_slash": lambda s: s.split("/"),
    "split_space": lambda s: s.split(" "),
    "split_dash": lambda s: s.split("-"),
}

VALUE_TRANSFORMS: dict[str, Callable[[str], str]] = {
    "number_to_month": number_to_month,
    "trim": str.strip,
    "lowercase": str.lower,
}

_IDENT_RE = re.compile(r"[\w-]+")


@dataclass(frozen=True)
class Extraction:
    """One runtime extraction: selector, transforms, index, attribute."""

    selector: ExtendedSelector
    index: int
    list_transform: str | None = None
    value_transform: str | None = None
    attr: str = "text"


TemplateValue = Union[str, _Wildcard, Extraction]


@dataclass(frozen=True)
class TemplateSegment:
    node_name: str
    value: TemplateValue


@dataclass(frozen=True)
class ResourceValueStringSpec:
    """A spec template whose values may be computed from page content."""

    segments: tuple[TemplateSegment, ...]
    tree_name: str | None = None
    source: str = field(default="", compare=False)

    @property
    def is_static(self) -> bool:
        return not any(isinstance(s.value, Extraction) for s in self.segments)


def _scan_balanced(text: str, start: int, open_ch: str, close_ch: str) -> tuple[str, int]:
    """Scan from just after ``open_ch`` to its matching ``close_ch``,
    ignoring delimiters inside quoted strings."""
    depth = 1
    i = start
    quote: str | None = None
    while i < len(text):
        ch = text[i]
        if quote is not None:
            if ch == quote:
                quote = None
        elif ch in "'\"":
            quote = ch
        elif ch == open_ch:
            depth += 1
        elif ch == close_ch:
            depth -= 1
            if depth == 0:
                return text[start:i], i + 1
        i += 1
    raise TemplateSyntaxError(f"missing {close_ch!r}", len(text))


def _parse_extraction(value: str, base_offset: int) -> Extraction:
    i = len("$data")
    if i >= len(value) or value[i] != "{":
        raise TemplateSyntaxError("expected '{' after $data", base_offset + i)
    selector_text, i = _scan_balanced(value, i + 1, "{", "}")
    selector = parse_selector(selector_text)
    list_transform = None
    if i < len(value) and value[i] == "{":
        name, i = _scan_balanced(value, i + 1, "{", "}")
        name = name.strip()
        if name not in LIST_TRANSFORMS:
            raise TemplateSyntaxError(
                f"unknown list transformation {name!r}", base_offset + i
            )
        list_transform = name
    if i >= len(value) or value[i] != "[":
        raise TemplateSyntaxError("expected '[index]'", base_offset + i)
    end = value.find("]", i + 1)
    if end == -1:
        raise TemplateSyntaxError("missing ']'", base_offset + i)
    index_text = value[i + 1 : end].strip()
    if not index_text.isdigit():
        raise TemplateSyntaxError(
            f"index must be a non-negative integer, got {index_text!r}",
            base_offset + i + 1,
        )
    index = int(index_text)
    i = end + 1
    value_transform = None
    if i < len(value) and value[i] == "(":
        name, i = _scan_balanced(value, i + 1, "(", ")")
        name = name.strip()
        if name not in VALUE_TRANSFORMS:
            raise TemplateSyntaxError(
                f"unknown value transformation {name!r}", base_offset + i
            )
        value_transform = name
    attr = "text"
    if i < len(value) and value[i] == "@":
        m = _IDENT_RE.match(value, i + 1)
        if not m:
            raise TemplateSyntaxError("expected attribute name after '@'", base_offset + i)
        attr = m.group(0).lower()
        i = m.end()
    if i != len(value):
        raise TemplateSyntaxError(
            f"unexpected trailing text {value[i:]!r} in extraction", base_offset + i
        )
    return Extraction(
        selector=selector,
        index=index,
        list_transform=list_transform,
        value_transform=value_transform,
        attr=attr,
    )


def parse_rvss(text: str) -> ResourceValueStringSpec:
    """Parse a template; plain values and ``?`` become literal/wildcard
    segments, ``$data...`` programs become extractions."""
    if not text or not text.strip():
        raise TemplateSyntaxError("empty template", 0)
    segments: list[TemplateSegment] = []
    tree_name: str | None = None
    i = 0
    n = len(text)
    while True:
        while i < n and text[i].isspace():
            i += 1
        open_paren = text.find("(", i)
        if open_paren == -1:
            raise TemplateSyntaxError("expected '(' after node name", n)
        head = text[i:open_paren].strip()
        if ":" in head:
            prefix, _, node = head.partition(":")
            prefix, node = prefix.strip(), node.strip()
            if not prefix or (tree_name is not None and prefix != tree_name):
                raise TemplateSyntaxError("bad tree prefix", i)
            tree_name = prefix
        else:
            node = head
        if not node:
            raise TemplateSyntaxError("empty node name", i)
        if any(ch in ":()?," for ch in node):
            raise TemplateSyntaxError(f"reserved character in node name {node!r}", i)
        raw_value, i = _scan_balanced(text, open_paren + 1, "(", ")")
        raw_value = raw_value.strip()
        if raw_value == "":
            raise TemplateSyntaxError("empty value (use '?' for the wildcard)", open_paren + 1)
        value: TemplateValue
        if raw_value == "?":
            value = WILDCARD
        elif raw_value.startswith("$data"):
            value = _parse_extraction(raw_value, open_paren + 1)
        else:
            value = raw_value
        segments.append(TemplateSegment(node, value))
        while i < n and text[i].isspace():
            i += 1
        if i == n:
            break
        if not text.startswith("::", i):
            raise TemplateSyntaxError("expected '::' between segments", i)
        i += 2
        if i >= n or text[i:].isspace():
            raise TemplateSyntaxError("dangling '::'", i)
    return ResourceValueStringSpec(
        segments=tuple(segments), tree_name=tree_name, source=text
    )


def _element_value(extraction: Extraction, el) -> str:
    if extraction.attr == "text":
        return el.text()
    raw = el.attrs.get(extraction.attr)
    if raw is None:
        raise ExtractionError(
            f"element {el.path_str} has no attribute {extraction.attr!r}"
        )
    return raw


def _extract(extraction: Extraction, dom: DomSnapshot) -> str:
    """Run one extraction program.

    Without a list transformation the data is the list of every matched
    element's value in document order and the index selects an element
    (how a multi-span month picker yields month [0] and year [1]). With a
    list transformation, the first matched element's value is transformed
    into the list and the index selects a piece of it.
    """
    matches = extraction.selector.match(dom)
    if not matches:
        raise ExtractionError(
            f"no element matches {extraction.selector.source!r}"
        )
    if extraction.list_transform:
        items = LIST_TRANSFORMS[extraction.list_transform](
            _element_value(extraction, matches[0])
        )
    else:
        items = [_element_value(extraction, el) for el in matches]
    if extraction.index >= len(items):
        raise ExtractionError(
            f"index {extraction.index} out of range for {items!r}"
        )
    value = items[extraction.index]
    if extraction.value_transform:
        value = VALUE_TRANSFORMS[extraction.value_transform](value)
    return value


def evaluate_rvss(
    template: ResourceValueStringSpec, dom: DomSnapshot
) -> ResourceValueSpec:
    """Run every extraction against the snapshot and fill in a concrete spec.

    Raises ExtractionError when a selector matches nothing, an index is out
    of range, or a transform rejects its input; callers mask fail-closed.
    """
    segments = []
    for seg in template.segments:
        if isinstance(seg.value, Extraction):
            segments.append(Segment(seg.node_name, _extract(seg.value, dom)))
        else:
            segments.append(Segment(seg.node_name, seg.value))
    return ResourceValueSpec(tuple(segments), tree_name=template.tree_name)
