"""Minimal DOM built on the stdlib HTML parser.

Elements get stable ids: the path of child indices (elements only, text
nodes excluded) from the document root, serialized as ``0/1/3``. Snapshots
are immutable per evaluation; re-parse when the page changes.
"""

from __future__ import annotations

from html.parser import HTMLParser

VOID_TAGS = frozenset(
    "area base br col embed hr img input link meta param source track wbr".split()
)


class DomElement:
    """One element: tag, attributes, ordered content (children and text)."""

    __slots__ = ("tag", "attrs", "parent", "content", "path")

    def __init__(
        self,
        tag: str,
        attrs: dict[str, str],
        parent: "DomElement | None",
        path: tuple[int, ...],
    ):
        self.tag = tag
        self.attrs = attrs
        self.parent = parent
        self.content: list["DomElement | str"] = []
        self.path = path

    @property
    def children(self) -> list["DomElement"]:
        return [c for c in self.content if isinstance(c, DomElement)]

    @property
    def path_str(self) -> str:
        return "/".join(str(i) for i in self.path)

    @property
    def classes(self) -> list[str]:
        return self.attrs.get("class", "").split()

    def text(self) -> str:
        """Concatenated descendant text in document order."""
        parts = []
        for item in self.content:
            if isinstance(item, str):
                parts.append(item)
            else:
                parts.append(item.text())
        return "".join(parts)

    def __repr__(self) -> str:
        return f"<DomElement {self.tag} at {self.path_str}>"


class _Builder(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.roots: list[DomElement] = []
        self.elements: list[DomElement] = []
        self._stack: list[DomElement] = []

    def _open(self, tag: str, attrs) -> DomElement:
        attr_map: dict[str, str] = {}
        for name, value in attrs:
            attr_map.setdefault(name, value if value is not None else "")
        parent = self._stack[-1] if self._stack else None
        if parent is not None:
            path = parent.path + (len(parent.children),)
        else:
            path = (len(self.roots),)
        el = DomElement(tag, attr_map, parent, path)
        if parent is not None:
            parent.content.append(el)
        else:
            self.roots.append(el)
        self.elements.append(el)
        return el

    def handle_starttag(self, tag, attrs):
        el = self._open(tag, attrs)
        if tag not in VOID_TAGS:
            self._stack.append(el)

    def handle_startendtag(self, tag, attrs):
        self._open(tag, attrs)

    def handle_endtag(self, tag):
        for i in range(len(self._stack) - 1, -1, -1):
            if self._stack[i].tag == tag:
                del self._stack[i:]
                return
        # stray end tag: ignore

    def handle_data(self, data):
        if self._stack and data:
            self._stack[-1].content.append(data)


class DomSnapshot:
    """A parsed HTML document with elements addressable by index path."""

    def __init__(self, roots: list[DomElement], elements: list[DomElement]):
        self.roots = roots
        self.elements = elements  # document order
        self._by_path = {el.path_str: el for el in elements}

    @classmethod
    def parse(cls, html: bytes | str) -> "DomSnapshot":
        if isinstance(html, bytes):
            html = html.decode("utf-8")
        builder = _Builder()
        builder.feed(html)
        builder.close()
        return cls(builder.roots, builder.elements)

    def element_at(self, path: str) -> DomElement | None:
        return self._by_path.get(path)

    def __len__(self) -> int:
        return len(self.elements)
