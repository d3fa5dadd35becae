"""Canonical XML writing and tolerant parsing.

Every persisted artifact (schema, viewpoint, scenario, diff report) uses
the same canonical form: UTF-8, XML declaration, 2-space indentation,
attributes in a fixed order, children in a deterministic order chosen by
the caller. Two structurally equal values therefore serialize to
identical bytes, which is what the round-trip tests pin down.
"""
from __future__ import annotations

import os
import tempfile
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .errors import ValidationError

DECLARATION = '<?xml version="1.0" encoding="UTF-8"?>'

# XML 1.0 cannot represent these at all, escaped or not.
_FORBIDDEN = {c for c in range(0x20)} - {0x09, 0x0A, 0x0D}


def check_xml_safe(text: str, what: str = "value") -> str:
    """Reject strings XML 1.0 cannot carry (control chars, surrogates)."""
    for ch in text:
        code = ord(ch)
        if code in _FORBIDDEN or 0xD800 <= code <= 0xDFFF or code in (0xFFFE, 0xFFFF):
            raise ValidationError(f"{what} contains character not representable in XML: {code:#x}")
    return text


def escape_attr(value: str) -> str:
    value = value.replace("&", "&amp;")
    value = value.replace("<", "&lt;")
    value = value.replace(">", "&gt;")
    value = value.replace('"', "&quot;")
    value = value.replace("\t", "&#9;")
    value = value.replace("\n", "&#10;")
    value = value.replace("\r", "&#13;")
    return value


def escape_text(value: str) -> str:
    value = value.replace("&", "&amp;")
    value = value.replace("<", "&lt;")
    value = value.replace(">", "&gt;")
    # Bare carriage returns are normalized away by parsers; keep them.
    value = value.replace("\r", "&#13;")
    return value


@dataclass
class Node:
    """One element: ordered attributes, optional text, ordered children."""

    tag: str
    attrs: list[tuple[str, str]] = field(default_factory=list)
    text: str | None = None
    children: list["Node"] = field(default_factory=list)

    def attr(self, name: str, value: str | None) -> "Node":
        """Append an attribute; None skips it (optional attributes)."""
        if value is not None:
            self.attrs.append((name, value))
        return self

    def child(self, node: "Node") -> "Node":
        self.children.append(node)
        return self


def _render(node: Node, depth: int, out: list[str]) -> None:
    pad = "  " * depth
    attrs = "".join(f' {k}="{escape_attr(v)}"' for k, v in node.attrs)
    if not node.children and not node.text:
        out.append(f"{pad}<{node.tag}{attrs}/>")
    elif not node.children:
        out.append(f"{pad}<{node.tag}{attrs}>{escape_text(node.text)}</{node.tag}>")
    else:
        if node.text:
            raise ValueError(f"mixed content not supported: <{node.tag}>")
        out.append(f"{pad}<{node.tag}{attrs}>")
        for c in node.children:
            _render(c, depth + 1, out)
        out.append(f"{pad}</{node.tag}>")


def render_document(root: Node) -> str:
    lines = [DECLARATION]
    _render(root, 0, lines)
    return "\n".join(lines) + "\n"


def write_atomic(path: str | os.PathLike, data: str) -> None:
    """Write via temp file + rename so readers never see a partial file."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".xml")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def parse_document(path: str | os.PathLike) -> ET.Element:
    """Parse an XML file; malformed content becomes a ValidationError."""
    try:
        return ET.parse(os.fspath(path)).getroot()
    except ET.ParseError as exc:
        raise ValidationError(f"malformed XML in {os.fspath(path)}: {exc}") from exc


def parse_string(text: str) -> ET.Element:
    try:
        return ET.fromstring(text)
    except ET.ParseError as exc:
        raise ValidationError(f"malformed XML: {exc}") from exc


def require_attr(elem: ET.Element, name: str, where: str) -> str:
    value = elem.get(name)
    if value is None:
        raise ValidationError(f"{where}: missing attribute {name!r}")
    return value
