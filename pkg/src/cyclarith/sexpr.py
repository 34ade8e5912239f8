"""Minimal s-expression reader and writer.

Values are nested Python lists whose leaves are atom strings.  Double-quoted
strings are supported for free-text payloads (violation messages); they parse
to a `QuotedString` so that atoms and strings round-trip unambiguously.
"""

from __future__ import annotations


class SexprError(Exception):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at offset {pos})")
        self.pos = pos


class QuotedString(str):
    """Atom that renders with double quotes."""


_DELIMS = "()\" \t\r\n"


def _skip_ws(text: str, i: int) -> int:
    while i < len(text):
        if text[i] in " \t\r\n":
            i += 1
        elif text[i] == ";":
            while i < len(text) and text[i] != "\n":
                i += 1
        else:
            break
    return i


def _read(text: str, i: int):
    i = _skip_ws(text, i)
    if i >= len(text):
        raise SexprError("unexpected end of input", i)
    ch = text[i]
    if ch == "(":
        items = []
        i += 1
        while True:
            i = _skip_ws(text, i)
            if i >= len(text):
                raise SexprError("unclosed '('", i)
            if text[i] == ")":
                return items, i + 1
            item, i = _read(text, i)
            items.append(item)
    if ch == ")":
        raise SexprError("unmatched ')'", i)
    if ch == '"':
        j = i + 1
        out = []
        while j < len(text) and text[j] != '"':
            if text[j] == "\\" and j + 1 < len(text):
                out.append(text[j + 1])
                j += 2
            else:
                out.append(text[j])
                j += 1
        if j >= len(text):
            raise SexprError("unterminated string", i)
        return QuotedString("".join(out)), j + 1
    j = i
    while j < len(text) and text[j] not in _DELIMS:
        j += 1
    return text[i:j], j


def parse(text: str):
    value, i = _read(text, 0)
    i = _skip_ws(text, i)
    if i != len(text):
        raise SexprError("trailing input after s-expression", i)
    return value


def parse_many(text: str):
    values = []
    i = _skip_ws(text, 0)
    while i < len(text):
        value, i = _read(text, i)
        values.append(value)
        i = _skip_ws(text, i)
    return values


def render(value) -> str:
    if isinstance(value, QuotedString):
        body = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{body}"'
    if isinstance(value, str):
        return value
    return "(" + " ".join(render(v) for v in value) + ")"


def render_pretty(value, indent: int = 0) -> str:
    """Render with one nested list per line; deterministic layout."""
    pad = "  " * indent
    if isinstance(value, str):
        return pad + render(value)
    if not any(isinstance(v, list) for v in value):
        return pad + render(value)
    head = [v for v in value]
    lines = [pad + "("]
    flat_prefix = []
    rest_start = 0
    for v in head:
        if isinstance(v, list):
            break
        flat_prefix.append(render(v))
        rest_start += 1
    if flat_prefix:
        lines[0] = pad + "(" + " ".join(flat_prefix)
    for v in head[rest_start:]:
        lines.append(render_pretty(v, indent + 1))
    lines[-1] += ")"
    return "\n".join(lines)
