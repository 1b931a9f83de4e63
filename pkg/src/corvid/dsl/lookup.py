"""Lookup-table files: one entry per line.

    Augsburg
    (New York|N Y)->New York
    Berlin

A plain line maps a value to itself, "A->B" declares B as the canonical
form, and a parenthesized group lists synonymous surface variants. Variant
matching downstream is case-insensitive; canonicals are kept verbatim.
"""

from __future__ import annotations

from .ast import LookupEntry, LookupTable
from .errors import DslError

_ESCAPABLE = "()|\\"


def parse_lookup(name: str, source: str, *, file: str | None = None) -> LookupTable:
    entries = []
    for line_no, raw in enumerate(source.split("\n"), start=1):
        line = raw.strip()
        if not line:
            continue
        entries.append(_parse_line(line, line_no, file))
    return LookupTable(name=name, entries=tuple(entries))


def _parse_line(line: str, line_no: int, file) -> LookupEntry:
    def fail(kind, message, col=1):
        raise DslError(kind, message, file=file, line=line_no, column=col)

    left, arrow_at = _split_arrow(line, line_no, file)
    canonical = None
    if arrow_at is not None:
        canonical = line[arrow_at + 2:].strip()
        if not canonical:
            fail("dangling-arrow", "'->' with no canonical value", col=arrow_at + 1)

    left_stripped = left.strip()
    if not left_stripped:
        fail("dangling-arrow" if arrow_at is not None else "empty-variant",
             "no variants before '->'" if arrow_at is not None else "blank entry")

    if left_stripped.startswith("("):
        variants = _parse_group(left_stripped, line_no, file)
    else:
        if any(c in "()|" and (i == 0 or left_stripped[i - 1] != "\\")
               for i, c in enumerate(left_stripped)):
            fail("unbalanced", "metacharacter outside a '(...)' group (escape it with '\\')")
        variants = [_unescape(left_stripped)]

    variants = [" ".join(v.split()) for v in variants]
    if any(not v for v in variants):
        fail("empty-variant", "variant is empty after trimming")
    if canonical is None:
        canonical = variants[0]
    return LookupEntry(variants=tuple(variants), canonical=canonical)


def _split_arrow(line: str, line_no: int, file) -> tuple[str, int | None]:
    """Find the first '->' outside parentheses; returns (left part, index)."""
    depth = 0
    i = 0
    while i < len(line):
        c = line[i]
        if c == "\\" and i + 1 < len(line) and line[i + 1] in _ESCAPABLE:
            i += 2
            continue
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
            if depth < 0:
                raise DslError("unbalanced", "unexpected ')'", file=file, line=line_no, column=i + 1)
        elif c == "-" and depth == 0 and line[i:i + 2] == "->":
            return line[:i], i
        i += 1
    if depth != 0:
        raise DslError("unbalanced", "unclosed '('", file=file, line=line_no, column=1)
    return line, None


def _parse_group(text: str, line_no: int, file) -> list[str]:
    def fail(kind, message, col):
        raise DslError(kind, message, file=file, line=line_no, column=col)

    variants = []
    chars: list[str] = []
    i = 1  # past "("
    closed_at = None
    while i < len(text):
        c = text[i]
        if c == "\\" and i + 1 < len(text) and text[i + 1] in _ESCAPABLE:
            chars.append(text[i + 1])
            i += 2
            continue
        if c == "|":
            variants.append("".join(chars))
            chars = []
        elif c == ")":
            variants.append("".join(chars))
            closed_at = i
            break
        elif c == "(":
            fail("unbalanced", "nested '(' in a lookup group", i + 1)
        else:
            chars.append(c)
        i += 1
    if closed_at is None:
        fail("unbalanced", "unclosed '('", 1)
    trailing = text[closed_at + 1:].strip()
    if trailing:
        fail("unbalanced", "unexpected text after ')': %r" % trailing, closed_at + 2)
    return variants


def _unescape(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        if text[i] == "\\" and i + 1 < len(text) and text[i + 1] in _ESCAPABLE:
            out.append(text[i + 1])
            i += 2
        else:
            out.append(text[i])
            i += 1
    return "".join(out)
