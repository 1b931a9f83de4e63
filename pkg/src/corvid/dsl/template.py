"""Sentence-template parser.

Template syntax inside an intent section:

    - Book (me|us) a flight from [Augsburg](city.txt?start) to [Berlin](city.txt?destination)

Parentheses group alternatives ("(a|b)", empty branch makes "a" optional),
square-bracket links mark slots, "?role" distinguishes two slots of the same
type. Backslash escapes "(", ")", "[", "]", "|" and itself; one level of
alternation nesting is allowed.
"""

from __future__ import annotations

import re

from .ast import Alternation, Literal, Slot, TemplateNode
from .errors import DslError

ESCAPABLE = "()[]|\\"
_ROLE_RE = re.compile(r"^[^\s?]+$")
_ESCAPE_RE = re.compile(r"([()\[\]|\\])")


def parse_sentence(text: str, *, file: str | None = None, line: int | None = None,
                   col_offset: int = 1) -> tuple[TemplateNode, ...]:
    parser = _Parser(text, file, line, col_offset)
    nodes = parser.sequence(depth=0, stops="")
    if parser.i < parser.n:
        parser.fail("unbalanced", "unexpected %r" % text[parser.i])
    return tuple(nodes)


class _Parser:
    def __init__(self, text: str, file, line, col_offset):
        self.text = text
        self.n = len(text)
        self.i = 0
        self.file = file
        self.line = line
        self.col_offset = col_offset

    def fail(self, kind: str, message: str, at: int | None = None):
        col = (self.i if at is None else at) + self.col_offset
        raise DslError(kind, message, file=self.file, line=self.line, column=col)

    def sequence(self, depth: int, stops: str) -> list:
        nodes: list = []
        buf: list[str] = []

        def flush():
            textval = " ".join("".join(buf).split())
            buf.clear()
            if textval:
                nodes.append(Literal(textval))

        while self.i < self.n:
            c = self.text[self.i]
            if c == "\\":
                if self.i + 1 < self.n and self.text[self.i + 1] in ESCAPABLE:
                    buf.append(self.text[self.i + 1])
                    self.i += 2
                else:
                    buf.append(c)
                    self.i += 1
            elif c in stops:
                break
            elif c == "(":
                flush()
                nodes.extend(self.group(depth + 1))
            elif c == "[":
                flush()
                nodes.append(self.slot())
            elif c == ")":
                self.fail("unbalanced", "unexpected ')' without matching '('")
            elif c == "]":
                self.fail("unbalanced", "unexpected ']' without matching '['")
            elif c == "|":
                self.fail("unbalanced", "'|' is only valid inside a '(...)' group")
            else:
                buf.append(c)
                self.i += 1
        flush()
        return nodes

    def group(self, depth: int) -> list:
        start = self.i
        if depth > 2:
            self.fail("nested-too-deep", "alternation groups may nest only one level deep")
        self.i += 1  # past "("
        branches = []
        while True:
            branches.append(tuple(self.sequence(depth, stops="|)")))
            if self.i >= self.n:
                self.fail("unbalanced", "unclosed '('", at=start)
            if self.text[self.i] == "|":
                self.i += 1
                continue
            self.i += 1  # past ")"
            break
        if len(branches) == 1:
            # "(hello)" is not an alternation; splice the branch in place.
            return list(branches[0])
        return [Alternation(tuple(branches))]

    def slot(self) -> Slot:
        start = self.i
        self.i += 1  # past "["
        display = self._until("]", start, "unclosed '['")
        self.i += 1  # past "]"
        if self.i >= self.n or self.text[self.i] != "(":
            self.fail("malformed-slot", "slot link needs '(<lookup-file>)' right after ']'")
        link_start = self.i
        self.i += 1
        body = self._until(")", link_start, "unclosed slot link '('")
        self.i += 1  # past ")"

        display = " ".join(display.split())
        if not display:
            self.fail("malformed-slot", "slot display value is empty", at=start)
        parts = body.split("?")
        if len(parts) > 2:
            self.fail("malformed-slot", "slot link has more than one '?' role separator", at=link_start)
        lookup = parts[0].strip()
        if not lookup:
            self.fail("malformed-slot", "slot link names no lookup file", at=link_start)
        role = None
        if len(parts) == 2:
            role = parts[1].strip()
            if not role or not _ROLE_RE.match(role):
                self.fail("malformed-slot", "role must be non-empty without '?' or whitespace",
                          at=link_start)
        return Slot(display_value=display, lookup=lookup, role=role)

    def _until(self, terminator: str, open_at: int, unclosed_msg: str) -> str:
        chars: list[str] = []
        while self.i < self.n:
            c = self.text[self.i]
            if c == "\\" and self.i + 1 < self.n and self.text[self.i + 1] in ESCAPABLE:
                chars.append(self.text[self.i + 1])
                self.i += 2
                continue
            if c == terminator:
                return "".join(chars)
            chars.append(c)
            self.i += 1
        self.fail("unbalanced", unclosed_msg, at=open_at)
        raise AssertionError("unreachable")


# -- rendering ---------------------------------------------------------------


def render_template(sequence) -> str:
    """Human-readable display form: slots show their display value."""
    return " ".join(_render_node(node, source=False) for node in sequence)


def render_source(sequence) -> str:
    """Lossless form that parses back to an equal AST."""
    return " ".join(_render_node(node, source=True) for node in sequence)


def _render_node(node, source: bool) -> str:
    if isinstance(node, Literal):
        return _escape(node.text) if source else node.text
    if isinstance(node, Slot):
        if not source:
            return node.display_value
        link = node.lookup if node.role is None else "%s?%s" % (node.lookup, node.role)
        return "[%s](%s)" % (_escape(node.display_value), link)
    if isinstance(node, Alternation):
        rendered = [" ".join(_render_node(n, source) for n in branch) for branch in node.branches]
        return "(" + "|".join(rendered) + ")"
    raise TypeError("not a template node: %r" % (node,))


def _escape(text: str) -> str:
    return _ESCAPE_RE.sub(r"\\\1", text)
