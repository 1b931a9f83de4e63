"""Parser for a skill's nlu.md dialog-definition file.

Two section forms exist:

    ## lookup:city      <- following non-blank lines name lookup files
    city.txt

    ## intent:book_flight
    - Book (me|us) a flight from [Augsburg](city.txt?start) \
         to [Berlin](city.txt?destination)

A trailing backslash joins the next line. Sentence templates start with "- ".
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import IntentTemplate
from .errors import DslError
from .template import parse_sentence

_INTENT_NAME_RE = re.compile(r"^[A-Za-z0-9_]+$")


@dataclass(frozen=True)
class NluDocument:
    intents: tuple[IntentTemplate, ...]
    lookup_files: tuple[str, ...]
    warnings: tuple[str, ...]


def parse_nlu_md(skill_name: str, source: str, *, file: str | None = None) -> NluDocument:
    sentences: dict[str, list] = {}
    intent_order: list[str] = []
    lookup_files: list[str] = []
    warnings: list[str] = []
    current: tuple[str, str] | None = None

    for line_no, text in _logical_lines(source):
        stripped = text.strip()
        if not stripped:
            continue
        if stripped.startswith("##"):
            current = _parse_header(stripped, line_no, file)
            kind, name = current
            if kind == "intent" and name not in sentences:
                sentences[name] = []
                intent_order.append(name)
            continue
        if stripped.startswith("- "):
            if current is None or current[0] != "intent":
                raise DslError("outside-section", "sentence template outside an intent section",
                               file=file, line=line_no, column=1)
            body_at = text.index("- ") + 2
            seq = parse_sentence(text[body_at:], file=file, line=line_no, col_offset=body_at + 1)
            sentences[current[1]].append(seq)
            continue
        if current is None:
            raise DslError("outside-section", "content before any '##' section header",
                           file=file, line=line_no, column=1)
        if current[0] == "lookup":
            if stripped not in lookup_files:
                lookup_files.append(stripped)
        else:
            raise DslError("unexpected-line",
                           "lines in an intent section must be templates starting with '- '",
                           file=file, line=line_no, column=1)

    for name in intent_order:
        if not sentences[name]:
            warnings.append("intent %r has no sentence templates" % name)

    intents = tuple(
        IntentTemplate(intent_name=name, skill_name=skill_name,
                       sentences=tuple(sentences[name]))
        for name in intent_order
    )
    return NluDocument(intents=intents, lookup_files=tuple(lookup_files),
                       warnings=tuple(warnings))


def _parse_header(stripped: str, line_no: int, file) -> tuple[str, str]:
    header = stripped[2:].strip()
    kind, sep, name = header.partition(":")
    kind = kind.strip().lower()
    name = name.strip()
    if not sep or kind not in ("lookup", "intent"):
        raise DslError("unknown-section",
                       "section header must be '## lookup:<name>' or '## intent:<name>', got %r" % stripped,
                       file=file, line=line_no, column=1)
    if not name:
        raise DslError("unknown-section", "section header %r names nothing" % stripped,
                       file=file, line=line_no, column=1)
    if kind == "intent" and not _INTENT_NAME_RE.match(name):
        raise DslError("bad-intent-name",
                       "intent name %r may only contain letters, digits and '_'" % name,
                       file=file, line=line_no, column=1)
    return kind, name


def _logical_lines(source: str):
    """Yield (first line number, text) with backslash continuations joined."""
    raw = source.split("\n")
    i = 0
    while i < len(raw):
        start = i + 1
        text = raw[i]
        while _continues(text) and i + 1 < len(raw):
            i += 1
            text = text.rstrip()[:-1].rstrip() + " " + raw[i].lstrip()
        if _continues(text):  # dangling backslash on the last line
            text = text.rstrip()[:-1].rstrip()
        yield start, text
        i += 1


def _continues(text: str) -> bool:
    stripped = text.rstrip()
    trailing = len(stripped) - len(stripped.rstrip("\\"))
    return trailing % 2 == 1
