"""Word-level tokenization used across training, the LM and the NLU.

Lowercases and splits on whitespace and punctuation; punctuation is dropped.
This matches the DSL's word-level slot spans: a slot variant like "New York"
always tokenizes to a contiguous token run.
"""

from __future__ import annotations

import re

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    return [m.group(0).lower() for m in _TOKEN_RE.finditer(text)]


def tokenize_with_spans(text: str) -> list[tuple[str, int, int]]:
    """Tokens plus their [start, end) character spans in the original text."""
    return [(m.group(0).lower(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]
