"""Positioned errors for skill-bundle parsing.

Every parser in this package reports failures as DslError with a stable
`kind` string plus file/line/column where known, so callers (CLI lint, the
store indexer) can show exact locations.
"""

from __future__ import annotations


class DslError(Exception):
    def __init__(self, kind: str, message: str, *, file: str | None = None,
                 line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.file = file
        self.line = line
        self.column = column

    def with_file(self, file: str) -> "DslError":
        if self.file is None:
            self.file = file
        return self

    def __str__(self) -> str:
        where = []
        if self.file is not None:
            where.append(self.file)
        if self.line is not None:
            where.append(str(self.line))
            if self.column is not None:
                where.append(str(self.column))
        prefix = ":".join(where)
        return "%s: %s" % (prefix, self.message) if prefix else self.message
