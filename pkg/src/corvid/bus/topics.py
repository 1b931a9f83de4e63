"""Topic names for the message bus.

Topics are slash-separated paths ("Jaco/Skills/SayText"). Comparison is
exact byte equality, so "jaco/skills/saytext" is a different topic.
"""

from __future__ import annotations

from dataclasses import dataclass

MAX_RENDERED_LENGTH = 256

# Grant entry meaning "every topic"; only trusted core modules get it.
WILDCARD = "*"


class TopicError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class TopicName:
    segments: tuple[str, ...]

    def __post_init__(self):
        if not self.segments:
            raise TopicError("topic needs at least one segment")
        for seg in self.segments:
            if not seg:
                raise TopicError("empty topic segment in %r" % (self.segments,))
            if "/" in seg:
                raise TopicError("segment %r contains '/'" % seg)
        if len(self.render()) > MAX_RENDERED_LENGTH:
            raise TopicError("rendered topic exceeds %d chars" % MAX_RENDERED_LENGTH)

    @classmethod
    def parse(cls, text: str) -> "TopicName":
        if not isinstance(text, str):
            raise TopicError("topic must be text, got %r" % type(text).__name__)
        return cls(tuple(text.split("/")))

    def render(self) -> str:
        return "/".join(self.segments)

    def __str__(self) -> str:
        return self.render()


def as_topic(value) -> TopicName:
    """Accept either a TopicName or its rendered string form."""
    if isinstance(value, TopicName):
        return value
    return TopicName.parse(value)
