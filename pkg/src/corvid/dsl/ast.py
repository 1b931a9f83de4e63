"""AST for skill bundles: dialog templates, lookup tables, manifests."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property


def lookup_stem(file_name: str) -> str:
    """'city.txt' -> 'city'; names without an extension stay as they are."""
    if "." in file_name:
        return file_name.rsplit(".", 1)[0]
    return file_name


@dataclass(frozen=True)
class Literal:
    text: str


@dataclass(frozen=True)
class Slot:
    display_value: str
    lookup: str  # lookup file name as written in the link, e.g. "city.txt"
    role: str | None = None

    @property
    def stem(self) -> str:
        return lookup_stem(self.lookup)


# A Slot node carries exactly the slot-reference fields; both names are used.
SlotRef = Slot


@dataclass(frozen=True)
class Alternation:
    # Each branch is a sequence of nodes; "(a|)" has an empty second branch.
    branches: tuple[tuple, ...]


TemplateNode = Literal | Slot | Alternation


@dataclass(frozen=True)
class LookupEntry:
    variants: tuple[str, ...]
    canonical: str


@dataclass(frozen=True)
class LookupTable:
    name: str  # file stem
    entries: tuple[LookupEntry, ...]

    @cached_property
    def _index(self) -> dict[str, str]:
        idx = {}
        for entry in self.entries:
            for variant in entry.variants:
                idx.setdefault(variant.casefold(), entry.canonical)
        return idx

    def canonical_for(self, variant: str) -> str | None:
        """Case-insensitive variant lookup; canonical is returned verbatim."""
        return self._index.get(variant.casefold())

    def all_variants(self) -> list[str]:
        out = []
        for entry in self.entries:
            out.extend(entry.variants)
        return out

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class IntentTemplate:
    intent_name: str
    skill_name: str
    sentences: tuple[tuple, ...]  # sequences of TemplateNode

    @property
    def intent_id(self) -> str:
        return "%s-%s" % (self.skill_name, self.intent_name)


@dataclass(frozen=True)
class SkillManifest:
    has_action: bool
    extra_container_flags: str
    needs_internet_access: bool
    topics_read: frozenset[str]
    topics_write: frozenset[str]


@dataclass(frozen=True)
class ActionDescriptor:
    run: str
    directory: str


@dataclass(frozen=True)
class SkillBundle:
    name: str
    manifest: SkillManifest
    intents: tuple[IntentTemplate, ...]
    lookups: dict[str, LookupTable] = field(default_factory=dict)  # keyed by stem
    action: ActionDescriptor | None = None
    source: str = ""
    warnings: tuple[str, ...] = ()

    def intent_ids(self) -> list[str]:
        return [it.intent_id for it in self.intents]
