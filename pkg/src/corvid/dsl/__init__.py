"""Skill DSL: parsing of dialog templates, lookup tables and manifests."""

from .ast import (
    ActionDescriptor,
    Alternation,
    IntentTemplate,
    Literal,
    LookupEntry,
    LookupTable,
    SkillBundle,
    SkillManifest,
    Slot,
    SlotRef,
    TemplateNode,
    lookup_stem,
)
from .bundle import iter_slots, load_bundle
from .errors import DslError
from .lookup import parse_lookup
from .manifest import parse_action_descriptor, parse_manifest
from .nlu_md import NluDocument, parse_nlu_md
from .template import parse_sentence, render_source, render_template

__all__ = [
    "ActionDescriptor",
    "Alternation",
    "IntentTemplate",
    "Literal",
    "LookupEntry",
    "LookupTable",
    "SkillBundle",
    "SkillManifest",
    "Slot",
    "SlotRef",
    "TemplateNode",
    "lookup_stem",
    "iter_slots",
    "load_bundle",
    "DslError",
    "parse_lookup",
    "parse_manifest",
    "parse_action_descriptor",
    "NluDocument",
    "parse_nlu_md",
    "parse_sentence",
    "render_source",
    "render_template",
]
