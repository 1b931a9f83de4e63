"""Permission manifest (config.yaml) parsing.

The manifest is the skill's security contract, so parsing is strict: all
five fields must be present, unknown keys are rejected rather than ignored,
and every topic string must be a valid topic name.
"""

from __future__ import annotations

import yaml

from ..bus.topics import TopicError, TopicName
from .ast import ActionDescriptor, SkillManifest
from .errors import DslError

_FIELD_TYPES = {
    "has_action": bool,
    "extra_container_flags": str,
    "needs_internet_access": bool,
    "topics_read": list,
    "topics_write": list,
}


def parse_manifest(source: str, *, file: str | None = None) -> SkillManifest:
    doc = _load_yaml(source, file)
    if not isinstance(doc, dict):
        raise DslError("wrong-type", "manifest top level must be a mapping", file=file)
    unknown = set(doc) - {"system"}
    if unknown:
        raise DslError("unknown-key", "unknown top-level keys: %s" % sorted(unknown), file=file)
    if "system" not in doc:
        raise DslError("missing-field", "manifest needs a 'system' block", file=file)
    system = doc["system"]
    if not isinstance(system, dict):
        raise DslError("wrong-type", "'system' must be a mapping", file=file)

    missing = sorted(set(_FIELD_TYPES) - set(system))
    if missing:
        raise DslError("missing-field", "system block lacks: %s" % ", ".join(missing), file=file)
    unknown = sorted(set(system) - set(_FIELD_TYPES))
    if unknown:
        raise DslError("unknown-key", "unknown system keys: %s" % ", ".join(unknown), file=file)

    for key, expected in _FIELD_TYPES.items():
        value = system[key]
        if expected is bool and not isinstance(value, bool):
            raise DslError("wrong-type", "%r must be true or false, got %r" % (key, value), file=file)
        if expected is str and not isinstance(value, str):
            raise DslError("wrong-type", "%r must be text, got %r" % (key, value), file=file)
        if expected is list and not isinstance(value, list):
            raise DslError("wrong-type",
                           "%r must be a list of topic strings, got %r" % (key, value), file=file)

    return SkillManifest(
        has_action=system["has_action"],
        extra_container_flags=system["extra_container_flags"],
        needs_internet_access=system["needs_internet_access"],
        topics_read=_topic_set("topics_read", system["topics_read"], file),
        topics_write=_topic_set("topics_write", system["topics_write"], file),
    )


def parse_action_descriptor(source: str, directory: str, *, file: str | None = None) -> ActionDescriptor:
    doc = _load_yaml(source, file)
    if not isinstance(doc, dict):
        raise DslError("wrong-type", "action descriptor must be a mapping", file=file)
    unknown = sorted(set(doc) - {"run"})
    if unknown:
        raise DslError("unknown-key", "unknown action keys: %s" % ", ".join(unknown), file=file)
    run = doc.get("run")
    if not isinstance(run, str) or not run.strip():
        raise DslError("missing-field", "action descriptor needs a non-empty 'run' command", file=file)
    return ActionDescriptor(run=run.strip(), directory=directory)


def _topic_set(field_name: str, values: list, file) -> frozenset[str]:
    rendered = set()
    for value in values:
        if not isinstance(value, str):
            raise DslError("wrong-type", "%s entries must be text, got %r" % (field_name, value),
                           file=file)
        try:
            rendered.add(TopicName.parse(value).render())
        except TopicError as exc:
            raise DslError("invalid-topic", "%s contains invalid topic %r: %s" % (field_name, value, exc),
                           file=file) from exc
    return frozenset(rendered)


def _load_yaml(source: str, file):
    try:
        return yaml.safe_load(source)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise DslError("yaml-error", "not valid YAML: %s" % exc, file=file,
                       line=None if mark is None else mark.line + 1,
                       column=None if mark is None else mark.column + 1) from exc
