"""Loading a whole skill bundle from disk.

Expected layout:

    <skill>/config.yaml
    <skill>/dialog/nlu.md
    <skill>/dialog/<lookup>.txt
    <skill>/action/action.yaml      (only when has_action is true)

The directory name is the skill name; intent ids are "<skill>-<intent>".
"""

from __future__ import annotations

from pathlib import Path

from .ast import Alternation, SkillBundle, Slot, lookup_stem
from .errors import DslError
from .lookup import parse_lookup
from .manifest import parse_action_descriptor, parse_manifest
from .nlu_md import parse_nlu_md


def iter_slots(sequence):
    """All Slot nodes in a sentence sequence, in reading order."""
    for node in sequence:
        if isinstance(node, Slot):
            yield node
        elif isinstance(node, Alternation):
            for branch in node.branches:
                yield from iter_slots(branch)


def load_bundle(root, source_url: str | None = None) -> SkillBundle:
    root = Path(root)
    if not root.is_dir():
        raise DslError("missing-file", "skill directory %s does not exist" % root)
    name = root.name

    config_path = root / "config.yaml"
    if not config_path.is_file():
        raise DslError("missing-file", "config.yaml not found in %s" % root, file=str(config_path))
    manifest = parse_manifest(_read(config_path), file=str(config_path))

    nlu_path = root / "dialog" / "nlu.md"
    if not nlu_path.is_file():
        raise DslError("missing-file", "dialog/nlu.md not found in %s" % root, file=str(nlu_path))
    doc = parse_nlu_md(name, _read(nlu_path), file=str(nlu_path))
    warnings = list(doc.warnings)

    slot_files: list[str] = []
    for intent in doc.intents:
        for sentence in intent.sentences:
            for slot in iter_slots(sentence):
                if slot.lookup not in slot_files:
                    slot_files.append(slot.lookup)

    lookups = {}
    for fname in list(doc.lookup_files) + [f for f in slot_files if f not in doc.lookup_files]:
        path = root / "dialog" / fname
        if not path.is_file():
            if fname in doc.lookup_files:
                raise DslError("missing-file",
                               "declared lookup file %r not found under dialog/" % fname,
                               file=str(nlu_path))
            raise DslError("unresolved-lookup",
                           "slot references %r, which is neither declared nor present" % fname,
                           file=str(nlu_path))
        stem = lookup_stem(fname)
        if stem in lookups:
            raise DslError("duplicate-lookup",
                           "two lookup files share the stem %r" % stem, file=str(path))
        table = parse_lookup(stem, _read(path), file=str(path))
        if len(table) == 0:
            warnings.append("lookup %r has no entries" % stem)
        lookups[stem] = table

    for intent in doc.intents:
        for sentence in intent.sentences:
            for slot in iter_slots(sentence):
                table = lookups[slot.stem]
                if table.canonical_for(slot.display_value) is None:
                    warnings.append(
                        "slot display value %r is not a variant in lookup %r"
                        % (slot.display_value, slot.stem))

    action_path = root / "action" / "action.yaml"
    action = None
    if manifest.has_action:
        if not action_path.is_file():
            raise DslError("action-mismatch",
                           "has_action is true but action/action.yaml is missing",
                           file=str(config_path))
        action = parse_action_descriptor(_read(action_path), directory=str(root / "action"),
                                         file=str(action_path))
    elif action_path.is_file():
        raise DslError("action-mismatch",
                       "has_action is false but action/action.yaml exists",
                       file=str(config_path))

    return SkillBundle(
        name=name,
        manifest=manifest,
        intents=doc.intents,
        lookups=lookups,
        action=action,
        source=source_url or str(root),
        warnings=tuple(warnings),
    )


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise DslError("encoding", "%s is not valid UTF-8: %s" % (path, exc), file=str(path))
