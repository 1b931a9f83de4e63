"""Deterministic pattern/gazetteer NLU.

Training replaces slot tokens in each expanded example with typed
placeholders ("book me a flight from <city> to <city>"), dedupes the
resulting skeletons, and merges all lookup tables into one gazetteer.
No statistics are estimated, so identical inputs always produce
byte-identical models.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

from ..datagen.expand import TrainingExample
from ..datagen.tokenizer import tokenize
from ..dsl.ast import SkillBundle

NLU_MAGIC = b"CORVNLU1"
DEFAULT_THRESHOLD = 0.5
_SEP = "\x1f"


class NluError(Exception):
    pass


@dataclass(frozen=True, order=True)
class Pattern:
    intent_id: str
    tokens: tuple[str, ...]  # slot positions hold "<stem>" placeholders
    roles: tuple = ()  # role (or None) per placeholder, in order


@dataclass
class NluModel:
    patterns: tuple[Pattern, ...]
    # variant token run -> options sorted by (stem, canonical); first wins
    gazetteer: dict[tuple[str, ...], tuple[tuple[str, str], ...]]
    idf: dict[str, float]
    threshold: float = DEFAULT_THRESHOLD
    _max_variant_len: int = field(default=0, repr=False, compare=False)
    # (pattern, token set, idf mass of the set), precomputed for scoring
    _scored_patterns: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        if not self._max_variant_len:
            object.__setattr__(self, "_max_variant_len",
                               max((len(k) for k in self.gazetteer), default=0))
        if not self._scored_patterns:
            object.__setattr__(self, "_scored_patterns", tuple(
                (p, frozenset(p.tokens),
                 sum(self.idf_weight(t) for t in set(p.tokens)))
                for p in self.patterns))

    def intent_ids(self) -> list[str]:
        return sorted({p.intent_id for p in self.patterns})

    def idf_weight(self, token: str) -> float:
        return self.idf.get(token, self._default_idf())

    def _default_idf(self) -> float:
        return math.log(1.0 + len(self.patterns)) + 1.0


def placeholder(stem: str) -> str:
    return "<%s>" % stem


def skeleton_of(example: TrainingExample) -> tuple[tuple[str, ...], tuple]:
    """Slot-abstracted token sequence plus the per-placeholder roles."""
    tokens: list[str] = []
    roles: list = []
    spans = {a.start: a for a in example.annotations}
    i = 0
    while i < len(example.tokens):
        ann = spans.get(i)
        if ann is not None and ann.end > i:
            tokens.append(placeholder(ann.entity))
            roles.append(ann.role)
            i = ann.end
        else:
            tokens.append(example.tokens[i])
            i += 1
    return tuple(tokens), tuple(roles)


def train_nlu(examples, bundles, threshold: float = DEFAULT_THRESHOLD) -> NluModel:
    examples = list(examples)
    if not examples:
        raise NluError("cannot train on an empty example list")

    seen_intents: dict[str, str] = {}
    for bundle in bundles:
        for intent_id in bundle.intent_ids():
            if intent_id in seen_intents and seen_intents[intent_id] != bundle.name:
                raise NluError("intent id %r defined by both %r and %r"
                               % (intent_id, seen_intents[intent_id], bundle.name))
            seen_intents[intent_id] = bundle.name

    pattern_set = set()
    for example in examples:
        tokens, roles = skeleton_of(example)
        pattern_set.add(Pattern(intent_id=example.intent_id, tokens=tokens, roles=roles))
    patterns = tuple(sorted(pattern_set))

    gazetteer_opts: dict[tuple[str, ...], set[tuple[str, str]]] = {}
    for bundle in bundles:
        for stem, table in bundle.lookups.items():
            for entry in table.entries:
                for variant in entry.variants:
                    key = tuple(tokenize(variant))
                    if not key:
                        continue
                    gazetteer_opts.setdefault(key, set()).add((stem, entry.canonical))
    gazetteer = {key: tuple(sorted(opts)) for key, opts in gazetteer_opts.items()}

    df: dict[str, int] = {}
    for pattern in patterns:
        for token in set(pattern.tokens):
            df[token] = df.get(token, 0) + 1
    n = len(patterns)
    idf = {token: math.log((1.0 + n) / (1.0 + count)) + 1.0 for token, count in df.items()}

    return NluModel(patterns=patterns, gazetteer=gazetteer, idf=idf, threshold=threshold)


# -- serialization -----------------------------------------------------------


def save_nlu(model: NluModel, path):
    body = json.dumps({
        "gazetteer": {_SEP.join(key): [list(opt) for opt in opts]
                      for key, opts in sorted(model.gazetteer.items())},
        "idf": dict(sorted(model.idf.items())),
        "patterns": [
            {"intent_id": p.intent_id, "tokens": list(p.tokens), "roles": list(p.roles)}
            for p in model.patterns
        ],
        "threshold": model.threshold,
    }, sort_keys=True, ensure_ascii=False).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(NLU_MAGIC)
        fh.write(struct.pack(">Q", len(body)))
        fh.write(body)


def load_nlu(path) -> NluModel:
    raw = Path(path).read_bytes()
    if raw[:len(NLU_MAGIC)] != NLU_MAGIC:
        raise NluError("%s is not a CORVNLU1 model file" % path)
    offset = len(NLU_MAGIC)
    (length,) = struct.unpack_from(">Q", raw, offset)
    offset += 8
    doc = json.loads(raw[offset:offset + length].decode("utf-8"))
    patterns = tuple(
        Pattern(intent_id=p["intent_id"], tokens=tuple(p["tokens"]),
                roles=tuple(p["roles"]))
        for p in doc["patterns"]
    )
    gazetteer = {
        tuple(key.split(_SEP)): tuple((opt[0], opt[1]) for opt in opts)
        for key, opts in doc["gazetteer"].items()
    }
    return NluModel(patterns=patterns, gazetteer=gazetteer,
                    idf={k: float(v) for k, v in doc["idf"].items()},
                    threshold=float(doc["threshold"]))
