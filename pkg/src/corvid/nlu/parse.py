"""Utterance parsing: gazetteer scan, pattern scoring, role assignment.

Entities are found by longest-match-first scanning; overlap ties go to the
earlier position, then the lexicographically smaller lookup name. Intents
are scored by idf-weighted Jaccard overlap between the slot-abstracted
utterance and each trained skeleton; unknown words degrade the score but
never veto a match.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..datagen.tokenizer import tokenize_with_spans
from .model import NluModel, Pattern, placeholder


@dataclass(frozen=True)
class Entity:
    entity: str  # lookup name
    role: str | None
    value: str  # canonical form
    raw: str  # matched surface text
    char_span: tuple[int, int]


@dataclass(frozen=True)
class IntentResult:
    intent_id: str
    confidence: float
    entities: tuple[Entity, ...] = ()


@dataclass(frozen=True)
class NoMatch:
    best_intent: str | None = None
    best_score: float = 0.0


@dataclass(frozen=True)
class _Match:
    stem: str
    canonical: str
    token_start: int
    token_end: int
    char_span: tuple[int, int]


def _scan_gazetteer(model: NluModel, spans) -> list[_Match]:
    tokens = [t for t, _, _ in spans]
    matches: list[_Match] = []
    i = 0
    n = len(tokens)
    while i < n:
        found = None
        for length in range(min(model._max_variant_len, n - i), 0, -1):
            options = model.gazetteer.get(tuple(tokens[i:i + length]))
            if options:
                stem, canonical = options[0]
                found = _Match(stem=stem, canonical=canonical, token_start=i,
                               token_end=i + length,
                               char_span=(spans[i][1], spans[i + length - 1][2]))
                break
        if found is None:
            i += 1
        else:
            matches.append(found)
            i = found.token_end
    return matches


def _abstract(tokens: list[str], matches: list[_Match]) -> tuple[str, ...]:
    out: list[str] = []
    starts = {m.token_start: m for m in matches}
    i = 0
    while i < len(tokens):
        m = starts.get(i)
        if m is not None:
            out.append(placeholder(m.stem))
            i = m.token_end
        else:
            out.append(tokens[i])
            i += 1
    return tuple(out)


def _weighted_jaccard(model: NluModel, a: frozenset, b: frozenset) -> float:
    union = a | b
    if not union:
        return 0.0
    inter = a & b
    num = sum(model.idf_weight(t) for t in inter)
    den = sum(model.idf_weight(t) for t in union)
    return num / den


def parse(model: NluModel, text: str):
    """Returns an IntentResult, or NoMatch when no pattern scores above threshold."""
    spans = tokenize_with_spans(text)
    tokens = [t for t, _, _ in spans]
    matches = _scan_gazetteer(model, spans)
    abstracted = _abstract(tokens, matches)
    utterance_set = frozenset(abstracted)
    utterance_mass = sum(model.idf_weight(t) for t in utterance_set)

    best: tuple | None = None  # sort key; smaller is better
    best_pattern: Pattern | None = None
    for pattern, pattern_set, pattern_mass in model._scored_patterns:
        inter = utterance_set & pattern_set
        inter_mass = sum(model.idf_weight(t) for t in inter)
        union_mass = utterance_mass + pattern_mass - inter_mass
        s = inter_mass / union_mass if union_mass else 0.0
        key = (-s, pattern.tokens != abstracted, pattern.intent_id, pattern.tokens)
        if best is None or key < best:
            best = key
            best_pattern = pattern
    if best_pattern is None:
        return NoMatch()
    score = -best[0]
    if score <= model.threshold:
        return NoMatch(best_intent=best_pattern.intent_id, best_score=score)

    entities = _assign_roles(text, best_pattern, matches)
    return IntentResult(intent_id=best_pattern.intent_id, confidence=score,
                        entities=entities)


def result_to_dict(result) -> dict:
    if isinstance(result, IntentResult):
        return {
            "matched": True,
            "intent_id": result.intent_id,
            "confidence": result.confidence,
            "entities": [
                {"entity": e.entity, "role": e.role, "value": e.value,
                 "raw": e.raw, "span": list(e.char_span)}
                for e in result.entities
            ],
        }
    return {"matched": False, "best_intent": result.best_intent,
            "best_score": result.best_score}


def result_from_dict(doc: dict):
    if not doc.get("matched"):
        return NoMatch(best_intent=doc.get("best_intent"),
                       best_score=doc.get("best_score", 0.0))
    return IntentResult(
        intent_id=doc["intent_id"],
        confidence=doc["confidence"],
        entities=tuple(
            Entity(entity=e["entity"], role=e.get("role"), value=e["value"],
                   raw=e.get("raw", ""), char_span=tuple(e.get("span", (0, 0))))
            for e in doc.get("entities", ())
        ),
    )


def _assign_roles(text: str, pattern: Pattern, matches: list[_Match]) -> tuple[Entity, ...]:
    # Placeholder roles in pattern order, grouped per stem.
    role_queues: dict[str, list] = {}
    role_idx = 0
    for token in pattern.tokens:
        if token.startswith("<") and token.endswith(">"):
            stem = token[1:-1]
            role_queues.setdefault(stem, []).append(pattern.roles[role_idx]
                                                    if role_idx < len(pattern.roles) else None)
            role_idx += 1
    entities = []
    for m in matches:
        queue = role_queues.get(m.stem)
        role = queue.pop(0) if queue else None
        entities.append(Entity(entity=m.stem, role=role, value=m.canonical,
                               raw=text[m.char_span[0]:m.char_span[1]],
                               char_span=m.char_span))
    return tuple(entities)
