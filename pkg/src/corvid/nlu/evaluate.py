"""Accuracy metrics: an utterance is fully correct only when the intent and
every expected slot (entity, role, canonical value) match exactly."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .model import NluError, NluModel
from .parse import IntentResult, parse

NO_INTENT = "<none>"


@dataclass(frozen=True)
class LabeledUtterance:
    text: str
    intent_id: str
    slots: tuple = ()  # (entity, role, canonical value) triples


@dataclass(frozen=True)
class EvalReport:
    total: int
    intent_accuracy: float
    full_accuracy: float
    confusion: dict  # (expected intent, predicted intent) -> count

    def summary(self) -> str:
        lines = [
            "examples:        %d" % self.total,
            "intent_accuracy: %.4f" % self.intent_accuracy,
            "full_accuracy:   %.4f" % self.full_accuracy,
        ]
        wrong = {pair: n for pair, n in sorted(self.confusion.items()) if pair[0] != pair[1]}
        if wrong:
            lines.append("confusions:")
            for (expected, predicted), n in wrong.items():
                lines.append("  %s -> %s: %d" % (expected, predicted, n))
        return "\n".join(lines)


def evaluate(model: NluModel, labeled) -> EvalReport:
    labeled = list(labeled)
    if not labeled:
        raise NluError("evaluation set is empty")
    intent_hits = 0
    full_hits = 0
    confusion: Counter = Counter()
    for item in labeled:
        result = parse(model, item.text)
        predicted = result.intent_id if isinstance(result, IntentResult) else NO_INTENT
        confusion[(item.intent_id, predicted)] += 1
        if predicted != item.intent_id:
            continue
        intent_hits += 1
        got = sorted((e.entity, e.role, e.value) for e in result.entities)
        want = sorted((s[0], s[1], s[2]) for s in item.slots)
        if got == want:
            full_hits += 1
    total = len(labeled)
    return EvalReport(
        total=total,
        intent_accuracy=intent_hits / total,
        full_accuracy=full_hits / total,
        confusion=dict(confusion),
    )
