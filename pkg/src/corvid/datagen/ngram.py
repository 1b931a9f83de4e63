"""N-gram language model with absolute-discount smoothing.

The model stores raw successor counts for every context length up to
order-1 and interpolates discounted estimates down to a uniform base over
the vocabulary plus one unknown slot, so every sentence gets a finite score
and every successor distribution sums to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DatagenError
from .tokenizer import tokenize

BOS = "<s>"
EOS = "</s>"
DEFAULT_DISCOUNT = 0.75
MAX_ORDER = 5


@dataclass
class NgramModel:
    order: int
    counts: dict  # context tuple -> {token: count}
    vocabulary: frozenset[str]  # includes EOS, never BOS
    discount: float = DEFAULT_DISCOUNT
    _stats: dict = field(default=None, repr=False, compare=False)

    def context_stats(self, ctx: tuple) -> tuple[int, int]:
        """(total count, distinct successors) for a context."""
        if self._stats is None:
            self._stats = {}
        hit = self._stats.get(ctx)
        if hit is None:
            dist = self.counts.get(ctx)
            hit = (sum(dist.values()), len(dist)) if dist else (0, 0)
            self._stats[ctx] = hit
        return hit


def build_lm(examples, order: int) -> NgramModel:
    if not 1 <= order <= MAX_ORDER:
        raise DatagenError("order must be between 1 and %d, got %r" % (MAX_ORDER, order))
    examples = list(examples)
    if not examples:
        raise DatagenError("cannot build a language model from zero examples")

    counts: dict[tuple, dict[str, int]] = {}
    vocabulary: set[str] = set()
    for example in examples:
        tokens = list(example.tokens) if hasattr(example, "tokens") else list(example)
        vocabulary.update(tokens)
        seq = [BOS] * (order - 1) + tokens + [EOS]
        for i in range(order - 1, len(seq)):
            token = seq[i]
            for k in range(order):
                ctx = tuple(seq[i - k:i])
                counts.setdefault(ctx, {}).setdefault(token, 0)
                counts[ctx][token] += 1
    vocabulary.add(EOS)
    return NgramModel(order=order, counts=counts, vocabulary=frozenset(vocabulary))


def probability(model: NgramModel, token: str, context: tuple) -> float:
    """P(token | context); contexts longer than order-1 use their tail."""
    ctx = tuple(context)[-(model.order - 1):] if model.order > 1 else ()
    return _prob(model, token, ctx)


def _prob(model: NgramModel, token: str, ctx: tuple) -> float:
    base = 1.0 / (len(model.vocabulary) + 1)
    if not ctx:
        total, distinct = model.context_stats(())
        if total == 0:
            return base
        count = model.counts[()].get(token, 0)
        lam = model.discount * distinct / total
        return max(count - model.discount, 0.0) / total + lam * base
    total, distinct = model.context_stats(ctx)
    if total == 0:
        return _prob(model, token, ctx[1:])
    count = model.counts[ctx].get(token, 0)
    lam = model.discount * distinct / total
    return max(count - model.discount, 0.0) / total + lam * _prob(model, token, ctx[1:])


def score(model: NgramModel, sentence) -> float:
    """Log-probability of a sentence (text or token sequence); always finite."""
    tokens = tokenize(sentence) if isinstance(sentence, str) else list(sentence)
    seq = [BOS] * (model.order - 1) + tokens + [EOS]
    logp = 0.0
    for i in range(model.order - 1, len(seq)):
        ctx = tuple(seq[max(0, i - model.order + 1):i])
        logp += math.log(_prob(model, seq[i], ctx))
    return logp
