"""Template expansion: turn intent templates into concrete training sentences.

Each sentence template expands to the Cartesian product of its alternation
branches and the lookup variants of its slots. Combinations are addressable
by index (mixed radix over the template tree), which makes capped expansion
a uniform, seeded, repeatable sample of distinct combinations.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..dsl.ast import Alternation, Literal, LookupTable, SkillBundle, Slot
from .errors import DatagenError
from .tokenizer import tokenize

DEFAULT_MAX_PER_SENTENCE = 1000


@dataclass(frozen=True)
class Annotation:
    entity: str  # lookup stem
    role: str | None
    canonical: str
    start: int  # token index, inclusive
    end: int  # token index, exclusive


@dataclass(frozen=True)
class TrainingExample:
    tokens: tuple[str, ...]
    intent_id: str
    annotations: tuple[Annotation, ...] = ()

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


def count_expansions(sequence, lookups: dict[str, LookupTable]) -> int:
    """Size of the full Cartesian expansion of one sentence template."""
    total = 1
    for node in sequence:
        total *= _node_count(node, lookups)
    return total


def _node_count(node, lookups) -> int:
    if isinstance(node, Literal):
        return 1
    if isinstance(node, Slot):
        table = lookups.get(node.stem)
        if table is None:
            raise DatagenError("slot references unknown lookup %r" % node.stem)
        n = len(table.all_variants())
        if n == 0:
            raise DatagenError("slot references empty lookup %r" % node.stem)
        return n
    if isinstance(node, Alternation):
        return sum(count_expansions(branch, lookups) for branch in node.branches)
    raise TypeError("not a template node: %r" % (node,))


def realize(sequence, index: int, lookups: dict[str, LookupTable]):
    """Materialize combination `index` as (tokens, annotations)."""
    tokens: list[str] = []
    annotations: list[Annotation] = []
    rest = _realize_seq(sequence, index, lookups, tokens, annotations)
    if rest != 0:
        raise DatagenError("expansion index %d out of range" % index)
    return tokens, annotations


def _realize_seq(sequence, index, lookups, tokens, annotations) -> int:
    for node in sequence:
        radix = _node_count(node, lookups)
        sub = index % radix
        index //= radix
        _realize_node(node, sub, lookups, tokens, annotations)
    return index


def _realize_node(node, sub, lookups, tokens, annotations):
    if isinstance(node, Literal):
        tokens.extend(tokenize(node.text))
        return
    if isinstance(node, Slot):
        table = lookups[node.stem]
        variant = table.all_variants()[sub]
        vtokens = tokenize(variant)
        start = len(tokens)
        tokens.extend(vtokens)
        annotations.append(Annotation(
            entity=node.stem,
            role=node.role,
            canonical=table.canonical_for(variant),
            start=start,
            end=len(tokens),
        ))
        return
    # Alternation: pick the branch whose index range contains sub.
    for branch in node.branches:
        branch_count = count_expansions(branch, lookups)
        if sub < branch_count:
            leftover = _realize_seq(branch, sub, lookups, tokens, annotations)
            assert leftover == 0
            return
        sub -= branch_count
    raise DatagenError("alternation index out of range")


def expand_sentence(sentence, intent_id: str, lookups: dict[str, LookupTable],
                    max_per_sentence: int, rng_key: str) -> list[TrainingExample]:
    total = count_expansions(sentence, lookups)
    if total <= max_per_sentence:
        indices = range(total)
    else:
        rng = random.Random(rng_key)
        indices = sorted(rng.sample(range(total), max_per_sentence))
    out = []
    for idx in indices:
        tokens, annotations = realize(sentence, idx, lookups)
        out.append(TrainingExample(tokens=tuple(tokens), intent_id=intent_id,
                                   annotations=tuple(annotations)))
    return out


def expand(bundle: SkillBundle, max_per_sentence: int = DEFAULT_MAX_PER_SENTENCE,
           seed: int = 0) -> list[TrainingExample]:
    if max_per_sentence < 1:
        raise DatagenError("max_per_sentence must be >= 1")
    examples: list[TrainingExample] = []
    for intent in bundle.intents:
        for s_idx, sentence in enumerate(intent.sentences):
            key = "%d:%s:%d" % (seed, intent.intent_id, s_idx)
            examples.extend(expand_sentence(sentence, intent.intent_id, bundle.lookups,
                                            max_per_sentence, key))
    return examples
