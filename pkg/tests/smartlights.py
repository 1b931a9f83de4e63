"""Generated smart-lights corpus: 6 intents over room/color/brightness lookups.

Used by the NLU benchmark and LM rescoring tests. Folds hold out slot
values: the model trains on examples built from four value groups and is
tested on utterances using the fifth, so slot abstraction (not memorized
values) has to carry the accuracy.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from corvid.datagen import TrainingExample, expand
from corvid.dsl import LookupTable, parse_lookup, parse_nlu_md
from corvid.dsl.ast import SkillBundle, SkillManifest
from corvid.nlu import LabeledUtterance

SKILL_NAME = "smart_lights"

ROOMS = [
    "bedroom", "kitchen", "bathroom", "office", "hallway",
    "garage", "basement", "attic", "balcony", "living room",
]
COLORS = ["red", "blue", "green", "yellow", "white", "purple", "orange", "pink"]
LEVELS = [
    "ten", "twelve", "twenty", "thirty", "forty", "fifty",
    "sixty", "seventy", "eighty", "ninety",
]

NLU_MD = """\
## lookup:room
room.txt

## lookup:color
color.txt

## lookup:level
level.txt

## intent:switch_light_on
- (could you|can you|) (please|) turn on the (light|lights) in the [bedroom](room.txt) (for me|right now|)
- (please|) switch on the (light|lights) in the [kitchen](room.txt) (for me|now|)
- i can not see anything in the [office](room.txt) (please|) turn the lights on
- i (want|would like) the (light|lights) in the [hallway](room.txt) turned on (please|now|)

## intent:switch_light_off
- (could you|can you|) (please|) turn off the (light|lights) in the [bedroom](room.txt) (for me|right now|)
- (please|) switch off the (light|lights) in the [kitchen](room.txt) (for me|now|)
- i do not need the (light|lights) in the [hallway](room.txt) anymore switch them off (please|)
- i (want|would like) the (light|lights) in the [bedroom](room.txt) turned off (please|now|)

## intent:set_light_color
- (could you|can you|) (please|) change the color of the (light|lights) to [red](color.txt) (for me|now|)
- (please|) set the color of the [office](room.txt) (light|lights) to [green](color.txt) (for me|now|)
- i (want|would like) the (light|lights) in the [kitchen](room.txt) to be [blue](color.txt) (please|now|)

## intent:set_light_brightness
- i (want|would like) the [bedroom](room.txt) lights to be at [twenty](level.txt) percent (please|)
- (could you|can you|) (please|) set the brightness in the [office](room.txt) to [fifty](level.txt) percent
- (please|) dim the (light|lights) in the [kitchen](room.txt) down to [ten](level.txt) percent (for me|)

## intent:increase_brightness
- (could you|can you|) (please|) make the (light|lights) in the [bedroom](room.txt) (a bit|a little|) brighter
- (please|) increase the brightness (of the lights|) in the [office](room.txt) (a little|a bit|)
- turn up the (light|lights) in the [kitchen](room.txt) (a little bit|a touch|) (please|)

## intent:decrease_brightness
- (could you|can you|) (please|) make the (light|lights) in the [bedroom](room.txt) (a bit|a little|) darker
- (please|) lower the brightness (of the lights|) in the [office](room.txt) (a little|a bit|)
- turn down the (light|lights) in the [kitchen](room.txt) (a little bit|a touch|) (please|)
"""

MANIFEST = SkillManifest(
    has_action=False,
    extra_container_flags="",
    needs_internet_access=False,
    topics_read=frozenset(),
    topics_write=frozenset(),
)


def _table(name: str, values) -> LookupTable:
    return parse_lookup(name, "\n".join(values))


def build_bundle(rooms=None, colors=None, levels=None) -> SkillBundle:
    doc = parse_nlu_md(SKILL_NAME, NLU_MD)
    return SkillBundle(
        name=SKILL_NAME,
        manifest=MANIFEST,
        intents=doc.intents,
        lookups={
            "room": _table("room", rooms if rooms is not None else ROOMS),
            "color": _table("color", colors if colors is not None else COLORS),
            "level": _table("level", levels if levels is not None else LEVELS),
        },
    )


def value_groups(values: list[str], n_folds: int = 5) -> list[list[str]]:
    return [values[i::n_folds] for i in range(n_folds)]


@dataclass
class Fold:
    index: int
    train_examples: list[TrainingExample]
    test_labeled: list[LabeledUtterance]


def labeled_from_example(example: TrainingExample) -> LabeledUtterance:
    return LabeledUtterance(
        text=example.text,
        intent_id=example.intent_id,
        slots=tuple((a.entity, a.role, a.canonical) for a in example.annotations),
    )


def build_folds(n_folds: int = 5, seed: int = 13, cap: int = 400) -> tuple[SkillBundle, list[Fold]]:
    """Full bundle (complete gazetteer) plus held-out-value train/test folds."""
    full = build_bundle()
    room_groups = value_groups(ROOMS, n_folds)
    color_groups = value_groups(COLORS, n_folds)
    level_groups = value_groups(LEVELS, n_folds)
    folds = []
    for i in range(n_folds):
        train_bundle = build_bundle(
            rooms=[r for g in range(n_folds) if g != i for r in room_groups[g]],
            colors=[c for g in range(n_folds) if g != i for c in color_groups[g]],
            levels=[v for g in range(n_folds) if g != i for v in level_groups[g]],
        )
        test_bundle = build_bundle(
            rooms=room_groups[i], colors=color_groups[i], levels=level_groups[i])
        train_examples = expand(train_bundle, max_per_sentence=cap, seed=seed + i)
        test_examples = expand(test_bundle, max_per_sentence=cap, seed=seed + 100 + i)
        folds.append(Fold(
            index=i,
            train_examples=train_examples,
            test_labeled=[labeled_from_example(e) for e in test_examples],
        ))
    return full, folds


def corrupt_tokens(tokens, vocab: list[str], rng: random.Random) -> tuple[str, ...]:
    """Replace one random token with a different random vocabulary token."""
    tokens = list(tokens)
    pos = rng.randrange(len(tokens))
    choices = [t for t in vocab if t != tokens[pos]]
    tokens[pos] = rng.choice(choices)
    return tuple(tokens)


def corpus_vocab(examples) -> list[str]:
    vocab = set()
    for e in examples:
        vocab.update(e.tokens)
    return sorted(vocab)


def replacement_vocab(examples, bundle: SkillBundle) -> list[str]:
    """Corruption replacement pool: corpus words minus slot-value tokens.

    Recognition noise garbles carrier words; it does not hallucinate whole
    slot values that were never spoken (spurious values would make the
    utterance unrecoverable for any NLU, which is not what a WER-style
    corruption measures). Destroying a spoken slot token is still possible:
    the corrupted POSITION may be a slot.
    """
    value_tokens = set()
    for table in bundle.lookups.values():
        for variant in table.all_variants():
            value_tokens.update(variant.lower().split())
    return [t for t in corpus_vocab(examples) if t not in value_tokens]
