#!/usr/bin/env python3
"""Walk one skill through the whole training pipeline.

Parses the flight-booking fixture, expands its templates into training
sentences, builds the n-gram LM and the NLU model, then parses a few
utterances and rescores a noisy candidate list.

    python3 demos/skill_pipeline.py
"""

from pathlib import Path

from corvid.datagen import build_lm, expand, rescore_candidates, score
from corvid.dsl import load_bundle, render_template
from corvid.nlu import IntentResult, parse, train_nlu

SKILL = Path(__file__).parent.parent / "tests" / "fixtures" / "skills" / "myskill"


def main():
    print("== 1. load the skill bundle ==")
    bundle = load_bundle(SKILL)
    print("skill:", bundle.name)
    for intent in bundle.intents:
        print("intent:", intent.intent_id)
        for sentence in intent.sentences:
            print("  template:", render_template(sentence))
    for stem, table in bundle.lookups.items():
        print("lookup %r: %s" % (stem, ", ".join(e.canonical for e in table.entries)))

    print("\n== 2. expand templates into training sentences ==")
    examples = expand(bundle, seed=1)
    print("expanded", len(examples), "examples; first three:")
    for example in examples[:3]:
        print("  ", example.text)

    print("\n== 3. build the language model ==")
    lm = build_lm(examples, order=3)
    good = "book me a flight from new york to berlin"
    weird = "berlin flight me from a book to"
    print("score(%r) = %.2f" % (good, score(lm, good)))
    print("score(%r) = %.2f" % (weird, score(lm, weird)))

    print("\n== 4. train the NLU model ==")
    model = train_nlu(examples, [bundle])
    print(len(model.patterns), "patterns; gazetteer of", len(model.gazetteer), "variants")

    print("\n== 5. parse utterances ==")
    for utterance in ("book us a flight from n y to augsburg",
                      "what is the meaning of life"):
        result = parse(model, utterance)
        if isinstance(result, IntentResult):
            slots = ", ".join("%s?%s=%s" % (e.entity, e.role, e.value)
                              for e in result.entities)
            print("%r -> %s (%.2f) [%s]" % (utterance, result.intent_id,
                                            result.confidence, slots))
        else:
            print("%r -> no match" % utterance)

    print("\n== 6. rescore noisy transcription candidates ==")
    candidates = [("book me a fright from berlin to augsburg", -0.8),
                  ("book me a flight from berlin to augsburg", -1.0)]
    ranked = rescore_candidates(lm, candidates, alpha=1.0, beta=0.0)
    for c in ranked:
        print("  %.2f  %s" % (c.combined, c.text))
    print("chosen:", ranked[0].text)


if __name__ == "__main__":
    main()
