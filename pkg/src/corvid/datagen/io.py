"""On-disk formats for training artifacts.

nlu_examples.jsonl: one JSON object per training example, sorted keys.
lm.bin: magic "CORVLM1", one order byte, 8-byte big-endian body length,
then a canonical-JSON body (counts keyed by contexts joined with US 0x1f).
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

from .errors import DatagenError
from .expand import Annotation, TrainingExample
from .ngram import NgramModel

LM_MAGIC = b"CORVLM1"
_CTX_SEP = "\x1f"


def example_to_dict(example: TrainingExample) -> dict:
    return {
        "tokens": list(example.tokens),
        "intent_id": example.intent_id,
        "annotations": [
            {"entity": a.entity, "role": a.role, "canonical": a.canonical,
             "start": a.start, "end": a.end}
            for a in example.annotations
        ],
    }


def example_from_dict(doc: dict) -> TrainingExample:
    return TrainingExample(
        tokens=tuple(doc["tokens"]),
        intent_id=doc["intent_id"],
        annotations=tuple(
            Annotation(entity=a["entity"], role=a.get("role"), canonical=a["canonical"],
                       start=a["start"], end=a["end"])
            for a in doc.get("annotations", ())
        ),
    )


def write_examples_jsonl(examples, path):
    lines = [json.dumps(example_to_dict(e), sort_keys=True, ensure_ascii=False)
             for e in examples]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def read_examples_jsonl(path) -> list[TrainingExample]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            out.append(example_from_dict(json.loads(line)))
    return out


def save_lm(model: NgramModel, path):
    body = json.dumps({
        "counts": {_CTX_SEP.join(ctx): dict(sorted(dist.items()))
                   for ctx, dist in sorted(model.counts.items())},
        "discount": model.discount,
        "vocabulary": sorted(model.vocabulary),
    }, sort_keys=True, ensure_ascii=False).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(LM_MAGIC)
        fh.write(struct.pack(">B", model.order))
        fh.write(struct.pack(">Q", len(body)))
        fh.write(body)


def load_lm(path) -> NgramModel:
    raw = Path(path).read_bytes()
    if raw[:len(LM_MAGIC)] != LM_MAGIC:
        raise DatagenError("%s is not a CORVLM1 model file" % path)
    offset = len(LM_MAGIC)
    (order,) = struct.unpack_from(">B", raw, offset)
    offset += 1
    (length,) = struct.unpack_from(">Q", raw, offset)
    offset += 8
    doc = json.loads(raw[offset:offset + length].decode("utf-8"))
    counts = {}
    for ctx_text, dist in doc["counts"].items():
        ctx = tuple(ctx_text.split(_CTX_SEP)) if ctx_text else ()
        counts[ctx] = {tok: int(c) for tok, c in dist.items()}
    return NgramModel(order=order, counts=counts,
                      vocabulary=frozenset(doc["vocabulary"]),
                      discount=float(doc["discount"]))
