"""Training-data generation: template expansion + n-gram LM for rescoring."""

from .errors import DatagenError
from .expand import (
    Annotation,
    DEFAULT_MAX_PER_SENTENCE,
    TrainingExample,
    count_expansions,
    expand,
    expand_sentence,
    realize,
)
from .io import (
    LM_MAGIC,
    load_lm,
    read_examples_jsonl,
    save_lm,
    write_examples_jsonl,
)
from .ngram import BOS, EOS, NgramModel, build_lm, probability, score
from .rescore import RankedCandidate, choose_transcription, rescore_candidates
from .tokenizer import tokenize, tokenize_with_spans

__all__ = [
    "DatagenError",
    "Annotation",
    "DEFAULT_MAX_PER_SENTENCE",
    "TrainingExample",
    "count_expansions",
    "expand",
    "expand_sentence",
    "realize",
    "LM_MAGIC",
    "load_lm",
    "read_examples_jsonl",
    "save_lm",
    "write_examples_jsonl",
    "BOS",
    "EOS",
    "NgramModel",
    "build_lm",
    "probability",
    "score",
    "RankedCandidate",
    "choose_transcription",
    "rescore_candidates",
    "tokenize",
    "tokenize_with_spans",
]
