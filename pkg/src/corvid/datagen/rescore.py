"""Re-rank transcription candidates with the skill-conditioned LM.

combined = acoustic + alpha * lm + beta * token_count. Sorting is stable,
so candidates with equal combined scores keep their input order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DatagenError
from .ngram import NgramModel, score
from .tokenizer import tokenize


@dataclass(frozen=True)
class RankedCandidate:
    text: str
    acoustic_score: float
    lm_score: float
    combined: float


def rescore_candidates(model: NgramModel, candidates, alpha: float = 1.0,
                       beta: float = 0.0) -> list[RankedCandidate]:
    candidates = list(candidates)
    if not candidates:
        raise DatagenError("no candidates to rescore")
    scored = []
    for text, acoustic in candidates:
        lm = score(model, text)
        combined = acoustic + alpha * lm + beta * len(tokenize(text))
        scored.append(RankedCandidate(text=text, acoustic_score=acoustic,
                                      lm_score=lm, combined=combined))
    return sorted(scored, key=lambda c: c.combined, reverse=True)


def choose_transcription(model: NgramModel, candidates, alpha: float = 1.0,
                         beta: float = 0.0) -> str:
    return rescore_candidates(model, candidates, alpha=alpha, beta=beta)[0].text
