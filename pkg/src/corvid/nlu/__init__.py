"""Intent classification and slot extraction."""

from .evaluate import EvalReport, LabeledUtterance, NO_INTENT, evaluate
from .model import (
    DEFAULT_THRESHOLD,
    NLU_MAGIC,
    NluError,
    NluModel,
    Pattern,
    load_nlu,
    placeholder,
    save_nlu,
    skeleton_of,
    train_nlu,
)
from .parse import Entity, IntentResult, NoMatch, parse, result_from_dict, result_to_dict

__all__ = [
    "EvalReport",
    "LabeledUtterance",
    "NO_INTENT",
    "evaluate",
    "DEFAULT_THRESHOLD",
    "NLU_MAGIC",
    "NluError",
    "NluModel",
    "Pattern",
    "load_nlu",
    "placeholder",
    "save_nlu",
    "skeleton_of",
    "train_nlu",
    "Entity",
    "IntentResult",
    "NoMatch",
    "parse",
    "result_from_dict",
    "result_to_dict",
]
