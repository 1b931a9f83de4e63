"""Bus payloads and their canonical serialization.

Payloads are serialized to canonical JSON (sorted keys, compact separators,
UTF-8) before encryption, so equality of payloads is testable byte-wise on
both sides of the wire.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

PAYLOAD_KINDS = frozenset({
    "wake_detected",
    "stt_activate",
    "transcription",
    "intent_result",
    "skill_answer",
    "say_text",
    "audio_chunk",
    "session_end",
})


class PayloadError(ValueError):
    pass


@dataclass(frozen=True)
class Payload:
    kind: str
    session_id: str = ""
    satellite: str = ""
    body: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in PAYLOAD_KINDS:
            raise PayloadError("unknown payload kind %r" % self.kind)
        if not isinstance(self.body, dict):
            raise PayloadError("body must be a mapping")

    def to_canonical_bytes(self) -> bytes:
        doc = {
            "body": self.body,
            "kind": self.kind,
            "satellite": self.satellite,
            "session_id": self.session_id,
        }
        try:
            text = json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
        except (TypeError, ValueError) as exc:
            raise PayloadError("payload body is not JSON-serializable: %s" % exc) from exc
        return text.encode("utf-8")

    @classmethod
    def from_canonical_bytes(cls, raw: bytes) -> "Payload":
        try:
            doc = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise PayloadError("malformed payload bytes: %s" % exc) from exc
        if not isinstance(doc, dict):
            raise PayloadError("payload must decode to a mapping")
        missing = {"kind", "session_id", "satellite", "body"} - set(doc)
        if missing:
            raise PayloadError("payload missing fields: %s" % sorted(missing))
        return cls(
            kind=doc["kind"],
            session_id=doc["session_id"],
            satellite=doc["satellite"],
            body=doc["body"],
        )
