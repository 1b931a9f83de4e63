"""Wire format: framed envelopes and control messages.

Every frame on a bus connection is a 4-byte big-endian length followed by a
JSON map (canonical: sorted keys, UTF-8). Envelopes carry their bytes fields
(nonce, ciphertext) base64-encoded. Control messages are distinguished from
envelopes by the presence of an "op" key; an envelope never has one.
"""

from __future__ import annotations

import base64
import json
import socket
import struct
from dataclasses import dataclass

from .topics import TopicName, as_topic

MAX_FRAME_BYTES = 4 * 1024 * 1024  # generous; payloads are capped much lower


class WireError(Exception):
    pass


class ConnectionClosed(WireError):
    pass


@dataclass(frozen=True)
class Envelope:
    topic: TopicName
    key_id: int
    nonce: bytes
    ciphertext: bytes
    sender: str
    timestamp: int  # milliseconds since epoch

    def to_map(self) -> dict:
        return {
            "ciphertext": base64.b64encode(self.ciphertext).decode("ascii"),
            "key_id": self.key_id,
            "nonce": base64.b64encode(self.nonce).decode("ascii"),
            "sender": self.sender,
            "timestamp": self.timestamp,
            "topic": self.topic.render(),
        }

    @classmethod
    def from_map(cls, doc: dict) -> "Envelope":
        try:
            return cls(
                topic=as_topic(doc["topic"]),
                key_id=int(doc["key_id"]),
                nonce=base64.b64decode(doc["nonce"]),
                ciphertext=base64.b64decode(doc["ciphertext"]),
                sender=doc["sender"],
                timestamp=int(doc["timestamp"]),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise WireError("malformed envelope map: %s" % exc) from exc


def encode_frame(doc: dict) -> bytes:
    body = json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")
    if len(body) > MAX_FRAME_BYTES:
        raise WireError("frame exceeds %d bytes" % MAX_FRAME_BYTES)
    return struct.pack(">I", len(body)) + body


def read_frame(sock: socket.socket) -> dict:
    header = _read_exact(sock, 4)
    (length,) = struct.unpack(">I", header)
    if length > MAX_FRAME_BYTES:
        raise WireError("incoming frame of %d bytes exceeds limit" % length)
    body = _read_exact(sock, length)
    try:
        doc = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise WireError("malformed frame body: %s" % exc) from exc
    if not isinstance(doc, dict):
        raise WireError("frame body must be a JSON map")
    return doc


def is_control(doc: dict) -> bool:
    return "op" in doc


def _read_exact(sock: socket.socket, n: int) -> bytes:
    chunks = []
    remaining = n
    while remaining > 0:
        chunk = sock.recv(remaining)
        if not chunk:
            raise ConnectionClosed("peer closed the connection")
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)
