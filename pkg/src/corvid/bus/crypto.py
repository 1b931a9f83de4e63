"""Per-topic authenticated encryption.

Each topic gets a 32-byte symmetric key (ChaCha20-Poly1305). The topic name
and key id are bound into the AEAD associated data, so an envelope replayed
under a different topic or key generation fails authentication instead of
decrypting to garbage.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import ChaCha20Poly1305

from .payload import Payload
from .topics import TopicName
from .wire import Envelope

KEY_BYTES = 32
NONCE_BYTES = 12


class CryptoError(Exception):
    pass


class AuthenticationError(CryptoError):
    """Ciphertext failed tag verification (wrong key, tampering, wrong topic)."""


class NonceReuseError(CryptoError):
    pass


class KeyIdMismatchError(CryptoError):
    pass


@dataclass
class TopicKey:
    topic: TopicName
    key_bytes: bytes
    key_id: int
    # Nonces this key instance has sealed with; reuse is refused. Tracked
    # per holder -- cross-holder uniqueness comes from random nonces.
    _sealed_nonces: set = field(default_factory=set, repr=False, compare=False)

    def __post_init__(self):
        if len(self.key_bytes) != KEY_BYTES:
            raise CryptoError("topic key must be %d bytes, got %d" % (KEY_BYTES, len(self.key_bytes)))
        if self.key_id < 0:
            raise CryptoError("key_id must be non-negative")

    def _aad(self) -> bytes:
        return ("%s|%d" % (self.topic.render(), self.key_id)).encode("utf-8")


def seal(key: TopicKey, payload: Payload, nonce: bytes, sender: str = "", timestamp: int = 0) -> Envelope:
    if len(nonce) != NONCE_BYTES:
        raise CryptoError("nonce must be %d bytes, got %d" % (NONCE_BYTES, len(nonce)))
    if nonce in key._sealed_nonces:
        raise NonceReuseError("nonce reused under (%s, key_id=%d)" % (key.topic, key.key_id))
    plaintext = payload.to_canonical_bytes()
    cipher = ChaCha20Poly1305(key.key_bytes)
    ciphertext = cipher.encrypt(nonce, plaintext, key._aad())
    key._sealed_nonces.add(nonce)
    return Envelope(
        topic=key.topic,
        key_id=key.key_id,
        nonce=nonce,
        ciphertext=ciphertext,
        sender=sender,
        timestamp=timestamp,
    )


def open_envelope(key: TopicKey, env: Envelope) -> Payload:
    if env.key_id != key.key_id:
        raise KeyIdMismatchError(
            "envelope sealed under key_id %d, holder has %d for %s" % (env.key_id, key.key_id, key.topic)
        )
    cipher = ChaCha20Poly1305(key.key_bytes)
    try:
        plaintext = cipher.decrypt(env.nonce, env.ciphertext, key._aad())
    except InvalidTag as exc:
        raise AuthenticationError("envelope on %s failed authentication" % env.topic) from exc
    return Payload.from_canonical_bytes(plaintext)
