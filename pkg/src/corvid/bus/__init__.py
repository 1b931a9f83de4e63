"""Encrypted topic-based publish/subscribe plane.

All inter-module traffic flows through here: the broker routes sealed
envelopes by topic, and key distribution enforces the manifest-declared
read/write grants.
"""

from .broker import Broker, BrokerConfig, BrokerTap, ENV_BUS_ADDR, broker_start
from .client import ClientSession, SubscriptionHandle, MAX_PAYLOAD_BYTES
from .crypto import (
    AuthenticationError,
    CryptoError,
    KeyIdMismatchError,
    NonceReuseError,
    TopicKey,
    open_envelope,
    seal,
)
from .errors import (
    AddressInUseError,
    BusError,
    ConfigError,
    DuplicateClientError,
    NotConnectedError,
    PayloadTooLargeError,
    PermissionDeniedError,
    RequestTimeoutError,
)
from .payload import Payload, PayloadError, PAYLOAD_KINDS
from .topics import WILDCARD, TopicError, TopicName, as_topic
from .wire import Envelope

__all__ = [
    "Broker",
    "BrokerConfig",
    "BrokerTap",
    "ENV_BUS_ADDR",
    "broker_start",
    "register_client",
    "ClientSession",
    "SubscriptionHandle",
    "MAX_PAYLOAD_BYTES",
    "TopicKey",
    "seal",
    "open_envelope",
    "AuthenticationError",
    "CryptoError",
    "KeyIdMismatchError",
    "NonceReuseError",
    "AddressInUseError",
    "BusError",
    "ConfigError",
    "DuplicateClientError",
    "NotConnectedError",
    "PayloadTooLargeError",
    "PermissionDeniedError",
    "RequestTimeoutError",
    "Payload",
    "PayloadError",
    "PAYLOAD_KINDS",
    "WILDCARD",
    "TopicError",
    "TopicName",
    "as_topic",
    "Envelope",
]


def register_client(broker: Broker, client_id: str, read=(), write=()) -> ClientSession:
    """Trusted-side helper: authorize grants on the broker and connect.

    Skill processes never call this; they connect with a token minted at
    install time (see runtime.host).
    """
    token = broker.authorize(client_id, set(read), set(write))
    return ClientSession.connect(broker.address, client_id, token)
