"""The message broker: framed TCP transport, key authority, grant enforcement.

The broker never hands out key material beyond a client's declared grants.
Encryption happens at the edges; the broker routes sealed envelopes by their
cleartext topic header. A test-only tap captures routed envelopes the way a
network sniffer would.
"""

from __future__ import annotations

import base64
import hashlib
import hmac
import logging
import os
import secrets
import socket
import struct
import threading
from dataclasses import dataclass, field

from . import wire
from .crypto import KEY_BYTES, TopicKey
from .errors import (
    AddressInUseError,
    ConfigError,
    DuplicateClientError,
    PermissionDeniedError,
)
from .topics import WILDCARD, TopicName, as_topic

logger = logging.getLogger(__name__)

DEFAULT_LISTEN = "127.0.0.1:0"
ENV_BUS_ADDR = "CORVID_BUS_ADDR"


def parse_address(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep:
        raise ConfigError("listen address must look like host:port, got %r" % text)
    try:
        return host, int(port)
    except ValueError as exc:
        raise ConfigError("bad port in address %r" % text) from exc


@dataclass
class BrokerConfig:
    listen: str = DEFAULT_LISTEN
    key_seed: bytes | None = None  # None: generate fresh; empty: rejected

    def validate(self):
        parse_address(self.listen)
        if self.key_seed is not None and len(self.key_seed) == 0:
            raise ConfigError("key seed must be non-empty when given")


class KeyAuthority:
    """Derives and rotates per-topic symmetric keys from a master seed."""

    def __init__(self, seed: bytes):
        if not seed:
            raise ConfigError("key authority needs a non-empty seed")
        self._seed = seed
        self._key_ids: dict[str, int] = {}
        self._lock = threading.Lock()

    def _derive(self, topic: TopicName, key_id: int) -> bytes:
        msg = topic.render().encode("utf-8") + b"\x00" + struct.pack(">Q", key_id)
        return hmac.new(self._seed, msg, hashlib.sha256).digest()

    def current(self, topic: TopicName) -> TopicKey:
        with self._lock:
            key_id = self._key_ids.setdefault(topic.render(), 0)
        return TopicKey(topic=topic, key_bytes=self._derive(topic, key_id), key_id=key_id)

    def rotate(self, topic: TopicName) -> TopicKey:
        with self._lock:
            key_id = self._key_ids.get(topic.render(), 0) + 1
            self._key_ids[topic.render()] = key_id
        return TopicKey(topic=topic, key_bytes=self._derive(topic, key_id), key_id=key_id)

    def topic_count(self) -> int:
        with self._lock:
            return len(self._key_ids)


@dataclass
class Grant:
    client_id: str
    readable: frozenset[str]  # rendered topics, may contain "*"
    writable: frozenset[str]
    token: str

    def covers_read(self, topic: TopicName) -> bool:
        return WILDCARD in self.readable or topic.render() in self.readable

    def covers_write(self, topic: TopicName) -> bool:
        return WILDCARD in self.writable or topic.render() in self.writable

    def concrete_topics(self) -> list[TopicName]:
        rendered = sorted((self.readable | self.writable) - {WILDCARD})
        return [as_topic(t) for t in rendered]


class GrantTable:
    def __init__(self):
        self._by_client: dict[str, Grant] = {}
        self._by_token: dict[str, Grant] = {}
        self._lock = threading.Lock()

    def add(self, grant: Grant):
        with self._lock:
            self._by_client[grant.client_id] = grant
            self._by_token[grant.token] = grant

    def by_token(self, token: str) -> Grant | None:
        with self._lock:
            return self._by_token.get(token)

    def by_client(self, client_id: str) -> Grant | None:
        with self._lock:
            return self._by_client.get(client_id)


class BrokerTap:
    """Collects copies of every envelope the broker routes (sniffer stand-in)."""

    def __init__(self):
        self._lock = threading.Lock()
        self._envelopes: list[wire.Envelope] = []

    def record(self, env: wire.Envelope):
        with self._lock:
            self._envelopes.append(env)

    @property
    def envelopes(self) -> list[wire.Envelope]:
        with self._lock:
            return list(self._envelopes)


class _Connection:
    """Server-side view of one client connection."""

    def __init__(self, broker: "Broker", sock: socket.socket):
        self.broker = broker
        self.sock = sock
        self.client_id: str | None = None
        self.grant: Grant | None = None
        self.subscriptions: set[str] = set()
        self._out: list[bytes] | None = []
        self._out_lock = threading.Lock()
        self._out_ready = threading.Condition(self._out_lock)
        self._writer = threading.Thread(target=self._write_loop, daemon=True)
        self._writer.start()

    def enqueue(self, doc: dict):
        frame = wire.encode_frame(doc)
        with self._out_lock:
            if self._out is None:
                return
            self._out.append(frame)
            self._out_ready.notify()

    def _write_loop(self):
        while True:
            with self._out_lock:
                while self._out is not None and not self._out:
                    self._out_ready.wait()
                if self._out is None:
                    return
                batch, self._out = self._out, []
            try:
                self.sock.sendall(b"".join(batch))
            except OSError:
                return

    def close(self):
        with self._out_lock:
            self._out = None
            self._out_ready.notify()
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self.sock.close()


class Broker:
    """Broker handle: owns the listener, key authority, and grant table."""

    def __init__(self, config: BrokerConfig):
        config.validate()
        seed = config.key_seed if config.key_seed is not None else secrets.token_bytes(KEY_BYTES)
        self.keys = KeyAuthority(seed)
        self.grants = GrantTable()
        self._taps: list[BrokerTap] = []
        self._conns: list[_Connection] = []
        self._live_clients: dict[str, _Connection] = {}
        self._route_lock = threading.Lock()
        self._closed = False

        host, port = parse_address(config.listen)
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 0)
        try:
            self._sock.bind((host, port))
        except OSError as exc:
            self._sock.close()
            raise AddressInUseError("cannot bind %s: %s" % (config.listen, exc)) from exc
        self._sock.listen(64)
        self._accept_thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._accept_thread.start()
        logger.info("broker listening on %s", self.address)

    @property
    def address(self) -> str:
        host, port = self._sock.getsockname()[:2]
        return "%s:%d" % (host, port)

    # -- trusted-side API ----------------------------------------------------

    def authorize(self, client_id: str, read: set[str] | set, write: set[str] | set,
                  token: str | None = None) -> str:
        """Pre-register a client's grants; returns the token it must present."""
        if not client_id:
            raise ConfigError("client_id must be non-empty")
        readable = frozenset(self._check_grant_set(read))
        writable = frozenset(self._check_grant_set(write))
        token = token or secrets.token_hex(16)
        self.grants.add(Grant(client_id=client_id, readable=readable, writable=writable, token=token))
        return token

    @staticmethod
    def _check_grant_set(topics) -> set[str]:
        rendered = set()
        for t in topics:
            if t == WILDCARD:
                rendered.add(WILDCARD)
            else:
                rendered.add(as_topic(t).render())
        return rendered

    def rotate_key(self, topic) -> int:
        """Rotate the topic key and push the new material to entitled clients."""
        topic = as_topic(topic)
        new_key = self.keys.rotate(topic)
        with self._route_lock:
            conns = list(self._live_clients.values())
        for conn in conns:
            if conn.grant and (conn.grant.covers_read(topic) or conn.grant.covers_write(topic)):
                conn.enqueue(self._key_message(new_key))
        return new_key.key_id

    def tap(self) -> BrokerTap:
        t = BrokerTap()
        self._taps.append(t)
        return t

    def close(self):
        if self._closed:
            return
        self._closed = True
        try:
            self._sock.close()
        except OSError:
            pass
        with self._route_lock:
            conns = list(self._conns)
        for conn in conns:
            conn.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # -- connection handling ---------------------------------------------

    def _accept_loop(self):
        while not self._closed:
            try:
                sock, _addr = self._sock.accept()
            except OSError:
                return
            sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            conn = _Connection(self, sock)
            with self._route_lock:
                self._conns.append(conn)
            threading.Thread(target=self._serve, args=(conn,), daemon=True).start()

    def _serve(self, conn: _Connection):
        try:
            while True:
                doc = wire.read_frame(conn.sock)
                if wire.is_control(doc):
                    self._handle_control(conn, doc)
                else:
                    self._handle_envelope(conn, doc)
        except (wire.WireError, OSError):
            pass
        finally:
            self._drop(conn)

    def _drop(self, conn: _Connection):
        with self._route_lock:
            if conn in self._conns:
                self._conns.remove(conn)
            if conn.client_id and self._live_clients.get(conn.client_id) is conn:
                del self._live_clients[conn.client_id]
        conn.close()

    def _key_message(self, key: TopicKey, req_id=None) -> dict:
        doc = {
            "op": "key",
            "topic": key.topic.render(),
            "key_id": key.key_id,
            "key": base64.b64encode(key.key_bytes).decode("ascii"),
        }
        if req_id is not None:
            doc["req_id"] = req_id
        return doc

    def _error(self, conn: _Connection, req_id, kind: str, message: str):
        doc = {"op": "error", "kind": kind, "message": message}
        if req_id is not None:
            doc["req_id"] = req_id
        conn.enqueue(doc)

    def _handle_control(self, conn: _Connection, doc: dict):
        op = doc.get("op")
        req_id = doc.get("req_id")
        if op == "register":
            self._handle_register(conn, doc, req_id)
            return
        if conn.grant is None:
            self._error(conn, req_id, "not-registered", "register first")
            return
        if op == "subscribe":
            topic = as_topic(doc["topic"])
            if not conn.grant.covers_read(topic):
                self._error(conn, req_id, "permission-denied",
                            "topic %s not in topics_read of %s" % (topic, conn.client_id))
                return
            with self._route_lock:
                conn.subscriptions.add(topic.render())
            key = self.keys.current(topic)
            ack = self._key_message(key, req_id)
            ack["op"] = "subscribed"
            conn.enqueue(ack)
        elif op == "unsubscribe":
            with self._route_lock:
                conn.subscriptions.discard(as_topic(doc["topic"]).render())
            conn.enqueue({"op": "unsubscribed", "req_id": req_id})
        elif op == "need_key":
            topic = as_topic(doc["topic"])
            if not (conn.grant.covers_read(topic) or conn.grant.covers_write(topic)):
                self._error(conn, req_id, "permission-denied",
                            "topic %s not granted to %s" % (topic, conn.client_id))
                return
            conn.enqueue(self._key_message(self.keys.current(topic), req_id))
        else:
            self._error(conn, req_id, "bad-request", "unknown op %r" % op)

    def _handle_register(self, conn: _Connection, doc: dict, req_id):
        client_id = doc.get("client_id", "")
        token = doc.get("token", "")
        if not client_id:
            self._error(conn, req_id, "bad-request", "client_id must be non-empty")
            return
        grant = self.grants.by_token(token)
        if grant is None or grant.client_id != client_id:
            self._error(conn, req_id, "auth-failed", "unknown client or bad token")
            return
        with self._route_lock:
            if client_id in self._live_clients:
                self._error(conn, req_id, "duplicate-client",
                            "client %r already has a live session" % client_id)
                return
            conn.client_id = client_id
            conn.grant = grant
            self._live_clients[client_id] = conn
        keys = [self._key_message(self.keys.current(t)) for t in grant.concrete_topics()]
        for k in keys:
            k.pop("op", None)
            k.pop("req_id", None)
        conn.enqueue({
            "op": "registered",
            "req_id": req_id,
            "read": sorted(grant.readable),
            "write": sorted(grant.writable),
            "keys": keys,
        })

    def _handle_envelope(self, conn: _Connection, doc: dict):
        try:
            env = wire.Envelope.from_map(doc)
        except wire.WireError as exc:
            self._error(conn, None, "bad-envelope", str(exc))
            return
        if conn.grant is None:
            self._error(conn, None, "not-registered", "register first")
            return
        if not conn.grant.covers_write(env.topic):
            self._error(conn, None, "permission-denied",
                        "client %s may not write %s" % (conn.client_id, env.topic))
            return
        frame_doc = env.to_map()
        rendered = env.topic.render()
        with self._route_lock:
            targets = [c for c in self._conns if rendered in c.subscriptions]
            for tap in self._taps:
                tap.record(env)
            for target in targets:
                target.enqueue(frame_doc)


def broker_start(config: BrokerConfig | None = None) -> Broker:
    """Start a broker; the handle exposes address, key rotation, and taps."""
    return Broker(config or BrokerConfig())
