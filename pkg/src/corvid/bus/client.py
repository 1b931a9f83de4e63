"""Client session: the one object every module uses to talk on the bus.

A session holds exactly the topic keys it was granted. Publishing seals
payloads locally with a fresh random nonce; received envelopes are decrypted
locally and dispatched to handlers on a single callback thread, so handlers
for one client never run concurrently with each other.
"""

from __future__ import annotations

import base64
import itertools
import logging
import os
import queue
import socket
import threading
import time
from dataclasses import dataclass, field

from . import wire
from .crypto import CryptoError, TopicKey, open_envelope, seal
from .errors import (
    BusError,
    DuplicateClientError,
    NotConnectedError,
    PayloadTooLargeError,
    PermissionDeniedError,
    RequestTimeoutError,
)
from .broker import parse_address
from .payload import Payload
from .topics import WILDCARD, TopicName, as_topic

logger = logging.getLogger(__name__)

MAX_PAYLOAD_BYTES = 1024 * 1024
REQUEST_TIMEOUT = 10.0

ENV_CLIENT_ID = "CORVID_CLIENT_ID"
ENV_CLIENT_TOKEN = "CORVID_CLIENT_TOKEN"

_ERROR_MAP = {
    "permission-denied": PermissionDeniedError,
    "duplicate-client": DuplicateClientError,
}


@dataclass(frozen=True)
class SubscriptionHandle:
    topic: TopicName
    session: "ClientSession" = field(repr=False, compare=False)


class ClientSession:
    def __init__(self, sock: socket.socket, client_id: str):
        self.client_id = client_id
        self._sock = sock
        self._send_lock = threading.Lock()
        self._req_ids = itertools.count(1)
        self._pending: dict[int, queue.SimpleQueue] = {}
        self._pending_lock = threading.Lock()
        self._keys: dict[tuple[str, int], TopicKey] = {}
        self._current_key_id: dict[str, int] = {}
        self._keys_lock = threading.Lock()
        self.readable: frozenset[str] = frozenset()
        self.writable: frozenset[str] = frozenset()
        self._handlers: dict[str, list] = {}
        self._handles: dict[str, SubscriptionHandle] = {}
        self._handlers_lock = threading.Lock()
        self._inbox: queue.SimpleQueue = queue.SimpleQueue()
        self._closed = False
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._dispatcher = threading.Thread(target=self._dispatch_loop, daemon=True)

    # -- connection -----------------------------------------------------

    @classmethod
    def connect(cls, address: str, client_id: str, token: str,
                timeout: float = REQUEST_TIMEOUT) -> "ClientSession":
        host, port = parse_address(address)
        try:
            sock = socket.create_connection((host, port), timeout=timeout)
        except OSError as exc:
            raise NotConnectedError("cannot reach bus at %s: %s" % (address, exc)) from exc
        sock.settimeout(None)
        sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        session = cls(sock, client_id)
        session._reader.start()
        session._dispatcher.start()
        try:
            reply = session._request({"op": "register", "client_id": client_id, "token": token},
                                     timeout=timeout)
        except BusError:
            session.close()
            raise
        session.readable = frozenset(reply.get("read", []))
        session.writable = frozenset(reply.get("write", []))
        for entry in reply.get("keys", []):
            session._store_key(entry)
        return session

    @classmethod
    def from_env(cls, environ=None) -> "ClientSession":
        """Connect using the credentials the skill runtime injects."""
        env = environ if environ is not None else os.environ
        from .broker import ENV_BUS_ADDR
        missing = [k for k in (ENV_BUS_ADDR, ENV_CLIENT_ID, ENV_CLIENT_TOKEN) if not env.get(k)]
        if missing:
            raise NotConnectedError("missing environment: %s" % ", ".join(missing))
        return cls.connect(env[ENV_BUS_ADDR], env[ENV_CLIENT_ID], env[ENV_CLIENT_TOKEN])

    def close(self):
        if self._closed:
            return
        self._closed = True
        try:
            self._sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self._sock.close()
        self._inbox.put(None)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # -- grants ---------------------------------------------------------

    def may_read(self, topic: TopicName) -> bool:
        return WILDCARD in self.readable or topic.render() in self.readable

    def may_write(self, topic: TopicName) -> bool:
        return WILDCARD in self.writable or topic.render() in self.writable

    def held_keys(self) -> dict[str, TopicKey]:
        """Current key per topic this session actually holds."""
        with self._keys_lock:
            return {
                t: self._keys[(t, kid)]
                for t, kid in self._current_key_id.items()
            }

    # -- publish / subscribe ---------------------------------------------

    def publish(self, topic, payload: Payload):
        topic = as_topic(topic)
        if not self.may_write(topic):
            raise PermissionDeniedError(
                "client %r may not write topic %s (topics_write: %s)"
                % (self.client_id, topic, sorted(self.writable)))
        raw = payload.to_canonical_bytes()
        if len(raw) > MAX_PAYLOAD_BYTES:
            raise PayloadTooLargeError("payload is %d bytes, limit %d" % (len(raw), MAX_PAYLOAD_BYTES))
        key = self._key_for(topic)
        env = seal(key, payload, nonce=os.urandom(12), sender=self.client_id,
                   timestamp=int(time.time() * 1000))
        self._send(env.to_map())

    def subscribe(self, topic, handler) -> SubscriptionHandle:
        topic = as_topic(topic)
        rendered = topic.render()
        if not self.may_read(topic):
            raise PermissionDeniedError(
                "client %r may not read topic %s (topics_read: %s)"
                % (self.client_id, topic, sorted(self.readable)))
        with self._handlers_lock:
            known = rendered in self._handles
            if known:
                handle = self._handles[rendered]
                handlers = self._handlers[rendered]
                if handler not in handlers:
                    handlers.append(handler)
                return handle
        reply = self._request({"op": "subscribe", "topic": rendered})
        self._store_key(reply)
        with self._handlers_lock:
            if rendered not in self._handles:
                self._handles[rendered] = SubscriptionHandle(topic=topic, session=self)
                self._handlers[rendered] = []
            if handler not in self._handlers[rendered]:
                self._handlers[rendered].append(handler)
            return self._handles[rendered]

    def unsubscribe(self, handle: SubscriptionHandle):
        rendered = handle.topic.render()
        with self._handlers_lock:
            self._handles.pop(rendered, None)
            self._handlers.pop(rendered, None)
        self._request({"op": "unsubscribe", "topic": rendered})

    # -- internals --------------------------------------------------------

    def _store_key(self, entry: dict):
        topic = as_topic(entry["topic"])
        key = TopicKey(topic=topic, key_bytes=base64.b64decode(entry["key"]),
                       key_id=int(entry["key_id"]))
        with self._keys_lock:
            self._keys[(topic.render(), key.key_id)] = key
            current = self._current_key_id.get(topic.render(), -1)
            if key.key_id >= current:
                self._current_key_id[topic.render()] = key.key_id

    def _key_for(self, topic: TopicName) -> TopicKey:
        rendered = topic.render()
        with self._keys_lock:
            kid = self._current_key_id.get(rendered)
            if kid is not None:
                return self._keys[(rendered, kid)]
        reply = self._request({"op": "need_key", "topic": rendered})
        self._store_key(reply)
        return self._key_for(topic)

    def _lookup_key(self, topic: TopicName, key_id: int) -> TopicKey | None:
        with self._keys_lock:
            return self._keys.get((topic.render(), key_id))

    def _send(self, doc: dict):
        if self._closed:
            raise NotConnectedError("session is closed")
        frame = wire.encode_frame(doc)
        with self._send_lock:
            try:
                self._sock.sendall(frame)
            except OSError as exc:
                raise NotConnectedError("bus connection lost: %s" % exc) from exc

    def _request(self, doc: dict, timeout: float = REQUEST_TIMEOUT) -> dict:
        req_id = next(self._req_ids)
        doc = dict(doc, req_id=req_id)
        slot: queue.SimpleQueue = queue.SimpleQueue()
        with self._pending_lock:
            self._pending[req_id] = slot
        try:
            self._send(doc)
            try:
                reply = slot.get(timeout=timeout)
            except queue.Empty:
                raise RequestTimeoutError("no broker reply to %r within %.1fs" % (doc.get("op"), timeout))
        finally:
            with self._pending_lock:
                self._pending.pop(req_id, None)
        if reply.get("op") == "error":
            exc_type = _ERROR_MAP.get(reply.get("kind"), BusError)
            raise exc_type(reply.get("message", "bus error"))
        return reply

    def _read_loop(self):
        try:
            while True:
                doc = wire.read_frame(self._sock)
                if wire.is_control(doc):
                    self._handle_control(doc)
                else:
                    self._inbox.put(doc)
        except (wire.WireError, OSError):
            pass
        finally:
            self._inbox.put(None)

    def _handle_control(self, doc: dict):
        req_id = doc.get("req_id")
        if req_id is not None:
            with self._pending_lock:
                slot = self._pending.get(req_id)
            if slot is not None:
                slot.put(doc)
            return
        if doc.get("op") == "key":
            self._store_key(doc)
        elif doc.get("op") == "error":
            logger.warning("bus error for %s: %s", self.client_id, doc.get("message"))

    def _dispatch_loop(self):
        while True:
            doc = self._inbox.get()
            if doc is None:
                return
            try:
                env = wire.Envelope.from_map(doc)
            except wire.WireError as exc:
                logger.warning("dropping malformed envelope: %s", exc)
                continue
            key = self._lookup_key(env.topic, env.key_id)
            if key is None:
                # Rotation raced delivery; fetch the keyring entry once.
                try:
                    reply = self._request({"op": "need_key", "topic": env.topic.render()})
                    self._store_key(reply)
                except BusError:
                    pass
                key = self._lookup_key(env.topic, env.key_id)
            if key is None:
                logger.warning("no key for %s#%d, dropping", env.topic, env.key_id)
                continue
            try:
                payload = open_envelope(key, env)
            except CryptoError as exc:
                logger.warning("cannot open envelope on %s: %s", env.topic, exc)
                continue
            with self._handlers_lock:
                handlers = list(self._handlers.get(env.topic.render(), ()))
            for handler in handlers:
                try:
                    handler(payload)
                except Exception:
                    logger.exception("handler for %s raised", env.topic)
