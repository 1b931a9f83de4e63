"""Skill SDK: the small library an action script talks to the assistant with.

    from corvid.runtime.sdk import Assistant

    assist = Assistant()

    def callback_book(msg):
        locs = assist.extract_entities(msg, "myskill-book_flight")
        ...
        assist.publish_answer("ok boss", msg["satellite"])

    assist.add_topic_callback("book_flight", callback_book)
    assist.run()

Callback registration fails fast when the topic is not declared in the
skill's manifest; the bus would refuse it anyway, but a skill should learn
about the missing grant before any message flows.
"""

from __future__ import annotations

import os
import threading

from .. import system
from ..bus import ClientSession, Payload, PermissionDeniedError, as_topic

ENV_MANIFEST = "CORVID_MANIFEST"


class Assistant:
    def __init__(self, session: ClientSession | None = None,
                 manifest_name: str | None = None):
        self.session = session if session is not None else ClientSession.from_env()
        self.manifest_name = (manifest_name
                              or os.environ.get(ENV_MANIFEST)
                              or "config.yaml")
        self._callbacks: dict[str, list] = {}
        self._callbacks_lock = threading.Lock()
        self._local = threading.local()
        self._stopped = threading.Event()

    def add_topic_callback(self, topic: str, callback):
        name = as_topic(topic).render()
        if not self.session.may_read(as_topic(topic)):
            raise PermissionDeniedError(
                "topic %r is not listed under topics_read in %s"
                % (name, self.manifest_name))
        with self._callbacks_lock:
            callbacks = self._callbacks.setdefault(name, [])
            callbacks.append(callback)
            first = len(callbacks) == 1
        if first:
            self.session.subscribe(name, lambda payload, _t=name: self._dispatch(_t, payload))

    def _dispatch(self, topic: str, payload: Payload):
        msg = {
            "topic": topic,
            "intent_id": payload.body.get("intent_id", ""),
            "entities": list(payload.body.get("entities", [])),
            "satellite": payload.satellite,
            "session_id": payload.session_id,
        }
        self._local.msg = msg
        try:
            with self._callbacks_lock:
                callbacks = list(self._callbacks.get(topic, ()))
            for callback in callbacks:
                callback(msg)
        finally:
            self._local.msg = None

    @staticmethod
    def extract_entities(msg: dict, intent_id: str) -> list[dict]:
        """Entities of the message when it carries the given intent, else []."""
        if msg.get("intent_id") != intent_id:
            return []
        return list(msg.get("entities", []))

    def publish_answer(self, text: str, satellite: str):
        msg = getattr(self._local, "msg", None)
        session_id = msg["session_id"] if msg else ""
        self.session.publish(system.SKILL_ANSWER, Payload(
            kind="skill_answer", session_id=session_id, satellite=satellite,
            body={"text": text}))

    def run(self):
        """Block serving callbacks until stop() is called."""
        try:
            self._stopped.wait()
        finally:
            self.session.close()

    def stop(self):
        self._stopped.set()
