"""The dialog manager core.

A pure-ish state machine: every event takes explicit time, every outgoing
message is collected as an effect for the caller to publish, and all timing
flows through tick(). This keeps arbitration and timeout behavior fully
deterministic under a simulated clock; the bus-facing wrapper lives in
service.py.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from ..bus.payload import Payload
from .. import system
from ..nlu.parse import IntentResult
from .session import ArbitrationWindow, DialogSession, SessionState

logger = logging.getLogger(__name__)

DEFAULT_WINDOW_MS = 300
DEFAULT_DEADLINES_MS = {
    SessionState.TRANSCRIBING: 10_000,
    SessionState.UNDERSTANDING: 5_000,
    SessionState.ACTING: 5_000,
    SessionState.RESPONDING: 5_000,
}
DEFAULT_FALLBACKS = {
    "empty-transcription": "I did not understand",
    "no-match": "Sorry, I cannot help with that",
    "no-handler": "Sorry, nothing answered",
}


@dataclass
class DialogConfig:
    window_ms: int = DEFAULT_WINDOW_MS
    deadlines_ms: dict = field(default_factory=lambda: dict(DEFAULT_DEADLINES_MS))
    fallbacks: dict = field(default_factory=lambda: dict(DEFAULT_FALLBACKS))

    def deadline_sum(self) -> int:
        return sum(self.deadlines_ms.values())


# -- decisions returned by on_wake_detected ------------------------------

@dataclass(frozen=True)
class Started:
    session_id: str
    satellite: str


@dataclass(frozen=True)
class Suppressed:
    satellite: str
    reason: str


@dataclass(frozen=True)
class PendingArbitration:
    satellite: str
    closes_at: int


@dataclass(frozen=True)
class QueuedWake:
    satellite: str


@dataclass(frozen=True)
class Publish:
    topic: str
    payload: Payload


@dataclass(frozen=True)
class Transition:
    session_id: str
    satellite: str
    from_state: str
    to_state: str
    reason: str
    at: int


class DialogManager:
    """Processes one event at a time; not internally locked."""

    def __init__(self, config: DialogConfig | None = None, satellites=()):
        self.config = config or DialogConfig()
        self.sessions: dict[str, DialogSession] = {}
        self.transitions: list[Transition] = []
        self.decisions: list = []
        self._satellites: set[str] = set(satellites)
        self._active: dict[str, str] = {}  # satellite -> non-terminal session id
        self._window: ArbitrationWindow | None = None
        self._queued: dict[str, int] = {}  # satellite -> latest queued detection ts
        self._counter = 0
        self._effects: list[Publish] = []

    # -- wiring ----------------------------------------------------------

    def register_satellite(self, satellite_id: str):
        self._satellites.add(satellite_id)

    def drain_effects(self) -> list[Publish]:
        out, self._effects = self._effects, []
        return out

    def non_terminal_sessions(self) -> dict[str, str]:
        """satellite -> session id, for invariant checks."""
        return dict(self._active)

    def is_quiescent(self) -> bool:
        """No live sessions, no open arbitration window, no queued wakes."""
        return not self._active and self._window is None and not self._queued

    # -- events -----------------------------------------------------------

    def on_wake_detected(self, satellite: str, t: int):
        if satellite not in self._satellites:
            decision = Suppressed(satellite=satellite, reason="unknown-satellite")
            self.decisions.append(decision)
            return decision
        self._resolve_window_if_due(t)
        if satellite in self._active:
            # Session still in flight on this satellite: queue the wake word
            # until the session is terminal.
            self._queued[satellite] = t
            decision = QueuedWake(satellite=satellite)
            self.decisions.append(decision)
            return decision
        if self._window is None:
            self._window = ArbitrationWindow(opened_at=t, window_ms=self.config.window_ms)
        if any(sat == satellite for sat, _ in self._window.pending):
            decision = Suppressed(satellite=satellite, reason="already-pending")
        else:
            self._window.pending.append((satellite, t))
            decision = PendingArbitration(satellite=satellite, closes_at=self._window.closes_at)
        self.decisions.append(decision)
        return decision

    def on_transcription(self, session_id: str, text: str, now: int):
        session = self._event_session(session_id, SessionState.TRANSCRIBING, "transcription")
        if session is None:
            return
        if not text.strip():
            self._fail(session, "empty-transcription", now, speak=True)
            return
        self._advance(session, SessionState.UNDERSTANDING, now, reason="transcription")
        self._emit(system.NLU_PARSE, Payload(
            kind="transcription", session_id=session.session_id,
            satellite=session.satellite, body={"text": text}))

    def on_intent(self, session_id: str, result, now: int):
        """result: an nlu.IntentResult, or anything else meaning no match."""
        session = self._event_session(session_id, SessionState.UNDERSTANDING, "intent")
        if session is None:
            return
        if not isinstance(result, IntentResult):
            self._fail(session, "no-match", now, speak=True)
            return
        self._advance(session, SessionState.ACTING, now, reason="intent:%s" % result.intent_id)
        self._emit(system.bare_intent_topic(result.intent_id), Payload(
            kind="intent_result", session_id=session.session_id,
            satellite=session.satellite,
            body={
                "intent_id": result.intent_id,
                "confidence": result.confidence,
                "entities": [
                    {"entity": e.entity, "role": e.role, "value": e.value,
                     "raw": e.raw, "span": list(e.char_span)}
                    for e in result.entities
                ],
            }))

    def on_skill_answer(self, session_id: str, answer_text: str, now: int,
                        satellite: str | None = None):
        session = self._event_session(session_id, SessionState.ACTING, "answer")
        if session is None:
            return
        if satellite is not None and satellite != session.satellite:
            logger.warning("answer for %s names satellite %r; routing to arbitration winner %r",
                           session_id, satellite, session.satellite)
        self._advance(session, SessionState.RESPONDING, now, reason="answer")
        self._emit(system.TTS_SAY, Payload(
            kind="say_text", session_id=session.session_id,
            satellite=session.satellite, body={"text": answer_text}))

    def on_tts_complete(self, session_id: str, now: int):
        session = self._event_session(session_id, SessionState.RESPONDING, "tts-complete")
        if session is None:
            return
        self._advance(session, SessionState.DONE, now, reason="tts-complete")
        self._release(session, now)
        self._emit(system.SESSION_END, Payload(
            kind="session_end", session_id=session.session_id,
            satellite=session.satellite, body={"reason": "done"}))

    def tick(self, now: int) -> list[DialogSession]:
        """Close due arbitration windows and expire overdue sessions."""
        self._resolve_window_if_due(now)
        expired = []
        for session in list(self.sessions.values()):
            if session.is_terminal or session.deadline is None:
                continue
            if now >= session.deadline:
                if session.state is SessionState.ACTING:
                    self._fail(session, "no-handler", now, speak=True)
                else:
                    self._fail(session, "timeout", now, speak=False)
                expired.append(session)
        return expired

    # -- internals ---------------------------------------------------------

    def _event_session(self, session_id: str, expected: SessionState, label: str):
        session = self.sessions.get(session_id)
        if session is None:
            logger.debug("dropping %s for unknown session %r", label, session_id)
            return None
        if session.is_terminal or session.state is not expected:
            logger.debug("dropping %s for session %s in state %s", label,
                         session_id, session.state.value)
            return None
        return session

    def _resolve_window_if_due(self, now: int):
        if self._window is not None and now >= self._window.closes_at:
            self._resolve_window(max(now, self._window.closes_at))

    def _resolve_window(self, now: int):
        window, self._window = self._window, None
        winner, detected_at = window.winner()
        for satellite, _t in sorted(window.pending):
            if satellite == winner:
                continue
            decision = Suppressed(satellite=satellite, reason="lost-arbitration")
            self.decisions.append(decision)
            self._emit(system.SESSION_END, Payload(
                kind="session_end", session_id="", satellite=satellite,
                body={"reason": "suppressed", "winner": winner}))

        self._counter += 1
        session = DialogSession(session_id="s-%04d" % self._counter, satellite=winner,
                                started_at=now)
        self.sessions[session.session_id] = session
        self._active[winner] = session.session_id
        self.decisions.append(Started(session_id=session.session_id, satellite=winner))
        self._log_transition(session, "(none)", SessionState.LISTENING.value,
                             "wake@%d" % detected_at, now)
        self._emit(system.STT_ACTIVATE, Payload(
            kind="stt_activate", session_id=session.session_id, satellite=winner, body={}))
        self._advance(session, SessionState.TRANSCRIBING, now, reason="stt-activate")

    def _advance(self, session: DialogSession, state: SessionState, now: int, reason: str):
        before = session.state.value
        deadline = None
        if state in self.config.deadlines_ms:
            deadline = now + self.config.deadlines_ms[state]
        session.advance(state, deadline=deadline)
        self._log_transition(session, before, state.value, reason, now)

    def _fail(self, session: DialogSession, reason: str, now: int, speak: bool):
        before = session.state.value
        session.advance(SessionState.FAILED, fail_reason=reason)
        self._log_transition(session, before, "Failed(%s)" % reason, reason, now)
        self._release(session, now)
        phrase = self.config.fallbacks.get(reason)
        if speak and phrase:
            self._emit(system.TTS_SAY, Payload(
                kind="say_text", session_id=session.session_id,
                satellite=session.satellite, body={"text": phrase}))
        self._emit(system.SESSION_END, Payload(
            kind="session_end", session_id=session.session_id,
            satellite=session.satellite, body={"reason": reason}))

    def _release(self, session: DialogSession, now: int):
        if self._active.get(session.satellite) == session.session_id:
            del self._active[session.satellite]
        queued_t = self._queued.pop(session.satellite, None)
        if queued_t is not None:
            # Replay the queued wake word now that the satellite is free.
            self.on_wake_detected(session.satellite, now)

    def _emit(self, topic: str, payload: Payload):
        self._effects.append(Publish(topic=topic, payload=payload))

    def _log_transition(self, session: DialogSession, from_state: str, to_state: str,
                        reason: str, at: int):
        t = Transition(session_id=session.session_id, satellite=session.satellite,
                       from_state=from_state, to_state=to_state, reason=reason, at=at)
        self.transitions.append(t)
        logger.info("session=%s satellite=%s state=%s->%s reason=%s at=%d",
                    t.session_id, t.satellite, t.from_state, t.to_state, t.reason, t.at)
