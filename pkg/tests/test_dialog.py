import random

import pytest

from corvid import system
from corvid.dialog import (
    DialogConfig,
    DialogManager,
    PendingArbitration,
    QueuedWake,
    SessionState,
    Started,
    Suppressed,
)
from corvid.nlu import Entity, IntentResult, NoMatch

SATS = ("Alpha", "Beta", "Gamma")


def make_manager(**kw) -> DialogManager:
    config = DialogConfig(**kw) if kw else DialogConfig()
    return DialogManager(config, satellites=SATS)


def run_window(manager: DialogManager, detections, now=None):
    """Feed detections and close the window; returns the Started decision."""
    for sat, t in detections:
        manager.on_wake_detected(sat, t)
    close = max(t for _, t in detections) + manager.config.window_ms + 1
    manager.tick(now if now is not None else close)
    started = [d for d in manager.decisions if isinstance(d, Started)]
    return started[-1] if started else None


def effects_by_topic(manager: DialogManager):
    out = {}
    for effect in manager.drain_effects():
        out.setdefault(effect.topic, []).append(effect.payload)
    return out


def intent_result(intent_id="myskill-book_flight", entities=()):
    return IntentResult(intent_id=intent_id, confidence=0.9, entities=tuple(entities))


class TestArbitration:
    def test_earliest_detection_wins(self):
        manager = make_manager()
        started = run_window(manager, [("Alpha", 0), ("Beta", 120)])
        assert started.satellite == "Alpha"
        suppressed = [d for d in manager.decisions if isinstance(d, Suppressed)]
        assert [(d.satellite, d.reason) for d in suppressed] == [("Beta", "lost-arbitration")]

    def test_single_detection_starts(self):
        manager = make_manager()
        started = run_window(manager, [("Beta", 50)])
        assert started is not None and started.satellite == "Beta"

    def test_timestamp_tie_smaller_id_wins(self):
        manager = make_manager()
        started = run_window(manager, [("Beta", 10), ("Alpha", 10)])
        assert started.satellite == "Alpha"

    def test_unknown_satellite_suppressed(self):
        manager = make_manager()
        decision = manager.on_wake_detected("Mystery", 0)
        assert isinstance(decision, Suppressed)
        assert decision.reason == "unknown-satellite"

    def test_one_session_per_window(self):
        manager = make_manager()
        run_window(manager, [("Alpha", 0), ("Beta", 10), ("Gamma", 20)])
        assert len(manager.sessions) == 1

    def test_in_window_detection_is_pending(self):
        manager = make_manager()
        decision = manager.on_wake_detected("Alpha", 0)
        assert isinstance(decision, PendingArbitration)
        assert decision.closes_at == 300

    def test_losers_receive_suppressed_notice(self):
        manager = make_manager()
        run_window(manager, [("Alpha", 0), ("Beta", 120)])
        notices = [p for p in effects_by_topic(manager).get(system.SESSION_END, ())
                   if p.body.get("reason") == "suppressed"]
        assert [p.satellite for p in notices] == ["Beta"]

    def test_winner_gets_stt_activate(self):
        manager = make_manager()
        started = run_window(manager, [("Alpha", 0)])
        activations = effects_by_topic(manager)[system.STT_ACTIVATE]
        assert len(activations) == 1
        assert activations[0].satellite == "Alpha"
        assert activations[0].session_id == started.session_id

    def test_arbitration_outcome_independent_of_arrival_order(self):
        detections = [("Gamma", 40), ("Alpha", 25), ("Beta", 25)]
        winners = set()
        for order in ([0, 1, 2], [2, 1, 0], [1, 2, 0], [2, 0, 1]):
            manager = make_manager()
            started = run_window(manager, [detections[i] for i in order])
            winners.add(started.satellite)
        assert winners == {"Alpha"}  # earliest timestamp, tie broken by id

    def test_wake_while_busy_is_queued_until_terminal(self):
        manager = make_manager()
        started = run_window(manager, [("Alpha", 0)])
        decision = manager.on_wake_detected("Alpha", 500)
        assert isinstance(decision, QueuedWake)
        assert len(manager.sessions) == 1
        # Finish the session; the queued wake must open a fresh window.
        manager.on_transcription(started.session_id, "hello", 600)
        manager.on_intent(started.session_id, intent_result(), 700)
        manager.on_skill_answer(started.session_id, "done", 800)
        manager.on_tts_complete(started.session_id, 900)
        manager.tick(900 + manager.config.window_ms + 1)
        assert len(manager.sessions) == 2


class TestSessionFlow:
    def drive_to(self, manager, state: SessionState):
        started = run_window(manager, [("Alpha", 0)])
        sid = started.session_id
        now = 400
        if state is SessionState.TRANSCRIBING:
            return sid, now
        manager.on_transcription(sid, "book me a flight", now := now + 10)
        if state is SessionState.UNDERSTANDING:
            return sid, now
        manager.on_intent(sid, intent_result(), now := now + 10)
        if state is SessionState.ACTING:
            return sid, now
        manager.on_skill_answer(sid, "ok boss", now := now + 10)
        if state is SessionState.RESPONDING:
            return sid, now
        manager.on_tts_complete(sid, now := now + 10)
        return sid, now

    def test_full_happy_path(self):
        manager = make_manager()
        sid, _ = self.drive_to(manager, SessionState.DONE)
        session = manager.sessions[sid]
        assert session.state is SessionState.DONE
        assert [s.value for s in session.visited] == [
            "Listening", "Transcribing", "Understanding", "Acting", "Responding", "Done"]

    def test_transcription_enters_understanding_once(self):
        manager = make_manager()
        sid, now = self.drive_to(manager, SessionState.UNDERSTANDING)
        manager.drain_effects()
        manager.on_transcription(sid, "again", now + 5)  # duplicate: dropped
        assert manager.sessions[sid].state is SessionState.UNDERSTANDING
        assert manager.drain_effects() == []

    def test_transcription_for_done_session_dropped(self):
        manager = make_manager()
        sid, now = self.drive_to(manager, SessionState.DONE)
        manager.on_transcription(sid, "late", now + 5)
        assert manager.sessions[sid].state is SessionState.DONE

    def test_empty_transcription_fails_with_apology(self):
        manager = make_manager()
        sid, now = self.drive_to(manager, SessionState.TRANSCRIBING)
        manager.drain_effects()
        manager.on_transcription(sid, "", now + 5)
        session = manager.sessions[sid]
        assert session.state is SessionState.FAILED
        assert session.fail_reason == "empty-transcription"
        say = effects_by_topic(manager)[system.TTS_SAY]
        assert say[0].body["text"] == "I did not understand"
        assert say[0].satellite == "Alpha"

    def test_apology_phrase_configurable(self):
        manager = make_manager(fallbacks={"empty-transcription": "was bitte?"})
        sid, now = self.drive_to(manager, SessionState.TRANSCRIBING)
        manager.drain_effects()
        manager.on_transcription(sid, "   ", now + 5)
        say = effects_by_topic(manager)[system.TTS_SAY]
        assert say[0].body["text"] == "was bitte?"

    def test_intent_routes_to_bare_topic_with_satellite(self):
        manager = make_manager()
        sid, now = self.drive_to(manager, SessionState.UNDERSTANDING)
        manager.drain_effects()
        entities = (Entity(entity="city", role="start", value="Augsburg",
                           raw="augsburg", char_span=(0, 8)),)
        manager.on_intent(sid, intent_result(entities=entities), now + 5)
        routed = effects_by_topic(manager)["book_flight"]
        assert routed[0].kind == "intent_result"
        assert routed[0].satellite == "Alpha"
        assert routed[0].body["intent_id"] == "myskill-book_flight"
        assert routed[0].body["entities"][0]["value"] == "Augsburg"

    def test_nomatch_fails_with_fallback(self):
        manager = make_manager()
        sid, now = self.drive_to(manager, SessionState.UNDERSTANDING)
        manager.drain_effects()
        manager.on_intent(sid, NoMatch(), now + 5)
        session = manager.sessions[sid]
        assert session.state is SessionState.FAILED
        assert session.fail_reason == "no-match"
        assert effects_by_topic(manager)[system.TTS_SAY]

    def test_answer_forwarded_to_tts_for_winner(self):
        manager = make_manager()
        sid, now = self.drive_to(manager, SessionState.ACTING)
        manager.drain_effects()
        manager.on_skill_answer(sid, "ok boss", now + 5)
        say = effects_by_topic(manager)[system.TTS_SAY]
        assert say[0].body["text"] == "ok boss"
        assert say[0].satellite == "Alpha"

    def test_second_answer_dropped(self):
        manager = make_manager()
        sid, now = self.drive_to(manager, SessionState.RESPONDING)
        manager.drain_effects()
        manager.on_skill_answer(sid, "another", now + 5)
        assert manager.sessions[sid].state is SessionState.RESPONDING
        assert manager.drain_effects() == []

    def test_answer_affinity_overrides_foreign_satellite(self):
        manager = make_manager()
        sid, now = self.drive_to(manager, SessionState.ACTING)
        manager.drain_effects()
        manager.on_skill_answer(sid, "hi", now + 5, satellite="Beta")
        say = effects_by_topic(manager)[system.TTS_SAY]
        assert say[0].satellite == "Alpha"


class TestTimeouts:
    def test_acting_timeout_fails_no_handler(self):
        manager = make_manager()
        started = run_window(manager, [("Alpha", 0)])
        sid = started.session_id
        manager.on_transcription(sid, "hello", 400)
        manager.on_intent(sid, intent_result(), 500)
        manager.tick(500 + 6000)
        session = manager.sessions[sid]
        assert session.state is SessionState.FAILED
        assert session.fail_reason == "no-handler"

    def test_fresh_session_not_expired(self):
        manager = make_manager()
        started = run_window(manager, [("Alpha", 0)])
        manager.tick(1000)
        assert not manager.sessions[started.session_id].is_terminal

    def test_expiry_releases_satellite_for_new_session(self):
        manager = make_manager()
        started = run_window(manager, [("Alpha", 0)])
        manager.tick(301 + 10_000)  # Transcribing deadline passes
        assert manager.sessions[started.session_id].state is SessionState.FAILED
        second = run_window(manager, [("Alpha", 20_000)])
        assert second is not None
        assert second.session_id != started.session_id

    def test_liveness_within_deadline_sum(self):
        config = DialogConfig()
        manager = DialogManager(config, satellites=SATS)
        started = run_window(manager, [("Alpha", 0)])
        horizon = 301 + config.deadline_sum() + 1
        manager.tick(horizon)
        assert manager.sessions[started.session_id].is_terminal


class TestRandomizedModel:
    def test_invariants_over_random_event_sequences(self):
        rng = random.Random(99)
        for round_no in range(150):
            config = DialogConfig()
            manager = DialogManager(config, satellites=SATS)
            now = 0
            for _ in range(rng.randrange(1, 21)):
                now += rng.randrange(0, 2000)
                kind = rng.randrange(6)
                sid = "s-%04d" % rng.randrange(0, 4)
                if kind == 0:
                    manager.on_wake_detected(rng.choice(SATS + ("Ghost",)), now)
                elif kind == 1:
                    manager.on_transcription(sid, rng.choice(["hello", ""]), now)
                elif kind == 2:
                    result = intent_result() if rng.random() < 0.7 else NoMatch()
                    manager.on_intent(sid, result, now)
                elif kind == 3:
                    manager.on_skill_answer(sid, "answer", now)
                elif kind == 4:
                    manager.on_tts_complete(sid, now)
                else:
                    manager.tick(now)
                per_satellite = {}
                for session in manager.sessions.values():
                    if not session.is_terminal:
                        per_satellite.setdefault(session.satellite, []).append(session)
                assert all(len(v) == 1 for v in per_satellite.values()), \
                    "two live sessions on one satellite (round %d)" % round_no
            # Drain to quiescence with fine ticks: queued wakes may spawn
            # follow-up sessions, each bounded by a window plus deadlines.
            step = 250
            budget = config.window_ms + config.deadline_sum() + step
            for _ in range(3 * budget // step):
                now += step
                manager.tick(now)
                if manager.is_quiescent():
                    break
            assert all(s.is_terminal for s in manager.sessions.values())
            # Per-session liveness: terminal within the deadline sum, modulo
            # one tick of detection lag per state.
            first_at, last_at = {}, {}
            for tr in manager.transitions:
                first_at.setdefault(tr.session_id, tr.at)
                last_at[tr.session_id] = tr.at
            bound = config.deadline_sum() + 4 * step
            for sid in manager.sessions:
                assert last_at[sid] - first_at[sid] <= bound
