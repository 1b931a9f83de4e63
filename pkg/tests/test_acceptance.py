"""Acceptance suite: one test per release criterion, run at fixed seeds.

Each test prints "[ACCEPTANCE] <name>: PASS" (visible with -s or on the
criteria summary); thresholds and tolerances are pinned here, not tuned
elsewhere.
"""

from __future__ import annotations

import io
import random
import time

import pytest

from smartlights import (
    build_folds,
    corpus_vocab,
    corrupt_tokens,
    replacement_vocab,
)

from corvid import system
from corvid.bus import (
    AuthenticationError,
    Payload,
    PermissionDeniedError,
    broker_start,
    open_envelope,
    register_client,
)
from corvid.datagen import build_lm, expand, rescore_candidates
from corvid.dialog import DialogConfig, DialogManager, SessionState
from corvid.dialog.service import CoreServices
from corvid.dsl import load_bundle, parse_sentence, render_template
from corvid.dsl.ast import Alternation, Literal, Slot
from corvid.nlu import IntentResult, LabeledUtterance, NoMatch, evaluate, parse, train_nlu
from corvid.runtime.sdk import Assistant
from corvid.satellite import SUPPRESSED_NOTICE, SatelliteConfig, connect_satellite
from corvid.store import lint_warnings

from test_datagen import example_key, oracle_expansions, random_template


def report(name: str, elapsed: float | None = None):
    suffix = "" if elapsed is None else " (%.2fs)" % elapsed
    print("\n[ACCEPTANCE] %s: PASS%s" % (name, suffix))


def test_dsl_fidelity(myskill_dir):
    """Verbatim fixture files parse to the documented AST; display render
    reproduces the documented sentence exactly. Runtime < 1 s."""
    t0 = time.monotonic()
    bundle = load_bundle(myskill_dir)

    assert bundle.name == "myskill"
    assert bundle.manifest.has_action is True
    assert bundle.manifest.needs_internet_access is True
    assert bundle.manifest.extra_container_flags == ""
    assert bundle.manifest.topics_read == frozenset({"book_flight"})
    assert bundle.manifest.topics_write == frozenset({"Jaco/Skills/SayText"})

    table = bundle.lookups["city"]
    assert [e.canonical for e in table.entries] == ["Augsburg", "New York", "Berlin"]
    assert table.entries[1].variants == ("New York", "N Y")
    assert table.canonical_for("n y") == "New York"

    (intent,) = bundle.intents
    assert intent.intent_id == "myskill-book_flight"
    (sentence,) = intent.sentences
    assert sentence == (
        Literal("Book"),
        Alternation(((Literal("me"),), (Literal("us"),))),
        Literal("a flight from"),
        Slot("Augsburg", "city.txt", "start"),
        Literal("to"),
        Slot("Berlin", "city.txt", "destination"),
    )
    assert render_template(sentence) == "Book (me|us) a flight from Augsburg to Berlin"

    elapsed = time.monotonic() - t0
    assert elapsed < 1.0
    report("dsl-fidelity", elapsed)


def test_expansion_oracle():
    """200 random small templates: expand() count and content equal the
    independent brute-force enumerator. Zero mismatches, < 10 s."""
    from corvid.datagen.expand import count_expansions, expand_sentence

    t0 = time.monotonic()
    rng = random.Random(20260809)
    mismatches = 0
    for i in range(200):
        sentence, lookups = random_template(rng)
        expected = sorted((tokens, anns)
                          for tokens, anns in oracle_expansions(sentence, lookups))
        assert count_expansions(sentence, lookups) == len(expected)
        got = sorted(example_key(e) for e in
                     expand_sentence(sentence, "t-i", lookups,
                                     max_per_sentence=10 ** 9, rng_key="acc%d" % i))
        if got != expected:
            mismatches += 1
    elapsed = time.monotonic() - t0
    assert mismatches == 0
    assert elapsed < 10.0
    report("expansion-oracle (200 templates)", elapsed)


@pytest.mark.slow
def test_end_to_end_two_satellite_interaction(light_bundle):
    """Scripted two-satellite replay: simultaneous wake within the window,
    exactly one session, the light-skill callback fires once, the answer
    prints only on the winning satellite. Identical across 50 repetitions."""
    broker = broker_start()
    examples = expand(light_bundle, seed=11)
    model = train_nlu(examples, [light_bundle])
    lm = build_lm(examples, order=3)
    services = CoreServices(broker, model, lm=lm, satellites=("Alpha", "Beta"))

    calls = []
    skill_session = register_client(
        broker, "skill-light_control",
        read=set(light_bundle.manifest.topics_read),
        write=set(light_bundle.manifest.topics_write))
    assist = Assistant(session=skill_session)

    def on_light(msg):
        calls.append(msg["satellite"])
        rooms = [e["value"] for e in msg["entities"] if e["entity"] == "room"]
        assist.publish_answer("turning the light in the %s on" % (rooms or ["?"])[0],
                              msg["satellite"])

    assist.add_topic_callback("turn_on_light", on_light)

    alpha = connect_satellite(broker, SatelliteConfig(id="Alpha"), out=io.StringIO())
    beta = connect_satellite(broker, SatelliteConfig(id="Beta"), out=io.StringIO())

    t0 = time.monotonic()
    outcomes = []
    try:
        for rep in range(50):
            mark_a, mark_b = len(alpha.transcript), len(beta.transcript)
            calls_before = len(calls)
            alpha.feed_line("computer turn on the light in the lab")
            time.sleep(0.1)  # Beta wakes 100 ms later, inside the 300 ms window
            beta.feed_line("computer turn on the light in the kitchen")
            assert alpha.wait_for_transcript(mark_a + 1, timeout=15), "rep %d" % rep
            assert beta.wait_for_transcript(mark_b + 1, timeout=15), "rep %d" % rep
            time.sleep(0.05)
            outcomes.append((
                tuple(alpha.transcript[mark_a:]),
                tuple(beta.transcript[mark_b:]),
                len(calls) - calls_before,
            ))
        first = outcomes[0]
        assert first == (("Alpha> turning the light in the lab on",),
                         (SUPPRESSED_NOTICE,), 1)
        assert all(outcome == first for outcome in outcomes), "nondeterministic run"
        sessions = services.manager.sessions
        assert len(sessions) == 50
        assert all(s.state is SessionState.DONE and s.satellite == "Alpha"
                   for s in sessions.values())
        assert calls == ["Alpha"] * 50
    finally:
        alpha.close()
        beta.close()
        assist.stop()
        skill_session.close()
        services.close()
        broker.close()
    report("end-to-end-interaction (50 reps)", time.monotonic() - t0)


def test_topic_confinement(myskill_dir, weather_skill_dir, light_skill_dir, tmp_path):
    """3-skill fixture: an eavesdropper captures raw envelopes on all topics
    and fails authentication on 100% of open() attempts; an undeclared
    callback errors at registration time."""
    broker = broker_start()
    tap = broker.tap()
    bundles = [load_bundle(d) for d in (myskill_dir, weather_skill_dir, light_skill_dir)]
    sessions = {}
    try:
        for bundle in bundles:
            sessions[bundle.name] = register_client(
                broker, "skill-%s" % bundle.name,
                read=set(bundle.manifest.topics_read),
                write=set(bundle.manifest.topics_write))
        eavesdropper = register_client(broker, "skill-eavesdropper",
                                       read={"harmless"}, write={"harmless"})
        dialog = register_client(broker, "core-dialog", {"*"}, {"*"})

        # Undeclared callback errors at registration, before any message flows.
        assist = Assistant(session=eavesdropper, manifest_name="config.yaml")
        for topic in ("book_flight", "get_weather", "turn_on_light",
                      system.SKILL_ANSWER):
            with pytest.raises(PermissionDeniedError):
                assist.add_topic_callback(topic, lambda msg: None)

        # Drive traffic on every skill topic plus the answer topic.
        for bundle in bundles:
            for intent in bundle.intents:
                bare = intent.intent_name
                sessions[bundle.name].subscribe(bare, lambda p: None)
                dialog.publish(bare, Payload(
                    kind="intent_result", session_id="s", satellite="Alpha",
                    body={"intent_id": intent.intent_id, "entities": []}))
        sessions["myskill"].publish(system.SKILL_ANSWER, Payload(
            kind="skill_answer", session_id="s", satellite="Alpha",
            body={"text": "ok boss"}))
        eavesdropper.publish("harmless", Payload(kind="say_text", body={}))

        deadline = time.monotonic() + 10
        while len(tap.envelopes) < 6 and time.monotonic() < deadline:
            time.sleep(0.01)
        captured = tap.envelopes
        assert len(captured) >= 6

        held = eavesdropper.held_keys()
        assert set(held) == {"harmless"}
        attempts = failures = 0
        for env in captured:
            if env.topic.render() == "harmless":
                continue  # its own topic; everything else must stay sealed
            for key in held.values():
                probe = type(key)(topic=env.topic, key_bytes=key.key_bytes,
                                  key_id=env.key_id)
                attempts += 1
                with pytest.raises(AuthenticationError):
                    open_envelope(probe, env)
                failures += 1
        assert attempts > 0 and failures == attempts
    finally:
        for s in sessions.values():
            s.close()
        eavesdropper.close()
        dialog.close()
        broker.close()
    report("topic-confinement (%d sealed envelopes, %d failed opens)"
           % (len(captured), failures))


@pytest.mark.slow
def test_nlu_desk_benchmark():
    """Generated smart-lights corpus, 5-fold with held-out slot values:
    mean full accuracy >= 0.90 text-only and >= 0.80 under one random
    token substitution per utterance. Runtime < 60 s."""
    t0 = time.monotonic()
    full, folds = build_folds()
    clean, corrupted = [], []
    for fold in folds:
        model = train_nlu(fold.train_examples, [full])
        clean.append(evaluate(model, fold.test_labeled).full_accuracy)
        vocab = replacement_vocab(fold.train_examples, full)
        rng = random.Random(1000 + fold.index)
        noisy = [LabeledUtterance(
                    text=" ".join(corrupt_tokens(item.text.split(), vocab, rng)),
                    intent_id=item.intent_id, slots=item.slots)
                 for item in fold.test_labeled]
        corrupted.append(evaluate(model, noisy).full_accuracy)
    mean_clean = sum(clean) / len(clean)
    mean_corrupted = sum(corrupted) / len(corrupted)
    elapsed = time.monotonic() - t0
    assert mean_clean >= 0.90, clean
    assert mean_corrupted >= 0.80, corrupted
    assert elapsed < 60.0
    report("nlu-desk-benchmark (clean %.3f, corrupted %.3f)"
           % (mean_clean, mean_corrupted), elapsed)


def test_lm_rescoring_prefers_in_domain():
    """On the same corpus, rescoring with alpha=1, beta=0 picks the
    uncorrupted sentence over a 1-token corruption in >= 95% of 500
    sampled pairs (corrupted candidate listed first, so ties count
    against). Runtime < 30 s."""
    t0 = time.monotonic()
    _, folds = build_folds()
    examples = [e for fold in folds for e in fold.train_examples]
    lm = build_lm(examples, order=3)
    vocab = corpus_vocab(examples)
    rng = random.Random(77)
    pool = [e.tokens for e in examples]
    wins = 0
    n = 500
    for _ in range(n):
        tokens = list(rng.choice(pool))
        original = " ".join(tokens)
        corrupted = " ".join(corrupt_tokens(tokens, vocab, rng))
        ranked = rescore_candidates(lm, [(corrupted, 0.0), (original, 0.0)],
                                    alpha=1.0, beta=0.0)
        if ranked[0].text == original:
            wins += 1
    elapsed = time.monotonic() - t0
    rate = wins / n
    assert rate >= 0.95, rate
    assert elapsed < 30.0
    report("lm-rescoring (%d/%d = %.3f)" % (wins, n, rate), elapsed)


def test_dialog_liveness_model_check():
    """1000 random event sequences (<= 20 events, simulated clock): the
    single-session-per-satellite invariant never breaks and every started
    session terminates within the deadline sum."""
    t0 = time.monotonic()
    satellites = ("Alpha", "Beta", "Gamma")
    rng = random.Random(424242)
    for round_no in range(1000):
        config = DialogConfig()
        manager = DialogManager(config, satellites=satellites)
        now = 0
        for _ in range(rng.randrange(1, 21)):
            now += rng.randrange(0, 2000)
            kind = rng.randrange(6)
            sid = "s-%04d" % rng.randrange(0, 4)
            if kind == 0:
                manager.on_wake_detected(rng.choice(satellites + ("Ghost",)), now)
            elif kind == 1:
                manager.on_transcription(sid, rng.choice(["lights on", ""]), now)
            elif kind == 2:
                result = (IntentResult(intent_id="s-light", confidence=0.9)
                          if rng.random() < 0.7 else NoMatch())
                manager.on_intent(sid, result, now)
            elif kind == 3:
                manager.on_skill_answer(sid, "done", now)
            elif kind == 4:
                manager.on_tts_complete(sid, now)
            else:
                manager.tick(now)
            live_per_sat = {}
            for session in manager.sessions.values():
                if not session.is_terminal:
                    live_per_sat.setdefault(session.satellite, 0)
                    live_per_sat[session.satellite] += 1
            assert all(count == 1 for count in live_per_sat.values()), \
                "invariant broken in round %d" % round_no
        step = 250
        for _ in range(3 * (config.window_ms + config.deadline_sum()) // step):
            now += step
            manager.tick(now)
            if manager.is_quiescent():
                break
        assert all(s.is_terminal for s in manager.sessions.values()), round_no
        first_at, last_at = {}, {}
        for tr in manager.transitions:
            first_at.setdefault(tr.session_id, tr.at)
            last_at[tr.session_id] = tr.at
        bound = config.deadline_sum() + 4 * step
        for sid in manager.sessions:
            assert last_at[sid] - first_at[sid] <= bound, round_no
    report("dialog-liveness (1000 sequences)", time.monotonic() - t0)


def test_store_warning_derivation(myskill_dir):
    """The fixture manifest yields exactly {internet_access,
    writes_system_topic}; linting is pure under shuffled input ordering."""
    bundle = load_bundle(myskill_dir)
    warnings = lint_warnings(bundle.manifest)
    assert [w.kind for w in warnings] == ["internet_access", "writes_system_topic"]

    rng = random.Random(8)
    reference = None
    for _ in range(3):
        reads = list(bundle.manifest.topics_read)
        writes = list(bundle.manifest.topics_write)
        rng.shuffle(reads)
        rng.shuffle(writes)
        shuffled = type(bundle.manifest)(
            has_action=bundle.manifest.has_action,
            extra_container_flags=bundle.manifest.extra_container_flags,
            needs_internet_access=bundle.manifest.needs_internet_access,
            topics_read=frozenset(reads),
            topics_write=frozenset(writes))
        result = lint_warnings(shuffled)
        if reference is None:
            reference = result
        assert result == reference
    report("store-warning-derivation")
