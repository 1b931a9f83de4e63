"""Text-mode satellite: wake-word detection over typed lines.

Stands in for the audio streamer and wake-word engine of a room client.
A line starting with the wake word publishes a detection; once the dialog
manager activates this satellite, the rest of the line (or the next line,
when the wake word stood alone) is emitted as the mock transcription
source. Answers addressed to this satellite are printed "<id>> ...".
"""

from __future__ import annotations

import logging
import sys
import threading
import time
from dataclasses import dataclass, field

from .. import system
from ..bus import ClientSession, NotConnectedError, Payload, WILDCARD, register_client
from ..dialog.service import now_ms

logger = logging.getLogger(__name__)

SUPPRESSED_NOTICE = "(another room answered)"
HINT_NO_WAKE = "(start with the wake word)"


@dataclass
class SatelliteConfig:
    id: str
    wake_word: str = "computer"
    bus_addr: str = ""
    script_path: str | None = None  # scripted mode when set

    def __post_init__(self):
        if not self.id:
            raise ValueError("satellite id must be non-empty")
        if not self.wake_word.strip():
            raise ValueError("wake word must be non-empty")
        self.wake_word = self.wake_word.strip().lower()


def detect_wake(wake_word: str, line: str) -> tuple[bool, str]:
    """Prefix-anchored, case-insensitive wake-word check.

    Returns (detected, remainder-after-wake-word).
    """
    stripped = line.strip()
    lowered = stripped.lower()
    wake = wake_word.lower()
    if lowered == wake:
        return True, ""
    if lowered.startswith(wake):
        rest = stripped[len(wake):]
        if rest[:1] in (" ", "\t", ",", ".", ";", ":", "!", "?"):
            return True, rest.lstrip(" \t,.;:!?")
    return False, ""


def mock_stt(utterance: str, candidate_noise=None) -> list[tuple[str, float]]:
    """Candidate list for rescoring: the typed utterance plus optional noise."""
    candidates = [(utterance, 0.0)]
    if candidate_noise:
        candidates.extend((text, float(score)) for text, score in candidate_noise)
    return candidates


class Satellite:
    """A connected satellite; drive it with feed_line() or run_script()."""

    def __init__(self, config: SatelliteConfig, session: ClientSession,
                 out=None, candidate_noise=None, clock=now_ms):
        self.config = config
        self.session = session
        self.clock = clock
        self.candidate_noise = candidate_noise
        self._out = out if out is not None else sys.stdout
        self._print_lock = threading.Lock()
        self.transcript: list[str] = []
        self._pending_utterance: str | None = None
        self._awaiting_utterance = False
        self._active_session: str | None = None
        self._state_lock = threading.Lock()
        self._answered = threading.Event()
        session.subscribe(system.STT_ACTIVATE, self._on_activate)
        session.subscribe(system.SATELLITE_PLAY, self._on_play)
        session.subscribe(system.SESSION_END, self._on_session_end)

    # -- input side --------------------------------------------------------

    def feed_line(self, line: str):
        line = line.rstrip("\n")
        with self._state_lock:
            take_as_utterance = self._awaiting_utterance
            if take_as_utterance:
                self._awaiting_utterance = False
        if take_as_utterance:
            self._set_utterance(line.strip())
            return
        detected, rest = detect_wake(self.config.wake_word, line)
        if not detected:
            if line.strip():
                self._print(HINT_NO_WAKE)
            return
        with self._state_lock:
            self._pending_utterance = rest if rest else None
            self._awaiting_utterance = not rest
            self._active_session = None
        self.session.publish(system.WAKE_DETECTED, Payload(
            kind="wake_detected", satellite=self.config.id,
            body={"detected_at": self.clock()}))

    def _set_utterance(self, text: str):
        # Caller holds no lock; only used when a bare wake word came first.
        with self._state_lock:
            self._pending_utterance = text
            emit = self._active_session
        if emit:
            self._emit_utterance()

    def _on_activate(self, payload: Payload):
        if payload.satellite != self.config.id:
            return
        with self._state_lock:
            self._active_session = payload.session_id
            ready = self._pending_utterance is not None
        if ready:
            self._emit_utterance()

    def _emit_utterance(self):
        with self._state_lock:
            utterance = self._pending_utterance or ""
            session_id = self._active_session or ""
            self._pending_utterance = None
            self._active_session = None
        self.session.publish(system.STT_AUDIO, Payload(
            kind="audio_chunk", session_id=session_id, satellite=self.config.id,
            body={"candidates": [[t, s] for t, s in
                  mock_stt(utterance, self.candidate_noise)]}))

    # -- output side ---------------------------------------------------------

    def _on_play(self, payload: Payload):
        if payload.satellite != self.config.id:
            return
        self._print("%s> %s" % (self.config.id, payload.body.get("text", "")))
        self._answered.set()

    def _on_session_end(self, payload: Payload):
        if payload.satellite != self.config.id:
            return
        if payload.body.get("reason") == "suppressed":
            self._print(SUPPRESSED_NOTICE)

    def _print(self, text: str):
        with self._print_lock:
            self.transcript.append(text)
            try:
                self._out.write(text + "\n")
                self._out.flush()
            except (ValueError, OSError):
                pass

    def wait_for_transcript(self, count: int, timeout: float = 10.0) -> bool:
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            with self._print_lock:
                if len(self.transcript) >= count:
                    return True
            time.sleep(0.005)
        return False

    def close(self):
        self.session.close()

    # -- script replay -------------------------------------------------------

    def run_script(self, lines) -> None:
        """Replay "<+ms> <text>" lines relative to the call time."""
        start = time.monotonic()
        for offset_ms, text in parse_script(lines):
            delay = start + offset_ms / 1000.0 - time.monotonic()
            if delay > 0:
                time.sleep(delay)
            self.feed_line(text)


def parse_script(lines) -> list[tuple[int, str]]:
    out = []
    for raw in lines:
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        head, _, rest = line.lstrip().partition(" ")
        if not head.startswith("+"):
            raise ValueError("script lines look like '<+ms> <text>', got %r" % line)
        try:
            offset = int(head[1:])
        except ValueError as exc:
            raise ValueError("bad offset in script line %r" % line) from exc
        out.append((offset, rest))
    return out


def connect_satellite(broker_or_addr, config: SatelliteConfig, out=None,
                      candidate_noise=None) -> Satellite:
    """Register on the bus (wildcard system grant) and attach a Satellite."""
    client_id = "satellite-%s" % config.id
    if hasattr(broker_or_addr, "authorize"):
        session = register_client(broker_or_addr, client_id, {WILDCARD}, {WILDCARD})
    else:
        raise NotConnectedError(
            "remote satellites need a pre-authorized token; use register_client")
    return Satellite(config, session, out=out, candidate_noise=candidate_noise)


def run_satellite(config: SatelliteConfig, session: ClientSession,
                  stdin=None, out=None) -> int:
    """CLI entry: scripted replay or interactive stdin loop. Returns exit code."""
    sat = Satellite(config, session, out=out)
    try:
        if config.script_path:
            with open(config.script_path, encoding="utf-8") as fh:
                sat.run_script(fh.readlines())
            # Leave time for the answer to arrive before disconnecting.
            sat.wait_for_transcript(1, timeout=5.0)
            return 0
        source = stdin if stdin is not None else sys.stdin
        for line in source:
            sat.feed_line(line)
        return 0
    except NotConnectedError as exc:
        print("satellite %s: %s" % (config.id, exc), file=sys.stderr)
        return 1
    finally:
        sat.close()
