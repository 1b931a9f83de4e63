"""Bus-facing core services of the master node.

Each service is its own bus client, mirroring the one-module-per-container
layout: STT (candidate rescoring in text mode), NLU parsing, TTS (text
pass-through), and the dialog manager that orchestrates them.
"""

from __future__ import annotations

import logging
import threading
import time

from .. import system
from ..bus import Broker, ClientSession, Payload, WILDCARD, register_client
from ..datagen.ngram import NgramModel
from ..datagen.rescore import rescore_candidates
from ..nlu.model import NluModel
from ..nlu.parse import parse, result_from_dict, result_to_dict
from .manager import DialogConfig, DialogManager

logger = logging.getLogger(__name__)


def now_ms() -> int:
    return int(time.time() * 1000)


class SttService:
    """Turns candidate lists from satellites into one transcription.

    With a language model configured, candidates are rescored; otherwise the
    acoustically best (first) candidate wins.
    """

    def __init__(self, session: ClientSession, lm: NgramModel | None = None,
                 alpha: float = 1.0, beta: float = 0.0):
        self.session = session
        self.lm = lm
        self.alpha = alpha
        self.beta = beta
        session.subscribe(system.STT_AUDIO, self._on_audio)

    def _on_audio(self, payload: Payload):
        candidates = [(c[0], float(c[1])) for c in payload.body.get("candidates", [])]
        if not candidates:
            text = ""
        elif self.lm is not None and len(candidates) > 1:
            text = rescore_candidates(self.lm, candidates, self.alpha, self.beta)[0].text
        else:
            text = candidates[0][0]
        self.session.publish(system.TRANSCRIPTION, Payload(
            kind="transcription", session_id=payload.session_id,
            satellite=payload.satellite, body={"text": text}))

    def close(self):
        self.session.close()


class NluService:
    def __init__(self, session: ClientSession, model: NluModel):
        self.session = session
        self.model = model
        session.subscribe(system.NLU_PARSE, self._on_parse)

    def _on_parse(self, payload: Payload):
        result = parse(self.model, payload.body.get("text", ""))
        self.session.publish(system.INTENT_RESULT, Payload(
            kind="intent_result", session_id=payload.session_id,
            satellite=payload.satellite, body=result_to_dict(result)))

    def close(self):
        self.session.close()


class TtsService:
    """Text mode: forwards the answer text as the satellite's audio chunk."""

    def __init__(self, session: ClientSession):
        self.session = session
        session.subscribe(system.TTS_SAY, self._on_say)

    def _on_say(self, payload: Payload):
        self.session.publish(system.SATELLITE_PLAY, Payload(
            kind="audio_chunk", session_id=payload.session_id,
            satellite=payload.satellite, body={"text": payload.body.get("text", "")}))

    def close(self):
        self.session.close()


class DialogService:
    """Feeds bus events into the DialogManager and publishes its effects."""

    def __init__(self, session: ClientSession, manager: DialogManager,
                 clock=now_ms, tick_interval: float = 0.02):
        self.session = session
        self.manager = manager
        self.clock = clock
        self._lock = threading.Lock()
        self._stop = threading.Event()
        session.subscribe(system.WAKE_DETECTED, self._on_wake)
        session.subscribe(system.TRANSCRIPTION, self._on_transcription)
        session.subscribe(system.INTENT_RESULT, self._on_intent)
        session.subscribe(system.SKILL_ANSWER, self._on_answer)
        session.subscribe(system.SATELLITE_PLAY, self._on_played)
        self._ticker = threading.Thread(target=self._tick_loop, args=(tick_interval,),
                                        daemon=True)
        self._ticker.start()

    def _with_manager(self, fn):
        with self._lock:
            fn()
            effects = self.manager.drain_effects()
        for effect in effects:
            self.session.publish(effect.topic, effect.payload)

    def _on_wake(self, payload: Payload):
        t = int(payload.body.get("detected_at", self.clock()))
        self._with_manager(lambda: self.manager.on_wake_detected(payload.satellite, t))

    def _on_transcription(self, payload: Payload):
        self._with_manager(lambda: self.manager.on_transcription(
            payload.session_id, payload.body.get("text", ""), self.clock()))

    def _on_intent(self, payload: Payload):
        result = result_from_dict(payload.body)
        self._with_manager(lambda: self.manager.on_intent(
            payload.session_id, result, self.clock()))

    def _on_answer(self, payload: Payload):
        self._with_manager(lambda: self.manager.on_skill_answer(
            payload.session_id, payload.body.get("text", ""), self.clock(),
            satellite=payload.satellite or None))

    def _on_played(self, payload: Payload):
        self._with_manager(lambda: self.manager.on_tts_complete(
            payload.session_id, self.clock()))

    def _tick_loop(self, interval: float):
        while not self._stop.wait(interval):
            try:
                self._with_manager(lambda: self.manager.tick(self.clock()))
            except Exception:
                logger.exception("dialog tick failed")

    def close(self):
        self._stop.set()
        self._ticker.join(timeout=2)
        self.session.close()


class CoreServices:
    """All master-node services wired to one broker."""

    def __init__(self, broker: Broker, nlu_model: NluModel, lm: NgramModel | None = None,
                 dialog_config: DialogConfig | None = None, satellites=(),
                 alpha: float = 1.0, beta: float = 0.0):
        self.broker = broker
        self.manager = DialogManager(dialog_config, satellites=satellites)
        wildcard = {WILDCARD}
        self.stt = SttService(register_client(broker, "core-stt", wildcard, wildcard),
                              lm=lm, alpha=alpha, beta=beta)
        self.nlu = NluService(register_client(broker, "core-nlu", wildcard, wildcard),
                              model=nlu_model)
        self.tts = TtsService(register_client(broker, "core-tts", wildcard, wildcard))
        self.dialog = DialogService(register_client(broker, "core-dialog", wildcard, wildcard),
                                    self.manager)

    def close(self):
        self.dialog.close()
        for svc in (self.stt, self.nlu, self.tts):
            svc.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
