"""Well-known system topics.

Everything under the reserved "Jaco/" prefix belongs to the core modules.
Skills receive intent payloads on their intent's bare name (e.g.
"book_flight") and answer on the say-text topic.
"""

RESERVED_PREFIX = "Jaco/"

WAKE_DETECTED = "Jaco/Dialog/WakeDetected"
STT_ACTIVATE = "Jaco/Stt/Activate"
STT_AUDIO = "Jaco/Stt/Audio"
TRANSCRIPTION = "Jaco/Dialog/Transcription"
NLU_PARSE = "Jaco/Nlu/Parse"
INTENT_RESULT = "Jaco/Dialog/Intent"
SKILL_ANSWER = "Jaco/Skills/SayText"
TTS_SAY = "Jaco/Tts/Say"
SATELLITE_PLAY = "Jaco/Satellite/Play"
SESSION_END = "Jaco/Dialog/SessionEnd"

# Topics carrying raw audio (or its text stand-in); skills reading these
# warrant an elevated store warning.
AUDIO_STREAM_TOPICS = (STT_AUDIO, SATELLITE_PLAY)


def bare_intent_topic(intent_id: str) -> str:
    """'myskill-book_flight' -> 'book_flight' (intent names never contain '-')."""
    return intent_id.rsplit("-", 1)[-1]
