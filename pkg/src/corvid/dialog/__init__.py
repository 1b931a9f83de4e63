"""Dialog management: wake-word arbitration and the session state machine."""

from .manager import (
    DEFAULT_DEADLINES_MS,
    DEFAULT_FALLBACKS,
    DEFAULT_WINDOW_MS,
    DialogConfig,
    DialogManager,
    PendingArbitration,
    Publish,
    QueuedWake,
    Started,
    Suppressed,
    Transition,
)
from .service import CoreServices, DialogService, NluService, SttService, TtsService, now_ms
from .session import (
    ArbitrationWindow,
    DialogSession,
    IllegalTransition,
    STATE_ORDER,
    SessionState,
    TERMINAL_STATES,
)

__all__ = [
    "DEFAULT_DEADLINES_MS",
    "DEFAULT_FALLBACKS",
    "DEFAULT_WINDOW_MS",
    "DialogConfig",
    "DialogManager",
    "PendingArbitration",
    "Publish",
    "QueuedWake",
    "Started",
    "Suppressed",
    "Transition",
    "CoreServices",
    "DialogService",
    "NluService",
    "SttService",
    "TtsService",
    "now_ms",
    "ArbitrationWindow",
    "DialogSession",
    "IllegalTransition",
    "STATE_ORDER",
    "SessionState",
    "TERMINAL_STATES",
]
