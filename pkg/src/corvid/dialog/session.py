"""Dialog session state machine types."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class SessionState(Enum):
    LISTENING = "Listening"
    TRANSCRIBING = "Transcribing"
    UNDERSTANDING = "Understanding"
    ACTING = "Acting"
    RESPONDING = "Responding"
    DONE = "Done"
    FAILED = "Failed"


# Forward-only progression; DONE/FAILED are terminal.
STATE_ORDER = (
    SessionState.LISTENING,
    SessionState.TRANSCRIBING,
    SessionState.UNDERSTANDING,
    SessionState.ACTING,
    SessionState.RESPONDING,
    SessionState.DONE,
)

TERMINAL_STATES = frozenset({SessionState.DONE, SessionState.FAILED})


class IllegalTransition(Exception):
    pass


@dataclass
class DialogSession:
    session_id: str
    satellite: str
    started_at: int  # ms
    state: SessionState = SessionState.LISTENING
    deadline: int | None = None  # ms; None in terminal states
    fail_reason: str | None = None
    visited: list = field(default_factory=list)

    def __post_init__(self):
        if not self.visited:
            self.visited.append(self.state)

    @property
    def is_terminal(self) -> bool:
        return self.state in TERMINAL_STATES

    def advance(self, new_state: SessionState, deadline: int | None = None,
                fail_reason: str | None = None):
        if self.is_terminal:
            raise IllegalTransition("session %s is terminal" % self.session_id)
        if new_state in self.visited:
            raise IllegalTransition("session %s already visited %s" % (self.session_id, new_state))
        if new_state is not SessionState.FAILED:
            if STATE_ORDER.index(new_state) <= STATE_ORDER.index(self.state):
                raise IllegalTransition(
                    "session %s cannot go %s -> %s" % (self.session_id, self.state, new_state))
        self.state = new_state
        self.visited.append(new_state)
        self.deadline = None if new_state in TERMINAL_STATES else deadline
        if new_state is SessionState.FAILED:
            self.fail_reason = fail_reason


@dataclass
class ArbitrationWindow:
    opened_at: int
    window_ms: int
    pending: list = field(default_factory=list)  # (satellite, detection ts)

    @property
    def closes_at(self) -> int:
        return self.opened_at + self.window_ms

    def winner(self) -> tuple[str, int]:
        """Earliest detection wins; timestamp ties go to the smaller id."""
        return min(self.pending, key=lambda p: (p[1], p[0]))
