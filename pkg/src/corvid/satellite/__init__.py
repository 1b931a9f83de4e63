"""Text-mode satellite client."""

from .satellite import (
    HINT_NO_WAKE,
    SUPPRESSED_NOTICE,
    Satellite,
    SatelliteConfig,
    connect_satellite,
    detect_wake,
    mock_stt,
    parse_script,
    run_satellite,
)

__all__ = [
    "HINT_NO_WAKE",
    "SUPPRESSED_NOTICE",
    "Satellite",
    "SatelliteConfig",
    "connect_satellite",
    "detect_wake",
    "mock_stt",
    "parse_script",
    "run_satellite",
]
