"""Permission warnings derived from a skill manifest.

Pure and deterministic: the same manifest always yields the same ordered
warning list, regardless of the order its topic sets are iterated in.
Severities follow the threat model: writing the answer topic is routine for
any answering skill, while reading an audio-stream topic is the kind of
grant a weather skill has no business asking for.
"""

from __future__ import annotations

from dataclasses import dataclass

from .. import system
from ..dsl.ast import SkillManifest

KIND_ORDER = (
    "internet_access",
    "extra_container_flags",
    "reads_system_topic",
    "writes_system_topic",
)

SEVERITY_INFO = "info"
SEVERITY_ELEVATED = "elevated"


@dataclass(frozen=True)
class PermissionWarning:
    kind: str
    detail: str
    severity: str = SEVERITY_INFO


def lint_warnings(manifest: SkillManifest) -> list[PermissionWarning]:
    warnings: list[PermissionWarning] = []

    if manifest.needs_internet_access:
        warnings.append(PermissionWarning(
            kind="internet_access",
            detail="skill requests internet access",
            severity=SEVERITY_INFO,
        ))

    if manifest.extra_container_flags.strip():
        warnings.append(PermissionWarning(
            kind="extra_container_flags",
            detail="skill requests container flags: %s" % manifest.extra_container_flags.strip(),
            severity=SEVERITY_ELEVATED,
        ))

    system_reads = sorted(t for t in manifest.topics_read
                          if t.startswith(system.RESERVED_PREFIX))
    if system_reads:
        audio = any(t in system.AUDIO_STREAM_TOPICS for t in system_reads)
        warnings.append(PermissionWarning(
            kind="reads_system_topic",
            detail="skill reads system topics: %s" % ", ".join(system_reads),
            severity=SEVERITY_ELEVATED if audio else SEVERITY_INFO,
        ))

    system_writes = sorted(t for t in manifest.topics_write
                           if t.startswith(system.RESERVED_PREFIX))
    if system_writes:
        only_answer = set(system_writes) <= {system.SKILL_ANSWER}
        warnings.append(PermissionWarning(
            kind="writes_system_topic",
            detail="skill writes system topics: %s" % ", ".join(system_writes),
            severity=SEVERITY_INFO if only_answer else SEVERITY_ELEVATED,
        ))

    return warnings
