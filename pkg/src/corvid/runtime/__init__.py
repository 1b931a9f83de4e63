"""Skill runtime: host, installer, and the action-script SDK."""

from .host import InstalledSkill, SkillHost, SkillState
from .installer import InstallError, fetch_bundle_dir, validate_bundle_dir
from .sdk import Assistant, ENV_MANIFEST

__all__ = [
    "InstalledSkill",
    "SkillHost",
    "SkillState",
    "InstallError",
    "fetch_bundle_dir",
    "validate_bundle_dir",
    "Assistant",
    "ENV_MANIFEST",
]
