"""Skill store: catalog, permission warnings, local HTTP API."""

from .catalog import Catalog, StoreEntry, StoreError, build_archive, index_skill
from .service import StoreService, serve_store
from .warnings import (
    KIND_ORDER,
    PermissionWarning,
    SEVERITY_ELEVATED,
    SEVERITY_INFO,
    lint_warnings,
)

__all__ = [
    "Catalog",
    "StoreEntry",
    "StoreError",
    "build_archive",
    "index_skill",
    "StoreService",
    "serve_store",
    "KIND_ORDER",
    "PermissionWarning",
    "SEVERITY_ELEVATED",
    "SEVERITY_INFO",
    "lint_warnings",
]
