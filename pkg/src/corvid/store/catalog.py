"""Skill catalog: one JSON entry file plus one archive per skill.

Archives are built deterministically (sorted members, zeroed timestamps),
so the content hash recorded in the entry always matches what /install
serves later.
"""

from __future__ import annotations

import gzip
import hashlib
import io
import json
import tarfile
import threading
from dataclasses import dataclass
from pathlib import Path

from ..dsl.ast import SkillBundle, SkillManifest
from ..dsl.bundle import load_bundle
from ..runtime.installer import InstallError, fetch_bundle_dir
from .warnings import PermissionWarning, lint_warnings


class StoreError(Exception):
    pass


@dataclass(frozen=True)
class StoreEntry:
    name: str
    description: str
    source_url: str
    manifest: SkillManifest
    warnings: tuple[PermissionWarning, ...]
    content_hash: str  # sha256 of the archive

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "source_url": self.source_url,
            "manifest": {
                "has_action": self.manifest.has_action,
                "extra_container_flags": self.manifest.extra_container_flags,
                "needs_internet_access": self.manifest.needs_internet_access,
                "topics_read": sorted(self.manifest.topics_read),
                "topics_write": sorted(self.manifest.topics_write),
            },
            "warnings": [
                {"kind": w.kind, "detail": w.detail, "severity": w.severity}
                for w in self.warnings
            ],
            "content_hash": self.content_hash,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "StoreEntry":
        m = doc["manifest"]
        return cls(
            name=doc["name"],
            description=doc.get("description", ""),
            source_url=doc.get("source_url", ""),
            manifest=SkillManifest(
                has_action=m["has_action"],
                extra_container_flags=m["extra_container_flags"],
                needs_internet_access=m["needs_internet_access"],
                topics_read=frozenset(m["topics_read"]),
                topics_write=frozenset(m["topics_write"]),
            ),
            warnings=tuple(
                PermissionWarning(kind=w["kind"], detail=w["detail"],
                                  severity=w.get("severity", "info"))
                for w in doc.get("warnings", ())
            ),
            content_hash=doc["content_hash"],
        )


def build_archive(bundle_dir: Path) -> bytes:
    """Deterministic .tar.gz of a bundle directory, rooted at its name."""
    bundle_dir = Path(bundle_dir)
    buf = io.BytesIO()
    with tarfile.open(fileobj=buf, mode="w", format=tarfile.PAX_FORMAT) as tar:
        paths = sorted(p for p in bundle_dir.rglob("*") if p.is_file() or p.is_dir())
        members = [bundle_dir] + paths
        for path in members:
            rel = path.relative_to(bundle_dir.parent)
            info = tar.gettarinfo(str(path), arcname=str(rel))
            info.uid = info.gid = 0
            info.uname = info.gname = ""
            info.mtime = 0
            info.mode = 0o755 if path.is_dir() else 0o644
            if path.is_file():
                with open(path, "rb") as fh:
                    tar.addfile(info, fh)
            else:
                tar.addfile(info)
    raw = buf.getvalue()
    gz = io.BytesIO()
    with gzip.GzipFile(fileobj=gz, mode="wb", mtime=0) as zh:
        zh.write(raw)
    return gz.getvalue()


def describe_bundle(bundle_dir: Path) -> str:
    """First prose line of the bundle's README (headings skipped)."""
    readme = Path(bundle_dir) / "README.md"
    if readme.is_file():
        for line in readme.read_text(encoding="utf-8").splitlines():
            text = line.strip()
            if text and not text.startswith("#"):
                return text
    return ""


def index_skill(bundle_source: str, work_dir=None) -> tuple[StoreEntry, bytes]:
    """Resolve a bundle source into a store entry plus its archive bytes."""
    source = str(bundle_source)
    path = Path(source)
    if path.is_dir():
        bundle = load_bundle(path, source_url=source)
        bundle_dir = path
    else:
        import tempfile
        work = Path(work_dir) if work_dir else Path(tempfile.mkdtemp(prefix="corvid-store-"))
        bundle_dir = fetch_bundle_dir(source, work)
        bundle = load_bundle(bundle_dir, source_url=source)
    archive = build_archive(bundle_dir)
    entry = StoreEntry(
        name=bundle.name,
        description=describe_bundle(bundle_dir),
        source_url=source,
        manifest=bundle.manifest,
        warnings=tuple(lint_warnings(bundle.manifest)),
        content_hash=hashlib.sha256(archive).hexdigest(),
    )
    return entry, archive


class Catalog:
    """Directory of <name>.json + <name>.tar.gz; reloads are atomic."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._entries: dict[str, StoreEntry] = {}
        self._lock = threading.Lock()
        self.reload()

    def reload(self):
        entries: dict[str, StoreEntry] = {}
        for entry_file in sorted(self.directory.glob("*.json")):
            doc = json.loads(entry_file.read_text(encoding="utf-8"))
            entry = StoreEntry.from_dict(doc)
            entries[entry.name] = entry
        with self._lock:
            self._entries = entries

    def add(self, bundle_source: str) -> StoreEntry:
        entry, archive = index_skill(bundle_source)
        (self.directory / ("%s.tar.gz" % entry.name)).write_bytes(archive)
        (self.directory / ("%s.json" % entry.name)).write_text(
            json.dumps(entry.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        self.reload()
        return entry

    def entries(self) -> list[StoreEntry]:
        with self._lock:
            return [self._entries[name] for name in sorted(self._entries)]

    def get(self, name: str) -> StoreEntry | None:
        with self._lock:
            return self._entries.get(name)

    def archive_bytes(self, name: str) -> bytes:
        path = self.directory / ("%s.tar.gz" % name)
        if not path.is_file():
            raise StoreError("no archive for skill %r" % name)
        return path.read_bytes()
