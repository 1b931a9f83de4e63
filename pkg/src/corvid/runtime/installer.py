"""Fetching skill bundles from local paths, archives, or URLs."""

from __future__ import annotations

import io
import shutil
import tarfile
import urllib.request
from pathlib import Path

from ..dsl.bundle import load_bundle
from ..dsl.errors import DslError


class InstallError(Exception):
    pass


def fetch_bundle_dir(source: str, dest_root: Path) -> Path:
    """Materialize the bundle behind `source` under dest_root/<name>.

    Accepts a bundle directory, a .tar.gz archive, or a file:// / http(s)://
    URL serving such an archive (a store's /install/<name> endpoint counts).
    """
    dest_root = Path(dest_root)
    dest_root.mkdir(parents=True, exist_ok=True)

    if source.startswith(("http://", "https://", "file://")):
        data = _fetch_url(source)
        return _extract_archive(io.BytesIO(data), dest_root)

    path = Path(source)
    if path.is_dir():
        bundle = load_bundle(path, source_url=str(path))  # validate before copying
        target = dest_root / bundle.name
        if target.resolve() == path.resolve():
            return target
        if target.exists():
            shutil.rmtree(target)
        shutil.copytree(path, target)
        return target
    if path.is_file():
        with open(path, "rb") as fh:
            return _extract_archive(fh, dest_root)
    raise InstallError("skill source %r does not exist" % source)


def _fetch_url(url: str) -> bytes:
    # Store installs are POST /install/<name>; plain files are GET.
    method = "POST" if "/install/" in url else "GET"
    request = urllib.request.Request(url, method=method)
    try:
        with urllib.request.urlopen(request, timeout=30) as resp:
            return resp.read()
    except OSError as exc:
        raise InstallError("cannot fetch %s: %s" % (url, exc)) from exc


def _extract_archive(fileobj, dest_root: Path) -> Path:
    try:
        with tarfile.open(fileobj=fileobj, mode="r:gz") as tar:
            names = _safe_members(tar)
            top = {name.split("/", 1)[0] for name in names}
            if len(top) != 1:
                raise InstallError("archive must contain exactly one bundle directory")
            (name,) = top
            target = dest_root / name
            if target.exists():
                shutil.rmtree(target)
            tar.extractall(dest_root)
            return target
    except tarfile.TarError as exc:
        raise InstallError("not a readable .tar.gz archive: %s" % exc) from exc


def _safe_members(tar: tarfile.TarFile) -> list[str]:
    names = []
    for member in tar.getmembers():
        name = member.name
        if name.startswith("/") or ".." in Path(name).parts:
            raise InstallError("archive member escapes the target directory: %r" % name)
        if not (member.isfile() or member.isdir()):
            raise InstallError("archive member %r is not a plain file" % name)
        names.append(name)
    if not names:
        raise InstallError("archive is empty")
    return names


def validate_bundle_dir(path: Path):
    """Parse the bundle, raising the DSL's positioned errors on any problem."""
    try:
        return load_bundle(path)
    except DslError:
        raise
