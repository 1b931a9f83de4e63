"""Skill host: installs bundles and runs their action processes.

Containers are replaced by OS processes whose bus access is scoped by a
per-skill credential: the token minted at start time authorizes exactly the
manifest's topics_read / topics_write, so an action process can never hold
key material beyond its declaration. extra_container_flags is recorded and
surfaced but never executed.
"""

from __future__ import annotations

import logging
import shlex
import subprocess
import threading
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from ..bus import Broker, ENV_BUS_ADDR
from ..bus.client import ENV_CLIENT_ID, ENV_CLIENT_TOKEN
from ..dsl.ast import SkillBundle
from ..dsl.bundle import load_bundle
from .installer import fetch_bundle_dir
from .sdk import ENV_MANIFEST

logger = logging.getLogger(__name__)

STDERR_TAIL_LIMIT = 4096


class SkillState(Enum):
    STOPPED = "Stopped"
    RUNNING = "Running"
    CRASHED = "Crashed"


@dataclass
class InstalledSkill:
    bundle: SkillBundle
    root: Path
    state: SkillState = SkillState.STOPPED
    exit_code: int | None = None
    stderr_tail: str = ""
    process: subprocess.Popen | None = field(default=None, repr=False)
    _stopping: bool = field(default=False, repr=False)

    @property
    def name(self) -> str:
        return self.bundle.name

    @property
    def client_id(self) -> str:
        return "skill-%s" % self.bundle.name


class SkillHost:
    def __init__(self, broker: Broker, skills_dir):
        self.broker = broker
        self.skills_dir = Path(skills_dir)
        self.skills_dir.mkdir(parents=True, exist_ok=True)
        self.skills: dict[str, InstalledSkill] = {}
        self._lock = threading.Lock()
        self.load_installed()

    def load_installed(self):
        for entry in sorted(self.skills_dir.iterdir()) if self.skills_dir.is_dir() else []:
            if entry.is_dir() and (entry / "config.yaml").is_file():
                bundle = load_bundle(entry)
                with self._lock:
                    self.skills.setdefault(bundle.name, InstalledSkill(bundle=bundle, root=entry))

    def install(self, source: str) -> InstalledSkill:
        root = fetch_bundle_dir(source, self.skills_dir)
        bundle = load_bundle(root, source_url=source)
        skill = InstalledSkill(bundle=bundle, root=root)
        with self._lock:
            existing = self.skills.get(bundle.name)
            if existing is not None and existing.state is SkillState.RUNNING:
                self.stop(bundle.name)
            self.skills[bundle.name] = skill
        logger.info("installed skill %s from %s", bundle.name, source)
        return skill

    def status(self, name: str) -> InstalledSkill:
        with self._lock:
            if name not in self.skills:
                raise KeyError("skill %r is not installed" % name)
            return self.skills[name]

    def start(self, name: str) -> InstalledSkill:
        skill = self.status(name)
        if not skill.bundle.manifest.has_action:
            # Dialog-only skill: nothing to launch.
            return skill
        if skill.state is SkillState.RUNNING and skill.process and skill.process.poll() is None:
            return skill

        token = self.broker.authorize(
            skill.client_id,
            read=set(skill.bundle.manifest.topics_read),
            write=set(skill.bundle.manifest.topics_write),
        )
        action = skill.bundle.action
        env = {
            **_base_env(),
            ENV_BUS_ADDR: self.broker.address,
            ENV_CLIENT_ID: skill.client_id,
            ENV_CLIENT_TOKEN: token,
            ENV_MANIFEST: str(skill.root / "config.yaml"),
        }
        skill._stopping = False
        try:
            skill.process = subprocess.Popen(
                shlex.split(action.run),
                cwd=action.directory,
                env=env,
                stdout=subprocess.DEVNULL,
                stderr=subprocess.PIPE,
            )
        except OSError as exc:
            skill.state = SkillState.CRASHED
            skill.exit_code = None
            skill.stderr_tail = str(exc)
            logger.error("skill %s failed to launch: %s", name, exc)
            return skill
        skill.state = SkillState.RUNNING
        skill.exit_code = None
        skill.stderr_tail = ""
        threading.Thread(target=self._watch, args=(skill,), daemon=True).start()
        logger.info("skill %s running (pid %d)", name, skill.process.pid)
        return skill

    def _watch(self, skill: InstalledSkill):
        proc = skill.process
        stderr = b""
        try:
            if proc.stderr is not None:
                stderr = proc.stderr.read() or b""
            proc.wait()
        except Exception:
            logger.exception("watcher for %s failed", skill.name)
        skill.exit_code = proc.returncode
        skill.stderr_tail = stderr[-STDERR_TAIL_LIMIT:].decode("utf-8", "replace")
        if skill._stopping or proc.returncode == 0:
            skill.state = SkillState.STOPPED
        else:
            skill.state = SkillState.CRASHED
            logger.warning("skill %s crashed with code %s: %s",
                           skill.name, proc.returncode, skill.stderr_tail.strip())

    def stop(self, name: str) -> InstalledSkill:
        skill = self.status(name)
        proc = skill.process
        if proc is not None and proc.poll() is None:
            skill._stopping = True
            proc.terminate()
            try:
                proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                proc.kill()
                proc.wait(timeout=5)
        if skill.state is not SkillState.CRASHED:
            skill.state = SkillState.STOPPED
        return skill

    def close(self):
        with self._lock:
            names = list(self.skills)
        for name in names:
            try:
                self.stop(name)
            except KeyError:
                pass


def _base_env() -> dict:
    import os
    return dict(os.environ)
