"""The corvid command line.

    corvid bus --listen 127.0.0.1:7301
    corvid skill lint <path>
    corvid skill install <path|url> --assistant-dir DIR
    corvid skill start|stop|status <name> --assistant-dir DIR
    corvid train <assistant-dir>
    corvid nlu parse --model nlu.bin "book me a flight ..."
    corvid nlu eval --model nlu.bin --testset labeled.jsonl
    corvid dialog --config assistant.yaml
    corvid satellite --id Alpha --wake-word computer [--script FILE]
    corvid store serve --catalog DIR --listen ADDR [--ui DIR]
    corvid store add <path|url> --catalog DIR

skill start/stop toggle a skill's autostart marker; the running master
process (corvid dialog) launches every enabled skill at boot.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import signal
import sys
import threading
from pathlib import Path

import yaml

logger = logging.getLogger(__name__)

DISABLED_MARKER = ".disabled"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    handler = getattr(args, "handler", None)
    if handler is None:
        parser.print_help()
        return 2
    return handler(args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="corvid",
                                     description="offline voice assistant framework")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("bus", help="run the message broker")
    p.add_argument("--listen", default=None, help="host:port (default from CORVID_BUS_ADDR)")
    p.set_defaults(handler=cmd_bus)

    skill = sub.add_parser("skill", help="manage skill bundles")
    skill_sub = skill.add_subparsers(dest="skill_command")
    p = skill_sub.add_parser("lint", help="check a bundle, print errors or OK")
    p.add_argument("path")
    p.set_defaults(handler=cmd_skill_lint)
    p = skill_sub.add_parser("install", help="install a bundle from a path or URL")
    p.add_argument("source")
    p.add_argument("--assistant-dir", default=".")
    p.set_defaults(handler=cmd_skill_install)
    for name, help_text in (("start", "enable a skill's autostart"),
                            ("stop", "disable a skill's autostart"),
                            ("status", "show installed skills")):
        p = skill_sub.add_parser(name, help=help_text)
        p.add_argument("name", nargs="?" if name == "status" else None)
        p.add_argument("--assistant-dir", default=".")
        p.set_defaults(handler={"start": cmd_skill_start, "stop": cmd_skill_stop,
                                "status": cmd_skill_status}[name])

    p = sub.add_parser("train", help="expand examples, build the LM and NLU models")
    p.add_argument("assistant_dir")
    p.add_argument("--order", type=int, default=3, help="n-gram order (default 3)")
    p.add_argument("--cap", type=int, default=1000, help="max expansions per sentence")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_train)

    nlu = sub.add_parser("nlu", help="parse utterances / evaluate models")
    nlu_sub = nlu.add_subparsers(dest="nlu_command")
    p = nlu_sub.add_parser("parse")
    p.add_argument("--model", required=True)
    p.add_argument("text")
    p.set_defaults(handler=cmd_nlu_parse)
    p = nlu_sub.add_parser("eval")
    p.add_argument("--model", required=True)
    p.add_argument("--testset", required=True)
    p.set_defaults(handler=cmd_nlu_eval)

    p = sub.add_parser("dialog", help="run the master node (broker + core services)")
    p.add_argument("--config", required=True)
    p.set_defaults(handler=cmd_dialog)

    p = sub.add_parser("satellite", help="run a text-mode satellite")
    p.add_argument("--id", required=True)
    p.add_argument("--wake-word", default="computer")
    p.add_argument("--script", default=None, help="replay '<+ms> <text>' lines")
    p.add_argument("--bus", default=None, help="bus address (default CORVID_BUS_ADDR)")
    p.add_argument("--token", default=None, help="client token (default CORVID_CLIENT_TOKEN)")
    p.set_defaults(handler=cmd_satellite)

    store = sub.add_parser("store", help="skill store service")
    store_sub = store.add_subparsers(dest="store_command")
    p = store_sub.add_parser("serve")
    p.add_argument("--catalog", required=True)
    p.add_argument("--listen", default="127.0.0.1:0")
    p.add_argument("--ui", default=None, help="directory with the static store UI")
    p.set_defaults(handler=cmd_store_serve)
    p = store_sub.add_parser("add")
    p.add_argument("source")
    p.add_argument("--catalog", required=True)
    p.set_defaults(handler=cmd_store_add)

    return parser


# -- handlers ------------------------------------------------------------


def cmd_bus(args) -> int:
    from .bus import AddressInUseError, BrokerConfig, ConfigError, ENV_BUS_ADDR, broker_start

    gate = _InterruptGate()
    listen = args.listen or os.environ.get(ENV_BUS_ADDR) or "127.0.0.1:0"
    try:
        broker = broker_start(BrokerConfig(listen=listen))
    except (AddressInUseError, ConfigError) as exc:
        print("bus: %s" % exc, file=sys.stderr)
        return 1
    print("bus listening on %s" % broker.address, flush=True)
    gate.wait()
    broker.close()
    return 0


def cmd_skill_lint(args) -> int:
    from .dsl import DslError, load_bundle

    try:
        bundle = load_bundle(args.path)
    except DslError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    for warning in bundle.warnings:
        print("warning: %s" % warning)
    print("OK")
    return 0


def cmd_skill_install(args) -> int:
    from .dsl import DslError, load_bundle
    from .runtime.installer import InstallError, fetch_bundle_dir

    skills_dir = Path(args.assistant_dir) / "skills"
    try:
        root = fetch_bundle_dir(args.source, skills_dir)
        bundle = load_bundle(root, source_url=args.source)
    except (InstallError, DslError) as exc:
        print("install failed: %s" % exc, file=sys.stderr)
        return 1
    print("installed %s -> %s" % (bundle.name, root))
    return 0


def _skill_dir(args, name: str) -> Path:
    path = Path(args.assistant_dir) / "skills" / name
    if not path.is_dir():
        print("skill %r is not installed under %s" % (name, path.parent), file=sys.stderr)
        raise SystemExit(1)
    return path


def cmd_skill_start(args) -> int:
    marker = _skill_dir(args, args.name) / DISABLED_MARKER
    if marker.exists():
        marker.unlink()
    print("%s enabled (starts with the master process)" % args.name)
    return 0


def cmd_skill_stop(args) -> int:
    marker = _skill_dir(args, args.name) / DISABLED_MARKER
    marker.touch()
    print("%s disabled" % args.name)
    return 0


def cmd_skill_status(args) -> int:
    from .dsl import DslError, load_bundle

    skills_dir = Path(args.assistant_dir) / "skills"
    names = [args.name] if args.name else sorted(
        p.name for p in skills_dir.iterdir() if p.is_dir()) if skills_dir.is_dir() else []
    for name in names:
        root = skills_dir / name
        enabled = not (root / DISABLED_MARKER).exists()
        try:
            bundle = load_bundle(root)
            kind = "action" if bundle.manifest.has_action else "dialog-only"
            print("%-20s %-12s %s" % (name, "enabled" if enabled else "disabled", kind))
        except DslError as exc:
            print("%-20s %-12s broken: %s" % (name, "enabled" if enabled else "disabled", exc))
    return 0


def cmd_train(args) -> int:
    from .datagen import build_lm, expand, save_lm, write_examples_jsonl
    from .dsl import DslError, load_bundle
    from .nlu import save_nlu, train_nlu

    assistant_dir = Path(args.assistant_dir)
    skills_dir = assistant_dir / "skills"
    if not skills_dir.is_dir():
        print("no skills/ directory under %s" % assistant_dir, file=sys.stderr)
        return 1
    bundles = []
    for root in sorted(p for p in skills_dir.iterdir() if p.is_dir()):
        try:
            bundles.append(load_bundle(root))
        except DslError as exc:
            print("skipping %s: %s" % (root.name, exc), file=sys.stderr)
    if not bundles:
        print("no valid skills found", file=sys.stderr)
        return 1
    examples = []
    for bundle in bundles:
        examples.extend(expand(bundle, max_per_sentence=args.cap, seed=args.seed))
    write_examples_jsonl(examples, assistant_dir / "nlu_examples.jsonl")
    save_lm(build_lm(examples, order=args.order), assistant_dir / "lm.bin")
    save_nlu(train_nlu(examples, bundles), assistant_dir / "nlu.bin")
    print("trained on %d skills, %d examples -> nlu_examples.jsonl, lm.bin, nlu.bin"
          % (len(bundles), len(examples)))
    return 0


def cmd_nlu_parse(args) -> int:
    from .nlu import IntentResult, load_nlu, parse

    model = load_nlu(args.model)
    result = parse(model, args.text)
    if isinstance(result, IntentResult):
        print("intent:     %s" % result.intent_id)
        print("confidence: %.3f" % result.confidence)
        for e in result.entities:
            print("entity: %s role=%s value=%r raw=%r span=[%d,%d)"
                  % (e.entity, e.role, e.value, e.raw, e.char_span[0], e.char_span[1]))
    else:
        print("intent:     <none>")
        if result.best_intent:
            print("(best was %s at %.3f, below threshold %.2f)"
                  % (result.best_intent, result.best_score, model.threshold))
    return 0


def cmd_nlu_eval(args) -> int:
    from .nlu import LabeledUtterance, evaluate, load_nlu

    model = load_nlu(args.model)
    labeled = []
    for line in Path(args.testset).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        doc = json.loads(line)
        labeled.append(LabeledUtterance(
            text=doc["text"], intent_id=doc["intent_id"],
            slots=tuple((s[0], s[1], s[2]) for s in doc.get("slots", ()))))
    report = evaluate(model, labeled)
    print(report.summary())
    return 0


def cmd_dialog(args) -> int:
    gate = _InterruptGate()
    master = start_master(args.config)
    print("assistant ready on %s" % master["broker"].address, flush=True)
    gate.wait()
    stop_master(master)
    return 0


def start_master(config_path) -> dict:
    """Boot broker + core services + skills from an assistant config file."""
    from .bus import BrokerConfig, broker_start
    from .datagen import load_lm
    from .dialog import DialogConfig, SessionState
    from .dialog.service import CoreServices
    from .nlu import load_nlu
    from .runtime.host import SkillHost

    config_path = Path(config_path)
    doc = yaml.safe_load(config_path.read_text(encoding="utf-8")) or {}
    base = config_path.parent

    def resolve(p):
        p = Path(p)
        return p if p.is_absolute() else base / p

    broker = broker_start(BrokerConfig(listen=doc.get("listen", "127.0.0.1:0")))
    satellites = doc.get("satellites", {}) or {}
    for sat_id, token in satellites.items():
        broker.authorize("satellite-%s" % sat_id, {"*"}, {"*"}, token=str(token))

    nlu_model = load_nlu(resolve(doc.get("nlu_model", "nlu.bin")))
    lm = None
    lm_path = doc.get("lm_model")
    if lm_path:
        lm = load_lm(resolve(lm_path))

    dialog_config = DialogConfig()
    if "window_ms" in doc:
        dialog_config.window_ms = int(doc["window_ms"])
    for state_name, ms in (doc.get("deadlines_ms") or {}).items():
        dialog_config.deadlines_ms[SessionState(state_name)] = int(ms)
    for reason, phrase in (doc.get("fallbacks") or {}).items():
        dialog_config.fallbacks[reason] = str(phrase)

    services = CoreServices(broker, nlu_model, lm=lm, dialog_config=dialog_config,
                            satellites=satellites.keys(),
                            alpha=float(doc.get("alpha", 1.0)),
                            beta=float(doc.get("beta", 0.0)))

    host = None
    skills_dir = resolve(doc.get("skills_dir", "skills"))
    if skills_dir.is_dir():
        host = SkillHost(broker, skills_dir)
        if doc.get("start_skills", True):
            for name in sorted(host.skills):
                if not (host.skills[name].root / DISABLED_MARKER).exists():
                    host.start(name)
    return {"broker": broker, "services": services, "host": host}


def stop_master(master: dict):
    if master.get("host") is not None:
        master["host"].close()
    master["services"].close()
    master["broker"].close()


def cmd_satellite(args) -> int:
    from .bus import ClientSession, ENV_BUS_ADDR, NotConnectedError
    from .bus.client import ENV_CLIENT_TOKEN
    from .satellite import SatelliteConfig, run_satellite

    bus_addr = args.bus or os.environ.get(ENV_BUS_ADDR)
    token = args.token or os.environ.get(ENV_CLIENT_TOKEN)
    if not bus_addr or not token:
        print("satellite: need --bus/CORVID_BUS_ADDR and --token/CORVID_CLIENT_TOKEN",
              file=sys.stderr)
        return 1
    config = SatelliteConfig(id=args.id, wake_word=args.wake_word,
                             bus_addr=bus_addr, script_path=args.script)
    try:
        session = ClientSession.connect(bus_addr, "satellite-%s" % args.id, token)
    except NotConnectedError as exc:
        print("satellite: %s" % exc, file=sys.stderr)
        return 1
    return run_satellite(config, session)


def cmd_store_serve(args) -> int:
    from .store import serve_store

    gate = _InterruptGate()
    service = serve_store(args.catalog, address=args.listen, ui_dir=args.ui)
    print("store listening on %s" % service.base_url, flush=True)
    gate.wait()
    service.close()
    return 0


def cmd_store_add(args) -> int:
    from .dsl import DslError
    from .runtime.installer import InstallError
    from .store import Catalog

    try:
        entry = Catalog(args.catalog).add(args.source)
    except (DslError, InstallError) as exc:
        print("store add failed: %s" % exc, file=sys.stderr)
        return 1
    print("indexed %s (%d warnings, hash %s)"
          % (entry.name, len(entry.warnings), entry.content_hash[:12]))
    return 0


class _InterruptGate:
    """Installs SIGINT/SIGTERM handlers immediately; wait() blocks until one fires."""

    def __init__(self):
        self._stop = threading.Event()
        self._previous = {}
        for sig in (signal.SIGINT, signal.SIGTERM):
            try:
                self._previous[sig] = signal.signal(sig, self._handle)
            except ValueError:  # not on the main thread
                pass

    def _handle(self, _sig, _frame):
        self._stop.set()

    def wait(self):
        try:
            self._stop.wait()
        finally:
            for sig, old in self._previous.items():
                signal.signal(sig, old)


if __name__ == "__main__":
    sys.exit(main())
