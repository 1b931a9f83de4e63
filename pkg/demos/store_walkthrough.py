#!/usr/bin/env python3
"""Index the fixture skills into a catalog, serve the store API, inspect
permission warnings over HTTP, and install a bundle from it.

    python3 demos/store_walkthrough.py
"""

import json
import tempfile
import urllib.request
from pathlib import Path

from corvid.runtime import fetch_bundle_dir
from corvid.store import Catalog, serve_store

SKILLS = Path(__file__).parent.parent / "tests" / "fixtures" / "skills"


def main():
    workdir = Path(tempfile.mkdtemp(prefix="corvid-demo-"))
    catalog = Catalog(workdir / "catalog")
    print("== index skills ==")
    for name in ("myskill", "weather", "smalltalk"):
        entry = catalog.add(str(SKILLS / name))
        print("indexed %-10s hash=%s" % (entry.name, entry.content_hash[:12]))
        for warning in entry.warnings:
            print("   warning [%s/%s] %s" % (warning.kind, warning.severity,
                                             warning.detail))

    print("\n== serve and query the HTTP API ==")
    service = serve_store(workdir / "catalog")
    print("store at", service.base_url)
    with urllib.request.urlopen(service.base_url + "/skills") as resp:
        listing = json.loads(resp.read())
    print("catalog:", ", ".join(s["name"] for s in listing["skills"]))

    with urllib.request.urlopen(service.base_url + "/skills/weather") as resp:
        weather = json.loads(resp.read())
    print("weather topics_read:", weather["manifest"]["topics_read"])
    print("weather warnings:", [w["kind"] for w in weather["warnings"]])

    print("\n== install from the store ==")
    installed = fetch_bundle_dir(service.base_url + "/install/myskill",
                                 workdir / "skills")
    print("installed to", installed)
    print("files:", sorted(p.name for p in installed.rglob("*") if p.is_file()))

    service.close()


if __name__ == "__main__":
    main()
