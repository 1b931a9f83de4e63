"""Local HTTP API for the skill store.

    GET  /skills           catalog listing
    GET  /skills/<name>    one entry with warnings
    POST /install/<name>   the bundle archive (application/gzip)

Responses are self-contained; with a UI directory configured the service
also serves the static frontend, so the whole store works offline.
"""

from __future__ import annotations

import json
import logging
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from ..bus.broker import parse_address
from .catalog import Catalog, StoreError

logger = logging.getLogger(__name__)

_NAME_RE = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_-]*$")

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
}


class StoreService:
    def __init__(self, catalog: Catalog, address: str = "127.0.0.1:0",
                 ui_dir: str | None = None):
        self.catalog = catalog
        self.ui_dir = Path(ui_dir) if ui_dir else None
        host, port = parse_address(address)
        service = self

        class Handler(BaseHTTPRequestHandler):
            protocol_version = "HTTP/1.1"

            def log_message(self, fmt, *args):
                logger.debug("store: " + fmt, *args)

            def do_GET(self):
                service._handle(self, "GET")

            def do_POST(self):
                service._handle(self, "POST")

        self._server = ThreadingHTTPServer((host, port), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    @property
    def address(self) -> str:
        host, port = self._server.server_address[:2]
        return "%s:%d" % (host, port)

    @property
    def base_url(self) -> str:
        return "http://%s" % self.address

    def close(self):
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=2)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # -- request handling ---------------------------------------------------

    def _handle(self, request, method: str):
        path = request.path.split("?", 1)[0]
        try:
            if method == "GET" and path == "/skills":
                self._send_json(request, 200,
                                {"skills": [e.to_dict() for e in self.catalog.entries()]})
            elif method == "GET" and path.startswith("/skills/"):
                self._entry(request, path[len("/skills/"):])
            elif method == "POST" and path.startswith("/install/"):
                self._install(request, path[len("/install/"):])
            elif method == "GET":
                self._static(request, path)
            else:
                self._send_json(request, 404, {"error": "not found"})
        except BrokenPipeError:
            pass
        except Exception:
            logger.exception("store request %s %s failed", method, path)
            self._send_json(request, 500, {"error": "internal error"})

    def _entry(self, request, name: str):
        if not _NAME_RE.match(name):
            self._send_json(request, 400, {"error": "malformed skill name"})
            return
        entry = self.catalog.get(name)
        if entry is None:
            self._send_json(request, 404, {"error": "unknown skill %r" % name})
            return
        self._send_json(request, 200, entry.to_dict())

    def _install(self, request, name: str):
        if not _NAME_RE.match(name):
            self._send_json(request, 400, {"error": "malformed skill name"})
            return
        entry = self.catalog.get(name)
        if entry is None:
            self._send_json(request, 404, {"error": "unknown skill %r" % name})
            return
        try:
            payload = self.catalog.archive_bytes(name)
        except StoreError as exc:
            self._send_json(request, 404, {"error": str(exc)})
            return
        request.send_response(200)
        request.send_header("Content-Type", "application/gzip")
        request.send_header("Content-Length", str(len(payload)))
        request.send_header("X-Content-Hash", entry.content_hash)
        request.end_headers()
        request.wfile.write(payload)

    def _static(self, request, path: str):
        if self.ui_dir is None:
            self._send_json(request, 404, {"error": "no UI bundled; use /skills"})
            return
        rel = path.lstrip("/") or "index.html"
        target = (self.ui_dir / rel).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())) or not target.is_file():
            self._send_json(request, 404, {"error": "not found"})
            return
        payload = target.read_bytes()
        request.send_response(200)
        request.send_header("Content-Type",
                            _CONTENT_TYPES.get(target.suffix, "application/octet-stream"))
        request.send_header("Content-Length", str(len(payload)))
        request.end_headers()
        request.wfile.write(payload)

    @staticmethod
    def _send_json(request, status: int, doc: dict):
        payload = json.dumps(doc, sort_keys=True).encode("utf-8")
        request.send_response(status)
        request.send_header("Content-Type", "application/json")
        request.send_header("Content-Length", str(len(payload)))
        request.end_headers()
        request.wfile.write(payload)


def serve_store(catalog_dir, address: str = "127.0.0.1:0",
                ui_dir: str | None = None) -> StoreService:
    return StoreService(Catalog(catalog_dir), address=address, ui_dir=ui_dir)
