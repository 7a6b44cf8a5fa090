"""HTTP what-if prediction service.

Three JSON endpoints over an immutable artifact bundle:

    POST /api/v1/predict/hindex   author form -> future h-index trajectory point
    POST /api/v1/predict/paper    paper form  -> contribution probability + factors
    GET  /api/v1/health           artifact versions and corpus checksum

plus static file serving of the built web UI under ``/``. Handlers call the
same pure functions the offline pipeline uses, so a given (artifacts, body)
pair always yields byte-identical responses, concurrent or not. Errors carry
``{"error": {"code", "message", ...}}`` with a 4xx/5xx status.
"""

from __future__ import annotations

import json
import mimetypes
import os
import posixpath
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from . import pipeline
from .errors import SciImpactError
from .pipeline import ArtifactBundle, QueryValidationError

_PLACEHOLDER = (
    "<!doctype html><title>sciimpact</title>"
    "<h1>sciimpact prediction service</h1>"
    "<p>No web UI bundle is installed. The JSON API lives under /api/v1/.</p>"
)


class PredictionHandler(BaseHTTPRequestHandler):
    server_version = "sciimpact"
    bundle: ArtifactBundle
    static_dir: str | None = None
    quiet = True

    def log_message(self, fmt, *log_args):  # pragma: no cover - log plumbing
        if not self.quiet:
            super().log_message(fmt, *log_args)

    # -- helpers ----------------------------------------------------------

    def _send_json(self, status: int, payload: dict) -> None:
        # insertion order is meaningful (factor_breakdown follows the catalog)
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_error_json(self, status: int, code: str, message: str, **extra) -> None:
        self._send_json(status, {"error": {"code": code, "message": message, **extra}})

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            raise QueryValidationError("body", "empty request body")
        try:
            return json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise QueryValidationError("body", f"request body is not valid JSON: {exc}") from exc

    # -- routes -----------------------------------------------------------

    def do_GET(self) -> None:
        path = self.path.split("?", 1)[0]
        if path == "/api/v1/health":
            self._health()
        elif path.startswith("/api/"):
            self._send_error_json(404, "not-found", f"unknown endpoint {path}")
        else:
            self._static(path)

    def do_POST(self) -> None:
        path = self.path.split("?", 1)[0]
        routes = {
            "/api/v1/predict/hindex": pipeline.predict_hindex_query,
            "/api/v1/predict/paper": pipeline.predict_paper_query,
        }
        fn = routes.get(path)
        if fn is None:
            self._send_error_json(404, "not-found", f"unknown endpoint {path}")
            return
        missing = self.bundle.missing()
        if missing:
            self._send_error_json(503, "artifacts-missing", "service not ready", missing=missing)
            return
        try:
            payload = self._read_body()
            self._send_json(200, fn(self.bundle, payload))
        except QueryValidationError as exc:
            self._send_error_json(400, "invalid-field", str(exc), field=exc.field)
        except SciImpactError as exc:
            self._send_error_json(500, "pipeline-error", str(exc))

    def _health(self) -> None:
        missing = self.bundle.missing()
        if missing:
            self._send_error_json(503, "artifacts-missing", "service not ready", missing=missing)
            return
        self._send_json(
            200,
            {
                "status": "ok",
                "model_versions": self.bundle.versions,
                "corpus_checksum": self.bundle.corpus_checksum,
                "t": self.bundle.t,
                "delta_t": self.bundle.delta_t,
            },
        )

    def _static(self, path: str) -> None:
        if self.static_dir is None:
            if path in ("/", "/index.html"):
                body = _PLACEHOLDER.encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "text/html; charset=utf-8")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)
            else:
                self._send_error_json(404, "not-found", "no web UI installed")
            return
        clean = posixpath.normpath(path.lstrip("/")) or "index.html"
        if clean.startswith(".."):
            self._send_error_json(404, "not-found", "bad path")
            return
        full = os.path.join(self.static_dir, clean)
        if os.path.isdir(full):
            full = os.path.join(full, "index.html")
        if not os.path.isfile(full):
            self._send_error_json(404, "not-found", f"no such file {clean}")
            return
        ctype = mimetypes.guess_type(full)[0] or "application/octet-stream"
        with open(full, "rb") as fh:
            body = fh.read()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


def make_server(
    bundle: ArtifactBundle,
    host: str = "127.0.0.1",
    port: int = 0,
    static_dir: str | None = None,
    quiet: bool = True,
) -> ThreadingHTTPServer:
    """Threaded HTTP server over an immutable bundle; port 0 picks a free one."""
    handler = type(
        "BoundPredictionHandler",
        (PredictionHandler,),
        {"bundle": bundle, "static_dir": static_dir, "quiet": quiet},
    )
    return ThreadingHTTPServer((host, port), handler)
