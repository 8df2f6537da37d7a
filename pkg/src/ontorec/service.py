"""Minimal HTTP recommendation endpoint over a loaded rule base.

``POST /recommend`` with ``{"urls": [...]}`` returns the ranked
recommendations; see docs/interface.md for the full schema.
"""

from __future__ import annotations

import json
import logging
import threading
from http import HTTPStatus
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from ontorec.errors import EmptyHistory, LogParseError
from ontorec.ontology import AnnotationMap, SemanticDistanceMatrix
from ontorec.rules import DEFAULT_MAX_RESULTS, RuleBase, recommend

log = logging.getLogger(__name__)

MAX_BODY = 1 << 20


class RecommendationService:
    """Socket-free request handling, so the contract can be tested directly."""

    def __init__(self, rb: RuleBase, ann: AnnotationMap, M: SemanticDistanceMatrix | None,
                 window: int = 2, threshold: float = 0.0, max_results: int = DEFAULT_MAX_RESULTS):
        self.rb = rb
        self.ann = ann
        self.M = M
        self.window = window
        self.threshold = threshold
        self.max_results = max_results

    def handle(self, body: bytes) -> tuple[int, dict]:
        try:
            request = json.loads(body.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            return 400, _error("E_BAD_REQUEST", f"body is not valid JSON: {exc}")
        if not isinstance(request, dict):
            return 400, _error("E_BAD_REQUEST", "body must be a JSON object")
        urls = request.get("urls")
        if not isinstance(urls, list) or not all(isinstance(u, str) for u in urls):
            return 400, _error("E_BAD_REQUEST", "'urls' must be a list of strings")

        threshold = request.get("threshold", self.threshold)
        k = request.get("k", self.max_results)
        if isinstance(threshold, bool) or not isinstance(threshold, (int, float)) or not 0 <= threshold <= 1:
            return 400, _error("E_BAD_REQUEST", "'threshold' must be a number in [0, 1]")
        if isinstance(k, bool) or not isinstance(k, int) or k < 1:
            return 400, _error("E_BAD_REQUEST", "'k' must be a positive integer")

        try:
            recs = recommend(urls, self.rb, self.ann, self.M, self.window, float(threshold), k)
        except LogParseError as exc:
            return 400, _error("E_BAD_REQUEST", f"bad url: {exc.message}")
        except EmptyHistory as exc:
            return 422, _error(exc.code, exc.message)
        return 200, {"recommendations": [
            {"pages": list(r.pages), "instance": r.instance, "confidence": r.confidence} for r in recs
        ]}


def _error(code: str, message: str) -> dict:
    return {"error": code, "message": message}


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    disable_nagle_algorithm = True
    service: RecommendationService  # set on the subclass built by make_server

    def _send(self, status: int, payload: dict) -> None:
        body = json.dumps(payload, separators=(",", ":")).encode("utf-8")
        head = (f"HTTP/1.1 {status} {HTTPStatus(status).phrase}\r\n"
                "Content-Type: application/json\r\n"
                f"Content-Length: {len(body)}\r\n\r\n").encode("ascii")
        self.wfile.write(head + body)  # one write: no small-packet stalls

    def do_POST(self):
        if self.path.split("?", 1)[0] != "/recommend":
            self._send(404, _error("E_NOT_FOUND", f"no route {self.path}"))
            return
        try:
            length = int(self.headers.get("Content-Length", ""))
        except ValueError:
            self.close_connection = True
            self._send(400, _error("E_BAD_REQUEST", "Content-Length required"))
            return
        if not 0 <= length <= MAX_BODY:
            self.close_connection = True
            self._send(400, _error("E_BAD_REQUEST", "body too large"))
            return
        status, payload = self.service.handle(self.rfile.read(length))
        self._send(status, payload)

    def do_GET(self):
        if self.path == "/health":
            self._send(200, {"status": "ok", "rules": len(self.service.rb)})
        else:
            self._send(404, _error("E_NOT_FOUND", f"no route {self.path}"))

    def log_message(self, format, *args):
        log.debug("%s - %s", self.address_string(), format % args)


def make_server(service: RecommendationService, host: str = "127.0.0.1", port: int = 8080) -> ThreadingHTTPServer:
    handler = type("Handler", (_Handler,), {"service": service})
    server = ThreadingHTTPServer((host, port), handler)
    server.daemon_threads = True
    return server


def serve_in_thread(service: RecommendationService, host: str = "127.0.0.1", port: int = 0):
    """Start a server on a background thread; returns ``(server, thread)``."""
    server = make_server(service, host, port)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, thread
