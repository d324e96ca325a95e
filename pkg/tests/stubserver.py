"""In-process HTTP stub standing in for the external embedding service.

Behavior is switchable per scenario so tests can exercise every failure mode
of the wire protocol: short batches, ragged vectors, server errors, hangs,
and garbage bodies. Counts requests so cache tests can assert zero calls.
"""

from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


class StubEmbeddingServer:
    """Context manager running a configurable /embed endpoint on a free port."""

    def __init__(self, dim: int = 4, mode: str = "ok"):
        self.dim = dim
        self.mode = mode
        self.calls = 0
        self.received: list[dict] = []
        self._lock = threading.Lock()
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(length)) if length else {}
                with stub._lock:
                    stub.calls += 1
                    stub.received.append(body)
                if self.path != "/embed":
                    self.send_error(404)
                    return
                stub._respond(self, body)

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._server.daemon_threads = True
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    def _vector_for(self, text: str) -> list[float]:
        # Deterministic, text-dependent, never all-zero.
        base = [float((hash_chr + 1) % 7 + 1) for hash_chr in range(self.dim)]
        base[0] += float(len(text) % 13)
        return base

    def _respond(self, handler: BaseHTTPRequestHandler, body: dict) -> None:
        texts = body.get("texts", [])
        mode = self.mode
        if mode == "error500":
            handler.send_error(500, "boom")
            return
        if mode == "timeout":
            time.sleep(3.0)
            payload = {"dim": self.dim, "vectors": [self._vector_for(t) for t in texts]}
        elif mode == "bad_json":
            raw = b"this is not json"
            handler.send_response(200)
            handler.send_header("Content-Type", "application/json")
            handler.send_header("Content-Length", str(len(raw)))
            handler.end_headers()
            handler.wfile.write(raw)
            return
        elif mode == "arity_short":
            payload = {"dim": self.dim, "vectors": [self._vector_for(t) for t in texts[:-1]]}
        elif mode == "ragged":
            vectors = [self._vector_for(t) for t in texts]
            if vectors:
                vectors[-1] = vectors[-1][:-1]
            payload = {"dim": self.dim, "vectors": vectors}
        elif mode == "fixed":
            payload = {"dim": self.dim, "vectors": [[2.0] + [0.0] * (self.dim - 1) for _ in texts]}
        else:  # ok
            payload = {"dim": self.dim, "vectors": [self._vector_for(t) for t in texts]}
        raw = json.dumps(payload).encode("utf-8")
        handler.send_response(200)
        handler.send_header("Content-Type", "application/json")
        handler.send_header("Content-Length", str(len(raw)))
        handler.end_headers()
        handler.wfile.write(raw)

    @property
    def endpoint(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def __enter__(self) -> "StubEmbeddingServer":
        self._thread.start()
        return self

    def __exit__(self, *exc) -> None:
        self._server.shutdown()
        self._server.server_close()
