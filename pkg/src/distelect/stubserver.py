"""Offline replay endpoint speaking just enough of the chat-completions protocol.

Serves canned first-token distributions so every fetch path can run without a
real model endpoint. Fixture shape::

    {
      "default": [["47", 0.6], [" 48", 0.4]],
      "by_user_text": {
        "<exact user prompt>": [["52", 1.0]]
      }
    }

A fixture value of ``{"status": 503}`` forces that HTTP status, and
``{"omit_logprobs": true}`` returns a well-formed completion without any
logprob block. Run standalone with ``python -m distelect.stubserver
fixtures.json``.
"""

from __future__ import annotations

import argparse
import json
import math
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


class ReplayServer:
    """A loopback chat-completions server replaying fixture distributions."""

    def __init__(self, fixtures: dict, host: str = "127.0.0.1", port: int = 0,
                 require_auth: bool = False):
        self.fixtures = fixtures
        self.require_auth = require_auth
        self.request_count = 0
        self._lock = threading.Lock()
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):  # keep test output clean
                pass

            def do_POST(self):
                outer._handle(self)

        self._http = ThreadingHTTPServer((host, port), Handler)
        self._thread = threading.Thread(target=self._http.serve_forever, daemon=True)

    @property
    def base_url(self) -> str:
        host, port = self._http.server_address[:2]
        return f"http://{host}:{port}/v1"

    def start(self) -> "ReplayServer":
        self._thread.start()
        return self

    def stop(self) -> None:
        self._http.shutdown()
        self._http.server_close()

    def __enter__(self) -> "ReplayServer":
        return self.start()

    def __exit__(self, *exc_info) -> None:
        self.stop()

    # -- request handling -------------------------------------------------

    def _lookup(self, user_text: str):
        by_user = self.fixtures.get("by_user_text", {})
        if user_text in by_user:
            return by_user[user_text]
        return self.fixtures.get("default")

    def _handle(self, handler: BaseHTTPRequestHandler) -> None:
        with self._lock:
            self.request_count += 1
        if self.require_auth:
            auth = handler.headers.get("Authorization", "")
            if not auth.startswith("Bearer ") or len(auth) <= len("Bearer "):
                self._send(handler, 401, {"error": "missing bearer token"})
                return
        if not handler.path.endswith("/chat/completions"):
            self._send(handler, 404, {"error": f"unknown path {handler.path}"})
            return
        length = int(handler.headers.get("Content-Length", "0"))
        try:
            body = json.loads(handler.rfile.read(length) or b"{}")
        except json.JSONDecodeError:
            self._send(handler, 400, {"error": "request body is not JSON"})
            return
        user_text = ""
        for message in body.get("messages", []):
            if message.get("role") == "user":
                user_text = message.get("content", "")
        fixture = self._lookup(user_text)
        if fixture is None:
            self._send(handler, 404, {"error": f"no fixture for user text {user_text!r}"})
            return
        if isinstance(fixture, dict):
            if "status" in fixture:
                self._send(handler, int(fixture["status"]), {"error": "forced status"})
                return
            if fixture.get("omit_logprobs"):
                self._send(handler, 200, {
                    "model": body.get("model", "stub"),
                    "choices": [{"message": {"role": "assistant", "content": "47"}}],
                })
                return
        top = [{"token": token, "logprob": math.log(prob)} for token, prob in fixture]
        self._send(handler, 200, {
            "model": body.get("model", "stub"),
            "choices": [{
                "logprobs": {
                    "content": [{
                        "token": top[0]["token"],
                        "logprob": top[0]["logprob"],
                        "top_logprobs": top,
                    }]
                }
            }],
        })

    @staticmethod
    def _send(handler: BaseHTTPRequestHandler, status: int, payload: dict) -> None:
        raw = json.dumps(payload).encode("utf-8")
        handler.send_response(status)
        handler.send_header("Content-Type", "application/json")
        handler.send_header("Content-Length", str(len(raw)))
        handler.end_headers()
        handler.wfile.write(raw)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Replay canned token distributions.")
    parser.add_argument("fixtures", help="fixture JSON path")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8123)
    args = parser.parse_args(argv)
    with open(args.fixtures, encoding="utf-8") as fh:
        fixtures = json.load(fh)
    server = ReplayServer(fixtures, host=args.host, port=args.port)
    print(f"replaying {args.fixtures} at {server.base_url}")
    try:
        server.start()
        server._thread.join()
    except KeyboardInterrupt:
        server.stop()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
