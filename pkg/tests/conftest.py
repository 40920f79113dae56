"""Shared fixtures: a hit-counting stub file server and result reporting."""
from __future__ import annotations

import functools
import http.server
import threading
from dataclasses import dataclass, field
from pathlib import Path

import pytest


class _CountingHandler(http.server.SimpleHTTPRequestHandler):
    """Static file handler that tallies GET requests per path."""

    def log_message(self, fmt, *args):  # keep test output quiet
        pass

    def do_GET(self):
        with self.server.hits_lock:
            self.server.hits[self.path] = self.server.hits.get(self.path, 0) + 1
        super().do_GET()


@dataclass
class StubServer:
    root: Path
    url: str
    hits: dict = field(default_factory=dict)

    def add(self, name: str, content: bytes) -> str:
        """Publish a file under the server root; returns its URL."""
        target = self.root / name
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(content)
        return f"{self.url}/{name}"

    def total_hits(self) -> int:
        return sum(self.hits.values())


@pytest.fixture
def file_server(tmp_path_factory):
    root = tmp_path_factory.mktemp("served")
    handler = functools.partial(_CountingHandler, directory=str(root))
    httpd = http.server.ThreadingHTTPServer(("127.0.0.1", 0), handler)
    httpd.hits = {}
    httpd.hits_lock = threading.Lock()
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    try:
        yield StubServer(root=root, url=f"http://127.0.0.1:{httpd.server_address[1]}", hits=httpd.hits)
    finally:
        httpd.shutdown()
        httpd.server_close()
        thread.join(timeout=5)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per end-to-end acceptance check."""
    rows = {}
    for outcome, label in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            if label == "FAIL" or name not in rows:
                rows[name] = label
    if rows:
        terminalreporter.write_sep("-", "acceptance checks")
        for name in sorted(rows):
            terminalreporter.write_line(f"{rows[name]}  {name}")
