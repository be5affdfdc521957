"""Client for the external TypeScript/JavaScript definition resolver.

The resolver is a long-lived subprocess per project root speaking
newline-delimited JSON on stdin/stdout (one request per line, matching
response per line, correlated by id). A small pool keeps instances alive
across requests; an instance is never shared between in-flight requests.
"""

from __future__ import annotations

import json
import select
import subprocess
import threading
from dataclasses import dataclass, field

from .context import ContextSnippet, Symbol
from .curriculum import FimExample

PROTO_VERSION = 1


class ResolverError(RuntimeError):
    pass


@dataclass
class DefinitionRecord:
    symbol: str
    file: str
    start: int
    end: int
    text: str
    kind: str
    depth: int
    parent: str | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "DefinitionRecord":
        return cls(
            symbol=d["symbol"], file=d["file"],
            start=d["byte_range"][0], end=d["byte_range"][1],
            text=d["text"], kind=d.get("kind", "other"),
            depth=d["depth"], parent=d.get("parent"),
        )


class ResolverClient:
    """One subprocess, serial request/response."""

    def __init__(self, command: list[str], project_root: str, timeout: float = 60.0):
        self.command = list(command)
        self.project_root = project_root
        self.timeout = timeout
        self.proc: subprocess.Popen | None = None
        self._next_id = 0

    def start(self) -> None:
        if self.proc is not None and self.proc.poll() is None:
            return
        self.proc = subprocess.Popen(
            self.command + ["--project", self.project_root],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
            text=True,
        )

    def close(self) -> None:
        if self.proc is not None:
            try:
                self.proc.stdin.close()
            except OSError:
                pass
            self.proc.terminate()
            try:
                self.proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self.proc.kill()
            self.proc = None

    def _read_line(self) -> str:
        assert self.proc is not None
        fd = self.proc.stdout
        ready, _, _ = select.select([fd], [], [], self.timeout)
        if not ready:
            raise ResolverError(f"resolver timed out after {self.timeout}s")
        line = fd.readline()
        if not line:
            raise ResolverError("resolver closed its output stream")
        return line

    def resolve(self, occurrences: list[dict], max_depth: int = 2,
                token_budget: int = 2048) -> tuple[list[DefinitionRecord], list[str]]:
        self.start()
        self._next_id += 1
        request = {
            "proto_version": PROTO_VERSION,
            "id": self._next_id,
            "project_root": self.project_root,
            "occurrences": occurrences,
            "max_depth": max_depth,
            "token_budget": token_budget,
        }
        try:
            self.proc.stdin.write(json.dumps(request) + "\n")
            self.proc.stdin.flush()
        except (OSError, BrokenPipeError) as exc:
            self.close()
            raise ResolverError(f"resolver write failed: {exc}") from exc
        while True:
            line = self._read_line()
            try:
                payload = json.loads(line)
            except json.JSONDecodeError:
                continue  # stray output on stdout: skip
            if payload.get("id") != self._next_id:
                continue
            if "error" in payload:
                raise ResolverError(payload["error"])
            definitions = [DefinitionRecord.from_dict(d)
                           for d in payload.get("definitions", [])]
            return definitions, payload.get("warnings", [])


@dataclass
class ResolverPool:
    """Bounded set of resolver processes for one project root."""

    command: list[str]
    project_root: str
    size: int = 1
    timeout: float = 60.0
    max_depth: int = 2
    _clients: list[ResolverClient] = field(default_factory=list)
    _lock: threading.Lock = field(default_factory=threading.Lock)
    _free: list[ResolverClient] = field(default_factory=list)

    def _acquire(self) -> ResolverClient:
        with self._lock:
            if self._free:
                return self._free.pop()
            if len(self._clients) < self.size:
                client = ResolverClient(self.command, self.project_root, self.timeout)
                self._clients.append(client)
                return client
        # pool exhausted: busy-wait is unnecessary at our scale; spin up extra
        client = ResolverClient(self.command, self.project_root, self.timeout)
        with self._lock:
            self._clients.append(client)
        return client

    def _release(self, client: ResolverClient) -> None:
        with self._lock:
            self._free.append(client)

    def close(self) -> None:
        with self._lock:
            for client in self._clients:
                client.close()
            self._clients.clear()
            self._free.clear()

    def resolve_snippets(self, example: FimExample, symbols: list[Symbol],
                         budget: int) -> list[ContextSnippet]:
        """Definitions for the example's symbols as context snippets."""
        if not symbols:
            return []
        occurrences = [{"file": s.path, "offset": s.offset, "symbol": s.name}
                       for s in symbols]
        client = self._acquire()
        try:
            definitions, _warnings = client.resolve(
                occurrences, max_depth=self.max_depth, token_budget=budget)
        finally:
            self._release(client)
        out = []
        for definition in definitions:
            if not definition.text:
                continue
            out.append(ContextSnippet(
                path=definition.file, start=definition.start, end=definition.end,
                text=definition.text, source="symbol_graph", depth=definition.depth,
            ))
        return out
