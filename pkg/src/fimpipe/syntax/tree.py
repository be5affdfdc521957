"""Concrete syntax tree representation shared by the per-language parsers.

Offsets are byte offsets into the UTF-8 encoding of the file; every node's
range is contained in its parent's range and sibling ranges are ordered and
non-overlapping. Parsers never fail: unparseable regions become ``error``
nodes so the tree always covers the whole file.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field


@dataclass
class Node:
    kind: str
    start: int
    end: int
    children: list["Node"] = field(default_factory=list)
    named: bool = True
    # role within the parent ("body", "name", "parameters", ...), when known
    role: str | None = None

    def __repr__(self) -> str:  # keep pytest diffs readable
        return f"Node({self.kind!r}, {self.start}, {self.end}, children={len(self.children)})"

    @property
    def named_children(self) -> list["Node"]:
        return [c for c in self.children if c.named]

    def child_by_role(self, role: str) -> "Node | None":
        for c in self.children:
            if c.role == role:
                return c
        return None

    def walk(self):
        """Yield this node and all descendants in document order."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def contains(self, offset: int) -> bool:
        return self.start <= offset < self.end


class SyntaxTree:
    """A parsed file: immutable after construction, safe to share."""

    def __init__(self, root: Node, source: bytes, language: str):
        self.root = root
        self.source = source
        self.language = language
        self._line_starts: list[int] | None = None

    def text(self, node: Node) -> str:
        return self.source[node.start : node.end].decode("utf-8", errors="replace")

    def slice(self, start: int, end: int) -> str:
        return self.source[start:end].decode("utf-8", errors="replace")

    def line_of(self, offset: int) -> int:
        """1-based line number containing the byte offset."""
        if self._line_starts is None:
            starts = [0]
            pos = self.source.find(b"\n")
            while pos != -1:
                starts.append(pos + 1)
                pos = self.source.find(b"\n", pos + 1)
            self._line_starts = starts
        return bisect_right(self._line_starts, offset)

    def walk(self):
        return self.root.walk()


def attach_comments(root: Node, comments: list[Node]) -> None:
    """Insert comment nodes into the deepest node containing each of them.

    Parsers collect comments out-of-band; placing them back keeps sibling
    ordering and containment invariants while letting chunking account for
    every piece of non-whitespace source.
    """
    for comment in comments:
        target = root
        descended = True
        while descended:
            descended = False
            for child in target.children:
                if child.start <= comment.start and comment.end <= child.end:
                    target = child
                    descended = True
                    break
        idx = 0
        while idx < len(target.children) and target.children[idx].start < comment.start:
            idx += 1
        target.children.insert(idx, comment)


def check_tree(root: Node) -> list[str]:
    """Structural sanity check used by parser tests; returns violations."""
    problems: list[str] = []
    for node in root.walk():
        if node.start > node.end:
            problems.append(f"inverted range on {node.kind}: {node.start}>{node.end}")
        prev_end = node.start
        for child in node.children:
            if child.start < node.start or child.end > node.end:
                problems.append(
                    f"{child.kind} [{child.start},{child.end}) escapes {node.kind} "
                    f"[{node.start},{node.end})"
                )
            if child.start < prev_end:
                problems.append(f"overlapping siblings at {child.kind} [{child.start},{child.end})")
            prev_end = child.end
    return problems
