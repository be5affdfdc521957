"""Unified diff parsing and application.

Parsed ``@@`` blocks are decomposed into minimal hunks, one contiguous change
region each (no interior context). A minimal hunk replaces base lines
[old_start, old_start+old_count) with its added lines; old_count 0 means
insert before old_start. Coordinates always refer to the base snapshot, so
applying any subset of hunks in ascending order stays consistent - which is
what dependency verification needs (apply everything except one candidate).
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

_HUNK_HEADER_RE = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")


class PatchError(ValueError):
    pass


@dataclass
class Hunk:
    file: str
    old_start: int  # 1-based; for old_count == 0, the insertion point line
    old_count: int
    new_start: int
    new_count: int
    lines: list[tuple[str, str]]  # (op, text) with op in {'-', '+'}
    hunk_id: str = ""

    def __post_init__(self) -> None:
        if not self.hunk_id:
            digest = hashlib.sha256(
                ("\x1f".join([self.file, str(self.old_start)]
                             + [op + text for op, text in self.lines])).encode()
            ).hexdigest()[:12]
            self.hunk_id = f"{self.file}@{self.old_start}:{digest}"

    @property
    def kind(self) -> str:
        has_add = any(op == "+" for op, _ in self.lines)
        has_del = any(op == "-" for op, _ in self.lines)
        if has_add and has_del:
            return "modify"
        if has_add:
            return "add"
        return "delete"

    @property
    def new_lines(self) -> list[str]:
        return [text for op, text in self.lines if op == "+"]

    @property
    def old_lines(self) -> list[str]:
        return [text for op, text in self.lines if op == "-"]


@dataclass
class PatchSet:
    hunks: list[Hunk]
    source_pr_id: str = ""

    def files(self) -> list[str]:
        seen = []
        for hunk in self.hunks:
            if hunk.file not in seen:
                seen.append(hunk.file)
        return seen


def _clean_path(raw: str) -> str:
    path = raw.strip().split("\t")[0]
    for prefix in ("a/", "b/"):
        if path.startswith(prefix):
            path = path[len(prefix):]
            break
    return path


def _decompose(file: str, old_start: int, new_start: int,
               body: list[tuple[str, str]]) -> list[Hunk]:
    """Split one @@ block into minimal single-region hunks."""
    hunks: list[Hunk] = []
    old_line = old_start  # 1-based cursor over base lines
    new_line = new_start
    run: list[tuple[str, str]] = []
    run_old_start = run_new_start = 0
    run_old_count = run_new_count = 0

    def flush() -> None:
        nonlocal run, run_old_count, run_new_count
        if run:
            hunks.append(Hunk(file=file, old_start=run_old_start,
                              old_count=run_old_count,
                              new_start=run_new_start,
                              new_count=run_new_count, lines=run))
            run = []
        run_old_count = run_new_count = 0

    for op, text in body:
        if op == " ":
            flush()
            old_line += 1
            new_line += 1
            continue
        if not run:
            run_old_start = old_line
            run_new_start = new_line
        run.append((op, text))
        if op == "-":
            run_old_count += 1
            old_line += 1
        else:
            run_new_count += 1
            new_line += 1
    flush()
    return hunks


def parse_unified_diff(text: str, source_pr_id: str = "") -> PatchSet:
    hunks: list[Hunk] = []
    current_file: str | None = None
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        line = lines[i]
        if line.startswith("+++ "):
            current_file = _clean_path(line[4:])
            if current_file == "/dev/null":
                current_file = None
            i += 1
            continue
        if line.startswith("--- ") or line.startswith("diff ") or \
                line.startswith("index ") or line.startswith("new file") or \
                line.startswith("deleted file"):
            i += 1
            continue
        m = _HUNK_HEADER_RE.match(line)
        if m:
            if current_file is None:
                raise PatchError(f"hunk before file header at line {i + 1}")
            old_start = int(m.group(1))
            old_count = int(m.group(2) or "1")
            new_start = int(m.group(3))
            new_count = int(m.group(4) or "1")
            body: list[tuple[str, str]] = []
            i += 1
            seen_old = seen_new = 0
            while i < len(lines) and (seen_old < old_count or seen_new < new_count):
                raw = lines[i]
                if raw.startswith("\\"):  # "\ No newline at end of file"
                    i += 1
                    continue
                op = raw[:1] or " "
                if op not in (" ", "-", "+"):
                    break
                body.append((op, raw[1:]))
                if op in (" ", "-"):
                    seen_old += 1
                if op in (" ", "+"):
                    seen_new += 1
                i += 1
            if seen_old != old_count or seen_new != new_count:
                raise PatchError(
                    f"hunk at {current_file}:{old_start} is truncated "
                    f"({seen_old}/{old_count} old, {seen_new}/{new_count} new)")
            # a zero old_count header means "insert after line N": normalize
            # the cursor so decomposition sees the insertion point line N+1
            effective_old_start = old_start if old_count else old_start + 1
            hunks.extend(_decompose(current_file, effective_old_start,
                                    new_start, body))
            continue
        i += 1
    return PatchSet(hunks=hunks, source_pr_id=source_pr_id)


@dataclass
class AppliedHunk:
    hunk_id: str
    file: str
    new_line_start: int  # 1-based line in the resulting file where the added lines begin


def apply_hunks(base_files: dict[str, str], hunks: list[Hunk],
                strict: bool = True) -> tuple[dict[str, str], list[AppliedHunk]]:
    """Apply minimal hunks to in-memory file contents.

    Returns the patched files plus, per hunk, the line where its added lines
    landed in the resulting file. Deletion mismatches raise PatchError when
    strict.
    """
    result = dict(base_files)
    placements: list[AppliedHunk] = []
    by_file: dict[str, list[Hunk]] = {}
    for hunk in hunks:
        by_file.setdefault(hunk.file, []).append(hunk)
    for file, file_hunks in by_file.items():
        file_hunks = sorted(file_hunks, key=lambda h: (h.old_start, h.new_start))
        original = result.get(file, "")
        base_lines = original.split("\n")
        had_trailing_newline = original.endswith("\n")
        if had_trailing_newline:
            base_lines = base_lines[:-1]
        out_lines: list[str] = []
        cursor = 0  # 0-based index into base_lines
        for hunk in file_hunks:
            target = hunk.old_start - 1
            if target < cursor or target > len(base_lines):
                raise PatchError(
                    f"hunk {hunk.hunk_id} out of range or overlapping "
                    f"(target line {hunk.old_start})")
            out_lines.extend(base_lines[cursor:target])
            cursor = target
            placements.append(AppliedHunk(hunk_id=hunk.hunk_id, file=file,
                                          new_line_start=len(out_lines) + 1))
            for op, text in hunk.lines:
                if op == "-":
                    if strict and (cursor >= len(base_lines) or base_lines[cursor] != text):
                        found = base_lines[cursor] if cursor < len(base_lines) else "<eof>"
                        raise PatchError(
                            f"deletion mismatch in {file} at base line {cursor + 1}: "
                            f"expected {text!r}, found {found!r}")
                    cursor += 1
                else:
                    out_lines.append(text)
        out_lines.extend(base_lines[cursor:])
        text = "\n".join(out_lines)
        if had_trailing_newline or (file_hunks and not original):
            text += "\n"
        result[file] = text
    return result, placements
