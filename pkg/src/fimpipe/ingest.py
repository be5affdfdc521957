"""Repository walking and corpus quality filtering.

Scanning is pure per-file and deterministic: files are returned in
lexicographic path order, symlink cycles are broken with an inode visited
set, and unreadable or undecodable files are skipped with a warning record
instead of failing the scan.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

DEFAULT_EXTENSIONS = {
    ".py": "python",
    ".ts": "typescript",
    ".tsx": "typescript",
    ".js": "javascript",
    ".jsx": "javascript",
    ".mjs": "javascript",
    ".cjs": "javascript",
}

REJECT_LINE_TOO_LONG = "line_too_long"
REJECT_MEAN_LINE_TOO_LONG = "mean_line_too_long"
REJECT_LOW_ALNUM = "low_alphanumeric_fraction"
REJECT_FILE_TOO_LARGE = "file_too_large"
REJECT_AUTOGENERATED = "autogenerated"


@dataclass
class SourceFile:
    repo_id: str
    path: str
    language: str
    content: str
    size_bytes: int

    def __post_init__(self) -> None:
        p = Path(self.path)
        if p.is_absolute() or ".." in p.parts:
            raise ValueError(f"path must be repo-relative: {self.path!r}")
        actual = len(self.content.encode("utf-8"))
        if actual != self.size_bytes:
            raise ValueError(f"size_bytes {self.size_bytes} != content bytes {actual}")


@dataclass
class FilterPolicy:
    max_line_length: int = 1000
    max_mean_line_length: int = 100
    min_alphanumeric_fraction: float = 0.25
    max_file_bytes: int = 1_000_000
    autogenerated_markers: list[str] = field(default_factory=lambda: [
        "@generated",
        "Code generated by",
        "DO NOT EDIT",
        "Autogenerated",
    ])

    def __post_init__(self) -> None:
        if self.max_line_length <= 0 or self.max_mean_line_length <= 0 \
                or self.max_file_bytes <= 0:
            raise ValueError("filter thresholds must be positive")
        if not 0.0 <= self.min_alphanumeric_fraction <= 1.0:
            raise ValueError("min_alphanumeric_fraction must be in [0,1]")


@dataclass
class FilterVerdict:
    accepted: bool
    reasons: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.accepted and self.reasons:
            raise ValueError("accepted verdict cannot carry reasons")


@dataclass
class ScanWarning:
    path: str
    reason: str


@dataclass
class ScanResult:
    files: list[SourceFile]
    warnings: list[ScanWarning]


def scan_repository(root: str | os.PathLike,
                    extensions: dict[str, str] | None = None,
                    repo_id: str | None = None) -> ScanResult:
    """Collect supported source files under ``root``.

    Deterministic (sorted by repo-relative path), cycle-safe, and skip-don't-
    fail on unreadable files.
    """
    rootp = Path(root)
    if not rootp.is_dir():
        raise FileNotFoundError(f"repository root not readable: {root}")
    ext_map = DEFAULT_EXTENSIONS if extensions is None else extensions
    rid = repo_id if repo_id is not None else rootp.name
    warnings: list[ScanWarning] = []
    seen_dirs: set[tuple[int, int]] = set()
    seen_files: set[tuple[int, int]] = set()
    candidates: list[Path] = []

    def visit(directory: Path) -> None:
        try:
            key = directory.stat()
        except OSError as exc:
            warnings.append(ScanWarning(str(directory), f"stat failed: {exc}"))
            return
        ident = (key.st_dev, key.st_ino)
        if ident in seen_dirs:
            return
        seen_dirs.add(ident)
        try:
            entries = sorted(directory.iterdir())
        except OSError as exc:
            warnings.append(ScanWarning(str(directory), f"listing failed: {exc}"))
            return
        for entry in entries:
            try:
                if entry.is_dir():
                    visit(entry)
                    continue
                if not entry.is_file():
                    continue
            except OSError as exc:
                warnings.append(ScanWarning(str(entry), f"stat failed: {exc}"))
                continue
            if entry.suffix in ext_map:
                candidates.append(entry)

    visit(rootp)
    files: list[SourceFile] = []
    for path in sorted(candidates, key=lambda p: str(p.relative_to(rootp))):
        rel = str(path.relative_to(rootp))
        try:
            st = path.stat()
            ident = (st.st_dev, st.st_ino)
            if ident in seen_files:
                continue  # symlink alias of an already-collected file
            raw = path.read_bytes()
        except OSError as exc:
            warnings.append(ScanWarning(rel, f"read failed: {exc}"))
            continue
        try:
            content = raw.decode("utf-8")
        except UnicodeDecodeError:
            warnings.append(ScanWarning(rel, "not valid utf-8"))
            continue
        seen_files.add(ident)
        files.append(SourceFile(
            repo_id=rid,
            path=rel,
            language=ext_map[path.suffix],
            content=content,
            size_bytes=len(raw),
        ))
    return ScanResult(files=files, warnings=warnings)


def apply_quality_filters(file: SourceFile, policy: FilterPolicy) -> FilterVerdict:
    """Total function: every rejection carries its reason code."""
    reasons: list[str] = []
    content = file.content
    if file.size_bytes > policy.max_file_bytes:
        reasons.append(REJECT_FILE_TOO_LARGE)
    lines = content.split("\n")
    if lines and max(len(line) for line in lines) > policy.max_line_length:
        reasons.append(REJECT_LINE_TOO_LONG)
    nonempty = [line for line in lines if line]
    mean = sum(len(line) for line in nonempty) / len(nonempty) if nonempty else 0.0
    if mean > policy.max_mean_line_length:
        reasons.append(REJECT_MEAN_LINE_TOO_LONG)
    total = len(content)
    alnum = sum(1 for ch in content if ch.isalnum())
    fraction = alnum / total if total else 0.0
    if fraction < policy.min_alphanumeric_fraction:
        reasons.append(REJECT_LOW_ALNUM)
    for marker in policy.autogenerated_markers:
        if marker and marker in content:
            reasons.append(REJECT_AUTOGENERATED)
            break
    return FilterVerdict(accepted=not reasons, reasons=reasons)
