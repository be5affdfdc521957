"""Repository scanning and quality filter tests."""

from __future__ import annotations

import os

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fimpipe.ingest import (
    FilterPolicy,
    FilterVerdict,
    SourceFile,
    apply_quality_filters,
    scan_repository,
)


def make_file(content: str, language: str = "python", path: str = "m.py") -> SourceFile:
    return SourceFile(repo_id="r", path=path, language=language,
                      content=content, size_bytes=len(content.encode()))


def oracle_walk(root):
    """Independent walk with an explicit visited set, for cycle fixtures."""
    visited = set()
    found = []
    def visit(d):
        key = os.stat(d)
        ident = (key.st_dev, key.st_ino)
        if ident in visited:
            return
        visited.add(ident)
        for entry in sorted(os.listdir(d)):
            full = os.path.join(d, entry)
            if os.path.isdir(full):
                visit(full)
            elif os.path.isfile(full):
                found.append(full)
    visit(str(root))
    return found


def test_scan_extension_filter(tmp_path):
    (tmp_path / "a.ts").write_text("const a = 1;\n")
    (tmp_path / "b.py").write_text("b = 2\n")
    (tmp_path / "c.bin").write_bytes(b"\x00\x01")
    result = scan_repository(tmp_path)
    assert [(f.path, f.language) for f in result.files] == \
        [("a.ts", "typescript"), ("b.py", "python")]


def test_scan_empty_dir(tmp_path):
    assert scan_repository(tmp_path).files == []


def test_scan_missing_root(tmp_path):
    with pytest.raises(FileNotFoundError):
        scan_repository(tmp_path / "nope")


def test_scan_symlink_loop_terminates(tmp_path):
    sub = tmp_path / "sub"
    sub.mkdir()
    (sub / "mod.py").write_text("x = 1\n")
    (tmp_path / "top.py").write_text("y = 2\n")
    os.symlink(tmp_path, sub / "loop")
    result = scan_repository(tmp_path)
    expected = {os.path.basename(p) for p in oracle_walk(tmp_path)
                if p.endswith(".py")}
    got = [f.path for f in result.files]
    assert len(got) == len(set(got)) == len(expected)


def test_scan_deterministic(tmp_path):
    for name in ("z.py", "a.py", "m/n.py"):
        p = tmp_path / name
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(f"# {name}\nv = 1\n")
    first = scan_repository(tmp_path)
    second = scan_repository(tmp_path)
    assert [f.path for f in first.files] == [f.path for f in second.files]
    assert [f.path for f in first.files] == sorted(f.path for f in first.files)


def test_scan_skips_non_utf8(tmp_path):
    (tmp_path / "bad.py").write_bytes(b"x = '\xff\xfe'\n")
    (tmp_path / "good.py").write_text("x = 1\n")
    result = scan_repository(tmp_path)
    assert [f.path for f in result.files] == ["good.py"]
    assert any("utf-8" in w.reason for w in result.warnings)


def test_source_file_rejects_escaping_paths():
    with pytest.raises(ValueError):
        SourceFile("r", "../evil.py", "python", "", 0)
    with pytest.raises(ValueError):
        SourceFile("r", "/abs.py", "python", "", 0)
    with pytest.raises(ValueError):
        SourceFile("r", "ok.py", "python", "abc", 99)


def test_filter_line_too_long():
    policy = FilterPolicy(max_line_length=1000)
    verdict = apply_quality_filters(make_file("x = 1\n" + "a" * 1200 + "\n"), policy)
    assert not verdict.accepted
    assert "line_too_long" in verdict.reasons


def test_filter_accepts_ordinary_file():
    content = "\n".join(f"value_{i} = {i}" for i in range(50)) + "\n"
    assert apply_quality_filters(make_file(content), FilterPolicy()).accepted


def test_filter_file_too_large():
    policy = FilterPolicy(max_file_bytes=1_000_000)
    content = "a = 1\n" * 400_000  # ~2.4 MB
    verdict = apply_quality_filters(make_file(content), policy)
    assert "file_too_large" in verdict.reasons


def test_filter_autogenerated_marker():
    verdict = apply_quality_filters(
        make_file("# Code generated by protoc. DO NOT EDIT\nx = 1\n"),
        FilterPolicy())
    assert "autogenerated" in verdict.reasons


def test_filter_low_alnum():
    verdict = apply_quality_filters(make_file("{}[]()!!!\n" * 30), FilterPolicy())
    assert "low_alphanumeric_fraction" in verdict.reasons


def test_verdict_consistency():
    with pytest.raises(ValueError):
        FilterVerdict(accepted=True, reasons=["line_too_long"])


_contents = st.text(
    alphabet=st.sampled_from("abcdef =\n(){}#" + "x" * 10), max_size=400)


@settings(max_examples=80, deadline=None)
@given(_contents)
def test_filter_idempotent(content):
    file = make_file(content)
    policy = FilterPolicy()
    first = apply_quality_filters(file, policy)
    second = apply_quality_filters(file, policy)
    assert first == second


@settings(max_examples=80, deadline=None)
@given(_contents, st.integers(10, 200), st.integers(5, 50),
       st.integers(50, 4000))
def test_filter_monotone_loosening(content, max_line, mean_line, max_bytes):
    file = make_file(content)
    tight = FilterPolicy(max_line_length=max_line, max_mean_line_length=mean_line,
                         min_alphanumeric_fraction=0.3, max_file_bytes=max_bytes)
    loose = FilterPolicy(max_line_length=max_line * 2,
                         max_mean_line_length=mean_line * 2,
                         min_alphanumeric_fraction=0.1,
                         max_file_bytes=max_bytes * 2,
                         autogenerated_markers=[])
    if apply_quality_filters(file, tight).accepted:
        assert apply_quality_filters(file, loose).accepted
