"""Category extraction, complexity, identifiers, chunking, cursor typing."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fimpipe.syntax import (
    chunk_syntactic,
    complexity_score,
    extract_category_nodes,
    extract_identifiers,
    identifier_kinds,
    node_type_at_cursor,
    parse_source,
)
from fimpipe.synth import make_corpus
from fimpipe.tokens import estimate_tokens


def brute_force_complexity(tree, start, end):
    """Oracle: flat scan of all identifier leaves, set cardinality by text."""
    kinds = identifier_kinds(tree.language)
    names = set()
    def walk(node):
        for child in node.children:
            walk(child)
        if node.kind in kinds and not node.children \
                and node.start >= start and node.end <= end:
            names.add(tree.text(node))
    walk(tree.root)
    return len(names)


def test_worked_example_scores_three():
    tree = parse_source("logUserDetails(user, currentTimeStamp)", "javascript")
    assert complexity_score(tree, 0, len(tree.source)) == 3


def test_single_identifier_call():
    tree = parse_source("foo()", "javascript")
    assert complexity_score(tree, 0, len(tree.source)) == 1


def test_member_call_three_distinct():
    tree = parse_source("a.b(c, a)", "javascript")
    assert complexity_score(tree, 0, len(tree.source)) == 3


def test_complexity_matches_oracle_on_random_spans(corpus120):
    files, _ = corpus120
    rng = random.Random(99)
    checked = 0
    while checked < 1000:
        file = files[rng.randrange(len(files))]
        tree = parse_source(file.content, file.language)
        n = len(tree.source)
        a = rng.randrange(n)
        b = min(n, a + rng.randrange(1, 400))
        assert complexity_score(tree, a, b) == brute_force_complexity(tree, a, b)
        checked += 1


def test_extract_identifiers_cases():
    tree = parse_source("user.location", "typescript")
    assert [n for n, _, _ in extract_identifiers(tree, 0, len(tree.source))] == \
        ["user", "location"]
    tree = parse_source("x = 'just a string'\n", "python")
    start = tree.source.index(b"'")
    assert extract_identifiers(tree, start, len(tree.source)) == []
    tree = parse_source("x = x + y\n", "python")
    assert [n for n, _, _ in extract_identifiers(tree, 0, len(tree.source))] == \
        ["x", "y"]


def test_category_extraction_counts(taxonomy):
    source = "first(a)\nsecond(b, c)\n"
    tree = parse_source(source, "python")
    calls = extract_category_nodes(tree, "call_expression", taxonomy)
    assert len(calls) == 2
    assert [c.text for c in calls] == ["first(a)", "second(b, c)"]
    assert extract_category_nodes(tree, "if_statement", taxonomy) == []


def test_nested_calls_outer_first(taxonomy):
    tree = parse_source("f(g(x))", "javascript")
    calls = extract_category_nodes(tree, "call_expression", taxonomy)
    assert [c.text for c in calls] == ["f(g(x))", "g(x)"]


def test_random_span_not_extractable(taxonomy):
    tree = parse_source("x = 1\n", "python")
    with pytest.raises(ValueError):
        extract_category_nodes(tree, "random_span", taxonomy)


def test_with_prefix_keeps_signature_out(taxonomy):
    source = "def add(a, b):\n    return a + b\n"
    tree = parse_source(source, "python")
    spans = extract_category_nodes(tree, "function_definition_with_prefix", taxonomy)
    assert spans[0].text == "return a + b"
    source_ts = "function add(a: number, b: number): number {\n  return a + b;\n}\n"
    tree_ts = parse_source(source_ts, "typescript")
    spans_ts = extract_category_nodes(tree_ts, "function_definition_with_prefix", taxonomy)
    assert spans_ts[0].text.startswith("{")
    assert "return a + b" in spans_ts[0].text


def test_declarator_without_value_not_assignment(taxonomy):
    tree = parse_source("let a;\nlet b = 1;\n", "javascript")
    spans = extract_category_nodes(tree, "assignment", taxonomy)
    assert [s.text for s in spans] == ["b = 1"]


def test_span_text_equals_slice(corpus120, taxonomy):
    files, _ = corpus120
    for file in files[:12]:
        tree = parse_source(file.content, file.language)
        for category in ("call_expression", "function_definition_full",
                         "function_parameters", "assignment"):
            for span in extract_category_nodes(tree, category, taxonomy):
                assert span.text == tree.slice(span.start, span.end)
                assert span.complexity >= 0


def test_cursor_classification(taxonomy):
    source = "function f(){}\nuser.getAge(now);\nif (a) { b(); }\n"
    tree = parse_source(source, "javascript")
    raw = source.encode()
    assert node_type_at_cursor(tree, raw.index(b"now"), taxonomy) == "call_expression"
    assert node_type_at_cursor(tree, raw.index(b"(a") + 1, taxonomy) == "if_statement"
    # offset 0 in an empty file falls back to the root label
    empty = parse_source("", "python")
    assert node_type_at_cursor(empty, 0, taxonomy) == "module"


def test_cursor_total_over_whole_range(taxonomy, corpus120):
    files, _ = corpus120
    for file in files[:6]:
        tree = parse_source(file.content, file.language)
        for offset in range(0, len(tree.source) + 1, 7):
            label = node_type_at_cursor(tree, offset, taxonomy)
            assert isinstance(label, str) and label


def test_cursor_boundary_prefers_starting_node(taxonomy):
    source = "a()\nif (x) {}\n"
    tree = parse_source(source, "javascript")
    offset = source.encode().index(b"if")
    assert node_type_at_cursor(tree, offset, taxonomy) == "if_statement"


def test_chunk_unit_preservation():
    source = "def f():\n    return 1\n\n\ndef g():\n    return 2\n"
    tree = parse_source(source, "python")
    chunks = chunk_syntactic(tree, 100, "m.py")
    assert [c.kind for c in chunks] == ["function_definition", "function_definition"]


def test_chunk_empty_file():
    tree = parse_source("", "python")
    assert chunk_syntactic(tree, 50, "m.py") == []


def test_chunk_oversize_splits_into_children():
    body = "".join(f"    slot_{i} = {i}\n" for i in range(80))
    source = "def f():\n" + body
    tree = parse_source(source, "python")
    chunks = chunk_syntactic(tree, 16, "m.py")
    assert len(chunks) > 1
    assert all(estimate_tokens(c.text) <= 16 for c in chunks)


def test_chunks_ordered_nonoverlapping_and_cover(corpus120):
    files, _ = corpus120
    for file in files[:9]:
        tree = parse_source(file.content, file.language)
        chunks = chunk_syntactic(tree, 64, file.path)
        prev_end = 0
        for chunk in chunks:
            assert chunk.start >= prev_end
            prev_end = chunk.end
            assert chunk.text == tree.slice(chunk.start, chunk.end)
        covered = set()
        for chunk in chunks:
            covered.update(range(chunk.start, chunk.end))
        source = tree.source
        for idx in range(len(source)):
            if not source[idx:idx + 1].isspace():
                assert idx in covered, (file.path, idx, source[idx:idx+20])


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=64), st.integers(min_value=0, max_value=119))
def test_rechunking_respects_budget(max_tokens, file_index):
    files = make_corpus(120, seed=11)
    file = files[file_index]
    tree = parse_source(file.content, file.language)
    for chunk in chunk_syntactic(tree, max_tokens, file.path):
        assert estimate_tokens(chunk.text) <= max_tokens
