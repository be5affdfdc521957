"""BM25 retrieval, symbol filtering, leakage stripping, budget trimming."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fimpipe.context import (
    Bm25Params,
    ContextSnippet,
    RepoContext,
    Symbol,
    build_bm25_index,
    filter_symbols,
    gather_context,
    normalize_ws,
    retrieve,
    snippet_priority,
    strip_leakage,
    trim_snippets_to_budget,
)
from fimpipe.curriculum import FimExample
from fimpipe.ingest import SourceFile
from fimpipe.syntax import Chunk
from fimpipe.tokens import estimate_tokens, split_subtokens


def make_chunk(text, path="lib.py", start=0):
    return Chunk(file=path, start=start, end=start + len(text.encode()),
                 text=text, kind="code")


def make_example(prefix, middle, suffix, language="python", path="m.py"):
    start = len(prefix.encode())
    return FimExample(
        id="ex1", repo_id="r", path=path, language=language,
        prefix=prefix, middle=middle, suffix=suffix,
        category="call_expression", complexity=1,
        middle_byte_range=(start, start + len(middle.encode())),
    )


def test_subtoken_splitting():
    assert split_subtokens("getHTTPResponse") == ["get", "http", "response"]
    assert split_subtokens("snake_case_name") == ["snake", "case", "name"]
    assert split_subtokens("value2x") == ["value", "2", "x"]


def test_filter_symbols_stopwords_and_keywords():
    symbols = [Symbol("the", "m.ts", 0), Symbol("user", "m.ts", 4),
               Symbol("if", "m.ts", 9)]
    kept = filter_symbols(symbols, "typescript")
    assert [s.name for s in kept] == ["user"]


def test_filter_symbols_empty_and_dedupe():
    assert filter_symbols([], "python") == []
    symbols = [Symbol("getAge", "m.ts", 0), Symbol("getAge", "m.ts", 30)]
    kept = filter_symbols(symbols, "typescript")
    assert len(kept) == 1 and kept[0].offset == 0


def test_symbol_validation():
    with pytest.raises(ValueError):
        Symbol("has space", "m.py", 0)
    with pytest.raises(ValueError):
        Symbol("", "m.py", 0)


def test_unique_term_single_posting():
    chunks = [make_chunk("def refreshtoken(): pass", "a.py"),
              make_chunk("def login(): pass", "b.py"),
              make_chunk("def logout(): pass", "c.py")]
    index = build_bm25_index(chunks)
    hits = index.query(["refreshtoken"], k=10)
    assert len(hits) == 1
    assert hits[0][0].file == "a.py"


def test_empty_corpus_returns_nothing():
    index = build_bm25_index([])
    assert index.query(["anything"], k=5) == []


def test_identical_chunks_identical_scores():
    chunks = [make_chunk("alpha beta gamma", "a.py"),
              make_chunk("alpha beta gamma", "b.py"),
              make_chunk("unrelated words here", "c.py")]
    index = build_bm25_index(chunks)
    hits = index.query(["alpha"], k=3)
    assert len(hits) == 2
    assert hits[0][1] == pytest.approx(hits[1][1])
    # ties broken by path
    assert [h[0].file for h in hits] == ["a.py", "b.py"]


def hand_scores(docs, query_terms, k1=1.2, b=0.75):
    """Independent Okapi computation over pre-tokenized docs."""
    n = len(docs)
    lens = [len(d) for d in docs]
    avgdl = sum(lens) / n
    df = {}
    for doc in docs:
        for term in set(doc):
            df[term] = df.get(term, 0) + 1
    out = []
    for doc, dl in zip(docs, lens):
        score = 0.0
        for term in query_terms:
            tf = doc.count(term)
            if tf == 0:
                continue
            idf = math.log(1 + (n - df[term] + 0.5) / (df[term] + 0.5))
            score += idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl))
        out.append(score)
    return out


def test_scores_match_hand_computation():
    texts = ["refresh token cache", "token cache", "refresh cache miss"]
    chunks = [make_chunk(t, f"{i}.py") for i, t in enumerate(texts)]
    index = build_bm25_index(chunks, Bm25Params(k1=1.2, b=0.75))
    query = ["refresh", "token"]
    expected = hand_scores([t.split() for t in texts], query)
    got = {c.file: s for c, s in index.query(query, k=3)}
    for i, exp in enumerate(expected):
        if exp > 0:
            assert got[f"{i}.py"] == pytest.approx(exp, rel=1e-9)
    order = [c.file for c, _ in index.query(query, k=3)]
    ranked = sorted(range(3), key=lambda i: (-expected[i], f"{i}.py"))
    assert order == [f"{i}.py" for i in ranked if expected[i] > 0]


def test_retrieve_query_from_symbols():
    chunks = [make_chunk("def refresh_token(): return cache", "auth.py"),
              make_chunk("def render_page(): return html", "view.py"),
              make_chunk("def clear(): pass", "misc.py")]
    index = build_bm25_index(chunks)
    hits = retrieve(index, [Symbol("refreshToken", "m.py", 0)], k=2)
    assert hits and hits[0].path == "auth.py"
    assert hits[0].source == "bm25" and hits[0].score > 0


def test_retrieve_k_zero_and_empty_query():
    index = build_bm25_index([make_chunk("alpha beta", "a.py")])
    assert retrieve(index, [Symbol("alpha", "m.py", 0)], k=0) == []
    assert retrieve(index, [], k=5) == []
    with pytest.raises(ValueError):
        retrieve(index, [], k=-1)


def test_k_larger_than_corpus_returns_all_scored():
    chunks = [make_chunk("alpha beta", "a.py"), make_chunk("alpha gamma", "b.py"),
              make_chunk("unrelated", "c.py")]
    index = build_bm25_index(chunks)
    hits = retrieve(index, [Symbol("alpha", "m.py", 0)], k=50)
    assert {h.path for h in hits} == {"a.py", "b.py"}


@settings(max_examples=25, deadline=None)
@given(st.lists(st.sampled_from([
    "parse tree node walker", "token stream reader", "cache invalidation rules",
    "http client retry", "render widget tree", "database session pool",
    "metric report writer", "config loader merge",
]), min_size=2, max_size=8, unique=True))
def test_self_retrieval_ranks_self_first(texts):
    chunks = [make_chunk(t, f"{i}.py") for i, t in enumerate(texts)]
    index = build_bm25_index(chunks)
    for i, text in enumerate(texts):
        hits = index.query(split_subtokens(text), k=len(texts))
        assert hits[0][0].file == f"{i}.py"


def test_strip_leakage_verbatim_containment():
    example = make_example("a = 1\n", "compute(total, flag)", "\nb = 2\n")
    leaky = ContextSnippet(path="other.py", start=0, end=40,
                           text="def x():\n    compute(total, flag)\n",
                           source="bm25", score=1.0)
    clean = ContextSnippet(path="other.py", start=50, end=60,
                           text="unrelated()", source="bm25", score=1.0)
    kept = strip_leakage([leaky, clean], example)
    assert kept == [clean]


def test_strip_leakage_whitespace_normalized():
    example = make_example("", "compute(total,  flag)", "\n")
    reformatted = ContextSnippet(path="o.py", start=0, end=30,
                                 text="compute(total,\n    flag)",
                                 source="bm25", score=2.0)
    assert strip_leakage([reformatted], example) == []


def test_strip_leakage_same_file_span_overlap():
    example = make_example("prefix\n", "mid()", "\nsuffix\n")
    start, end = example.middle_byte_range
    overlapping = ContextSnippet(path="m.py", start=start - 2, end=end + 2,
                                 text="x mid() y", source="bm25", score=1.0)
    disjoint = ContextSnippet(path="m.py", start=end + 3, end=end + 9,
                              text="suffix", source="bm25", score=1.0)
    kept = strip_leakage([overlapping, disjoint], example)
    assert kept == [disjoint]


def test_normalize_ws():
    assert normalize_ws("a\n  b\t c") == "a b c"
    assert normalize_ws("  ") == ""


def test_priority_order_graph_then_bm25():
    snippets = [
        ContextSnippet("a.ts", 0, 8, "deep", "symbol_graph", depth=2),
        ContextSnippet("b.ts", 0, 8, "best bm25", "bm25", score=9.0),
        ContextSnippet("c.ts", 0, 8, "shallow", "symbol_graph", depth=0),
        ContextSnippet("d.ts", 0, 8, "weak bm25", "bm25", score=1.0),
    ]
    ordered = snippet_priority(snippets)
    assert [s.path for s in ordered] == ["c.ts", "a.ts", "b.ts", "d.ts"]


def test_budget_trimming_respects_estimate():
    snippets = [ContextSnippet(f"{i}.py", 0, 40, "x" * 40, "bm25", score=10.0 - i)
                for i in range(5)]
    kept = trim_snippets_to_budget(snippets, budget=25)
    assert sum(estimate_tokens(s.text) for s in kept) <= 25
    assert [s.score for s in kept] == [10.0, 9.0]


def _repo(files):
    return RepoContext.build(root="repo", files=files, chunk_max_tokens=64)


def _source(path, language, content):
    return SourceFile(repo_id="repo", path=path, language=language,
                      content=content, size_bytes=len(content.encode()))


def test_gather_python_routes_to_bm25(taxonomy):
    helper = _source("lib/helpers.py", "python",
                     "def compute_total(values):\n    return sum(values)\n")
    main_content = "from lib.helpers import compute_total\n\nresult = compute_total(data)\n"
    main = _source("main.py", "python", main_content)
    repo = _repo([helper, main])
    idx = main_content.index("compute_total(data)")
    example = make_example(main_content[:idx], "compute_total(data)",
                           main_content[idx + len("compute_total(data)"):],
                           path="main.py")
    snippets, warnings = gather_context(example, repo, budget=500)
    assert warnings == []
    assert snippets and all(s.source == "bm25" for s in snippets)
    assert any(s.path == "lib/helpers.py" for s in snippets)


def test_gather_ts_without_resolver_warns_and_falls_back():
    lib = _source("lib.ts", "typescript",
                  "export function computeTotal(values: number[]): number {\n"
                  "  return values.reduce((a, b) => a + b, 0);\n}\n")
    content = "import { computeTotal } from './lib';\nconst r = computeTotal(data);\n"
    main = _source("main.ts", "typescript", content)
    repo = _repo([lib, main])
    idx = content.index("computeTotal(data)")
    example = make_example(content[:idx], "computeTotal(data)",
                           content[idx + len("computeTotal(data)"):],
                           language="typescript", path="main.ts")
    snippets, warnings = gather_context(example, repo, budget=500)
    assert any("resolver unavailable" in w for w in warnings)
    assert all(s.source == "bm25" for s in snippets)


def test_gather_budget_zero():
    main = _source("m.py", "python", "value = 1\n")
    repo = _repo([main])
    example = make_example("", "value = 1", "\n", path="m.py")
    snippets, _ = gather_context(example, repo, budget=0)
    assert snippets == []


def test_gather_never_leaks(corpus120, taxonomy, table2):
    from fimpipe.curriculum import generate_examples
    files, stats = corpus120
    examples = generate_examples(files[:30], stats, table2, taxonomy, seed=4)
    repo = _repo(files[:30])
    for example in examples:
        snippets, _ = gather_context(example, repo, budget=800)
        norm_middle = normalize_ws(example.middle)
        for snippet in snippets:
            norm_snip = normalize_ws(snippet.text)
            if norm_middle:
                assert norm_middle not in norm_snip
            if snippet.path == example.path:
                s, e = example.middle_byte_range
                assert snippet.end <= s or snippet.start >= e
