"""Cross-file context gathering.

BM25 retrieval over syntactic chunks serves every language; TypeScript and
JavaScript examples are routed to the external definition resolver when one
is configured, falling back to BM25 with a warning otherwise. Retrieved
snippets pass through leakage stripping (nothing that contains the ground
truth middle may survive) and a token budget.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources

from .curriculum import FimExample
from .syntax import Chunk, chunk_syntactic, extract_identifiers, parse_source
from .tokens import estimate_tokens, split_subtokens

RESOLVER_LANGUAGES = {"typescript", "javascript"}


@dataclass
class Symbol:
    name: str
    path: str
    offset: int

    def __post_init__(self) -> None:
        if not self.name or any(ch.isspace() for ch in self.name):
            raise ValueError(f"invalid symbol name {self.name!r}")


def load_wordlist(name: str) -> set[str]:
    text = resources.files("fimpipe.data").joinpath(name).read_text()
    return {line.strip() for line in text.splitlines() if line.strip()}


def default_stopwords() -> set[str]:
    return load_wordlist("stopwords/english.txt")


def default_keywords(language: str) -> set[str]:
    try:
        return load_wordlist(f"keywords/{language}.txt")
    except FileNotFoundError:
        return set()


def filter_symbols(symbols: list[Symbol], language: str,
                   stopwords: set[str] | None = None,
                   keywords: set[str] | None = None) -> list[Symbol]:
    """Drop stop words and language keywords; dedupe by name, keep order."""
    stops = default_stopwords() if stopwords is None else stopwords
    kws = default_keywords(language) if keywords is None else keywords
    seen: set[str] = set()
    out = []
    for sym in symbols:
        if sym.name.lower() in stops or sym.name in kws:
            continue
        if sym.name in seen:
            continue
        seen.add(sym.name)
        out.append(sym)
    return out


@dataclass
class ContextSnippet:
    path: str
    start: int
    end: int
    text: str
    source: str  # "bm25" | "symbol_graph"
    score: float | None = None
    depth: int | None = None

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("snippet text must be non-empty")
        if self.source == "symbol_graph":
            if self.depth is None or not 0 <= self.depth <= 2:
                raise ValueError(f"symbol_graph snippet needs depth 0-2, got {self.depth}")
        elif self.source == "bm25":
            if self.score is None or not math.isfinite(self.score):
                raise ValueError("bm25 snippet needs a finite score")
        else:
            raise ValueError(f"unknown snippet source {self.source!r}")

    def to_dict(self) -> dict:
        d = {
            "origin": {"path": self.path, "byte_range": [self.start, self.end]},
            "text": self.text,
            "source": self.source,
        }
        if self.source == "bm25":
            d["score"] = self.score
        else:
            d["depth"] = self.depth
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ContextSnippet":
        return cls(
            path=d["origin"]["path"],
            start=d["origin"]["byte_range"][0],
            end=d["origin"]["byte_range"][1],
            text=d["text"],
            source=d["source"],
            score=d.get("score"),
            depth=d.get("depth"),
        )


@dataclass
class Bm25Params:
    k1: float = 1.2
    b: float = 0.75


class Bm25Index:
    """Okapi BM25 over code chunks with subtoken terms.

    idf uses the non-negative ln(1 + (N-df+0.5)/(df+0.5)) form so that very
    common terms cannot push self-retrieval below competing chunks.
    """

    def __init__(self, chunks: list[Chunk], params: Bm25Params | None = None):
        self.params = params or Bm25Params()
        self.chunks = list(chunks)
        self.term_freqs: list[Counter] = []
        self.doc_lens: list[int] = []
        df: Counter = Counter()
        for chunk in self.chunks:
            terms = split_subtokens(chunk.text)
            freqs = Counter(terms)
            self.term_freqs.append(freqs)
            self.doc_lens.append(len(terms))
            for term in freqs:
                df[term] += 1
        n = len(self.chunks)
        self.avgdl = (sum(self.doc_lens) / n) if n else 0.0
        self.idf = {
            term: math.log(1.0 + (n - count + 0.5) / (count + 0.5))
            for term, count in df.items()
        }

    def __len__(self) -> int:
        return len(self.chunks)

    def query(self, terms: list[str], k: int) -> list[tuple[Chunk, float]]:
        """Top-k chunks by BM25 score, ties broken by (path, start)."""
        if k <= 0 or not terms or not self.chunks:
            return []
        qtf = Counter(terms)
        k1, b = self.params.k1, self.params.b
        scored = []
        for doc_id, freqs in enumerate(self.term_freqs):
            dl = self.doc_lens[doc_id]
            norm = k1 * (1 - b + b * dl / self.avgdl) if self.avgdl else k1
            score = 0.0
            for term, weight in qtf.items():
                tf = freqs.get(term)
                if not tf:
                    continue
                score += weight * self.idf.get(term, 0.0) * tf * (k1 + 1) / (tf + norm)
            if score > 0.0:
                chunk = self.chunks[doc_id]
                scored.append((-score, chunk.file, chunk.start, doc_id))
        scored.sort()
        return [(self.chunks[doc_id], -neg) for neg, _, _, doc_id in scored[:k]]


def build_bm25_index(chunks: list[Chunk], params: Bm25Params | None = None) -> Bm25Index:
    return Bm25Index(chunks, params)


def retrieve(index: Bm25Index, symbols: list[Symbol], k: int) -> list[ContextSnippet]:
    """Query = multiset of subtokens of the symbol names."""
    if k < 0:
        raise ValueError("k must be >= 0")
    terms: list[str] = []
    for sym in symbols:
        terms.extend(split_subtokens(sym.name))
    out = []
    for chunk, score in index.query(terms, k):
        out.append(ContextSnippet(path=chunk.file, start=chunk.start, end=chunk.end,
                                  text=chunk.text, source="bm25", score=score))
    return out


_WS_RE = re.compile(r"\s+")


def normalize_ws(text: str) -> str:
    return _WS_RE.sub(" ", text).strip()


def strip_leakage(snippets: list[ContextSnippet], example: FimExample) -> list[ContextSnippet]:
    """Remove snippets that could hand the model the ground truth.

    A snippet leaks when it overlaps the middle's span in the same file, or
    when whitespace-normalized containment holds in either direction.
    """
    mid_start, mid_end = example.middle_byte_range
    norm_middle = normalize_ws(example.middle)
    out = []
    for snippet in snippets:
        if snippet.path == example.path and \
                snippet.start < mid_end and mid_start < snippet.end:
            continue
        if norm_middle:
            norm_snippet = normalize_ws(snippet.text)
            if norm_middle in norm_snippet or (norm_snippet and norm_snippet in norm_middle):
                continue
        out.append(snippet)
    return out


def snippet_priority(snippets: list[ContextSnippet]) -> list[ContextSnippet]:
    """Symbol-graph snippets by ascending depth first, then BM25 by
    descending score; stable within groups."""
    graph = [s for s in snippets if s.source == "symbol_graph"]
    bm25 = [s for s in snippets if s.source == "bm25"]
    graph.sort(key=lambda s: s.depth)
    bm25.sort(key=lambda s: -s.score)
    return graph + bm25


def trim_snippets_to_budget(snippets: list[ContextSnippet], budget: int,
                            estimator=estimate_tokens) -> list[ContextSnippet]:
    """Greedy keep-if-fits in priority order."""
    out = []
    used = 0
    for snippet in snippets:
        cost = estimator(snippet.text)
        if used + cost <= budget:
            out.append(snippet)
            used += cost
    return out


@dataclass
class RepoContext:
    """A repository prepared for retrieval: chunked, indexed, parse-cached."""

    root: str
    files: list  # accepted SourceFiles
    index: Bm25Index
    resolver: object | None = None  # ResolverPool, when available
    trees: dict = field(default_factory=dict)
    stopwords: set[str] | None = None
    keywords: dict[str, set[str]] = field(default_factory=dict)

    @classmethod
    def build(cls, root: str, files: list, chunk_max_tokens: int = 512,
              params: Bm25Params | None = None, resolver=None) -> "RepoContext":
        chunks: list[Chunk] = []
        trees = {}
        for file in files:
            try:
                tree = parse_source(file.content, file.language)
            except ValueError:
                continue
            trees[file.path] = tree
            chunks.extend(chunk_syntactic(tree, chunk_max_tokens, path=file.path))
        return cls(root=root, files=files, index=build_bm25_index(chunks, params),
                   resolver=resolver, trees=trees)

    def tree_for(self, example: FimExample):
        tree = self.trees.get(example.path)
        if tree is None:
            content = example.prefix + example.middle + example.suffix
            tree = parse_source(content, example.language)
            self.trees[example.path] = tree
        return tree

    def keyword_set(self, language: str) -> set[str]:
        if language not in self.keywords:
            self.keywords[language] = default_keywords(language)
        return self.keywords[language]


def middle_symbols(example: FimExample, repo: RepoContext) -> list[Symbol]:
    tree = repo.tree_for(example)
    start, end = example.middle_byte_range
    occurrences = extract_identifiers(tree, start, end)
    symbols = [Symbol(name=name, path=example.path, offset=s)
               for name, s, _ in occurrences]
    return filter_symbols(symbols, example.language,
                          stopwords=repo.stopwords,
                          keywords=repo.keyword_set(example.language))


def gather_context(example: FimExample, repo: RepoContext, budget: int,
                   k: int = 10, estimator=estimate_tokens) -> tuple[list[ContextSnippet], list[str]]:
    """Context snippets for one example, leakage-stripped and within budget.

    Returns (snippets, warnings).
    """
    warnings: list[str] = []
    if budget <= 0:
        return [], warnings
    symbols = middle_symbols(example, repo)
    snippets: list[ContextSnippet] = []
    if example.language in RESOLVER_LANGUAGES and repo.resolver is not None:
        try:
            snippets = repo.resolver.resolve_snippets(example, symbols, budget)
        except Exception as exc:  # resolver died: fall back, record it
            warnings.append(f"resolver failed ({exc}); falling back to bm25")
            snippets = []
    elif example.language in RESOLVER_LANGUAGES:
        warnings.append("resolver unavailable; falling back to bm25")
    if not snippets:
        snippets = retrieve(repo.index, symbols, k)
    snippets = strip_leakage(snippets, example)
    snippets = snippet_priority(snippets)
    return trim_snippets_to_budget(snippets, budget, estimator), warnings
