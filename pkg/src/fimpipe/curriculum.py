"""Curriculum example extraction.

Per file: sample a node category from the configured distribution, collect
matching nodes, drop those outside the per-(language, category) 5th/95th
length quantiles, pick the most complex survivor (distinct-identifier count,
ties to the earliest offset), and split the file into prefix/middle/suffix
around it. Random spans are synthesized with lengths drawn from the pooled
per-language bounds.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, field

from .ingest import SourceFile
from .syntax import (
    AST_CATEGORIES,
    CATEGORIES,
    SyntaxTree,
    extract_category_nodes,
    parse_source,
)
from .syntax.analysis import _leaves_in_span, identifier_leaves


def derive_seed(*parts) -> int:
    digest = hashlib.sha256("\x1f".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass
class CurriculumDistribution:
    weights: dict[str, float]

    def __post_init__(self) -> None:
        if set(self.weights) != set(CATEGORIES):
            missing = set(CATEGORIES) - set(self.weights)
            extra = set(self.weights) - set(CATEGORIES)
            raise ValueError(f"distribution keys mismatch: missing={missing} extra={extra}")
        if any(w < 0 for w in self.weights.values()):
            raise ValueError("weights must be non-negative")
        total = sum(self.weights.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1.0, got {total}")

    @classmethod
    def default(cls) -> "CurriculumDistribution":
        from importlib import resources
        text = resources.files("fimpipe.data").joinpath("table2.json").read_text()
        return cls(json.loads(text))

    def sample(self, rng: random.Random) -> str:
        """CDF walk in fixed category order; deterministic given the rng state."""
        u = rng.random()
        acc = 0.0
        for category in CATEGORIES:
            acc += self.weights[category]
            if u <= acc:
                return category
        return CATEGORIES[-1]

    def sample_among(self, rng: random.Random, allowed: set[str]) -> str | None:
        """Draw from the renormalized weights restricted to ``allowed``."""
        total = sum(self.weights[c] for c in CATEGORIES if c in allowed)
        if total <= 0.0:
            ordered = [c for c in CATEGORIES if c in allowed]
            return ordered[rng.randrange(len(ordered))] if ordered else None
        u = rng.random() * total
        acc = 0.0
        for category in CATEGORIES:
            if category not in allowed:
                continue
            acc += self.weights[category]
            if u <= acc:
                return category
        return None


def nearest_rank(sorted_samples: list[int], q: float) -> int:
    """Nearest-rank quantile on an ascending sample list."""
    n = len(sorted_samples)
    if n == 0:
        raise ValueError("no samples")
    rank = max(1, math.ceil(q * n))
    return sorted_samples[min(rank, n) - 1]


@dataclass
class CorpusStats:
    """Sampled node-length observations and derived (q05, q95) bounds."""

    sample_cap: int
    samples: dict[tuple[str, str], list[int]] = field(default_factory=dict)

    def bounds(self, language: str, category: str) -> tuple[int, int] | None:
        cell = self.samples.get((language, category))
        if not cell:
            return None
        ordered = sorted(cell)
        return nearest_rank(ordered, 0.05), nearest_rank(ordered, 0.95)

    def to_json(self) -> str:
        payload = {
            "sample_cap": self.sample_cap,
            "cells": {
                f"{lang}/{cat}": sorted(vals)
                for (lang, cat), vals in sorted(self.samples.items())
            },
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CorpusStats":
        payload = json.loads(text)
        samples = {}
        for key, vals in payload["cells"].items():
            lang, cat = key.split("/", 1)
            samples[(lang, cat)] = list(vals)
        return cls(sample_cap=payload["sample_cap"], samples=samples)


def build_corpus_stats(files: list[SourceFile], sample_cap: int,
                       taxonomy: dict, seed: int = 0) -> CorpusStats:
    """Collect node text lengths per (language, category) with reservoir
    sampling, plus a pooled per-language cell used for random spans.
    """
    if not files:
        raise ValueError("files must be non-empty")
    stats = CorpusStats(sample_cap=sample_cap)
    counts: dict[tuple[str, str], int] = {}
    rng = random.Random(derive_seed(seed, "corpus-stats"))
    for file in sorted(files, key=lambda f: (f.repo_id, f.path)):
        try:
            tree = parse_source(file.content, file.language)
        except ValueError:
            continue
        for category in AST_CATEGORIES:
            spans = extract_category_nodes(tree, category, taxonomy)
            if not spans:
                continue
            key = (file.language, category)
            reservoir = stats.samples.setdefault(key, [])
            for span in spans:
                counts[key] = counts.get(key, 0) + 1
                length = span.end - span.start
                if len(reservoir) < sample_cap:
                    reservoir.append(length)
                else:
                    j = rng.randrange(counts[key])
                    if j < sample_cap:
                        reservoir[j] = length
    # pooled per-language cell backing random-span length draws
    pools: dict[str, list[int]] = {}
    for (lang, _), vals in stats.samples.items():
        pools.setdefault(lang, []).extend(vals)
    for lang, vals in pools.items():
        stats.samples[(lang, "random_span")] = sorted(vals)
    return stats


@dataclass
class FimExample:
    id: str
    repo_id: str
    path: str
    language: str
    prefix: str
    middle: str
    suffix: str
    category: str
    complexity: int
    middle_byte_range: tuple[int, int]

    def to_dict(self) -> dict:
        d = {
            "id": self.id,
            "repo_id": self.repo_id,
            "path": self.path,
            "language": self.language,
            "prefix": self.prefix,
            "middle": self.middle,
            "suffix": self.suffix,
            "category": self.category,
            "complexity": self.complexity,
            "middle_byte_range": list(self.middle_byte_range),
        }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FimExample":
        return cls(
            id=d["id"], repo_id=d["repo_id"], path=d["path"], language=d["language"],
            prefix=d["prefix"], middle=d["middle"], suffix=d["suffix"],
            category=d["category"], complexity=d["complexity"],
            middle_byte_range=tuple(d["middle_byte_range"]),
        )


def _example_id(file: SourceFile, start: int, end: int, category: str) -> str:
    content_digest = hashlib.sha256(file.content.encode()).hexdigest()[:12]
    raw = "\x1f".join([file.repo_id, file.path, content_digest,
                       str(start), str(end), category])
    return hashlib.sha256(raw.encode()).hexdigest()[:16]


@dataclass
class FileAnalysis:
    """Parse-once cache: per-category in-bounds nodes plus random-span range."""

    file: SourceFile
    tree: SyntaxTree
    nodes: dict[str, list]           # category -> eligible NodeSpans (in bounds)
    leaves: list[tuple[int, int, str]]
    random_range: tuple[int, int] | None  # usable (lo, hi) span length in chars


def analyze_file(file: SourceFile, stats: CorpusStats, taxonomy: dict,
                 tree: SyntaxTree | None = None) -> FileAnalysis | None:
    if tree is None:
        try:
            tree = parse_source(file.content, file.language)
        except ValueError:
            return None
    leaves = identifier_leaves(tree)
    nodes: dict[str, list] = {}
    for category in AST_CATEGORIES:
        bounds = stats.bounds(file.language, category)
        if bounds is None:
            continue
        lo, hi = bounds
        spans = extract_category_nodes(tree, category, taxonomy, leaves=leaves)
        survivors = [s for s in spans if lo <= (s.end - s.start) <= hi]
        if survivors:
            nodes[category] = survivors
    random_range = None
    span_bounds = stats.bounds(file.language, "random_span")
    char_len = len(file.content)
    if span_bounds is not None and char_len >= 1:
        lo = max(1, span_bounds[0])
        hi = min(span_bounds[1], char_len)
        if lo <= hi:
            random_range = (lo, hi)
    return FileAnalysis(file=file, tree=tree, nodes=nodes, leaves=leaves,
                        random_range=random_range)


def draw_example(analysis: FileAnalysis, dist: CurriculumDistribution,
                 rng: random.Random,
                 exclude: set[tuple[str, int, int]] | None = None) -> FimExample | None:
    """One curriculum example from an analyzed file, or None when nothing is
    eligible. Sampling order: one distribution draw, then (only if that
    category has no eligible node here) one renormalized draw.
    """
    exclude = exclude or set()
    file = analysis.file
    content = file.content
    char_len = len(content)

    eligible: set[str] = set()
    for category, spans in analysis.nodes.items():
        if any((category, s.start, s.end) not in exclude for s in spans):
            eligible.add(category)
    if analysis.random_range is not None:
        eligible.add("random_span")
    if not eligible:
        return None

    category = dist.sample(rng)
    if category not in eligible:
        category = dist.sample_among(rng, eligible)
        if category is None:
            return None

    if category == "random_span":
        lo, hi = analysis.random_range
        length = rng.randint(lo, hi)
        start_char = rng.randint(0, char_len - length)
        prefix = content[:start_char]
        middle = content[start_char : start_char + length]
        suffix = content[start_char + length :]
        byte_start = len(prefix.encode("utf-8"))
        byte_end = byte_start + len(middle.encode("utf-8"))
        complexity = len({t for _, _, t in
                          _leaves_in_span(analysis.leaves, byte_start, byte_end)})
        return FimExample(
            id=_example_id(file, byte_start, byte_end, category),
            repo_id=file.repo_id, path=file.path, language=file.language,
            prefix=prefix, middle=middle, suffix=suffix,
            category=category, complexity=complexity,
            middle_byte_range=(byte_start, byte_end),
        )

    nodes = [s for s in analysis.nodes[category]
             if (category, s.start, s.end) not in exclude]
    pick = min(nodes, key=lambda n: (-n.complexity, n.start))
    source = analysis.tree.source
    prefix = source[: pick.start].decode("utf-8", errors="replace")
    middle = source[pick.start : pick.end].decode("utf-8", errors="replace")
    suffix = source[pick.end :].decode("utf-8", errors="replace")
    return FimExample(
        id=_example_id(file, pick.start, pick.end, category),
        repo_id=file.repo_id, path=file.path, language=file.language,
        prefix=prefix, middle=middle, suffix=suffix,
        category=category, complexity=pick.complexity,
        middle_byte_range=(pick.start, pick.end),
    )


def extract_example(file: SourceFile, tree: SyntaxTree, stats: CorpusStats,
                    dist: CurriculumDistribution, rng: random.Random,
                    taxonomy: dict,
                    exclude: set[tuple[str, int, int]] | None = None) -> FimExample | None:
    """One-shot form of analyze_file + draw_example."""
    analysis = analyze_file(file, stats, taxonomy, tree=tree)
    if analysis is None:
        return None
    return draw_example(analysis, dist, rng, exclude=exclude)


def generate_examples(files: list[SourceFile], stats: CorpusStats,
                      dist: CurriculumDistribution, taxonomy: dict,
                      seed: int = 0, examples_per_file: int = 1) -> list[FimExample]:
    """Deterministic extraction pass over a filtered corpus.

    Each file gets its own generator derived from (seed, repo, path), so the
    output is independent of worker scheduling.
    """
    out: list[FimExample] = []
    for file in sorted(files, key=lambda f: (f.repo_id, f.path)):
        analysis = analyze_file(file, stats, taxonomy)
        if analysis is None:
            continue
        rng = random.Random(derive_seed(seed, file.repo_id, file.path))
        taken: set[tuple[str, int, int]] = set()
        for _ in range(examples_per_file):
            example = draw_example(analysis, dist, rng, exclude=taken)
            if example is None:
                break
            key = (example.category, *example.middle_byte_range)
            if key in taken:
                continue
            taken.add(key)
            out.append(example)
    return out
