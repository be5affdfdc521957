"""Curriculum extraction: quantiles, sampling, selection, reconstruction."""

from __future__ import annotations

import random

import pytest

from fimpipe.curriculum import (
    CorpusStats,
    CurriculumDistribution,
    analyze_file,
    build_corpus_stats,
    draw_example,
    extract_example,
    generate_examples,
    nearest_rank,
)
from fimpipe.ingest import SourceFile
from fimpipe.syntax import parse_source


class SeqRng:
    """Feeds a fixed sequence of uniform draws; randint falls back to low."""

    def __init__(self, values):
        self.values = list(values)

    def random(self):
        return self.values.pop(0)

    def randint(self, a, b):
        return a

    def randrange(self, n):
        return 0


def make_file(content, language="python", path="m.py"):
    return SourceFile(repo_id="r", path=path, language=language,
                      content=content, size_bytes=len(content.encode()))


def test_nearest_rank_oracle():
    assert nearest_rank(list(range(1, 101)), 0.05) == 5
    assert nearest_rank(list(range(1, 101)), 0.95) == 95
    assert nearest_rank([42], 0.05) == 42
    assert nearest_rank([42], 0.95) == 42


def test_bounds_absent_without_observations():
    stats = CorpusStats(sample_cap=10)
    assert stats.bounds("python", "call_expression") is None


def test_distribution_validation():
    weights = CurriculumDistribution.default().weights
    assert abs(sum(weights.values()) - 1.0) < 1e-9
    bad = dict(weights)
    bad["random_span"] += 0.1
    with pytest.raises(ValueError):
        CurriculumDistribution(bad)
    with pytest.raises(ValueError):
        CurriculumDistribution({"random_span": 1.0})


def test_table2_default_values():
    weights = CurriculumDistribution.default().weights
    assert weights["random_span"] == 0.35
    assert weights["call_expression"] == 0.12
    assert weights["function_definition_full"] == 0.12
    assert weights["class_definition"] == 0.10
    assert weights["function_parameters"] == 0.08
    assert weights["function_definition_with_prefix"] == 0.08
    assert weights["if_statement"] == 0.08
    assert weights["try_catch"] == 0.04
    assert weights["assignment"] == 0.03


def test_cdf_walk_buckets():
    dist = CurriculumDistribution.default()
    assert dist.sample(SeqRng([0.0])) == "random_span"
    assert dist.sample(SeqRng([0.36])) == "call_expression"
    assert dist.sample(SeqRng([0.999])) == "assignment"


def test_seeded_draw_frequencies_match_table2():
    dist = CurriculumDistribution.default()
    rng = random.Random(42)
    n = 100_000
    counts = {}
    for _ in range(n):
        category = dist.sample(rng)
        counts[category] = counts.get(category, 0) + 1
    for category, weight in dist.weights.items():
        assert abs(counts.get(category, 0) / n - weight) <= 0.01


PY_FIXTURE = '''import os

def transform(alpha, beta):
    result = alpha * beta
    if result > 10:
        result = result - alpha
    try:
        persist(result, alpha)
    except ValueError:
        result = 0
    return result


class Holder:
    def __init__(self, alpha, beta):
        self.alpha = alpha
        self.beta = beta

    def compute(self, gamma):
        stored = transform(self.alpha, gamma)
        return stored + self.beta
'''


@pytest.fixture(scope="module")
def fixture_stats(taxonomy):
    files = [make_file(PY_FIXTURE, path=f"f{i}.py") for i in range(3)]
    return files, build_corpus_stats(files, sample_cap=500, taxonomy=taxonomy, seed=0)


def test_known_unique_call_chosen(taxonomy):
    content = "logUserDetails(user, ts)\n"
    file = make_file(content)
    tree = parse_source(content, "python")
    stats = CorpusStats(sample_cap=10,
                        samples={("python", "call_expression"): [10, 24, 30],
                                 ("python", "random_span"): [5, 20]})
    dist = CurriculumDistribution.default()
    rng = SeqRng([0.40])  # lands in call_expression bucket
    example = extract_example(file, tree, stats, dist, rng, taxonomy)
    assert example.category == "call_expression"
    assert example.middle == "logUserDetails(user, ts)"
    assert example.prefix + example.middle + example.suffix == content
    assert example.complexity == 3


def test_comment_only_file_skips(taxonomy):
    content = "# nothing but comments\n# another line\n"
    file = make_file(content)
    tree = parse_source(content, "python")
    stats = CorpusStats(sample_cap=10)  # no bounds anywhere
    dist = CurriculumDistribution.default()
    example = extract_example(file, tree, stats, dist, random.Random(1), taxonomy)
    assert example is None


def test_max_complexity_selected(taxonomy):
    content = "simple(x)\nrich(alpha, beta, gamma)\n"
    file = make_file(content)
    tree = parse_source(content, "python")
    stats = CorpusStats(sample_cap=10,
                        samples={("python", "call_expression"): [5, 15, 30],
                                 ("python", "random_span"): [5, 30]})
    dist = CurriculumDistribution.default()
    example = extract_example(file, tree, stats, dist, SeqRng([0.40]), taxonomy)
    assert example.middle == "rich(alpha, beta, gamma)"
    assert example.complexity == 4


def test_tie_breaks_to_earliest(taxonomy):
    content = "first(a, b)\nsecond(c, d)\n"
    file = make_file(content)
    tree = parse_source(content, "python")
    stats = CorpusStats(sample_cap=10,
                        samples={("python", "call_expression"): [5, 11, 30],
                                 ("python", "random_span"): [5, 30]})
    example = extract_example(file, tree, stats, CurriculumDistribution.default(),
                              SeqRng([0.40]), taxonomy)
    assert example.middle == "first(a, b)"


def test_resample_renormalizes_to_present(taxonomy):
    content = "only_call(a, b)\n"  # no class/try/if nodes at all
    file = make_file(content)
    tree = parse_source(content, "python")
    stats = CorpusStats(sample_cap=10,
                        samples={("python", "call_expression"): [5, 16, 30],
                                 ("python", "random_span"): [5, 30]})
    # first draw lands on class_definition (ineligible), resample must pick
    # among {call_expression, random_span, assignment?...} via second draw
    example = extract_example(file, tree, stats, CurriculumDistribution.default(),
                              SeqRng([0.58, 0.9]), taxonomy)
    assert example is not None
    assert example.category in ("call_expression", "random_span",
                                "function_parameters", "assignment")


def test_quantile_filter_drops_out_of_range(taxonomy):
    content = "tiny(a)\nmiddle_sized(alpha, beta)\n"
    file = make_file(content)
    tree = parse_source(content, "python")
    # bounds q05=q95=25 exclude the short call, keeping only the long one
    stats = CorpusStats(sample_cap=10,
                        samples={("python", "call_expression"): [25],
                                 ("python", "random_span"): [5, 30]})
    example = extract_example(file, tree, stats, CurriculumDistribution.default(),
                              SeqRng([0.40]), taxonomy)
    assert example.middle == "middle_sized(alpha, beta)"


def test_reconstruction_over_corpus(corpus120, taxonomy, table2):
    files, stats = corpus120
    examples = generate_examples(files, stats, table2, taxonomy, seed=3)
    assert len(examples) == len(files)
    by_path = {f.path: f.content for f in files}
    for example in examples:
        assert example.prefix + example.middle + example.suffix == by_path[example.path]
        assert example.middle != ""


def test_quantile_invariant_over_corpus(corpus120, taxonomy, table2):
    files, stats = corpus120
    examples = generate_examples(files, stats, table2, taxonomy, seed=5)
    for example in examples:
        if example.category == "random_span":
            continue
        lo, hi = stats.bounds(example.language, example.category)
        size = example.middle_byte_range[1] - example.middle_byte_range[0]
        assert lo <= size <= hi


def test_determinism_same_seed(corpus120, taxonomy, table2):
    files, stats = corpus120
    first = generate_examples(files, stats, table2, taxonomy, seed=9)
    second = generate_examples(files, stats, table2, taxonomy, seed=9)
    assert [e.to_dict() for e in first] == [e.to_dict() for e in second]
    third = generate_examples(files, stats, table2, taxonomy, seed=10)
    assert [e.id for e in first] != [e.id for e in third]


def test_examples_per_file_dedupes(corpus120, taxonomy, table2):
    files, stats = corpus120
    examples = generate_examples(files[:5], stats, table2, taxonomy, seed=2,
                                 examples_per_file=3)
    keys = [(e.path, e.category, e.middle_byte_range) for e in examples]
    assert len(keys) == len(set(keys))


def test_stats_roundtrip(corpus120):
    _, stats = corpus120
    clone = CorpusStats.from_json(stats.to_json())
    for key in stats.samples:
        assert clone.bounds(*key) == stats.bounds(*key)


def test_draw_uses_one_rng_draw_when_eligible(corpus120, taxonomy, table2):
    files, stats = corpus120
    analysis = analyze_file(files[0], stats, taxonomy)
    rng = SeqRng([0.0, 0.99])
    example = draw_example(analysis, table2, rng)
    assert example.category == "random_span"
    assert len(rng.values) == 1  # second value untouched by category sampling
