"""Record assembly: sentinel layout, fim mixing, budget trimming."""

from __future__ import annotations

import random

import pytest

from fimpipe.assemble import (
    AssemblyConfig,
    Parts,
    SentinelSet,
    assemble_record,
    render_context,
    trim_to_budget,
)
from fimpipe.context import ContextSnippet
from fimpipe.curriculum import FimExample, derive_seed
from fimpipe.tokens import estimate_tokens

SENTINELS = SentinelSet.preset("generic")


def make_example(prefix="alpha = 1\n", middle="beta = compute(alpha)",
                 suffix="\nprint(beta)\n", language="python"):
    start = len(prefix.encode())
    return FimExample(
        id="ex-1", repo_id="r", path="m.py", language=language,
        prefix=prefix, middle=middle, suffix=suffix,
        category="assignment", complexity=2,
        middle_byte_range=(start, start + len(middle.encode())),
    )


def snip(text, path="ctx.py", score=1.0):
    return ContextSnippet(path=path, start=0, end=len(text.encode()),
                          text=text, source="bm25", score=score)


def test_sentinel_presets_distinct():
    for name in ("generic", "starcoder", "deepseek"):
        s = SentinelSet.preset(name)
        assert len({s.prefix_tag, s.suffix_tag, s.middle_tag}) == 3
    with pytest.raises(KeyError):
        SentinelSet.preset("unknown-model")
    with pytest.raises(ValueError):
        SentinelSet("x", "x", "y", "", "")


def test_render_context_empty():
    assert render_context([], "{comment} {path}\n{text}\n", "python") == ""


def test_render_context_comment_header():
    text = render_context([snip("def f(): pass", path="utils/auth.py")],
                          "{comment} {path}\n{text}\n", "python")
    assert text == "# utils/auth.py\ndef f(): pass\n"
    text_ts = render_context([snip("let x = 1;", path="a.ts")],
                             "{comment} {path}\n{text}\n", "typescript")
    assert text_ts.startswith("// a.ts\n")


def test_render_context_priority_order():
    high = snip("high()", path="h.py", score=5.0)
    low = snip("low()", path="l.py", score=2.0)
    # assemble_record re-sorts; render just follows list order
    example = make_example()
    config = AssemblyConfig(fim_rate=1.0)
    record, _ = assemble_record(example, [low, high], config, SENTINELS,
                                random.Random(0))
    assert record.text.index("h.py") < record.text.index("l.py")


def test_fim_rate_one_always_fim():
    example = make_example()
    config = AssemblyConfig(fim_rate=1.0)
    for seed in range(25):
        record, _ = assemble_record(example, [], config, SENTINELS,
                                    random.Random(seed))
        assert record.format == "fim"


def test_fim_rate_zero_always_causal():
    example = make_example()
    config = AssemblyConfig(fim_rate=0.0)
    record, _ = assemble_record(example, [], config, SENTINELS, random.Random(1))
    assert record.format == "causal"
    assert record.text == example.prefix + example.middle + example.suffix


def test_psm_sentinel_order():
    example = make_example()
    config = AssemblyConfig(fim_rate=1.0)
    record, _ = assemble_record(example, [snip("ctx()")], config, SENTINELS,
                                random.Random(3))
    text = record.text
    p = text.index(SENTINELS.prefix_tag)
    s = text.index(SENTINELS.suffix_tag)
    m = text.index(SENTINELS.middle_tag)
    assert p < s < m
    for tag in (SENTINELS.prefix_tag, SENTINELS.suffix_tag, SENTINELS.middle_tag):
        assert text.count(tag) == 1


def test_fim_resplice_reproduces_file():
    example = make_example()
    config = AssemblyConfig(fim_rate=1.0)
    record, _ = assemble_record(example, [], config, SENTINELS, random.Random(5))
    text = record.text
    prefix_part = text.split(SENTINELS.prefix_tag)[1].split(SENTINELS.suffix_tag)[0]
    suffix_part = text.split(SENTINELS.suffix_tag)[1].split(SENTINELS.middle_tag)[0]
    middle_part = text.split(SENTINELS.middle_tag)[1]
    original = example.prefix + example.middle + example.suffix
    assert prefix_part + middle_part + suffix_part == original


def test_fim_fraction_converges():
    example = make_example()
    config = AssemblyConfig(fim_rate=0.5)
    n = 10_000
    fim = 0
    for i in range(n):
        rng = random.Random(derive_seed(0, "assemble", f"ex-{i}"))
        record, _ = assemble_record(example, [], config, SENTINELS, rng)
        fim += record.format == "fim"
    assert abs(fim / n - 0.5) <= 0.02


def test_middle_too_large_skipped():
    example = make_example(middle="x" * 400)
    config = AssemblyConfig(fim_rate=1.0, max_tokens=50)
    record, reason = assemble_record(example, [], config, SENTINELS,
                                     random.Random(0))
    assert record is None
    assert reason == "middle_exceeds_budget"


def test_trim_unchanged_within_budget():
    parts = Parts(context=["# c\n"], prefix="aaaa", suffix="bbbb", middle="mm")
    config = AssemblyConfig(max_tokens=100)
    out = trim_to_budget(parts, config)
    assert out == parts


def test_trim_drops_context_before_code():
    config = AssemblyConfig(max_tokens=10)
    parts = Parts(context=["c" * 20, "d" * 20], prefix="p" * 12,
                  suffix="s" * 12, middle="m" * 8)
    out = trim_to_budget(parts, config)
    assert out.context == []
    assert out.middle == parts.middle
    total = (sum(estimate_tokens(c) for c in out.context)
             + estimate_tokens(out.prefix) + estimate_tokens(out.suffix)
             + estimate_tokens(out.middle))
    assert total <= 10


def test_trim_prefix_from_far_end_then_suffix():
    config = AssemblyConfig(max_tokens=6)
    parts = Parts(context=[], prefix="0123456789ABCDEF", suffix="abcdefgh",
                  middle="mm")
    out = trim_to_budget(parts, config)
    assert out.prefix == "" or parts.prefix.endswith(out.prefix)
    assert out.suffix == "" or parts.suffix.startswith(out.suffix)
    assert out.middle == "mm"


def test_budget_exactly_consumed_by_code_drops_context():
    config = AssemblyConfig(max_tokens=6)
    parts = Parts(context=["x" * 8], prefix="p" * 8, suffix="s" * 8, middle="m" * 8)
    out = trim_to_budget(parts, config)
    assert out.context == []


def test_oversized_context_code_untouched():
    example = make_example()
    config = AssemblyConfig(fim_rate=1.0, max_tokens=30)
    big_context = [snip("c" * 200, path=f"{i}.py", score=float(10 - i))
                   for i in range(3)]
    record, _ = assemble_record(example, big_context, config, SENTINELS,
                                random.Random(2))
    assert record is not None
    assert record.token_estimate <= 30
    assert example.middle in record.text


def test_every_record_within_token_budget(corpus120, taxonomy, table2):
    from fimpipe.curriculum import generate_examples
    files, stats = corpus120
    examples = generate_examples(files[:40], stats, table2, taxonomy, seed=6)
    config = AssemblyConfig(max_tokens=120)
    for example in examples:
        rng = random.Random(derive_seed(1, "assemble", example.id))
        record, reason = assemble_record(example, [snip("pad" * 40)], config,
                                         SENTINELS, rng)
        if record is not None:
            assert record.token_estimate <= 120
        else:
            assert reason == "middle_exceeds_budget"
