"""Rendering of curriculum examples plus context into model-ready records.

PSM layout with configurable sentinel presets, a fim/causal coin per record,
and greedy budget trimming that always sacrifices context first, then the far
end of the prefix, then the far end of the suffix. The middle is never
touched; a middle that cannot fit alone skips the record.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from importlib import resources

from .context import ContextSnippet, snippet_priority
from .curriculum import FimExample
from .tokens import comment_leader, estimate_tokens

SKIP_MIDDLE_TOO_LARGE = "middle_exceeds_budget"


@dataclass
class SentinelSet:
    prefix_tag: str
    suffix_tag: str
    middle_tag: str
    file_separator: str
    eod: str

    def __post_init__(self) -> None:
        tags = [self.prefix_tag, self.suffix_tag, self.middle_tag]
        if any(not t for t in tags):
            raise ValueError("sentinel tags must be non-empty")
        if len(set(tags)) != 3:
            raise ValueError("sentinel tags must be pairwise distinct")

    @classmethod
    def preset(cls, name: str) -> "SentinelSet":
        text = resources.files("fimpipe.data").joinpath("sentinels.json").read_text()
        presets = json.loads(text)
        if name not in presets:
            raise KeyError(f"unknown sentinel preset {name!r}; have {sorted(presets)}")
        return cls(**presets[name])


@dataclass
class AssemblyConfig:
    fim_rate: float = 0.5
    max_tokens: int = 16000
    mode: str = "psm"
    context_template: str = "{comment} {path}\n{text}\n"
    trim_order: tuple = ("context", "prefix", "suffix")

    def __post_init__(self) -> None:
        if not 0.0 <= self.fim_rate <= 1.0:
            raise ValueError("fim_rate must be in [0,1]")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")
        if self.mode != "psm":
            raise ValueError(f"unsupported mode {self.mode!r}")
        if tuple(self.trim_order) != ("context", "prefix", "suffix"):
            raise ValueError("trim_order must be context, prefix, suffix")


@dataclass
class TrainingRecord:
    id: str
    text: str
    format: str  # "fim" | "causal"
    token_estimate: int
    category: str
    language: str
    complexity: int

    def to_dict(self) -> dict:
        return {
            "id": self.id, "text": self.text, "format": self.format,
            "token_estimate": self.token_estimate, "category": self.category,
            "language": self.language, "complexity": self.complexity,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainingRecord":
        return cls(**{k: d[k] for k in ("id", "text", "format", "token_estimate",
                                        "category", "language", "complexity")})


def render_context(snippets: list[ContextSnippet], template: str,
                   language: str) -> str:
    """Each snippet becomes a commented origin header plus its text."""
    leader = comment_leader(language)
    blocks = []
    for snippet in snippets:
        blocks.append(template.format(comment=leader, path=snippet.path,
                                      text=snippet.text))
    return "".join(blocks)


@dataclass
class Parts:
    context: list[str] = field(default_factory=list)  # rendered, priority order
    prefix: str = ""
    suffix: str = ""
    middle: str = ""


def trim_to_budget(parts: Parts, config: AssemblyConfig,
                   estimator=estimate_tokens) -> Parts:
    """Drop context lowest-priority-first, then truncate the prefix from its
    earliest end and the suffix from its latest end until the total fits.
    """
    context = list(parts.context)
    prefix, suffix, middle = parts.prefix, parts.suffix, parts.middle

    def total() -> int:
        return (sum(estimator(c) for c in context)
                + estimator(prefix) + estimator(suffix) + estimator(middle))

    while total() > config.max_tokens and context:
        context.pop()
    over = total() - config.max_tokens
    if over > 0 and prefix:
        cut = min(len(prefix), over * 4)
        prefix = prefix[cut:]
    over = total() - config.max_tokens
    if over > 0 and suffix:
        cut = min(len(suffix), over * 4)
        suffix = suffix[: len(suffix) - cut]
    return Parts(context=context, prefix=prefix, suffix=suffix, middle=middle)


def assemble_record(example: FimExample, snippets: list[ContextSnippet],
                    config: AssemblyConfig, sentinels: SentinelSet,
                    rng: random.Random,
                    estimator=estimate_tokens) -> tuple[TrainingRecord | None, str | None]:
    """Render one training record; (None, reason) when the record is skipped."""
    emit_fim = rng.random() < config.fim_rate
    overhead = 0
    if emit_fim:
        overhead = (estimator(sentinels.prefix_tag) + estimator(sentinels.suffix_tag)
                    + estimator(sentinels.middle_tag))
    inner = replace(config, max_tokens=config.max_tokens - overhead)
    if estimator(example.middle) > inner.max_tokens:
        return None, SKIP_MIDDLE_TOO_LARGE
    ordered = snippet_priority(snippets)
    rendered = [render_context([s], config.context_template, example.language)
                for s in ordered]
    parts = trim_to_budget(
        Parts(context=rendered, prefix=example.prefix,
              suffix=example.suffix, middle=example.middle),
        inner, estimator)
    context_text = "".join(parts.context)
    if emit_fim:
        text = (sentinels.prefix_tag + context_text + parts.prefix
                + sentinels.suffix_tag + parts.suffix
                + sentinels.middle_tag + parts.middle)
        fmt = "fim"
    else:
        text = context_text + parts.prefix + parts.middle + parts.suffix
        fmt = "causal"
    record = TrainingRecord(
        id=example.id, text=text, format=fmt,
        token_estimate=estimator(text),
        category=example.category, language=example.language,
        complexity=example.complexity,
    )
    return record, None
