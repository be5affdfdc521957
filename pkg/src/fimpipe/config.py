"""Declarative pipeline configuration.

One JSON file configures every stage; unknown keys are rejected so typos
fail loudly, and every referenced file must exist at load time. The resolved
config hashes deterministically for the run manifest.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .assemble import AssemblyConfig, SentinelSet
from .context import Bm25Params
from .curriculum import CurriculumDistribution
from .ingest import DEFAULT_EXTENSIONS, FilterPolicy
from .syntax import load_taxonomy
from .telemetry import AnalyzerConfig


class ConfigError(ValueError):
    pass


def _take(section: dict, allowed: set[str], where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


@dataclass
class PipelineConfig:
    languages: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_EXTENSIONS))
    filter_policy: FilterPolicy = field(default_factory=FilterPolicy)
    distribution: CurriculumDistribution = field(
        default_factory=CurriculumDistribution.default)
    bm25: Bm25Params = field(default_factory=Bm25Params)
    assembly: AssemblyConfig = field(default_factory=AssemblyConfig)
    sentinel_preset: str = "generic"
    analyzer: AnalyzerConfig = field(default_factory=AnalyzerConfig)
    retrieval_k: int = 10
    chunk_max_tokens: int = 512
    context_budget: int = 2048
    sample_cap: int = 2000
    examples_per_file: int = 1
    seed: int = 0
    workers: int = 1
    resolver_command: list[str] | None = None
    resolver_pool_size: int = 2
    taxonomy_path: str | None = None

    def __post_init__(self) -> None:
        self.sentinels = SentinelSet.preset(self.sentinel_preset)
        self.taxonomy = load_taxonomy(self.taxonomy_path)

    def to_canonical_dict(self) -> dict:
        return {
            "languages": self.languages,
            "filter": asdict(self.filter_policy),
            "distribution": self.distribution.weights,
            "bm25": asdict(self.bm25),
            "assembly": {
                "fim_rate": self.assembly.fim_rate,
                "max_tokens": self.assembly.max_tokens,
                "mode": self.assembly.mode,
                "context_template": self.assembly.context_template,
                "trim_order": list(self.assembly.trim_order),
            },
            "sentinel_preset": self.sentinel_preset,
            "analyzer": {
                "min_display_ms": self.analyzer.min_display_ms,
                "persistence_threshold": self.analyzer.persistence_threshold,
                "horizons": list(self.analyzer.horizons),
                "min_node_events": self.analyzer.min_node_events,
            },
            "retrieval_k": self.retrieval_k,
            "chunk_max_tokens": self.chunk_max_tokens,
            "context_budget": self.context_budget,
            "sample_cap": self.sample_cap,
            "examples_per_file": self.examples_per_file,
            "seed": self.seed,
            "workers": self.workers,
            "resolver_command": self.resolver_command,
            "resolver_pool_size": self.resolver_pool_size,
            "taxonomy_path": self.taxonomy_path,
        }

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_canonical_dict(), sort_keys=True)
        return hashlib.sha256(canonical.encode()).hexdigest()

    @classmethod
    def from_dict(cls, raw: dict) -> "PipelineConfig":
        _take(raw, {
            "languages", "filter", "distribution", "bm25", "assembly",
            "sentinel_preset", "analyzer", "retrieval_k", "chunk_max_tokens",
            "context_budget", "sample_cap", "examples_per_file", "seed",
            "workers", "resolver_command", "resolver_pool_size", "taxonomy_path",
        }, "config")
        kwargs: dict = {}
        if "languages" in raw:
            kwargs["languages"] = dict(raw["languages"])
        if "filter" in raw:
            _take(raw["filter"], {
                "max_line_length", "max_mean_line_length",
                "min_alphanumeric_fraction", "max_file_bytes",
                "autogenerated_markers"}, "config.filter")
            kwargs["filter_policy"] = FilterPolicy(**raw["filter"])
        if "distribution" in raw:
            kwargs["distribution"] = CurriculumDistribution(dict(raw["distribution"]))
        if "bm25" in raw:
            _take(raw["bm25"], {"k1", "b"}, "config.bm25")
            kwargs["bm25"] = Bm25Params(**raw["bm25"])
        if "assembly" in raw:
            _take(raw["assembly"], {
                "fim_rate", "max_tokens", "mode", "context_template",
                "trim_order"}, "config.assembly")
            section = dict(raw["assembly"])
            if "trim_order" in section:
                section["trim_order"] = tuple(section["trim_order"])
            kwargs["assembly"] = AssemblyConfig(**section)
        if "analyzer" in raw:
            _take(raw["analyzer"], {
                "min_display_ms", "persistence_threshold", "horizons",
                "min_node_events"}, "config.analyzer")
            section = dict(raw["analyzer"])
            if "horizons" in section:
                section["horizons"] = tuple(section["horizons"])
            kwargs["analyzer"] = AnalyzerConfig(**section)
        for key in ("sentinel_preset", "retrieval_k", "chunk_max_tokens",
                    "context_budget", "sample_cap", "examples_per_file",
                    "seed", "workers", "resolver_command",
                    "resolver_pool_size", "taxonomy_path"):
            if key in raw:
                kwargs[key] = raw[key]
        try:
            return cls(**kwargs)
        except (TypeError, ValueError, KeyError, OSError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path: str | None) -> "PipelineConfig":
        if path is None:
            return cls()
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            raw = json.loads(p.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config root must be an object")
        return cls.from_dict(raw)
