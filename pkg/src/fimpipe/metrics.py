"""Offline completion metrics: exact match, prefix match, edit similarity,
and run-level aggregation including Pass@1 over externally supplied verdicts.

Comparisons trim surrounding whitespace only; internal whitespace is code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass


def levenshtein(a: str, b: str) -> int:
    """Character-level edit distance, two-row DP."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(b) > len(a):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            current.append(min(previous[j] + 1,
                               current[j - 1] + 1,
                               previous[j - 1] + cost))
        previous = current
    return previous[-1]


def first_line(text: str) -> str:
    return text.split("\n", 1)[0]


def exact_match(generated: str, truth: str, single_line: bool = False) -> bool:
    if single_line:
        generated = first_line(generated)
        truth = first_line(truth)
    return generated.strip() == truth.strip()


def prefix_match(generated: str, truth: str) -> bool:
    return generated.strip().startswith(truth.strip())


def edit_similarity(generated: str, truth: str) -> float:
    a = generated.strip()
    b = truth.strip()
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


@dataclass
class PredictionRecord:
    example_id: str
    generated: str
    latency_seconds: float | None = None
    passed: bool | None = None  # bench verdict, when this is a bench run

    @classmethod
    def from_dict(cls, d: dict) -> "PredictionRecord":
        return cls(
            example_id=d.get("example_id") or d.get("id") or d.get("problem_id"),
            generated=d.get("generated", d.get("generation", "")),
            latency_seconds=d.get("latency_seconds"),
            passed=d.get("passed"),
        )


@dataclass
class MetricsReport:
    overall: dict
    per_language: dict
    counts: dict

    def to_json(self) -> str:
        return json.dumps(
            {"overall": self.overall, "per_language": self.per_language,
             "counts": self.counts},
            sort_keys=True, indent=2)


def _mean(values: list[float]) -> float | None:
    if not values:
        return None
    return round(sum(values) / len(values), 6)


def evaluate_run(dataset: list[dict], predictions: list[PredictionRecord],
                 metrics: tuple[str, ...] = ("em", "pm", "es"),
                 single_line: bool = False) -> MetricsReport:
    """Aggregate metrics per language and overall.

    Every dataset record needs an id, a ground-truth middle, and a language;
    a missing prediction counts as a failure on all requested metrics and is
    reported in the counts.
    """
    by_id = {p.example_id: p for p in predictions}
    known = set()
    for record in dataset:
        rid = record.get("id") or record.get("problem_id")
        if rid is None:
            raise ValueError("dataset record without id")
        known.add(rid)
    for pred in predictions:
        if pred.example_id not in known:
            raise ValueError(f"prediction for unknown example {pred.example_id!r}")

    values: dict[str, dict[str, list[float]]] = {}
    missing = 0
    for record in dataset:
        rid = record.get("id") or record.get("problem_id")
        truth = record.get("middle")
        if truth is None:
            truth = record.get("ground_truth_middle", "")
        language = record.get("language", "unknown")
        pred = by_id.get(rid)
        if pred is None:
            missing += 1
        generated = pred.generated if pred is not None else None
        bucket = values.setdefault(language, {})
        if "em" in metrics:
            hit = exact_match(generated, truth, single_line) if generated is not None else False
            bucket.setdefault("exact_match", []).append(1.0 if hit else 0.0)
        if "pm" in metrics:
            hit = prefix_match(generated, truth) if generated is not None else False
            bucket.setdefault("prefix_match", []).append(1.0 if hit else 0.0)
        if "es" in metrics:
            sim = edit_similarity(generated, truth) if generated is not None else 0.0
            bucket.setdefault("edit_similarity", []).append(sim)
        if "pass1" in metrics:
            passed = bool(pred.passed) if pred is not None else False
            bucket.setdefault("pass_at_1", []).append(1.0 if passed else 0.0)

    per_language = {}
    overall_values: dict[str, list[float]] = {}
    for language, bucket in sorted(values.items()):
        per_language[language] = {}
        for name, vals in sorted(bucket.items()):
            per_language[language][name] = _mean(vals)
            overall_values.setdefault(name, []).extend(vals)
    overall = {name: _mean(vals) for name, vals in sorted(overall_values.items())}
    counts = {
        "dataset": len(dataset),
        "predictions": len(predictions),
        "missing_predictions": missing,
    }
    return MetricsReport(overall=overall, per_language=per_language, counts=counts)
