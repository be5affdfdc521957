"""Acceptance and persistence analysis of completion event logs.

CAR counts acceptances against suggestions displayed longer than the minimum
duration; CPR checks whether an accepted completion still matches the
surrounding document region at a later horizon (best-aligned normalized edit
distance strictly below the threshold); relative CAR breaks acceptance down
by the syntax node under the cursor.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .syntax import load_taxonomy, node_type_at_cursor, parse_source


@dataclass
class AnalyzerConfig:
    min_display_ms: float = 750.0
    persistence_threshold: float = 0.33
    horizons: tuple[int, ...] = (30, 120, 300)
    min_node_events: int = 50

    def __post_init__(self) -> None:
        if not 0.0 < self.persistence_threshold < 1.0:
            raise ValueError("persistence_threshold must be in (0,1)")
        if self.min_display_ms < 0:
            raise ValueError("min_display_ms must be >= 0")


@dataclass
class CompletionEvent:
    event_id: str
    language: str
    cursor_offset: int
    displayed_ms: float
    accepted: bool
    accepted_text: str = ""
    file_snapshot: str | None = None
    node_type: str | None = None  # precomputed; else derived from the snapshot
    persistence_snapshots: dict[int, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.accepted and not self.accepted_text:
            raise ValueError(f"accepted event {self.event_id} lacks accepted_text")

    @classmethod
    def from_dict(cls, d: dict) -> "CompletionEvent":
        snaps = d.get("persistence_snapshots") or {}
        if isinstance(snaps, list):
            snaps = {int(h): text for h, text in snaps}
        else:
            snaps = {int(h): text for h, text in snaps.items()}
        return cls(
            event_id=str(d["event_id"]),
            language=d.get("language", "unknown"),
            cursor_offset=int(d.get("cursor_offset", 0)),
            displayed_ms=float(d.get("displayed_ms", 0)),
            accepted=bool(d.get("accepted", False)),
            accepted_text=d.get("accepted_text", ""),
            file_snapshot=d.get("file_snapshot"),
            node_type=d.get("node_type"),
            persistence_snapshots=snaps,
        )


def qualifying(events: list[CompletionEvent], config: AnalyzerConfig):
    return [e for e in events if e.displayed_ms > config.min_display_ms]


def compute_car(events: list[CompletionEvent],
                config: AnalyzerConfig) -> float | None:
    """Accepted / displayed-long-enough; None when nothing qualifies."""
    shown = qualifying(events, config)
    if not shown:
        return None
    accepted = sum(1 for e in shown if e.accepted)
    return accepted / len(shown)


def best_alignment_distance(needle: str, haystack: str) -> int:
    """Minimum edits to turn ``needle`` into some substring of ``haystack``
    (semi-global alignment: the haystack's flanks are free).
    """
    m = len(needle)
    if m == 0:
        return 0
    if not haystack:
        return m
    previous = [0] * (len(haystack) + 1)
    for i in range(1, m + 1):
        current = [i]
        ca = needle[i - 1]
        for j in range(1, len(haystack) + 1):
            cost = 0 if ca == haystack[j - 1] else 1
            current.append(min(previous[j] + 1,
                               current[j - 1] + 1,
                               previous[j - 1] + cost))
        previous = current
    return min(previous)


def is_persisted(event: CompletionEvent, horizon: int,
                 config: AnalyzerConfig) -> bool | None:
    """None when the event has no snapshot at this horizon."""
    region = event.persistence_snapshots.get(horizon)
    if region is None or not event.accepted:
        return None
    distance = best_alignment_distance(event.accepted_text, region)
    normalized = distance / len(event.accepted_text)
    return normalized < config.persistence_threshold


def compute_cpr(events: list[CompletionEvent], horizon: int,
                config: AnalyzerConfig) -> float | None:
    """Persisted / accepted-with-snapshot at the horizon; strict threshold."""
    if horizon not in config.horizons:
        raise ValueError(f"horizon {horizon} not in configured {config.horizons}")
    verdicts = [is_persisted(e, horizon, config) for e in events]
    verdicts = [v for v in verdicts if v is not None]
    if not verdicts:
        return None
    return sum(1 for v in verdicts if v) / len(verdicts)


def event_node_type(event: CompletionEvent, taxonomy: dict) -> str | None:
    if event.node_type is not None:
        return event.node_type
    if event.file_snapshot is None:
        return None
    try:
        tree = parse_source(event.file_snapshot, event.language)
    except ValueError:
        return None
    offset = min(max(event.cursor_offset, 0), len(tree.source))
    return node_type_at_cursor(tree, offset, taxonomy)


def relative_car_by_node(events: list[CompletionEvent], config: AnalyzerConfig,
                         taxonomy: dict | None = None) -> dict[str, dict[str, float]]:
    """Per language: (CAR_node - CAR_language) / CAR_language * 100.

    Node types with fewer qualifying events than ``min_node_events`` are
    suppressed; languages whose baseline CAR is zero are omitted.
    """
    taxonomy = taxonomy if taxonomy is not None else load_taxonomy()
    shown = qualifying(events, config)
    by_language: dict[str, list[CompletionEvent]] = {}
    for event in shown:
        by_language.setdefault(event.language, []).append(event)
    out: dict[str, dict[str, float]] = {}
    for language, lang_events in sorted(by_language.items()):
        lang_car = sum(1 for e in lang_events if e.accepted) / len(lang_events)
        if lang_car == 0.0:
            continue
        by_node: dict[str, list[CompletionEvent]] = {}
        for event in lang_events:
            node = event_node_type(event, taxonomy)
            if node is None:
                continue
            by_node.setdefault(node, []).append(event)
        table: dict[str, float] = {}
        for node, node_events in sorted(by_node.items()):
            if len(node_events) < config.min_node_events:
                continue
            node_car = sum(1 for e in node_events if e.accepted) / len(node_events)
            table[node] = round((node_car - lang_car) / lang_car * 100.0, 6)
        if table:
            out[language] = table
    return out


def pearson(xs: list[float], ys: list[float]) -> float:
    """Sample Pearson correlation; raises on degenerate input."""
    if len(xs) != len(ys):
        raise ValueError("length mismatch")
    n = len(xs)
    if n < 2:
        raise ValueError("need at least 2 points")
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    dx = [x - mean_x for x in xs]
    dy = [y - mean_y for y in ys]
    var_x = sum(d * d for d in dx)
    var_y = sum(d * d for d in dy)
    if var_x == 0.0 or var_y == 0.0:
        raise ValueError("zero variance")
    return sum(a * b for a, b in zip(dx, dy)) / math.sqrt(var_x * var_y)


def analyze_events(events: list[CompletionEvent], config: AnalyzerConfig,
                   taxonomy: dict | None = None) -> dict:
    """Full telemetry report: CAR, CPR per horizon, relative CAR by node."""
    car = compute_car(events, config)
    cpr = {}
    for horizon in config.horizons:
        value = compute_cpr(events, horizon, config)
        cpr[str(horizon)] = round(value, 6) if value is not None else None
    report = {
        "events": len(events),
        "qualifying": len(qualifying(events, config)),
        "car": round(car, 6) if car is not None else None,
        "cpr": cpr,
        "relative_car_by_node": relative_car_by_node(events, config, taxonomy),
    }
    return report


def read_events(path: str) -> list[CompletionEvent]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(CompletionEvent.from_dict(json.loads(line)))
    return out
