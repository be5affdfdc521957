"""Synthetic fixture generation: category-rich source corpora and completion
event logs with hand-computable ground truth.

Every generated file contains several instances of every curriculum node
category, with lengths clustered tightly enough that the 5th/95th quantile
filter keeps at least one instance per category per file. That construction
removes the resampling fallback from distribution-conformance runs.
"""

from __future__ import annotations

import random

from .ingest import SourceFile

_NAME_POOL = [
    "alpha", "beta", "gamma", "delta", "omega", "sigma", "kappa", "theta",
    "lambda_", "zeta", "count", "total", "value", "weight", "score", "index",
    "offset", "limit", "buffer", "cursor",
]


def _names(rng: random.Random, k: int) -> list[str]:
    picks = rng.sample(_NAME_POOL, k)
    return [f"{name.rstrip('_')}{rng.randint(0, 99)}" for name in picks]


_PY_TEMPLATE = '''import os
import sys

{U}_BASE = 10
{U}_LIMIT = {U}_BASE + {lim}


def {f1}({a}, {b}):
    {t} = {a} + {b} * {U}_BASE
    if {t} > {U}_LIMIT:
        {t} = {t} - {a}
    return {t}


def {f2}({a}, {b}, {c}=None):
    try:
        {r} = {f1}({a}, {b}) + len({c} or [])
    except TypeError:
        {r} = 0
    if {r} < 0:
        {r} = 0
    return {r}


class {cls}:
    def __init__(self, {a}, {b}):
        self.{a} = {a}
        self.{b} = {b}

    def {m1}(self, {c}):
        {r} = {f1}(self.{a}, {c})
        {r} = {r} + self.{b}
        return {r}

    def {m2}(self, {c}, {d}):
        try:
            return {f2}({c}, {d}, self.{a})
        except ValueError:
            return None
'''

_TS_TEMPLATE = '''export const {U}_BASE = 10;
export const {U}_LIMIT = {U}_BASE + {lim};

export function {f1}({a}: number, {b}: number): number {{
  let {t} = {a} + {b} * {U}_BASE;
  if ({t} > {U}_LIMIT) {{
    {t} = {t} - {a};
  }}
  return {t};
}}

export function {f2}({a}: number, {b}: number, {c}?: number[]): number {{
  try {{
    return {f1}({a}, {b}) + ({c} ? {c}.length : 0);
  }} catch (err) {{
    return 0;
  }}
}}

export class {cls} {{
  {a}: number;
  {b}: number;

  constructor({a}: number, {b}: number) {{
    this.{a} = {a};
    this.{b} = {b};
  }}

  {m1}({c}: number): number {{
    let {r} = {f1}(this.{a}, {c});
    {r} = {r} + this.{b};
    return {r};
  }}

  {m2}({c}: number, {d}: number): number {{
    try {{
      return {f2}({c}, {d}, [this.{a}]);
    }} catch (err) {{
      return 0;
    }}
  }}
}}
'''

_JS_TEMPLATE = '''const {U}_BASE = 10;
const {U}_LIMIT = {U}_BASE + {lim};

function {f1}({a}, {b}) {{
  let {t} = {a} + {b} * {U}_BASE;
  if ({t} > {U}_LIMIT) {{
    {t} = {t} - {a};
  }}
  return {t};
}}

function {f2}({a}, {b}, {c}) {{
  try {{
    return {f1}({a}, {b}) + ({c} ? {c}.length : 0);
  }} catch (err) {{
    return 0;
  }}
}}

class {cls} {{
  constructor({a}, {b}) {{
    this.{a} = {a};
    this.{b} = {b};
  }}

  {m1}({c}) {{
    let {r} = {f1}(this.{a}, {c});
    {r} = {r} + this.{b};
    return {r};
  }}

  {m2}({c}, {d}) {{
    try {{
      return {f2}({c}, {d}, [this.{a}]);
    }} catch (err) {{
      return 0;
    }}
  }}
}}

module.exports = {{ {f1}, {f2}, {cls} }};
'''

_TEMPLATES = {
    "python": (_PY_TEMPLATE, ".py"),
    "typescript": (_TS_TEMPLATE, ".ts"),
    "javascript": (_JS_TEMPLATE, ".js"),
}

LANG_CYCLE = ("python", "typescript", "javascript")


def make_source_file(language: str, index: int, rng: random.Random,
                     repo_id: str = "synthetic") -> SourceFile:
    template, ext = _TEMPLATES[language]
    a, b, c, d, t, r = _names(rng, 6)
    f1, f2, m1, m2 = (f"fn{rng.randint(100, 999)}", f"fn{rng.randint(100, 999)}",
                      f"run{rng.randint(100, 999)}", f"emit{rng.randint(100, 999)}")
    cls = f"Widget{rng.randint(100, 999)}"
    content = template.format(
        U=f"K{index % 7}", lim=rng.randint(3, 9),
        a=a, b=b, c=c, d=d, t=t, r=r,
        f1=f1, f2=f2, m1=m1, m2=m2, cls=cls,
    )
    return SourceFile(
        repo_id=repo_id,
        path=f"mod_{index:04d}{ext}",
        language=language,
        content=content,
        size_bytes=len(content.encode("utf-8")),
    )


def make_corpus(n_files: int, seed: int = 0, repo_id: str = "synthetic",
                languages: tuple[str, ...] = LANG_CYCLE) -> list[SourceFile]:
    rng = random.Random(seed)
    return [make_source_file(languages[i % len(languages)], i, rng, repo_id)
            for i in range(n_files)]


def write_corpus(files: list[SourceFile], root) -> None:
    from pathlib import Path
    rootp = Path(root)
    rootp.mkdir(parents=True, exist_ok=True)
    for file in files:
        target = rootp / file.path
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(file.content, encoding="utf-8")


# -- telemetry fixtures -------------------------------------------------------

_NODE_TYPES = ("call_expression", "if_statement", "return_statement",
               "function_parameters", "assignment")


def make_telemetry_log(n_events: int, seed: int = 0,
                       horizons: tuple[int, ...] = (30, 120, 300)) -> list[dict]:
    """Synthetic completion events with exactly computable CAR/CPR.

    Each event dict is schema-compatible with the analyzer input. Persistence
    is controlled: a kept snapshot embeds the accepted text verbatim
    (distance 0), a destroyed snapshot shares no characters with it
    (normalized distance 1.0).
    """
    rng = random.Random(seed)
    events = []
    for i in range(n_events):
        language = ("python", "typescript")[i % 2]
        node_type = _NODE_TYPES[i % len(_NODE_TYPES)]
        displayed = rng.choice([400.0, 600.0, 900.0, 1500.0, 2500.0])
        qualifies = displayed > 750.0
        accepted = qualifies and (i % 3 != 0)
        accepted_text = f"completion_{i}(arg_{i % 5})" if accepted else ""
        snapshots = {}
        if accepted:
            for h_index, horizon in enumerate(horizons):
                keep = (i + h_index) % 4 != 0
                if keep:
                    region = f"before_{i} {accepted_text} after_{i}"
                else:
                    region = "~" * max(1, len(accepted_text))
                snapshots[horizon] = region
        events.append({
            "event_id": f"evt-{i:05d}",
            "language": language,
            "cursor_offset": 0,
            "node_type": node_type,
            "displayed_ms": displayed,
            "accepted": accepted,
            "accepted_text": accepted_text,
            "persistence_snapshots": {str(k): v for k, v in snapshots.items()},
        })
    return events
