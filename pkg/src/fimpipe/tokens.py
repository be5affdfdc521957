"""Token estimation and identifier subtoken splitting.

The default token estimate is ceil(chars / 4): tokenizer-agnostic, cheap,
and overridable by passing any callable with the same signature wherever an
estimator is accepted.
"""

from __future__ import annotations

import re

_CAMEL_RE = re.compile(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])|(?<=[A-Za-z])(?=[0-9])|(?<=[0-9])(?=[A-Za-z])")
_NON_ALNUM_RE = re.compile(r"[^A-Za-z0-9]+")


def estimate_tokens(text: str) -> int:
    return (len(text) + 3) // 4


def split_subtokens(text: str) -> list[str]:
    """Split an identifier or code fragment into lowercase subtokens.

    Splits on non-alphanumerics, then camelCase humps and letter/digit
    boundaries: ``getHTTPResponse2xx`` -> [get, http, response, 2, xx].
    """
    out: list[str] = []
    for word in _NON_ALNUM_RE.split(text):
        if not word:
            continue
        for part in _CAMEL_RE.split(word):
            if part:
                out.append(part.lower())
    return out


_COMMENT_LEADERS = {
    "python": "#",
    "javascript": "//",
    "typescript": "//",
}


def comment_leader(language: str) -> str:
    return _COMMENT_LEADERS.get(language, "//")
