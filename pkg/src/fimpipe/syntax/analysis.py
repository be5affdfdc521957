"""Language-facing syntax operations: parsing, curriculum node extraction,
complexity scoring, identifier mining, syntactic chunking, and cursor
classification.

The per-language taxonomy (grammar kind -> curriculum category) is plain
config data; defaults ship for TypeScript, JavaScript, and Python and can be
replaced by a JSON file of the same shape.
"""

from __future__ import annotations

import json
from bisect import bisect_left
from dataclasses import dataclass
from importlib import resources

from ..tokens import estimate_tokens
from .ecmascript import parse_ecmascript
from .pylang import parse_python
from .tree import Node, SyntaxTree

CATEGORIES = (
    "random_span",
    "call_expression",
    "function_definition_full",
    "class_definition",
    "function_parameters",
    "function_definition_with_prefix",
    "if_statement",
    "try_catch",
    "assignment",
)

AST_CATEGORIES = tuple(c for c in CATEGORIES if c != "random_span")

_IDENTIFIER_KINDS = {
    "python": {"identifier", "dotted_name"},
    "javascript": {
        "identifier", "property_identifier", "type_identifier",
        "shorthand_property_identifier", "private_property_identifier",
        "statement_identifier",
    },
}
_IDENTIFIER_KINDS["typescript"] = _IDENTIFIER_KINDS["javascript"]

_CHUNK_UNIT_KINDS = {
    "python": {"function_definition", "class_definition", "decorated_definition"},
    "javascript": {
        "function_declaration", "generator_function_declaration",
        "class_declaration", "interface_declaration", "enum_declaration",
        "module_declaration",
    },
}
_CHUNK_UNIT_KINDS["typescript"] = _CHUNK_UNIT_KINDS["javascript"]

# statements that merely wrap a declaration (export function ... etc.)
_WRAPPER_KINDS = {"export_statement", "decorated_definition", "ambient_declaration"}


class UnsupportedLanguageError(ValueError):
    pass


def load_taxonomy(path: str | None = None) -> dict[str, dict[str, str]]:
    if path is None:
        text = resources.files("fimpipe.data").joinpath("taxonomy.json").read_text()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    table = json.loads(text)
    for lang, mapping in table.items():
        for kind, category in mapping.items():
            if category not in CATEGORIES:
                raise ValueError(f"taxonomy[{lang}][{kind}]: unknown category {category!r}")
    return table


def parse_source(content: str | bytes, language: str) -> SyntaxTree:
    """Parse file content; always returns a tree for supported languages."""
    data = content.encode("utf-8") if isinstance(content, str) else content
    if language == "python":
        return parse_python(data)
    if language == "javascript":
        return parse_ecmascript(data, typescript=False)
    if language == "typescript":
        return parse_ecmascript(data, typescript=True)
    raise UnsupportedLanguageError(f"no grammar registered for {language!r}")


@dataclass
class NodeSpan:
    category: str
    start: int
    end: int
    line_start: int
    line_end: int
    text: str
    complexity: int


@dataclass
class Chunk:
    file: str
    start: int
    end: int
    text: str
    kind: str


def identifier_kinds(language: str) -> set[str]:
    return _IDENTIFIER_KINDS.get(language, {"identifier"})


def identifier_leaves(tree: SyntaxTree) -> list[tuple[int, int, str]]:
    """All identifier-leaf occurrences in document order as (start, end, text)."""
    kinds = identifier_kinds(tree.language)
    hits = []
    for node in tree.walk():
        if node.kind in kinds and not node.children:
            hits.append((node.start, node.end, tree.text(node)))
    hits.sort()
    return hits


def _leaves_in_span(leaves: list[tuple[int, int, str]], start: int, end: int):
    lo = bisect_left(leaves, (start,))
    for i in range(lo, len(leaves)):
        s, e, text = leaves[i]
        if s >= end:
            break
        if e <= end:
            yield s, e, text


def extract_identifiers(tree: SyntaxTree, start: int, end: int) -> list[tuple[str, int, int]]:
    """Ordered, deduplicated-by-text identifier occurrences inside a span."""
    seen: set[str] = set()
    out: list[tuple[str, int, int]] = []
    for s, e, text in _leaves_in_span(identifier_leaves(tree), start, end):
        if text not in seen:
            seen.add(text)
            out.append((text, s, e))
    return out


def complexity_score(tree: SyntaxTree, start: int, end: int) -> int:
    """Number of distinct identifier texts inside the span."""
    return len({text for _, _, text in
                _leaves_in_span(identifier_leaves(tree), start, end)})


def _kinds_for_category(language: str, category: str,
                        taxonomy: dict[str, dict[str, str]]) -> set[str]:
    mapping = taxonomy.get(language, {})
    lookup = "function_definition_full" if category == "function_definition_with_prefix" \
        else category
    return {kind for kind, cat in mapping.items() if cat == lookup}


def _declarator_has_value(node: Node) -> bool:
    return any(c.role == "value" for c in node.children)


def extract_category_nodes(tree: SyntaxTree, category: str,
                           taxonomy: dict[str, dict[str, str]],
                           leaves: list[tuple[int, int, str]] | None = None) -> list[NodeSpan]:
    """All nodes of a curriculum category, in document order.

    For ``function_definition_with_prefix`` the span covers only the function
    body, so the signature stays in the prefix when the span becomes a middle.
    Pass precomputed ``identifier_leaves`` when extracting several categories
    from one tree.
    """
    if category == "random_span":
        raise ValueError("random_span is synthesized, not extracted")
    if category not in CATEGORIES:
        raise ValueError(f"unknown category {category!r}")
    kinds = _kinds_for_category(tree.language, category, taxonomy)
    if not kinds:
        return []
    if leaves is None:
        leaves = identifier_leaves(tree)
    spans: list[tuple[int, int]] = []
    stack = [tree.root]
    order: list[Node] = []
    while stack:
        node = stack.pop()
        order.append(node)
        stack.extend(reversed(node.children))
    for node in order:
        if node.kind not in kinds:
            continue
        if node.kind == "variable_declarator" and not _declarator_has_value(node):
            continue
        if category == "function_definition_with_prefix":
            body = node.child_by_role("body")
            if body is None or body.end <= body.start:
                continue
            spans.append((body.start, node.end))
        else:
            if node.end <= node.start:
                continue
            spans.append((node.start, node.end))
    out = []
    for start, end in spans:
        distinct = {text for _, _, text in _leaves_in_span(leaves, start, end)}
        out.append(NodeSpan(
            category=category,
            start=start,
            end=end,
            line_start=tree.line_of(start),
            line_end=tree.line_of(max(start, end - 1)),
            text=tree.slice(start, end),
            complexity=len(distinct),
        ))
    return out


def node_type_at_cursor(tree: SyntaxTree, offset: int,
                        taxonomy: dict[str, dict[str, str]]) -> str:
    """Curriculum category of the innermost mapped node containing the offset,
    or the raw kind of the innermost named node when nothing maps.

    Boundary ties resolve toward the node starting at the offset (half-open
    range containment).
    """
    if offset < 0 or offset > len(tree.source):
        raise ValueError(f"offset {offset} out of range")
    mapping = taxonomy.get(tree.language, {})
    path = [tree.root]
    node = tree.root
    while True:
        nxt = None
        for child in node.children:
            if child.start <= offset < child.end:
                nxt = child
                break
        if nxt is None:
            break
        path.append(nxt)
        node = nxt
    for candidate in reversed(path):
        category = mapping.get(candidate.kind)
        if category is None:
            continue
        if candidate.kind == "variable_declarator" and not _declarator_has_value(candidate):
            continue
        return category
    for candidate in reversed(path):
        if candidate.named:
            return candidate.kind
    return tree.root.kind


def chunk_syntactic(tree: SyntaxTree, max_tokens: int, path: str = "",
                    estimator=estimate_tokens) -> list[Chunk]:
    """Split a file into retrieval chunks.

    Top-level functions/classes become chunks; residual top-level code is
    grouped into contiguous chunks; anything over the token budget is split
    along its named children (with line/width fallbacks), so every emitted
    chunk fits the budget and concatenated chunk ranges cover all
    non-whitespace source.
    """
    if max_tokens <= 0:
        raise ValueError("max_tokens must be positive")
    if not tree.root.children:
        return []
    units: list[tuple[int, int, str, Node]] = []
    run_start: int | None = None
    run_end = 0

    def flush_run():
        nonlocal run_start
        if run_start is not None:
            units.append((run_start, run_end, "code", None))
            run_start = None

    for child in tree.root.children:
        inner = child
        if child.kind in _WRAPPER_KINDS:
            for sub in child.named_children:
                if sub.kind in _CHUNK_UNIT_KINDS.get(tree.language, set()):
                    inner = sub
                    break
        if inner.kind in _CHUNK_UNIT_KINDS.get(tree.language, set()):
            flush_run()
            units.append((child.start, child.end, inner.kind, child))
        else:
            if run_start is None:
                run_start = child.start
            run_end = child.end
    flush_run()

    pieces: list[tuple[int, int, str]] = []
    for start, end, kind, node in units:
        pieces.extend(_fit(tree, start, end, kind, node, max_tokens, estimator))
    out = []
    for start, end, kind in pieces:
        if end <= start:
            continue
        out.append(Chunk(file=path, start=start, end=end,
                         text=tree.slice(start, end), kind=kind))
    return out


def _fit(tree: SyntaxTree, start: int, end: int, kind: str, node: Node | None,
         max_tokens: int, estimator) -> list[tuple[int, int, str]]:
    if estimator(tree.slice(start, end)) <= max_tokens:
        return [(start, end, kind)]
    children = node.named_children if node is not None else []
    children = [c for c in children if start <= c.start and c.end <= end and c.end > c.start]
    if children:
        pieces = []
        prev = start
        for idx, child in enumerate(children):
            piece_end = end if idx == len(children) - 1 else child.end
            pieces.extend(_fit(tree, prev, piece_end, child.kind, child,
                               max_tokens, estimator))
            prev = piece_end
        return pieces
    return _split_flat(tree, start, end, kind, max_tokens, estimator)


def _split_flat(tree: SyntaxTree, start: int, end: int, kind: str,
                max_tokens: int, estimator) -> list[tuple[int, int, str]]:
    """Pack whole lines into budget-sized pieces; width-split giant lines."""
    pieces = []
    src = tree.source
    pos = start
    piece_start = start
    while pos < end:
        nl = src.find(b"\n", pos, end)
        line_end = end if nl == -1 else nl + 1
        if estimator(tree.slice(piece_start, line_end)) > max_tokens:
            if piece_start < pos:
                pieces.append((piece_start, pos, kind))
                piece_start = pos
            if estimator(tree.slice(piece_start, line_end)) > max_tokens:
                # single line over budget: split at character boundaries
                text = tree.slice(piece_start, line_end)
                width = max(1, max_tokens * 4)
                cursor = piece_start
                for i in range(0, len(text), width):
                    frag = text[i : i + width]
                    frag_end = cursor + len(frag.encode("utf-8"))
                    pieces.append((cursor, frag_end, kind))
                    cursor = frag_end
                piece_start = line_end
        pos = line_end
    if piece_start < end:
        pieces.append((piece_start, end, kind))
    return pieces
