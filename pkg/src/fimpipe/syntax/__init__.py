from .analysis import (
    AST_CATEGORIES,
    CATEGORIES,
    Chunk,
    NodeSpan,
    UnsupportedLanguageError,
    chunk_syntactic,
    complexity_score,
    extract_category_nodes,
    extract_identifiers,
    identifier_kinds,
    load_taxonomy,
    node_type_at_cursor,
    parse_source,
)
from .tree import Node, SyntaxTree

__all__ = [
    "AST_CATEGORIES",
    "CATEGORIES",
    "Chunk",
    "Node",
    "NodeSpan",
    "SyntaxTree",
    "UnsupportedLanguageError",
    "chunk_syntactic",
    "complexity_score",
    "extract_category_nodes",
    "extract_identifiers",
    "identifier_kinds",
    "load_taxonomy",
    "node_type_at_cursor",
    "parse_source",
]
