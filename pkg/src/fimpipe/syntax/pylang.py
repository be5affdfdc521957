"""Error-tolerant parser for Python sources.

Hand-rolled indentation-aware lexer plus a recursive-descent statement and
expression parser. Node kinds follow the usual grammar names (``call``,
``function_definition``, ``parameters``, ``assignment``, ...). Malformed
regions degrade into ``error`` nodes; parsing always terminates and always
covers the file.

f-string interpolations are sub-parsed so identifiers inside them are part
of the tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .tree import Node, SyntaxTree, attach_comments

_NAME_RE = re.compile(rb"[A-Za-z_\x80-\xff][A-Za-z0-9_\x80-\xff]*")
_NUMBER_RE = re.compile(
    rb"0[xX][0-9a-fA-F_]+|0[bB][01_]+|0[oO][0-7_]+"
    rb"|(?:[0-9][0-9_]*(?:\.[0-9_]*)?|\.[0-9][0-9_]*)(?:[eE][+-]?[0-9]+)?[jJ]?"
)
_STRING_PREFIX_RE = re.compile(rb"(?i)(?:rb|br|rf|fr|[rbuf])?(?=['\"])")

_KEYWORDS = {
    b"def", b"class", b"if", b"elif", b"else", b"for", b"while", b"try",
    b"except", b"finally", b"with", b"return", b"raise", b"pass", b"break",
    b"continue", b"import", b"from", b"as", b"global", b"nonlocal", b"assert",
    b"del", b"lambda", b"yield", b"await", b"async", b"and", b"or", b"not",
    b"in", b"is", b"None", b"True", b"False",
}

_OPS = [
    b"**=", b"//=", b">>=", b"<<=", b"...", b"!=", b"==", b"<=", b">=",
    b"->", b":=", b"+=", b"-=", b"*=", b"/=", b"%=", b"@=", b"&=", b"|=",
    b"^=", b"**", b"//", b"<<", b">>", b"(", b")", b"[", b"]", b"{", b"}",
    b",", b":", b".", b";", b"@", b"=", b"+", b"-", b"*", b"/", b"%", b"&",
    b"|", b"^", b"~", b"<", b">",
]

_AUG_OPS = {b"+=", b"-=", b"*=", b"/=", b"//=", b"%=", b"@=", b"**=",
            b"<<=", b">>=", b"&=", b"|=", b"^="}

_COMPARE_OPS = {b"<", b">", b"<=", b">=", b"==", b"!="}

_BINARY_PREC = {
    b"|": 1, b"^": 2, b"&": 3, b"<<": 4, b">>": 4,
    b"+": 5, b"-": 5,
    b"*": 6, b"/": 6, b"//": 6, b"%": 6, b"@": 6,
    b"**": 8,
}


@dataclass
class Token:
    kind: str  # name | keyword | number | string | op | newline | indent | dedent | eof
    text: bytes
    start: int
    end: int
    line: int
    fstring: bool = False


class Lexer:
    def __init__(self, src: bytes):
        self.src = src
        self.n = len(src)
        self.pos = 0
        self.line = 1
        self.depth = 0  # bracket depth: newlines inside brackets are joined
        self.indents = [0]
        self.tokens: list[Token] = []
        self.comments: list[Node] = []
        self.at_line_start = True

    def run(self) -> list[Token]:
        while self.pos < self.n:
            if self.at_line_start and self.depth == 0:
                if self._handle_indent():
                    continue
            c = self.src[self.pos : self.pos + 1]
            if c in (b" ", b"\t", b"\r", b"\x0c"):
                self.pos += 1
            elif c == b"\\" and self.src[self.pos + 1 : self.pos + 2] == b"\n":
                self.pos += 2
                self.line += 1
            elif c == b"\n":
                if self.depth == 0 and self.tokens and \
                        self.tokens[-1].kind not in ("newline", "indent", "dedent"):
                    self.tokens.append(Token("newline", b"\n", self.pos,
                                             self.pos + 1, self.line))
                self.pos += 1
                self.line += 1
                self.at_line_start = True
            elif c == b"#":
                end = self.src.find(b"\n", self.pos)
                end = self.n if end == -1 else end
                self.comments.append(Node("comment", self.pos, end))
                self.pos = end
            else:
                self._token()
        if self.tokens and self.tokens[-1].kind not in ("newline", "indent", "dedent"):
            self.tokens.append(Token("newline", b"", self.n, self.n, self.line))
        while len(self.indents) > 1:
            self.indents.pop()
            self.tokens.append(Token("dedent", b"", self.n, self.n, self.line))
        self.tokens.append(Token("eof", b"", self.n, self.n, self.line))
        return self.tokens

    def _handle_indent(self) -> bool:
        """Measure indentation; skip blank/comment lines. True if line consumed."""
        i = self.pos
        col = 0
        while i < self.n:
            c = self.src[i : i + 1]
            if c == b" ":
                col += 1
            elif c == b"\t":
                col += 8 - (col % 8)
            else:
                break
            i += 1
        if i >= self.n:
            self.pos = i
            return True
        c = self.src[i : i + 1]
        if c == b"\n":
            self.pos = i + 1
            self.line += 1
            return True
        if c == b"#":
            end = self.src.find(b"\n", i)
            end = self.n if end == -1 else end
            self.comments.append(Node("comment", i, end))
            self.pos = end
            return True
        self.at_line_start = False
        self.pos = i
        if col > self.indents[-1]:
            self.indents.append(col)
            self.tokens.append(Token("indent", b"", i, i, self.line))
        else:
            while col < self.indents[-1]:
                self.indents.pop()
                self.tokens.append(Token("dedent", b"", i, i, self.line))
            # inconsistent dedent: tolerate by snapping to the nearest level
            if col != self.indents[-1]:
                self.indents.append(col)
        return False

    def _token(self) -> None:
        m = _STRING_PREFIX_RE.match(self.src, self.pos)
        if m is not None and self.src[m.end() : m.end() + 1] in (b"'", b'"'):
            self._string(m.start(), m.end())
            return
        m = _NAME_RE.match(self.src, self.pos)
        if m:
            text = m.group()
            kind = "keyword" if text in _KEYWORDS else "name"
            self._emit(kind, m.start(), m.end())
            return
        m = _NUMBER_RE.match(self.src, self.pos)
        if m:
            self._emit("number", m.start(), m.end())
            return
        for op in _OPS:
            if self.src.startswith(op, self.pos):
                if op in (b"(", b"[", b"{"):
                    self.depth += 1
                elif op in (b")", b"]", b"}"):
                    self.depth = max(0, self.depth - 1)
                self._emit("op", self.pos, self.pos + len(op))
                return
        self._emit("op", self.pos, self.pos + 1)  # unknown byte

    def _emit(self, kind: str, start: int, end: int, fstring: bool = False) -> None:
        self.tokens.append(Token(kind, self.src[start:end], start, end, self.line, fstring))
        self.line += self.src.count(b"\n", start, end)
        self.pos = end

    def _string(self, start: int, quote_pos: int) -> None:
        prefix = self.src[start:quote_pos].lower()
        is_f = b"f" in prefix
        q = self.src[quote_pos : quote_pos + 1]
        triple = self.src[quote_pos : quote_pos + 3] in (b"'''", b'"""')
        if triple:
            term = self.src[quote_pos : quote_pos + 3]
            i = quote_pos + 3
            end = self.src.find(term, i)
            end = self.n if end == -1 else end + 3
        else:
            i = quote_pos + 1
            while i < self.n:
                c = self.src[i : i + 1]
                if c == b"\\":
                    i += 2
                elif c == q:
                    i += 1
                    break
                elif c == b"\n":
                    break  # unterminated
                else:
                    i += 1
            end = min(i, self.n)
        self._emit("string", start, end, fstring=is_f)


class Parser:
    def __init__(self, src: bytes):
        self.src = src
        lexer = Lexer(src)
        self.toks = lexer.run()
        self.comments = lexer.comments
        self.i = 0

    # -- token helpers ---------------------------------------------------

    def peek(self, k: int = 0) -> Token:
        j = min(self.i + k, len(self.toks) - 1)
        return self.toks[j]

    def at(self, text: bytes) -> bool:
        return self.peek().text == text and self.peek().kind in ("op", "keyword")

    def at_kind(self, kind: str) -> bool:
        return self.peek().kind == kind

    def at_eof(self) -> bool:
        return self.peek().kind == "eof"

    def advance(self) -> Token:
        tok = self.toks[self.i]
        if self.i < len(self.toks) - 1:
            self.i += 1
        return tok

    def eat(self, text: bytes) -> Token | None:
        if self.at(text):
            return self.advance()
        return None

    def eat_kind(self, kind: str) -> Token | None:
        if self.peek().kind == kind:
            return self.advance()
        return None

    def leaf(self, kind: str, tok: Token, role: str | None = None) -> Node:
        return Node(kind, tok.start, tok.end, role=role)

    def node(self, kind: str, children: list[Node], start: int, end: int,
             role: str | None = None) -> Node:
        return Node(kind, start, end, children=children, role=role)

    def skip_newlines(self) -> None:
        while self.peek().kind == "newline":
            self.advance()

    def error_statement(self) -> Node:
        start = self.peek().start
        end = start
        consumed = False
        while not self.at_eof():
            tok = self.peek()
            if tok.kind in ("newline", "dedent"):
                if tok.kind == "newline":
                    self.advance()
                break
            end = self.advance().end
            consumed = True
        if not consumed:
            end = self.advance().end
        return Node("error", start, max(end, start))

    # -- entry -------------------------------------------------------------

    def parse(self) -> SyntaxTree:
        children = []
        while not self.at_eof():
            before = self.i
            self.skip_newlines()
            if self.at_eof():
                break
            if self.peek().kind in ("indent", "dedent"):
                self.advance()  # stray indentation at module level: tolerate
                continue
            stmt = self.parse_statement()
            if stmt is not None:
                children.append(stmt)
            if self.i == before:
                children.append(self.error_statement())
        root = Node("module", 0, len(self.src), children=children)
        attach_comments(root, self.comments)
        return SyntaxTree(root, self.src, "python")

    # -- statements ----------------------------------------------------------

    def parse_statement(self) -> Node | None:
        tok = self.peek()
        text = tok.text
        if tok.kind == "keyword":
            if text == b"def":
                return self.parse_function()
            if text == b"async":
                nxt = self.peek(1)
                if nxt.text == b"def":
                    return self.parse_function()
                if nxt.text in (b"for", b"with"):
                    start = self.advance()
                    inner = self.parse_statement()
                    if inner is not None:
                        inner.start = start.start
                    return inner
            if text == b"class":
                return self.parse_class()
            if text == b"if":
                return self.parse_if()
            if text == b"for":
                return self.parse_for()
            if text == b"while":
                return self.parse_while()
            if text == b"try":
                return self.parse_try()
            if text == b"with":
                return self.parse_with()
            if text == b"return":
                return self.parse_return()
            if text == b"raise":
                return self.parse_raise()
            if text in (b"pass", b"break", b"continue"):
                kw = self.advance()
                self._end_simple()
                return self.node(f"{text.decode()}_statement", [], kw.start, kw.end)
            if text in (b"import", b"from"):
                return self.parse_import()
            if text in (b"global", b"nonlocal"):
                kw = self.advance()
                kids = []
                while self.peek().kind == "name":
                    kids.append(self.leaf("identifier", self.advance()))
                    if not self.eat(b","):
                        break
                self._end_simple()
                return self.node(f"{text.decode()}_statement", kids, kw.start,
                                 kids[-1].end if kids else kw.end)
            if text == b"assert":
                kw = self.advance()
                kids = []
                expr = self.parse_expression()
                if expr:
                    kids.append(expr)
                if self.eat(b","):
                    msg = self.parse_expression()
                    if msg:
                        kids.append(msg)
                self._end_simple()
                return self.node("assert_statement", kids, kw.start,
                                 kids[-1].end if kids else kw.end)
            if text == b"del":
                kw = self.advance()
                expr = self.parse_expression_list()
                self._end_simple()
                return self.node("delete_statement", [expr] if expr else [],
                                 kw.start, expr.end if expr else kw.end)
        if tok.kind == "op" and text == b"@":
            return self.parse_decorated()
        return self.parse_expression_statement()

    def _end_simple(self) -> None:
        self.eat(b";")
        self.eat_kind("newline")

    def parse_expression_statement(self) -> Node | None:
        start_tok = self.peek()
        left = self.parse_expression_list()
        if left is None:
            return None
        # annotated assignment: target : type [= value]
        if self.at(b":"):
            self.advance()
            kids = [left]
            ann = self.parse_expression()
            if ann:
                ann.role = "type"
                kids.append(ann)
            if self.eat(b"="):
                value = self.parse_expression_list()
                if value:
                    value.role = "right"
                    kids.append(value)
                left.role = "left"
                self._end_simple()
                return self.node("assignment", kids, start_tok.start, kids[-1].end)
            self._end_simple()
            return self.node("expression_statement", kids, start_tok.start, kids[-1].end)
        if self.at(b"="):
            self.advance()
            left.role = "left"
            value = self.parse_assignment_rhs()
            kids = [left] + ([value] if value else [])
            self._end_simple()
            return self.node("assignment", kids, start_tok.start, kids[-1].end)
        if self.peek().kind == "op" and self.peek().text in _AUG_OPS:
            self.advance()
            left.role = "left"
            value = self.parse_expression_list()
            kids = [left] + ([value] if value else [])
            self._end_simple()
            return self.node("augmented_assignment", kids, start_tok.start, kids[-1].end)
        self._end_simple()
        return self.node("expression_statement", [left], start_tok.start, left.end)

    def parse_assignment_rhs(self) -> Node | None:
        """Right side of '='; handles chained targets a = b = c."""
        start_tok = self.peek()
        value = self.parse_expression_list()
        if value is None:
            return None
        if self.at(b"="):
            self.advance()
            value.role = "left"
            inner = self.parse_assignment_rhs()
            kids = [value] + ([inner] if inner else [])
            return self.node("assignment", kids, start_tok.start, kids[-1].end)
        value.role = "right"
        return value

    def parse_expression_list(self) -> Node | None:
        first = self.parse_expression()
        if first is None:
            return None
        if not self.at(b","):
            return first
        kids = [first]
        while self.eat(b","):
            nxt = self.parse_expression()
            if nxt is None:
                break
            kids.append(nxt)
        return self.node("expression_list", kids, first.start, kids[-1].end)

    def parse_block(self) -> Node | None:
        """Parse ':' suite — either same-line statements or an indented block."""
        colon = self.eat(b":")
        if colon is None:
            return None
        if self.peek().kind not in ("newline",):
            # simple suite on the same line
            stmts = []
            while not self.at_eof() and self.peek().kind != "newline":
                before = self.i
                stmt = self.parse_statement()
                if stmt is not None:
                    stmts.append(stmt)
                if self.i == before:
                    break
            self.eat_kind("newline")
            if not stmts:
                return None
            return self.node("block", stmts, stmts[0].start, stmts[-1].end, role="body")
        self.advance()  # newline
        if self.peek().kind != "indent":
            return None
        self.advance()
        stmts = []
        while not self.at_eof() and self.peek().kind != "dedent":
            before = self.i
            self.skip_newlines()
            if self.peek().kind == "dedent" or self.at_eof():
                break
            stmt = self.parse_statement()
            if stmt is not None:
                stmts.append(stmt)
            if self.i == before:
                stmts.append(self.error_statement())
        self.eat_kind("dedent")
        if not stmts:
            return None
        return self.node("block", stmts, stmts[0].start, stmts[-1].end, role="body")

    def parse_function(self) -> Node:
        start_tok = self.peek()
        self.eat(b"async")
        self.advance()  # def
        kids = []
        if self.peek().kind == "name":
            kids.append(self.leaf("identifier", self.advance(), role="name"))
        params = self.parse_parameters()
        if params:
            params.role = "parameters"
            kids.append(params)
        if self.eat(b"->"):
            rt = self.parse_expression()
            if rt:
                rt.role = "return_type"
                kids.append(rt)
        body = self.parse_block()
        if body:
            kids.append(body)
        end = kids[-1].end if kids else start_tok.end
        return self.node("function_definition", kids, start_tok.start, end)

    def parse_parameters(self) -> Node | None:
        lp = self.eat(b"(")
        if lp is None:
            return None
        params = []
        while not self.at_eof() and not self.at(b")"):
            before = self.i
            tok = self.peek()
            if tok.text in (b"*", b"**", b"/"):
                star = self.advance()
                if self.peek().kind == "name":
                    name = self.leaf("identifier", self.advance())
                    pkids = [name]
                    if self.eat(b":"):
                        t = self.parse_expression()
                        if t:
                            pkids.append(t)
                    kind = ("list_splat_pattern" if star.text == b"*"
                            else "dictionary_splat_pattern")
                    params.append(self.node(kind, pkids, star.start, pkids[-1].end))
            elif tok.kind == "name":
                name = self.leaf("identifier", self.advance())
                pkids = [name]
                kind = "identifier"
                if self.eat(b":"):
                    t = self.parse_expression()
                    if t:
                        t.role = "type"
                        pkids.append(t)
                    kind = "typed_parameter"
                if self.eat(b"="):
                    v = self.parse_expression()
                    if v:
                        v.role = "value"
                        pkids.append(v)
                    kind = ("typed_default_parameter" if kind == "typed_parameter"
                            else "default_parameter")
                if kind == "identifier":
                    params.append(name)
                else:
                    params.append(self.node(kind, pkids, name.start, pkids[-1].end))
            elif tok.text in (b"(", b"["):
                pat = self.parse_atom()
                if pat:
                    params.append(pat)
            if not self.eat(b","):
                if self.at(b")"):
                    break
                if self.i == before:
                    params.append(self.error_to_paren())
                    break
        rp = self.eat(b")")
        end = rp.end if rp else (params[-1].end if params else lp.end)
        return self.node("parameters", params, lp.start, end)

    def error_to_paren(self) -> Node:
        start = self.peek().start
        end = start
        depth = 0
        while not self.at_eof():
            tok = self.peek()
            if tok.text in (b"(", b"[", b"{"):
                depth += 1
            elif tok.text in (b")", b"]", b"}"):
                if depth == 0:
                    break
                depth -= 1
            elif tok.kind in ("newline", "dedent") and depth == 0:
                break
            end = self.advance().end
        return Node("error", start, max(end, start))

    def parse_class(self) -> Node:
        kw = self.advance()
        kids = []
        if self.peek().kind == "name":
            kids.append(self.leaf("identifier", self.advance(), role="name"))
        if self.at(b"("):
            args = self.parse_argument_list()
            args.role = "superclasses"
            kids.append(args)
        body = self.parse_block()
        if body:
            kids.append(body)
        return self.node("class_definition", kids, kw.start,
                         kids[-1].end if kids else kw.end)

    def parse_decorated(self) -> Node:
        decorators = []
        while self.at(b"@"):
            at = self.advance()
            expr = self.parse_postfix(self.parse_atom())
            decorators.append(self.node("decorator", [expr] if expr else [],
                                        at.start, expr.end if expr else at.end))
            self.eat_kind("newline")
        inner = self.parse_statement()
        kids = decorators + ([inner] if inner else [])
        return self.node("decorated_definition", kids, decorators[0].start,
                         kids[-1].end)

    def parse_if(self) -> Node:
        kw = self.advance()
        kids = []
        cond = self.parse_expression()
        if cond:
            cond.role = "condition"
            kids.append(cond)
        body = self.parse_block()
        if body:
            kids.append(body)
        while self.at(b"elif"):
            ekw = self.advance()
            ekids = []
            econd = self.parse_expression()
            if econd:
                ekids.append(econd)
            ebody = self.parse_block()
            if ebody:
                ekids.append(ebody)
            kids.append(self.node("elif_clause", ekids, ekw.start,
                                  ekids[-1].end if ekids else ekw.end))
        if self.at(b"else"):
            ekw = self.advance()
            ebody = self.parse_block()
            kids.append(self.node("else_clause", [ebody] if ebody else [],
                                  ekw.start, ebody.end if ebody else ekw.end))
        return self.node("if_statement", kids, kw.start,
                         kids[-1].end if kids else kw.end)

    def parse_for(self) -> Node:
        kw = self.advance()
        kids = []
        target = self.parse_expression_list()
        if target:
            target.role = "left"
            kids.append(target)
        if self.eat(b"in"):
            it = self.parse_expression_list()
            if it:
                it.role = "right"
                kids.append(it)
        body = self.parse_block()
        if body:
            kids.append(body)
        if self.at(b"else"):
            ekw = self.advance()
            ebody = self.parse_block()
            kids.append(self.node("else_clause", [ebody] if ebody else [],
                                  ekw.start, ebody.end if ebody else ekw.end))
        return self.node("for_statement", kids, kw.start,
                         kids[-1].end if kids else kw.end)

    def parse_while(self) -> Node:
        kw = self.advance()
        kids = []
        cond = self.parse_expression()
        if cond:
            cond.role = "condition"
            kids.append(cond)
        body = self.parse_block()
        if body:
            kids.append(body)
        if self.at(b"else"):
            ekw = self.advance()
            ebody = self.parse_block()
            kids.append(self.node("else_clause", [ebody] if ebody else [],
                                  ekw.start, ebody.end if ebody else ekw.end))
        return self.node("while_statement", kids, kw.start,
                         kids[-1].end if kids else kw.end)

    def parse_try(self) -> Node:
        kw = self.advance()
        kids = []
        body = self.parse_block()
        if body:
            kids.append(body)
        while self.at(b"except"):
            ekw = self.advance()
            ekids = []
            self.eat(b"*")
            if not self.at(b":"):
                exc = self.parse_expression()
                if exc:
                    ekids.append(exc)
                if self.eat(b"as") and self.peek().kind == "name":
                    ekids.append(self.leaf("identifier", self.advance()))
            ebody = self.parse_block()
            if ebody:
                ekids.append(ebody)
            kids.append(self.node("except_clause", ekids, ekw.start,
                                  ekids[-1].end if ekids else ekw.end))
        if self.at(b"else"):
            ekw = self.advance()
            ebody = self.parse_block()
            kids.append(self.node("else_clause", [ebody] if ebody else [],
                                  ekw.start, ebody.end if ebody else ekw.end))
        if self.at(b"finally"):
            fkw = self.advance()
            fbody = self.parse_block()
            kids.append(self.node("finally_clause", [fbody] if fbody else [],
                                  fkw.start, fbody.end if fbody else fkw.end))
        return self.node("try_statement", kids, kw.start,
                         kids[-1].end if kids else kw.end)

    def parse_with(self) -> Node:
        kw = self.advance()
        kids = []
        parenthesized = bool(self.eat(b"("))
        while True:
            item = self.parse_expression()
            if item is None:
                break
            ikids = [item]
            if self.eat(b"as"):
                alias = self.parse_postfix(self.parse_atom())
                if alias:
                    ikids.append(alias)
            kids.append(self.node("with_item", ikids, item.start, ikids[-1].end))
            if not self.eat(b","):
                break
        if parenthesized:
            self.eat(b")")
        body = self.parse_block()
        if body:
            kids.append(body)
        return self.node("with_statement", kids, kw.start,
                         kids[-1].end if kids else kw.end)

    def parse_return(self) -> Node:
        kw = self.advance()
        kids = []
        if self.peek().kind not in ("newline", "dedent", "eof") and not self.at(b";"):
            expr = self.parse_expression_list()
            if expr:
                kids.append(expr)
        self._end_simple()
        return self.node("return_statement", kids, kw.start,
                         kids[-1].end if kids else kw.end)

    def parse_raise(self) -> Node:
        kw = self.advance()
        kids = []
        if self.peek().kind not in ("newline", "dedent", "eof") and not self.at(b";"):
            expr = self.parse_expression()
            if expr:
                kids.append(expr)
            if self.eat(b"from"):
                cause = self.parse_expression()
                if cause:
                    kids.append(cause)
        self._end_simple()
        return self.node("raise_statement", kids, kw.start,
                         kids[-1].end if kids else kw.end)

    def parse_import(self) -> Node:
        kw = self.advance()
        kind = "import_statement" if kw.text == b"import" else "import_from_statement"
        kids: list[Node] = []
        while not self.at_eof() and self.peek().kind not in ("newline", "dedent"):
            tok = self.peek()
            if tok.kind in ("name",):
                kids.append(self.leaf("dotted_name", self.advance()))
            else:
                self.advance()
        self.eat_kind("newline")
        return self.node(kind, kids, kw.start, kids[-1].end if kids else kw.end)

    # -- expressions -----------------------------------------------------------

    def parse_expression(self) -> Node | None:
        if self.at(b"lambda"):
            return self.parse_lambda()
        if self.at(b"yield"):
            kw = self.advance()
            kids = []
            if self.eat(b"from"):
                pass
            if self.peek().kind not in ("newline", "dedent", "eof") and \
                    self.peek().text not in (b")", b"]", b"}", b",", b";"):
                inner = self.parse_expression_list()
                if inner:
                    kids.append(inner)
            return self.node("yield", kids, kw.start, kids[-1].end if kids else kw.end)
        if self.at(b"*") or self.at(b"**"):
            star = self.advance()
            inner = self.parse_expression()
            return self.node("list_splat", [inner] if inner else [],
                             star.start, inner.end if inner else star.end)
        expr = self.parse_ternary()
        return expr

    def parse_lambda(self) -> Node:
        kw = self.advance()
        kids = []
        params = []
        pstart = None
        while self.peek().kind == "name" or self.peek().text in (b"*", b"**"):
            if self.peek().text in (b"*", b"**"):
                self.advance()
                continue
            tok = self.advance()
            if pstart is None:
                pstart = tok.start
            p = self.leaf("identifier", tok)
            if self.eat(b"="):
                v = self.parse_ternary()
                p = self.node("default_parameter", [p] + ([v] if v else []),
                              p.start, v.end if v else p.end)
            params.append(p)
            if not self.eat(b","):
                break
        if params:
            kids.append(self.node("lambda_parameters", params, params[0].start,
                                  params[-1].end, role="parameters"))
        if self.eat(b":"):
            body = self.parse_expression()
            if body:
                body.role = "body"
                kids.append(body)
        return self.node("lambda", kids, kw.start, kids[-1].end if kids else kw.end)

    def parse_ternary(self) -> Node | None:
        expr = self.parse_or()
        if expr is None:
            return None
        if self.at(b"if"):
            self.advance()
            cond = self.parse_or()
            kids = [expr] + ([cond] if cond else [])
            if self.eat(b"else"):
                alt = self.parse_expression()
                if alt:
                    kids.append(alt)
            return self.node("conditional_expression", kids, expr.start, kids[-1].end)
        return expr

    def parse_or(self) -> Node | None:
        left = self.parse_and()
        if left is None:
            return None
        while self.at(b"or"):
            self.advance()
            right = self.parse_and()
            kids = [left] + ([right] if right else [])
            left = self.node("boolean_operator", kids, left.start, kids[-1].end)
        return left

    def parse_and(self) -> Node | None:
        left = self.parse_not()
        if left is None:
            return None
        while self.at(b"and"):
            self.advance()
            right = self.parse_not()
            kids = [left] + ([right] if right else [])
            left = self.node("boolean_operator", kids, left.start, kids[-1].end)
        return left

    def parse_not(self) -> Node | None:
        if self.at(b"not"):
            kw = self.advance()
            inner = self.parse_not()
            return self.node("not_operator", [inner] if inner else [],
                             kw.start, inner.end if inner else kw.end)
        return self.parse_comparison()

    def parse_comparison(self) -> Node | None:
        left = self.parse_binary(1)
        if left is None:
            return None
        kids = [left]
        saw = False
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in _COMPARE_OPS:
                self.advance()
            elif tok.text == b"in":
                self.advance()
            elif tok.text == b"not" and self.peek(1).text == b"in":
                self.advance()
                self.advance()
            elif tok.text == b"is":
                self.advance()
                self.eat(b"not")
            else:
                break
            saw = True
            right = self.parse_binary(1)
            if right:
                kids.append(right)
        if not saw:
            return left
        return self.node("comparison_operator", kids, left.start, kids[-1].end)

    def parse_binary(self, min_prec: int) -> Node | None:
        left = self.parse_unary()
        if left is None:
            return None
        while True:
            tok = self.peek()
            if tok.kind != "op":
                return left
            prec = _BINARY_PREC.get(tok.text)
            if prec is None or prec < min_prec:
                return left
            self.advance()
            next_min = prec if tok.text == b"**" else prec + 1
            right = self.parse_binary(next_min)
            kids = [left] + ([right] if right else [])
            left = self.node("binary_operator", kids, left.start, kids[-1].end)

    def parse_unary(self) -> Node | None:
        tok = self.peek()
        if tok.text in (b"-", b"+", b"~") and tok.kind == "op":
            op = self.advance()
            inner = self.parse_unary()
            return self.node("unary_operator", [inner] if inner else [],
                             op.start, inner.end if inner else op.end)
        if tok.text == b"await":
            kw = self.advance()
            inner = self.parse_unary()
            return self.node("await", [inner] if inner else [],
                             kw.start, inner.end if inner else kw.end)
        return self.parse_power()

    def parse_power(self) -> Node | None:
        base = self.parse_postfix(self.parse_atom())
        if base is None:
            return None
        if self.at(b"**"):
            self.advance()
            exp = self.parse_unary()
            kids = [base] + ([exp] if exp else [])
            return self.node("binary_operator", kids, base.start, kids[-1].end)
        return base

    def parse_postfix(self, node: Node | None) -> Node | None:
        if node is None:
            return None
        while True:
            tok = self.peek()
            if tok.text == b"." and tok.kind == "op":
                self.advance()
                ntok = self.peek()
                if ntok.kind in ("name", "keyword"):
                    node.role = "object"
                    prop = self.leaf("identifier", self.advance(), role="attribute")
                    node = self.node("attribute", [node, prop], node.start, prop.end)
                else:
                    break
            elif tok.text == b"(":
                args = self.parse_argument_list()
                node.role = "function"
                args.role = "arguments"
                node = self.node("call", [node, args], node.start, args.end)
            elif tok.text == b"[":
                lb = self.advance()
                kids = [node]
                while not self.at_eof() and not self.at(b"]"):
                    before = self.i
                    item = self.parse_slice()
                    if item:
                        kids.append(item)
                    if not self.eat(b","):
                        break
                    if self.i == before:
                        break
                rb = self.eat(b"]")
                end = rb.end if rb else kids[-1].end if kids else lb.end
                node = self.node("subscript", kids, node.start, end)
            else:
                break
        return node

    def parse_slice(self) -> Node | None:
        start_tok = self.peek()
        kids = []
        lower = None if self.at(b":") else self.parse_expression()
        if lower:
            kids.append(lower)
        if self.at(b":"):
            self.advance()
            upper = None
            if not self.at(b":") and not self.at(b"]") and not self.at(b","):
                upper = self.parse_expression()
            if upper:
                kids.append(upper)
            if self.eat(b":"):
                step = None
                if not self.at(b"]") and not self.at(b","):
                    step = self.parse_expression()
                if step:
                    kids.append(step)
            end = kids[-1].end if kids else start_tok.end
            return self.node("slice", kids, start_tok.start, end)
        return lower

    def parse_argument_list(self) -> Node:
        lp = self.advance()
        args = []
        while not self.at_eof() and not self.at(b")"):
            before = self.i
            tok = self.peek()
            if tok.text in (b"*", b"**"):
                star = self.advance()
                inner = self.parse_expression()
                kind = "list_splat" if star.text == b"*" else "dictionary_splat"
                args.append(self.node(kind, [inner] if inner else [],
                                      star.start, inner.end if inner else star.end))
            elif tok.kind == "name" and self.peek(1).text == b"=" and \
                    self.peek(1).kind == "op":
                name = self.leaf("identifier", self.advance(), role="name")
                self.advance()
                value = self.parse_expression()
                kids = [name] + ([value] if value else [])
                args.append(self.node("keyword_argument", kids, name.start, kids[-1].end))
            else:
                arg = self.parse_expression()
                if arg is not None:
                    if self.at(b"for"):
                        arg = self.parse_comprehension_tail(arg, arg.start, "generator_expression")
                    args.append(arg)
            if not self.eat(b","):
                if self.at(b")"):
                    break
                if self.i == before:
                    args.append(self.error_to_paren())
                    break
        rp = self.eat(b")")
        end = rp.end if rp else (args[-1].end if args else lp.end)
        return self.node("argument_list", args, lp.start, end)

    def parse_comprehension_tail(self, first: Node, start: int, kind: str) -> Node:
        kids = [first]
        while True:
            if self.at(b"async"):
                self.advance()
            if self.at(b"for"):
                fkw = self.advance()
                target = self.parse_expression_list()
                fkids = [target] if target else []
                if self.eat(b"in"):
                    it = self.parse_or()
                    if it:
                        fkids.append(it)
                kids.append(self.node("for_in_clause", fkids, fkw.start,
                                      fkids[-1].end if fkids else fkw.end))
            elif self.at(b"if"):
                ikw = self.advance()
                cond = self.parse_or()
                kids.append(self.node("if_clause", [cond] if cond else [],
                                      ikw.start, cond.end if cond else ikw.end))
            else:
                break
        return self.node(kind, kids, start, kids[-1].end)

    def parse_atom(self) -> Node | None:
        tok = self.peek()
        if tok.kind == "name":
            name = self.leaf("identifier", self.advance())
            if self.at(b":="):
                self.advance()
                value = self.parse_expression()
                kids = [name] + ([value] if value else [])
                return self.node("named_expression", kids, name.start, kids[-1].end)
            return name
        if tok.kind == "number":
            kind = "float" if (b"." in tok.text or b"e" in tok.text.lower()
                               and not tok.text.lower().startswith(b"0x")) else "integer"
            return self.leaf(kind, self.advance())
        if tok.kind == "string":
            return self.parse_string_group()
        if tok.kind == "keyword":
            if tok.text in (b"None", b"True", b"False"):
                kindmap = {b"None": "none", b"True": "true", b"False": "false"}
                return self.leaf(kindmap[tok.text], self.advance())
            if tok.text == b"lambda":
                return self.parse_lambda()
            if tok.text == b"not":
                return self.parse_not()
            if tok.text == b"await":
                return self.parse_unary()
            if tok.text == b"yield":
                return self.parse_expression()
            return None
        if tok.text == b"(":
            lp = self.advance()
            if self.at(b")"):
                rp = self.advance()
                return self.node("tuple", [], lp.start, rp.end)
            first = self.parse_expression()
            if first is not None and self.at(b"for"):
                comp = self.parse_comprehension_tail(first, lp.start, "generator_expression")
                rp = self.eat(b")")
                comp.end = rp.end if rp else comp.end
                return comp
            kids = [first] if first else []
            is_tuple = False
            while self.eat(b","):
                is_tuple = True
                nxt = self.parse_expression()
                if nxt is None:
                    break
                kids.append(nxt)
            rp = self.eat(b")")
            end = rp.end if rp else (kids[-1].end if kids else lp.end)
            if is_tuple:
                return self.node("tuple", kids, lp.start, end)
            return self.node("parenthesized_expression", kids, lp.start, end)
        if tok.text == b"[":
            lb = self.advance()
            if self.at(b"]"):
                rb = self.advance()
                return self.node("list", [], lb.start, rb.end)
            first = self.parse_expression()
            if first is not None and self.at(b"for"):
                comp = self.parse_comprehension_tail(first, lb.start, "list_comprehension")
                rb = self.eat(b"]")
                comp.end = rb.end if rb else comp.end
                return comp
            kids = [first] if first else []
            while self.eat(b","):
                nxt = self.parse_expression()
                if nxt is None:
                    break
                kids.append(nxt)
            rb = self.eat(b"]")
            end = rb.end if rb else (kids[-1].end if kids else lb.end)
            return self.node("list", kids, lb.start, end)
        if tok.text == b"{":
            return self.parse_braced()
        if tok.text == b"...":
            return self.leaf("ellipsis", self.advance())
        if tok.text in (b"*", b"**"):
            star = self.advance()
            inner = self.parse_expression()
            return self.node("list_splat", [inner] if inner else [],
                             star.start, inner.end if inner else star.end)
        return None

    def parse_braced(self) -> Node:
        lb = self.advance()
        if self.at(b"}"):
            rb = self.advance()
            return self.node("dictionary", [], lb.start, rb.end)
        kids = []
        is_dict = False
        first = self.parse_expression()
        if first is not None and self.at(b":"):
            is_dict = True
            self.advance()
            value = self.parse_expression()
            pkids = [first] + ([value] if value else [])
            first = self.node("pair", pkids, first.start, pkids[-1].end)
        if first is not None and self.at(b"for"):
            kind = "dictionary_comprehension" if is_dict else "set_comprehension"
            comp = self.parse_comprehension_tail(first, lb.start, kind)
            rb = self.eat(b"}")
            comp.end = rb.end if rb else comp.end
            return comp
        if first:
            kids.append(first)
        while self.eat(b","):
            item = self.parse_expression()
            if item is None:
                break
            if self.at(b":"):
                self.advance()
                is_dict = True
                value = self.parse_expression()
                pkids = [item] + ([value] if value else [])
                item = self.node("pair", pkids, item.start, pkids[-1].end)
            kids.append(item)
        rb = self.eat(b"}")
        end = rb.end if rb else (kids[-1].end if kids else lb.end)
        kind = "dictionary" if is_dict else "set"
        return self.node(kind, kids, lb.start, end)

    def parse_string_group(self) -> Node:
        """One or more adjacent string tokens, with f-string interpolations."""
        parts = []
        while self.peek().kind == "string":
            tok = self.advance()
            kids = []
            if tok.fstring:
                kids = self._fstring_interpolations(tok)
            parts.append(Node("string", tok.start, tok.end, children=kids))
        if len(parts) == 1:
            return parts[0]
        return Node("concatenated_string", parts[0].start, parts[-1].end, children=parts)

    def _fstring_interpolations(self, tok: Token) -> list[Node]:
        body = tok.text
        out = []
        i = 0
        while i < len(body):
            c = body[i : i + 1]
            if c == b"{":
                if body[i + 1 : i + 2] == b"{":
                    i += 2
                    continue
                depth = 1
                j = i + 1
                while j < len(body) and depth:
                    cj = body[j : j + 1]
                    if cj == b"{":
                        depth += 1
                    elif cj == b"}":
                        depth -= 1
                    elif cj in (b"'", b'"'):
                        q = cj
                        j += 1
                        while j < len(body) and body[j : j + 1] != q:
                            j += 1
                    j += 1
                j = min(j, len(body))
                inner_start = tok.start + i + 1
                inner_end = max(inner_start, min(tok.start + j - 1, tok.end))
                # strip format spec / conversion from the parsed expression
                inner = self.src[inner_start:inner_end]
                cut = len(inner)
                depth2 = 0
                for k2 in range(len(inner)):
                    ch = inner[k2 : k2 + 1]
                    if ch in (b"(", b"[", b"{"):
                        depth2 += 1
                    elif ch in (b")", b"]", b"}"):
                        depth2 -= 1
                    elif ch == b"!" and depth2 == 0 and inner[k2 + 1 : k2 + 2] != b"=":
                        cut = k2
                        break
                    elif ch == b":" and depth2 == 0:
                        cut = k2
                        break
                sub = Parser(self.src[inner_start : inner_start + cut])
                expr = sub.parse_expression()
                if expr is not None:
                    _shift(expr, inner_start)
                out.append(Node("interpolation", tok.start + i,
                                min(inner_end + 1, tok.end),
                                children=[expr] if expr else []))
                i = j
            else:
                i += 1
        return out


def _shift(node: Node, delta: int) -> None:
    for n in node.walk():
        n.start += delta
        n.end += delta


def parse_python(source: bytes) -> SyntaxTree:
    return Parser(source).parse()
