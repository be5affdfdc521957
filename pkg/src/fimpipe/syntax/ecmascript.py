"""Error-tolerant recursive-descent parser for the ECMAScript family (JS/TS).

Produces trees with tree-sitter-style node kinds (``call_expression``,
``if_statement``, ``formal_parameters``, ...) and byte-accurate spans. The
parser never raises on malformed input: unexpected tokens are folded into
``error`` nodes and parsing continues at the next synchronization point.

TypeScript support covers the constructs the pipeline cares about
(interfaces, type aliases, enums, annotations, generics); exotic type-level
code degrades into tolerant ``type`` nodes with ``type_identifier`` leaves.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .tree import Node, SyntaxTree, attach_comments

_IDENT_RE = re.compile(rb"[A-Za-z_$\x80-\xff][A-Za-z0-9_$\x80-\xff]*")
_NUMBER_RE = re.compile(
    rb"0[xX][0-9a-fA-F_]+n?|0[bB][01_]+n?|0[oO][0-7_]+n?"
    rb"|(?:[0-9][0-9_]*(?:\.[0-9_]*)?|\.[0-9][0-9_]*)(?:[eE][+-]?[0-9]+)?n?"
)

_KEYWORDS = {
    b"var", b"let", b"const", b"function", b"class", b"return", b"if", b"else",
    b"for", b"while", b"do", b"switch", b"case", b"default", b"break", b"continue",
    b"new", b"delete", b"typeof", b"instanceof", b"void", b"in", b"try", b"catch",
    b"finally", b"throw", b"yield", b"await", b"extends", b"super", b"this",
    b"null", b"true", b"false", b"undefined", b"import", b"export", b"with",
    b"debugger",
}

# punctuation, longest-first so the scanner is greedy
_PUNCT = [
    b">>>=", b"...", b"===", b"!==", b"**=", b"<<=", b">>=", b">>>", b"&&=",
    b"||=", b"??=", b"=>", b"++", b"--", b"**", b"==", b"!=", b"<=", b">=",
    b"&&", b"||", b"??", b"?.", b"+=", b"-=", b"*=", b"/=", b"%=", b"&=",
    b"|=", b"^=", b"<<", b">>", b"{", b"}", b"(", b")", b"[", b"]", b";",
    b",", b"<", b">", b"+", b"-", b"*", b"/", b"%", b"&", b"|", b"^", b"!",
    b"~", b"?", b":", b"=", b".", b"@", b"#",
]

_VALUE_KEYWORDS = {b"this", b"super", b"null", b"true", b"false", b"undefined"}

_PREDEFINED_TYPES = {
    b"string", b"number", b"boolean", b"any", b"unknown", b"never", b"void",
    b"object", b"symbol", b"bigint", b"undefined", b"null",
}

_BINARY_PREC = {
    b"??": 1, b"||": 2, b"&&": 3, b"|": 4, b"^": 5, b"&": 6,
    b"==": 7, b"!=": 7, b"===": 7, b"!==": 7,
    b"<": 8, b">": 8, b"<=": 8, b">=": 8, b"instanceof": 8, b"in": 8,
    b"<<": 9, b">>": 9, b">>>": 9,
    b"+": 10, b"-": 10,
    b"*": 11, b"/": 11, b"%": 11,
    b"**": 12,
}

_ASSIGN_OPS = {
    b"+=", b"-=", b"*=", b"/=", b"%=", b"**=", b"<<=", b">>=", b">>>=",
    b"&=", b"|=", b"^=", b"&&=", b"||=", b"??=",
}


@dataclass
class Token:
    kind: str  # ident | keyword | number | string | template | regex | punct | private | eof
    text: bytes
    start: int
    end: int
    line: int


class Lexer:
    def __init__(self, src: bytes):
        self.src = src
        self.n = len(src)
        self.pos = 0
        self.line = 1
        self.tokens: list[Token] = []
        self.comments: list[Node] = []

    def run(self) -> list[Token]:
        while self.pos < self.n:
            c = self.src[self.pos : self.pos + 1]
            if c in (b" ", b"\t", b"\r", b"\x0c"):
                self.pos += 1
            elif c == b"\n":
                self.line += 1
                self.pos += 1
            elif c == b"/" and self.src[self.pos + 1 : self.pos + 2] == b"/":
                end = self.src.find(b"\n", self.pos)
                end = self.n if end == -1 else end
                self.comments.append(Node("comment", self.pos, end))
                self.pos = end
            elif c == b"/" and self.src[self.pos + 1 : self.pos + 2] == b"*":
                end = self.src.find(b"*/", self.pos + 2)
                end = self.n if end == -1 else end + 2
                self.comments.append(Node("comment", self.pos, end))
                self.line += self.src.count(b"\n", self.pos, end)
                self.pos = end
            elif c in (b"'", b'"'):
                self._string(c)
            elif c == b"`":
                self._template()
            elif c == b"/" and self._regex_allowed():
                if not self._regex():
                    self._punct()
            else:
                m = _IDENT_RE.match(self.src, self.pos)
                if m:
                    text = m.group()
                    kind = "keyword" if text in _KEYWORDS else "ident"
                    self._emit(kind, m.start(), m.end())
                    continue
                m = _NUMBER_RE.match(self.src, self.pos)
                if m:
                    self._emit("number", m.start(), m.end())
                    continue
                if c == b"#":
                    m = _IDENT_RE.match(self.src, self.pos + 1)
                    if m:
                        self._emit("private", self.pos, m.end())
                        continue
                self._punct()
        self.tokens.append(Token("eof", b"", self.n, self.n, self.line))
        return self.tokens

    def _emit(self, kind: str, start: int, end: int) -> None:
        self.tokens.append(Token(kind, self.src[start:end], start, end, self.line))
        self.line += self.src.count(b"\n", start, end)
        self.pos = end

    def _punct(self) -> None:
        for p in _PUNCT:
            if self.src.startswith(p, self.pos):
                self._emit("punct", self.pos, self.pos + len(p))
                return
        # unknown byte: emit as a one-byte punct so progress is guaranteed
        self._emit("punct", self.pos, self.pos + 1)

    def _string(self, quote: bytes) -> None:
        i = self.pos + 1
        while i < self.n:
            c = self.src[i : i + 1]
            if c == b"\\":
                i += 2
            elif c == quote:
                i += 1
                break
            elif c == b"\n":
                break  # unterminated: stop at EOL
            else:
                i += 1
        self._emit("string", self.pos, min(i, self.n))

    def _template(self) -> None:
        # whole template literal (with nested substitutions) as one token
        i = self.pos + 1
        stack: list[bytes] = [b"`"]
        while i < self.n and stack:
            c = self.src[i : i + 1]
            top = stack[-1]
            if c == b"\\":
                i += 2
                continue
            if top == b"`":
                if c == b"`":
                    stack.pop()
                    i += 1
                elif c == b"$" and self.src[i + 1 : i + 2] == b"{":
                    stack.append(b"{")
                    i += 2
                else:
                    i += 1
            else:
                if c == b"{":
                    stack.append(b"{")
                    i += 1
                elif c == b"}":
                    stack.pop()
                    i += 1
                elif c == b"`":
                    stack.append(b"`")
                    i += 1
                elif c in (b"'", b'"'):
                    j = i + 1
                    while j < self.n:
                        cj = self.src[j : j + 1]
                        if cj == b"\\":
                            j += 2
                        elif cj == c or cj == b"\n":
                            j += 1
                            break
                        else:
                            j += 1
                    i = j
                else:
                    i += 1
        self._emit("template", self.pos, min(i, self.n))

    def _regex_allowed(self) -> bool:
        if not self.tokens:
            return True
        prev = self.tokens[-1]
        if prev.kind in ("ident", "number", "string", "template", "regex", "private"):
            return False
        if prev.kind == "keyword":
            return prev.text not in _VALUE_KEYWORDS
        return prev.text not in (b")", b"]", b"++", b"--")

    def _regex(self) -> bool:
        i = self.pos + 1
        in_class = False
        ok = False
        while i < self.n:
            c = self.src[i : i + 1]
            if c == b"\\":
                i += 2
            elif c == b"\n":
                break
            elif c == b"[":
                in_class = True
                i += 1
            elif c == b"]":
                in_class = False
                i += 1
            elif c == b"/" and not in_class:
                i += 1
                ok = True
                break
            else:
                i += 1
        if not ok:
            return False
        while i < self.n and _IDENT_RE.match(self.src, i) and self.src[i] in b"dgimsuvy":
            i += 1
        self._emit("regex", self.pos, i)
        return True


_DECLARATION_STARTS = {
    b"var", b"let", b"const", b"function", b"class", b"if", b"for", b"while",
    b"do", b"switch", b"try", b"return", b"throw", b"break", b"continue",
    b"import", b"export",
}

_MODIFIER_IDENTS = {
    b"public", b"private", b"protected", b"readonly", b"abstract", b"override",
    b"declare", b"accessor",
}


class Parser:
    def __init__(self, src: bytes, typescript: bool = False):
        self.src = src
        self.ts = typescript
        lexer = Lexer(src)
        self.toks = lexer.run()
        self.comments = lexer.comments
        self.i = 0

    # -- token helpers -------------------------------------------------

    def peek(self, k: int = 0) -> Token:
        j = min(self.i + k, len(self.toks) - 1)
        return self.toks[j]

    def at(self, text: bytes) -> bool:
        return self.peek().text == text

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

    def eat_close_angle(self) -> int | None:
        """Consume one '>' even when the lexer glued it into '>>', '>=', etc.

        Returns the byte offset just past the consumed '>'.
        """
        tok = self.peek()
        if tok.text == b">":
            self.advance()
            return tok.end
        if tok.kind == "punct" and tok.text.startswith(b">") and len(tok.text) > 1:
            self.toks[self.i] = Token("punct", tok.text[1:], tok.start + 1, tok.end, tok.line)
            return tok.start + 1
        return None

    def leaf(self, kind: str, tok: Token, named: bool = True, role: str | None = None) -> Node:
        return Node(kind, tok.start, tok.end, named=named, role=role)

    def node(self, kind: str, children: list[Node], start: int, end: int,
             role: str | None = None) -> Node:
        return Node(kind, start, end, children=children, named=True, role=role)

    def error_to(self, stop: set[bytes], start_tok: Token | None = None) -> Node:
        """Consume tokens until a synchronization token; wrap them as error."""
        start = (start_tok or self.peek()).start
        end = start
        depth = 0
        consumed = False
        while not self.at_eof():
            tok = self.peek()
            if depth == 0 and (tok.text in stop or tok.text in _DECLARATION_STARTS and consumed):
                break
            if tok.text in (b"(", b"[", b"{"):
                depth += 1
            elif tok.text in (b")", b"]", b"}"):
                if depth == 0:
                    break
                depth -= 1
            end = tok.end
            self.advance()
            consumed = True
        if not consumed:  # guarantee progress
            tok = self.advance()
            end = tok.end
        return Node("error", start, max(end, start))

    # -- entry ---------------------------------------------------------

    def parse(self) -> SyntaxTree:
        children = []
        while not self.at_eof():
            before = self.i
            stmt = self.parse_statement()
            if stmt is not None:
                children.append(stmt)
            if self.i == before:
                children.append(self.error_to({b";"}))
        root = Node("program", 0, len(self.src), children=children)
        lang = "typescript" if self.ts else "javascript"
        attach_comments(root, self.comments)
        return SyntaxTree(root, self.src, lang)

    # -- statements ----------------------------------------------------

    def parse_statement(self) -> Node | None:
        tok = self.peek()
        text = tok.text
        if tok.kind == "punct":
            if text == b"{":
                return self.parse_block()
            if text == b";":
                return self.leaf("empty_statement", self.advance(), named=False)
            if text == b"@":
                return self.parse_decorated()
            if text == b"}":
                # stray close brace: let callers handle; emit error leaf
                return Node("error", tok.start, self.advance().end)
        if tok.kind == "keyword":
            if text in (b"var", b"let", b"const"):
                if text == b"const" and self.peek(1).text == b"enum":
                    return self.parse_enum()
                return self.parse_variable_declaration()
            if text == b"function":
                return self.parse_function(declaration=True)
            if text == b"class":
                return self.parse_class(declaration=True)
            if text == b"if":
                return self.parse_if()
            if text == b"for":
                return self.parse_for()
            if text == b"while":
                return self.parse_while()
            if text == b"do":
                return self.parse_do()
            if text == b"try":
                return self.parse_try()
            if text == b"switch":
                return self.parse_switch()
            if text in (b"return", b"throw"):
                return self.parse_return_throw()
            if text in (b"break", b"continue"):
                start = self.advance()
                kids = []
                if self.peek().kind == "ident" and self.peek().line == start.line:
                    kids.append(self.leaf("statement_identifier", self.advance()))
                end = self.eat(b";")
                return self.node(
                    f"{text.decode()}_statement", kids, start.start,
                    end.end if end else (kids[-1].end if kids else start.end))
            if text == b"import":
                return self.parse_import()
            if text == b"export":
                return self.parse_export()
            if text == b"debugger":
                start = self.advance()
                end = self.eat(b";")
                return self.node("debugger_statement", [], start.start,
                                 end.end if end else start.end)
        if tok.kind == "ident":
            nxt = self.peek(1)
            if self.ts and text == b"interface" and nxt.kind == "ident":
                return self.parse_interface()
            if self.ts and text == b"type" and nxt.kind == "ident" and \
                    self.peek(2).text in (b"=", b"<"):
                return self.parse_type_alias()
            if self.ts and text == b"enum" and nxt.kind == "ident":
                return self.parse_enum()
            if self.ts and text in (b"namespace", b"module") and \
                    nxt.kind in ("ident", "string"):
                return self.parse_namespace()
            if self.ts and text == b"declare":
                start = self.advance()
                inner = self.parse_statement()
                kids = [inner] if inner else []
                end = inner.end if inner else start.end
                return self.node("ambient_declaration", kids, start.start, end)
            if self.ts and text == b"abstract" and nxt.text == b"class":
                start = self.advance()
                cls = self.parse_class(declaration=True)
                cls.start = start.start
                return cls
            if text == b"async" and nxt.text == b"function":
                return self.parse_function(declaration=True)
            if nxt.text == b":" and self.peek(2).kind != "punct":
                # labeled statement (label: stmt); avoid x ? a : b confusion
                label = self.advance()
                self.advance()  # :
                body = self.parse_statement()
                kids = [self.leaf("statement_identifier", label)]
                if body:
                    kids.append(body)
                return self.node("labeled_statement", kids, label.start,
                                 body.end if body else label.end)
        return self.parse_expression_statement()

    def parse_expression_statement(self) -> Node:
        start_tok = self.peek()
        expr = self.parse_expression()
        if expr is None:
            return self.error_to({b";", b"}"})
        semi = self.eat(b";")
        end = semi.end if semi else expr.end
        return self.node("expression_statement", [expr], start_tok.start, end)

    def parse_block(self) -> Node:
        lb = self.advance()
        children = []
        while not self.at_eof() and not self.at(b"}"):
            before = self.i
            stmt = self.parse_statement()
            if stmt is not None:
                children.append(stmt)
            if self.i == before:
                children.append(self.error_to({b"}", b";"}))
        rb = self.eat(b"}")
        return self.node("statement_block", children, lb.start,
                         rb.end if rb else (children[-1].end if children else lb.end))

    def parse_variable_declaration(self) -> Node:
        kw = self.advance()
        kind = "lexical_declaration" if kw.text in (b"let", b"const") else "variable_declaration"
        declarators = []
        while True:
            decl = self.parse_declarator()
            if decl is None:
                break
            declarators.append(decl)
            if not self.eat(b","):
                break
        semi = self.eat(b";")
        end = semi.end if semi else (declarators[-1].end if declarators else kw.end)
        return self.node(kind, declarators, kw.start, end)

    def parse_declarator(self) -> Node | None:
        start_tok = self.peek()
        name = self.parse_binding_target()
        if name is None:
            return None
        kids = [name]
        name.role = "name"
        if self.ts and self.eat(b"!"):
            pass
        if self.at(b":") and self.ts:
            self.advance()
            t = self.parse_type()
            if t:
                kids.append(t)
        if self.eat(b"="):
            value = self.parse_assignment_expr()
            if value:
                value.role = "value"
                kids.append(value)
        return self.node("variable_declarator", kids, start_tok.start, kids[-1].end)

    def parse_binding_target(self) -> Node | None:
        tok = self.peek()
        if tok.kind == "ident":
            return self.leaf("identifier", self.advance())
        if tok.text == b"{":
            return self.parse_object(pattern=True)
        if tok.text == b"[":
            return self.parse_array(pattern=True)
        return None

    def parse_if(self) -> Node:
        kw = self.advance()
        kids = []
        cond = self.parse_parenthesized()
        if cond:
            cond.role = "condition"
            kids.append(cond)
        cons = self.parse_statement()
        if cons:
            cons.role = "consequence"
            kids.append(cons)
        end = kids[-1].end if kids else kw.end
        if self.at(b"else"):
            else_kw = self.advance()
            alt = self.parse_statement()
            body = [alt] if alt else []
            clause = self.node("else_clause", body, else_kw.start,
                               alt.end if alt else else_kw.end)
            kids.append(clause)
            end = clause.end
        return self.node("if_statement", kids, kw.start, end)

    def parse_parenthesized(self) -> Node | None:
        lp = self.eat(b"(")
        if lp is None:
            return None
        expr = self.parse_expression()
        kids = [expr] if expr else []
        rp = self.eat(b")")
        end = rp.end if rp else (expr.end if expr else lp.end)
        return self.node("parenthesized_expression", kids, lp.start, end)

    def parse_for(self) -> Node:
        kw = self.advance()
        kids: list[Node] = []
        self.eat(b"await")
        lp = self.eat(b"(")
        kind = "for_statement"
        if lp:
            if self.peek().text in (b"var", b"let", b"const"):
                decl_kw = self.advance()
                target = self.parse_binding_target()
                if target is not None and (self.at(b"in") or (self.peek().text == b"of")):
                    self.advance()
                    kind = "for_in_statement"
                    right = self.parse_expression()
                    kids.append(target)
                    if right:
                        kids.append(right)
                else:
                    # classic for: rewind-free tolerant parse of declarator tail
                    decls = []
                    if target is not None:
                        tail_kids = [target]
                        if self.ts and self.eat(b":"):
                            t = self.parse_type()
                            if t:
                                tail_kids.append(t)
                        if self.eat(b"="):
                            v = self.parse_assignment_expr()
                            if v:
                                tail_kids.append(v)
                        decls.append(self.node("variable_declarator", tail_kids,
                                               target.start, tail_kids[-1].end))
                        while self.eat(b","):
                            d = self.parse_declarator()
                            if d is None:
                                break
                            decls.append(d)
                    if decls:
                        kids.append(self.node("lexical_declaration"
                                              if decl_kw.text in (b"let", b"const")
                                              else "variable_declaration",
                                              decls, decl_kw.start, decls[-1].end))
                    self.eat(b";")
                    cond = self.parse_expression()
                    if cond:
                        kids.append(cond)
                    self.eat(b";")
                    step = self.parse_expression()
                    if step:
                        kids.append(step)
            else:
                first = self.parse_expression()
                if first is not None and (self.at(b"in") or self.peek().text == b"of"):
                    self.advance()
                    kind = "for_in_statement"
                    kids.append(first)
                    right = self.parse_expression()
                    if right:
                        kids.append(right)
                else:
                    if first:
                        kids.append(first)
                    self.eat(b";")
                    cond = self.parse_expression()
                    if cond:
                        kids.append(cond)
                    self.eat(b";")
                    step = self.parse_expression()
                    if step:
                        kids.append(step)
            self.eat(b")")
        body = self.parse_statement()
        if body:
            body.role = "body"
            kids.append(body)
        end = kids[-1].end if kids else kw.end
        return self.node(kind, kids, kw.start, end)

    def parse_while(self) -> Node:
        kw = self.advance()
        kids = []
        cond = self.parse_parenthesized()
        if cond:
            cond.role = "condition"
            kids.append(cond)
        body = self.parse_statement()
        if body:
            body.role = "body"
            kids.append(body)
        return self.node("while_statement", kids, kw.start,
                         kids[-1].end if kids else kw.end)

    def parse_do(self) -> Node:
        kw = self.advance()
        kids = []
        body = self.parse_statement()
        if body:
            body.role = "body"
            kids.append(body)
        if self.eat(b"while"):
            cond = self.parse_parenthesized()
            if cond:
                kids.append(cond)
        semi = self.eat(b";")
        end = semi.end if semi else (kids[-1].end if kids else kw.end)
        return self.node("do_statement", kids, kw.start, end)

    def parse_try(self) -> Node:
        kw = self.advance()
        kids = []
        if self.at(b"{"):
            block = self.parse_block()
            block.role = "body"
            kids.append(block)
        if self.at(b"catch"):
            ckw = self.advance()
            ckids = []
            if self.at(b"("):
                self.advance()
                param = self.parse_binding_target()
                if param:
                    ckids.append(param)
                if self.ts and self.eat(b":"):
                    t = self.parse_type()
                    if t:
                        ckids.append(t)
                self.eat(b")")
            if self.at(b"{"):
                ckids.append(self.parse_block())
            kids.append(self.node("catch_clause", ckids, ckw.start,
                                  ckids[-1].end if ckids else ckw.end))
        if self.at(b"finally"):
            fkw = self.advance()
            fkids = []
            if self.at(b"{"):
                fkids.append(self.parse_block())
            kids.append(self.node("finally_clause", fkids, fkw.start,
                                  fkids[-1].end if fkids else fkw.end))
        return self.node("try_statement", kids, kw.start,
                         kids[-1].end if kids else kw.end)

    def parse_switch(self) -> Node:
        kw = self.advance()
        kids = []
        cond = self.parse_parenthesized()
        if cond:
            kids.append(cond)
        if self.at(b"{"):
            lb = self.advance()
            cases = []
            while not self.at_eof() and not self.at(b"}"):
                ctok = self.peek()
                if ctok.text == b"case":
                    self.advance()
                    ckids = []
                    val = self.parse_expression()
                    if val:
                        ckids.append(val)
                    self.eat(b":")
                    ckids.extend(self._case_body())
                    cases.append(self.node("switch_case", ckids, ctok.start,
                                           ckids[-1].end if ckids else ctok.end))
                elif ctok.text == b"default":
                    self.advance()
                    self.eat(b":")
                    ckids = self._case_body()
                    cases.append(self.node("switch_default", ckids, ctok.start,
                                           ckids[-1].end if ckids else ctok.end))
                else:
                    cases.append(self.error_to({b"}", b"case", b"default"}))
            rb = self.eat(b"}")
            body = self.node("switch_body", cases, lb.start,
                             rb.end if rb else (cases[-1].end if cases else lb.end))
            kids.append(body)
        return self.node("switch_statement", kids, kw.start,
                         kids[-1].end if kids else kw.end)

    def _case_body(self) -> list[Node]:
        out = []
        while not self.at_eof() and self.peek().text not in (b"case", b"default", b"}"):
            before = self.i
            stmt = self.parse_statement()
            if stmt is not None:
                out.append(stmt)
            if self.i == before:
                break
        return out

    def parse_return_throw(self) -> Node:
        kw = self.advance()
        kind = "return_statement" if kw.text == b"return" else "throw_statement"
        kids = []
        nxt = self.peek()
        # ASI: no argument when the next token sits on a new line
        if nxt.text not in (b";", b"}") and nxt.kind != "eof" and nxt.line == kw.line:
            expr = self.parse_expression()
            if expr:
                kids.append(expr)
        semi = self.eat(b";")
        end = semi.end if semi else (kids[-1].end if kids else kw.end)
        return self.node(kind, kids, kw.start, end)

    def parse_import(self) -> Node:
        kw = self.advance()
        kids: list[Node] = []
        end = kw.end
        # dynamic import: import(...) is an expression
        if self.at(b"("):
            self.i -= 1
            return self.parse_expression_statement()
        while not self.at_eof():
            tok = self.peek()
            if tok.text == b";":
                end = self.advance().end
                break
            if tok.line != kw.line and tok.text not in (b"from", b","):
                break
            if tok.kind == "ident" or tok.text == b"default":
                kids.append(self.leaf("identifier", self.advance()))
            elif tok.kind == "string":
                kids.append(self.leaf("string", self.advance()))
            else:
                self.advance()
            end = tok.end
        return self.node("import_statement", kids, kw.start, max(end, kids[-1].end if kids else end))

    def parse_export(self) -> Node:
        kw = self.advance()
        kids: list[Node] = []
        self.eat(b"default")
        tok = self.peek()
        if tok.text in (b"var", b"let", b"const", b"function", b"class") or \
                (tok.kind == "ident" and tok.text in (b"interface", b"type", b"enum",
                                                      b"abstract", b"async", b"declare",
                                                      b"namespace", b"module")):
            inner = self.parse_statement()
            if inner:
                kids.append(inner)
        elif tok.text == b"{" or tok.text == b"*":
            # export lists / re-exports: consume loosely to ; or EOL
            depth = 0
            end = tok.end
            while not self.at_eof():
                t = self.peek()
                if t.text == b"{":
                    depth += 1
                elif t.text == b"}":
                    depth -= 1
                elif depth == 0 and t.text == b";":
                    end = self.advance().end
                    break
                elif depth == 0 and t.line != kw.line and t.text != b"from":
                    break
                if t.kind == "ident":
                    kids.append(self.leaf("identifier", self.advance()))
                elif t.kind == "string":
                    kids.append(self.leaf("string", self.advance()))
                else:
                    self.advance()
                end = t.end
            return self.node("export_statement", kids, kw.start,
                             max(end, kids[-1].end if kids else end))
        else:
            expr = self.parse_expression()
            if expr:
                kids.append(expr)
            self.eat(b";")
        return self.node("export_statement", kids, kw.start,
                         kids[-1].end if kids else kw.end)

    def parse_decorated(self) -> Node:
        decorators = []
        while self.at(b"@"):
            at = self.advance()
            expr = self.parse_postfix(self.parse_primary())
            decorators.append(self.node("decorator", [expr] if expr else [],
                                        at.start, expr.end if expr else at.end))
        inner = self.parse_statement()
        kids = decorators + ([inner] if inner else [])
        end = kids[-1].end if kids else decorators[-1].end
        return self.node("decorated_definition", kids, decorators[0].start, end)

    # -- functions and classes ------------------------------------------

    def parse_function(self, declaration: bool) -> Node:
        start_tok = self.peek()
        self.eat(b"async")
        self.eat(b"function")
        generator = bool(self.eat(b"*"))
        kids = []
        if self.peek().kind == "ident":
            name = self.leaf("identifier", self.advance(), role="name")
            kids.append(name)
        self._skip_type_parameters()
        params = self.parse_formal_parameters()
        if params:
            params.role = "parameters"
            kids.append(params)
        if self.ts and self.eat(b":"):
            t = self.parse_type()
            if t:
                t.role = "return_type"
                kids.append(t)
        if self.at(b"{"):
            body = self.parse_block()
            body.role = "body"
            kids.append(body)
        kind = "function_declaration" if declaration else "function_expression"
        if generator:
            kind = "generator_function_declaration" if declaration else "generator_function"
        end = kids[-1].end if kids else start_tok.end
        return self.node(kind, kids, start_tok.start, end)

    def parse_formal_parameters(self) -> Node | None:
        lp = self.eat(b"(")
        if lp is None:
            return None
        params = []
        while not self.at_eof() and not self.at(b")"):
            before = self.i
            param = self.parse_parameter()
            if param is not None:
                params.append(param)
            if not self.eat(b","):
                if self.at(b")"):
                    break
                if self.i == before:
                    params.append(self.error_to({b")", b","}))
        rp = self.eat(b")")
        end = rp.end if rp else (params[-1].end if params else lp.end)
        return self.node("formal_parameters", params, lp.start, end)

    def parse_parameter(self) -> Node | None:
        start_tok = self.peek()
        kids = []
        while self.ts and self.peek().kind == "ident" and \
                self.peek().text in _MODIFIER_IDENTS and self.peek(1).kind == "ident":
            self.advance()
        rest = self.eat(b"...")
        if self.at(b"@"):  # parameter decorator
            self.advance()
            deco = self.parse_postfix(self.parse_primary())
            if deco:
                kids.append(deco)
        if self.peek().text == b"this":
            target = self.leaf("this", self.advance())
        else:
            target = self.parse_binding_target()
        if target is None:
            return None
        kids.append(target)
        optional = bool(self.ts and self.eat(b"?"))
        if self.ts and self.eat(b":"):
            t = self.parse_type()
            if t:
                kids.append(t)
        if self.eat(b"="):
            v = self.parse_assignment_expr()
            if v:
                kids.append(v)
        kind = "rest_parameter" if rest else (
            "optional_parameter" if optional else "required_parameter")
        start = start_tok.start
        return self.node(kind, kids, start, kids[-1].end)

    def parse_class(self, declaration: bool) -> Node:
        kw = self.advance()  # class
        kids = []
        if self.peek().kind == "ident":
            kids.append(self.leaf("identifier", self.advance(), role="name"))
        self._skip_type_parameters()
        while self.peek().text in (b"extends",) or \
                (self.peek().kind == "ident" and self.peek().text == b"implements"):
            self.advance()
            heritage = self.parse_postfix(self.parse_primary())
            if heritage:
                kids.append(self.node("class_heritage", [heritage],
                                      heritage.start, heritage.end))
            self._skip_type_parameters()
            while self.eat(b","):
                h = self.parse_postfix(self.parse_primary())
                if h:
                    kids.append(self.node("class_heritage", [h], h.start, h.end))
                self._skip_type_parameters()
        if self.at(b"{"):
            body = self.parse_class_body()
            body.role = "body"
            kids.append(body)
        kind = "class_declaration" if declaration else "class_expression"
        return self.node(kind, kids, kw.start, kids[-1].end if kids else kw.end)

    def parse_class_body(self) -> Node:
        lb = self.advance()
        members = []
        while not self.at_eof() and not self.at(b"}"):
            if self.eat(b";"):
                continue
            before = self.i
            member = self.parse_class_member()
            if member is not None:
                members.append(member)
            if self.i == before:
                members.append(self.error_to({b"}", b";"}))
        rb = self.eat(b"}")
        return self.node("class_body", members, lb.start,
                         rb.end if rb else (members[-1].end if members else lb.end))

    def parse_class_member(self) -> Node | None:
        start_tok = self.peek()
        decorators = []
        while self.at(b"@"):
            at = self.advance()
            expr = self.parse_postfix(self.parse_primary())
            decorators.append(self.node("decorator", [expr] if expr else [],
                                        at.start, expr.end if expr else at.end))
        while True:
            tok = self.peek()
            if tok.text == b"static" or \
                    (tok.kind == "ident" and tok.text in _MODIFIER_IDENTS):
                nxt = self.peek(1)
                if nxt.text in (b"(", b"=", b";", b":", b"}", b"?", b"<"):
                    break  # it's actually the member name
                self.advance()
                continue
            break
        if self.peek().text == b"async" and self.peek(1).text not in (b"(", b"=", b":"):
            self.advance()
        accessor = None
        if self.peek().kind == "ident" and self.peek().text in (b"get", b"set") and \
                self.peek(1).text not in (b"(", b"=", b";", b":", b"}", b"?"):
            accessor = self.advance()
        self.eat(b"*")
        name = self.parse_property_name()
        if name is None:
            if decorators:
                return self.node("decorated_definition", decorators,
                                 start_tok.start, decorators[-1].end)
            return None
        kids = decorators + [name]
        name.role = "name"
        self.eat(b"?") or self.eat(b"!")
        self._skip_type_parameters()
        if self.at(b"("):
            params = self.parse_formal_parameters()
            if params:
                params.role = "parameters"
                kids.append(params)
            if self.ts and self.eat(b":"):
                t = self.parse_type()
                if t:
                    t.role = "return_type"
                    kids.append(t)
            if self.at(b"{"):
                body = self.parse_block()
                body.role = "body"
                kids.append(body)
            del accessor
            return self.node("method_definition", kids, start_tok.start, kids[-1].end)
        if self.ts and self.eat(b":"):
            t = self.parse_type()
            if t:
                kids.append(t)
        if self.eat(b"="):
            v = self.parse_assignment_expr()
            if v:
                v.role = "value"
                kids.append(v)
        semi = self.eat(b";")
        end = semi.end if semi else kids[-1].end
        return self.node("public_field_definition", kids, start_tok.start, end)

    def parse_property_name(self) -> Node | None:
        tok = self.peek()
        if tok.kind in ("ident", "keyword") and tok.kind != "eof":
            if tok.kind == "keyword" and tok.text in (b"class", b"function"):
                return None
            return self.leaf("property_identifier", self.advance())
        if tok.kind == "private":
            return self.leaf("private_property_identifier", self.advance())
        if tok.kind == "string":
            return self.leaf("string", self.advance())
        if tok.kind == "number":
            return self.leaf("number", self.advance())
        if tok.text == b"[":
            lb = self.advance()
            expr = self.parse_expression()
            rb = self.eat(b"]")
            end = rb.end if rb else (expr.end if expr else lb.end)
            return self.node("computed_property_name", [expr] if expr else [], lb.start, end)
        return None

    def _skip_type_parameters(self) -> None:
        if not self.ts or not self.at(b"<"):
            return
        # consume a balanced <...> group at token level
        depth = 0
        guard = 0
        while not self.at_eof() and guard < 500:
            tok = self.peek()
            if tok.text == b"<":
                depth += 1
                self.advance()
            elif tok.text.startswith(b">"):
                closes = min(depth, len(tok.text)) if set(tok.text) == {62} else 1
                for _ in range(closes):
                    if self.eat_close_angle() is None:
                        break
                    depth -= 1
                if depth <= 0:
                    return
            elif tok.text in (b";", b"{", b")") and depth == 0:
                return
            else:
                self.advance()
            guard += 1

    # -- TypeScript declarations ----------------------------------------

    def parse_interface(self) -> Node:
        kw = self.advance()
        kids = []
        if self.peek().kind == "ident":
            kids.append(self.leaf("type_identifier", self.advance(), role="name"))
        self._skip_type_parameters()
        if self.peek().text == b"extends":
            self.advance()
            while True:
                t = self.parse_type()
                if t:
                    kids.append(t)
                if not self.eat(b","):
                    break
        if self.at(b"{"):
            body = self.parse_object_type()
            body.role = "body"
            kids.append(body)
        return self.node("interface_declaration", kids, kw.start,
                         kids[-1].end if kids else kw.end)

    def parse_type_alias(self) -> Node:
        kw = self.advance()
        kids = []
        if self.peek().kind == "ident":
            kids.append(self.leaf("type_identifier", self.advance(), role="name"))
        self._skip_type_parameters()
        if self.eat(b"="):
            t = self.parse_type()
            if t:
                t.role = "value"
                kids.append(t)
        semi = self.eat(b";")
        end = semi.end if semi else (kids[-1].end if kids else kw.end)
        return self.node("type_alias_declaration", kids, kw.start, end)

    def parse_enum(self) -> Node:
        start_tok = self.peek()
        self.eat(b"const")
        self.advance()  # enum
        kids = []
        if self.peek().kind == "ident":
            kids.append(self.leaf("identifier", self.advance(), role="name"))
        if self.at(b"{"):
            lb = self.advance()
            members = []
            while not self.at_eof() and not self.at(b"}"):
                name = self.parse_property_name()
                if name is None:
                    members.append(self.error_to({b"}", b","}))
                else:
                    mkids = [name]
                    if self.eat(b"="):
                        v = self.parse_assignment_expr()
                        if v:
                            mkids.append(v)
                    members.append(self.node("enum_assignment", mkids,
                                             name.start, mkids[-1].end))
                if not self.eat(b","):
                    if not self.at(b"}"):
                        break
            rb = self.eat(b"}")
            kids.append(self.node("enum_body", members, lb.start,
                                  rb.end if rb else (members[-1].end if members else lb.end)))
        return self.node("enum_declaration", kids, start_tok.start,
                         kids[-1].end if kids else start_tok.end)

    def parse_namespace(self) -> Node:
        kw = self.advance()
        kids = []
        while self.peek().kind in ("ident", "string"):
            k = "identifier" if self.peek().kind == "ident" else "string"
            kids.append(self.leaf(k, self.advance()))
            if not self.eat(b"."):
                break
        if self.at(b"{"):
            body = self.parse_block()
            body.role = "body"
            kids.append(body)
        return self.node("module_declaration", kids, kw.start,
                         kids[-1].end if kids else kw.end)

    # -- types (tolerant) -------------------------------------------------

    _TYPE_STOPS = {b",", b")", b"]", b"}", b";", b"=", b"=>"}

    def parse_type(self) -> Node | None:
        start_tok = self.peek()
        left = self.parse_type_atom()
        if left is None:
            return None
        while True:
            tok = self.peek()
            if tok.text in (b"|", b"&"):
                self.advance()
                right = self.parse_type_atom()
                kind = "union_type" if tok.text == b"|" else "intersection_type"
                kids = [left] + ([right] if right else [])
                left = self.node(kind, kids, left.start, kids[-1].end)
            elif tok.text == b"extends":
                self.advance()
                check = self.parse_type_atom()
                kids = [left] + ([check] if check else [])
                if self.eat(b"?"):
                    a = self.parse_type()
                    if a:
                        kids.append(a)
                    if self.eat(b":"):
                        b2 = self.parse_type()
                        if b2:
                            kids.append(b2)
                left = self.node("conditional_type", kids, start_tok.start, kids[-1].end)
            elif tok.text == b"[":
                nxt = self.peek(1)
                if nxt.text == b"]":
                    self.advance()
                    rb = self.advance()
                    left = self.node("array_type", [left], left.start, rb.end)
                else:
                    self.advance()
                    idx = self.parse_type()
                    rb = self.eat(b"]")
                    kids = [left] + ([idx] if idx else [])
                    left = self.node("indexed_access_type", kids, left.start,
                                     rb.end if rb else kids[-1].end)
            else:
                break
        return left

    def parse_type_atom(self) -> Node | None:
        tok = self.peek()
        if tok.kind == "ident":
            if tok.text in (b"keyof", b"readonly", b"infer", b"typeof") or \
                    tok.text == b"new":
                op = self.advance()
                inner = self.parse_type_atom()
                return self.node("type_operator", [inner] if inner else [],
                                 op.start, inner.end if inner else op.end)
            if tok.text in _PREDEFINED_TYPES:
                return self.leaf("predefined_type", self.advance())
            name = self.leaf("type_identifier", self.advance())
            node = name
            while self.at(b"."):
                self.advance()
                if self.peek().kind == "ident":
                    nxt = self.leaf("type_identifier", self.advance())
                    node = self.node("nested_type_identifier",
                                     ([node] if node.kind != "nested_type_identifier"
                                      else node.children) + [nxt],
                                     name.start, nxt.end)
                else:
                    break
            if self.at(b"<"):
                args = self.parse_type_arguments()
                if args:
                    node = self.node("generic_type", [node, args], node.start, args.end)
            return node
        if tok.kind == "keyword":
            if tok.text == b"typeof":
                op = self.advance()
                inner = self.parse_postfix(self.parse_primary())
                return self.node("type_query", [inner] if inner else [],
                                 op.start, inner.end if inner else op.end)
            if tok.text in (b"void", b"null", b"undefined", b"true", b"false",
                            b"this", b"new", b"import"):
                return self.leaf("predefined_type", self.advance())
        if tok.kind in ("string", "number", "template"):
            return self.leaf("literal_type", self.advance())
        if tok.text == b"{":
            return self.parse_object_type()
        if tok.text == b"[":
            lb = self.advance()
            members = []
            while not self.at_eof() and not self.at(b"]"):
                t = self.parse_type()
                if t:
                    members.append(t)
                if not self.eat(b","):
                    break
            rb = self.eat(b"]")
            return self.node("tuple_type", members, lb.start,
                             rb.end if rb else (members[-1].end if members else lb.end))
        if tok.text == b"(":
            lp = self.advance()
            members = []
            while not self.at_eof() and not self.at(b")"):
                before = self.i
                if self.peek().kind == "ident" and self.peek(1).text in (b":", b"?"):
                    pname = self.leaf("identifier", self.advance())
                    members.append(pname)
                    self.eat(b"?")
                    if self.eat(b":"):
                        t = self.parse_type()
                        if t:
                            members.append(t)
                elif self.eat(b"..."):
                    continue
                else:
                    t = self.parse_type()
                    if t:
                        members.append(t)
                if not self.eat(b","):
                    break
                if self.i == before:
                    break
            rp = self.eat(b")")
            end = rp.end if rp else (members[-1].end if members else lp.end)
            if self.eat(b"=>"):
                ret = self.parse_type()
                kids = members + ([ret] if ret else [])
                return self.node("function_type", kids, lp.start,
                                 ret.end if ret else end)
            return self.node("parenthesized_type", members, lp.start, end)
        if tok.text == b"-" and self.peek(1).kind == "number":
            m = self.advance()
            num = self.advance()
            return self.node("literal_type", [], m.start, num.end)
        return None

    def parse_type_arguments(self) -> Node | None:
        if not self.at(b"<"):
            return None
        lt = self.advance()
        args = []
        while not self.at_eof():
            t = self.parse_type()
            if t:
                args.append(t)
            if self.eat(b","):
                continue
            close = self.eat_close_angle()
            if close is not None:
                return self.node("type_arguments", args, lt.start, close)
            break
        return self.node("type_arguments", args, lt.start,
                         args[-1].end if args else lt.end)

    def parse_object_type(self) -> Node:
        lb = self.advance()
        members = []
        while not self.at_eof() and not self.at(b"}"):
            if self.eat(b";") or self.eat(b","):
                continue
            before = self.i
            member = self.parse_type_member()
            if member is not None:
                members.append(member)
            if self.i == before:
                members.append(self.error_to({b"}", b";", b","}))
        rb = self.eat(b"}")
        return self.node("object_type", members, lb.start,
                         rb.end if rb else (members[-1].end if members else lb.end))

    def parse_type_member(self) -> Node | None:
        start_tok = self.peek()
        while self.peek().kind == "ident" and self.peek().text in _MODIFIER_IDENTS \
                and self.peek(1).kind == "ident":
            self.advance()
        if self.at(b"["):  # index signature [key: string]: T
            lb = self.advance()
            kids = []
            if self.peek().kind == "ident":
                kids.append(self.leaf("identifier", self.advance()))
            if self.eat(b":"):
                t = self.parse_type()
                if t:
                    kids.append(t)
            self.eat(b"]")
            if self.eat(b":"):
                t = self.parse_type()
                if t:
                    kids.append(t)
            return self.node("index_signature", kids, lb.start,
                             kids[-1].end if kids else lb.end)
        if self.at(b"(") or self.at(b"<"):  # call signature
            self._skip_type_parameters()
            params = self.parse_formal_parameters()
            kids = [params] if params else []
            if self.eat(b":"):
                t = self.parse_type()
                if t:
                    kids.append(t)
            return self.node("call_signature", kids, start_tok.start,
                             kids[-1].end if kids else start_tok.end)
        name = self.parse_property_name()
        if name is None:
            return None
        kids = [name]
        name.role = "name"
        self.eat(b"?")
        if self.at(b"(") or self.at(b"<"):
            self._skip_type_parameters()
            params = self.parse_formal_parameters()
            if params:
                kids.append(params)
            if self.eat(b":"):
                t = self.parse_type()
                if t:
                    kids.append(t)
            return self.node("method_signature", kids, start_tok.start, kids[-1].end)
        if self.eat(b":"):
            t = self.parse_type()
            if t:
                t.role = "type"
                kids.append(t)
        return self.node("property_signature", kids, start_tok.start, kids[-1].end)

    # -- expressions ------------------------------------------------------

    def parse_expression(self) -> Node | None:
        first = self.parse_assignment_expr()
        if first is None:
            return None
        if not self.at(b","):
            return first
        kids = [first]
        while self.eat(b","):
            nxt = self.parse_assignment_expr()
            if nxt is None:
                break
            kids.append(nxt)
        return self.node("sequence_expression", kids, first.start, kids[-1].end)

    def parse_assignment_expr(self) -> Node | None:
        arrow = self.try_parse_arrow()
        if arrow is not None:
            return arrow
        if self.at(b"yield"):
            kw = self.advance()
            self.eat(b"*")
            arg = None
            if self.peek().line == kw.line and self.peek().text not in (b")", b"]", b"}", b";", b","):
                arg = self.parse_assignment_expr()
            return self.node("yield_expression", [arg] if arg else [],
                             kw.start, arg.end if arg else kw.end)
        left = self.parse_conditional()
        if left is None:
            return None
        tok = self.peek()
        if tok.text == b"=":
            self.advance()
            right = self.parse_assignment_expr()
            kids = [left] + ([right] if right else [])
            left.role = "left"
            if right:
                right.role = "right"
            return self.node("assignment_expression", kids, left.start, kids[-1].end)
        if tok.text in _ASSIGN_OPS:
            self.advance()
            right = self.parse_assignment_expr()
            kids = [left] + ([right] if right else [])
            return self.node("augmented_assignment_expression", kids,
                             left.start, kids[-1].end)
        return left

    def try_parse_arrow(self) -> Node | None:
        start = self.i
        start_tok = self.peek()
        is_async = False
        if start_tok.kind == "ident" and start_tok.text == b"async" and \
                self.peek(1).line == start_tok.line and \
                (self.peek(1).kind == "ident" or self.peek(1).text == b"("):
            is_async = True
            probe = 1
        else:
            probe = 0
        tok = self.peek(probe)
        if tok.kind == "ident":
            if self.peek(probe + 1).text == b"=>":
                if is_async:
                    self.advance()
                param_tok = self.advance()
                param = self.leaf("identifier", param_tok, role="parameter")
                self.advance()  # =>
                body = self.parse_arrow_body()
                kids = [param] + ([body] if body else [])
                return self.node("arrow_function", kids, start_tok.start,
                                 body.end if body else param.end)
            return None
        if tok.text != b"(":
            return None
        j = self.i + probe
        depth = 0
        k = j
        limit = min(len(self.toks) - 1, k + 4000)
        while k <= limit:
            t = self.toks[k]
            if t.text in (b"(", b"[", b"{"):
                depth += 1
            elif t.text in (b")", b"]", b"}"):
                depth -= 1
                if depth == 0:
                    break
            elif t.kind == "eof":
                break
            k += 1
        after = self.toks[min(k + 1, len(self.toks) - 1)]
        is_arrow = after.text == b"=>" or (self.ts and after.text == b":")
        if after.text == b":" and self.ts:
            # could be ternary branch `cond ? (x) : y`; require => after return type
            m = k + 2
            tdepth = 0
            found = False
            mlimit = min(len(self.toks) - 1, m + 200)
            while m <= mlimit:
                t = self.toks[m]
                if t.text in (b"(", b"[", b"{", b"<"):
                    tdepth += 1
                elif t.text in (b")", b"]", b"}"):
                    tdepth -= 1
                    if tdepth < 0:
                        break
                elif t.text == b"=>" and tdepth == 0:
                    found = True
                    break
                elif t.text in (b";", b",") and tdepth == 0:
                    break
                elif t.kind == "eof":
                    break
                m += 1
            is_arrow = found
        if not is_arrow:
            self.i = start
            return None
        if is_async:
            self.advance()
        params = self.parse_formal_parameters()
        if params is None:
            self.i = start
            return None
        params.role = "parameters"
        kids = [params]
        if self.ts and self.eat(b":"):
            t = self.parse_type()
            if t:
                t.role = "return_type"
                kids.append(t)
        if not self.eat(b"=>"):
            self.i = start
            return None
        body = self.parse_arrow_body()
        if body:
            kids.append(body)
        return self.node("arrow_function", kids, start_tok.start,
                         kids[-1].end)

    def parse_arrow_body(self) -> Node | None:
        if self.at(b"{"):
            body = self.parse_block()
            body.role = "body"
            return body
        body = self.parse_assignment_expr()
        if body:
            body.role = "body"
        return body

    def parse_conditional(self) -> Node | None:
        cond = self.parse_binary(0)
        if cond is None:
            return None
        if self.at(b"?") and self.peek().text != b"?.":
            self.advance()
            cons = self.parse_assignment_expr()
            kids = [cond] + ([cons] if cons else [])
            if self.eat(b":"):
                alt = self.parse_assignment_expr()
                if alt:
                    kids.append(alt)
            return self.node("ternary_expression", kids, cond.start, kids[-1].end)
        return cond

    def parse_binary(self, min_prec: int) -> Node | None:
        left = self.parse_unary()
        if left is None:
            return None
        while True:
            tok = self.peek()
            text = tok.text
            if self.ts and tok.kind == "ident" and text in (b"as", b"satisfies"):
                self.advance()
                if self.peek().kind == "keyword" and self.peek().text == b"const":
                    end_tok = self.advance()
                    left = self.node("as_expression", [left], left.start, end_tok.end)
                    continue
                t = self.parse_type()
                kids = [left] + ([t] if t else [])
                kind = "as_expression" if text == b"as" else "satisfies_expression"
                left = self.node(kind, kids, left.start, kids[-1].end)
                continue
            prec = _BINARY_PREC.get(text)
            if tok.kind not in ("punct", "keyword") or prec is None or prec < min_prec:
                return left
            self.advance()
            next_min = prec if text == b"**" else prec + 1
            right = self.parse_binary(next_min)
            kids = [left] + ([right] if right else [])
            left = self.node("binary_expression", kids, left.start, kids[-1].end)

    def parse_unary(self) -> Node | None:
        tok = self.peek()
        text = tok.text
        if text in (b"!", b"~", b"+", b"-"):
            op = self.advance()
            operand = self.parse_unary()
            return self.node("unary_expression", [operand] if operand else [],
                             op.start, operand.end if operand else op.end)
        if tok.kind == "keyword" and text in (b"typeof", b"void", b"delete"):
            op = self.advance()
            operand = self.parse_unary()
            return self.node("unary_expression", [operand] if operand else [],
                             op.start, operand.end if operand else op.end)
        if tok.kind == "keyword" and text == b"await":
            op = self.advance()
            operand = self.parse_unary()
            return self.node("await_expression", [operand] if operand else [],
                             op.start, operand.end if operand else op.end)
        if text in (b"++", b"--"):
            op = self.advance()
            operand = self.parse_unary()
            return self.node("update_expression", [operand] if operand else [],
                             op.start, operand.end if operand else op.end)
        return self.parse_postfix(self.parse_primary())

    def parse_postfix(self, node: Node | None) -> Node | None:
        if node is None:
            return None
        while True:
            tok = self.peek()
            text = tok.text
            if text == b"." or text == b"?.":
                self.advance()
                ntok = self.peek()
                if ntok.kind in ("ident", "keyword") or ntok.kind == "private":
                    kind = ("private_property_identifier" if ntok.kind == "private"
                            else "property_identifier")
                    prop = self.leaf(kind, self.advance(), role="property")
                    node.role = "object"
                    node = self.node("member_expression", [node, prop],
                                     node.start, prop.end)
                elif text == b"?." and ntok.text == b"(":
                    args = self.parse_arguments()
                    node = self.node("call_expression", [node, args],
                                     node.start, args.end)
                else:
                    break
            elif text == b"(":
                args = self.parse_arguments()
                node.role = "function"
                args.role = "arguments"
                node = self.node("call_expression", [node, args], node.start, args.end)
            elif text == b"[":
                lb = self.advance()
                idx = self.parse_expression()
                rb = self.eat(b"]")
                kids = [node] + ([idx] if idx else [])
                end = rb.end if rb else (idx.end if idx else lb.end)
                node = self.node("subscript_expression", kids, node.start, end)
            elif tok.kind == "template":
                tpl = self.parse_template_token()
                node = self.node("call_expression", [node, tpl], node.start, tpl.end)
            elif text == b"!" and self.ts:
                bang = self.advance()
                node = self.node("non_null_expression", [node], node.start, bang.end)
            elif text in (b"++", b"--") and tok.line == self.toks[self.i - 1].line:
                op = self.advance()
                node = self.node("update_expression", [node], node.start, op.end)
            elif text == b"<" and self.ts and self._looks_like_type_arguments():
                save = self.i
                args = self.parse_type_arguments()
                if args is not None and self.at(b"("):
                    call_args = self.parse_arguments()
                    node = self.node("call_expression", [node, args, call_args],
                                     node.start, call_args.end)
                else:
                    self.i = save
                    break
            else:
                break
        return node

    def _looks_like_type_arguments(self) -> bool:
        depth = 0
        k = self.i
        limit = min(len(self.toks) - 1, k + 120)
        while k <= limit:
            t = self.toks[k]
            if t.text == b"<":
                depth += 1
            elif t.kind == "punct" and t.text and set(t.text) == {62}:  # >, >>, >>>
                depth -= len(t.text)
                if depth <= 0:
                    nxt = self.toks[min(k + 1, len(self.toks) - 1)]
                    return nxt.text == b"("
            elif t.text in (b";", b"{", b"}") or t.kind == "eof":
                return False
            elif t.kind in ("string", "regex", "template"):
                return False
            k += 1
        return False

    def parse_arguments(self) -> Node:
        lp = self.advance()
        args = []
        while not self.at_eof() and not self.at(b")"):
            before = self.i
            if self.at(b"..."):
                dots = self.advance()
                inner = self.parse_assignment_expr()
                args.append(self.node("spread_element", [inner] if inner else [],
                                      dots.start, inner.end if inner else dots.end))
            else:
                arg = self.parse_assignment_expr()
                if arg is not None:
                    args.append(arg)
            if not self.eat(b","):
                if not self.at(b")") and self.i == before:
                    args.append(self.error_to({b")", b","}))
                if self.at(b")"):
                    break
                if self.i == before:
                    break
        rp = self.eat(b")")
        end = rp.end if rp else (args[-1].end if args else lp.end)
        return self.node("arguments", args, lp.start, end)

    def parse_template_token(self) -> Node:
        tok = self.advance()
        kids = []
        body = tok.text
        # locate top-level ${...} spans and sub-parse them as expressions
        i = 0
        while i < len(body):
            c = body[i : i + 1]
            if c == b"\\":
                i += 2
                continue
            if c == b"$" and body[i + 1 : i + 2] == b"{":
                depth = 1
                j = i + 2
                while j < len(body) and depth:
                    cj = body[j : j + 1]
                    if cj == b"\\":
                        j += 2
                        continue
                    if cj in (b"{",):
                        depth += 1
                    elif cj == b"}":
                        depth -= 1
                    elif cj in (b"'", b'"', b"`"):
                        q = cj
                        j += 1
                        while j < len(body):
                            ck = body[j : j + 1]
                            if ck == b"\\":
                                j += 2
                                continue
                            if ck == q:
                                break
                            j += 1
                    j += 1
                j = min(j, len(body))
                inner_start = tok.start + i + 2
                inner_end = max(inner_start, min(tok.start + j - 1, tok.end))
                sub = Parser(self.src[inner_start:inner_end], typescript=self.ts)
                expr = sub.parse_expression()
                if expr is not None:
                    _shift(expr, inner_start)
                subkids = [expr] if expr else []
                kids.append(Node("template_substitution", tok.start + i,
                                 min(inner_end + 1, tok.end), children=subkids))
                i = j
            else:
                i += 1
        return Node("template_string", tok.start, tok.end, children=kids)

    def parse_primary(self) -> Node | None:
        tok = self.peek()
        kind = tok.kind
        text = tok.text
        if kind == "ident":
            if self.ts and text == b"abstract" and self.peek(1).text == b"class":
                start = self.advance()
                cls = self.parse_class(declaration=False)
                cls.start = start.start
                return cls
            if text == b"async" and self.peek(1).text == b"function":
                return self.parse_function(declaration=False)
            return self.leaf("identifier", self.advance())
        if kind == "private":
            return self.leaf("private_property_identifier", self.advance())
        if kind == "number":
            return self.leaf("number", self.advance())
        if kind == "string":
            return self.leaf("string", self.advance())
        if kind == "regex":
            return self.leaf("regex", self.advance())
        if kind == "template":
            return self.parse_template_token()
        if kind == "keyword":
            if text == b"function":
                return self.parse_function(declaration=False)
            if text == b"class":
                return self.parse_class(declaration=False)
            if text == b"new":
                kw = self.advance()
                if self.at(b"."):  # new.target
                    self.advance()
                    t = self.advance()
                    return Node("meta_property", kw.start, t.end)
                callee = self.parse_primary()
                callee = self._member_chain_only(callee)
                kids = [callee] if callee else []
                if self.ts and self.at(b"<") and self._looks_like_type_arguments():
                    args = self.parse_type_arguments()
                    if args:
                        kids.append(args)
                if self.at(b"("):
                    args = self.parse_arguments()
                    kids.append(args)
                end = kids[-1].end if kids else kw.end
                return self.node("new_expression", kids, kw.start, end)
            if text in (b"this", b"super"):
                return self.leaf(text.decode(), self.advance())
            if text in (b"null", b"true", b"false", b"undefined"):
                return self.leaf(text.decode(), self.advance())
            if text == b"import":  # dynamic import
                kw = self.advance()
                kids = []
                if self.at(b"("):
                    kids.append(self.parse_arguments())
                return self.node("call_expression", kids, kw.start,
                                 kids[-1].end if kids else kw.end)
            if text == b"await":
                return self.parse_unary()
            return None
        if text == b"(":
            return self.parse_parenthesized()
        if text == b"[":
            return self.parse_array(pattern=False)
        if text == b"{":
            return self.parse_object(pattern=False)
        if text == b"...":
            dots = self.advance()
            inner = self.parse_assignment_expr()
            return self.node("spread_element", [inner] if inner else [],
                             dots.start, inner.end if inner else dots.end)
        if text == b"<" and self.ts:
            # legacy angle-bracket assertion or stray JSX: tolerate as error leaf
            return Node("error", tok.start, self.advance().end)
        return None

    def _member_chain_only(self, node: Node | None) -> Node | None:
        """Member accesses bind tighter than the new-expression call."""
        if node is None:
            return None
        while self.at(b".") :
            self.advance()
            ntok = self.peek()
            if ntok.kind in ("ident", "keyword"):
                prop = self.leaf("property_identifier", self.advance(), role="property")
                node = self.node("member_expression", [node, prop], node.start, prop.end)
            else:
                break
        return node

    def parse_array(self, pattern: bool) -> Node:
        lb = self.advance()
        elements = []
        while not self.at_eof() and not self.at(b"]"):
            before = self.i
            if self.at(b","):
                self.advance()
                continue
            if self.at(b"..."):
                dots = self.advance()
                inner = self.parse_assignment_expr()
                elements.append(self.node("spread_element", [inner] if inner else [],
                                          dots.start, inner.end if inner else dots.end))
            else:
                el = self.parse_assignment_expr()
                if el is not None:
                    elements.append(el)
            if self.i == before:
                elements.append(self.error_to({b"]", b","}))
        rb = self.eat(b"]")
        kind = "array_pattern" if pattern else "array"
        return self.node(kind, elements, lb.start,
                         rb.end if rb else (elements[-1].end if elements else lb.end))

    def parse_object(self, pattern: bool) -> Node:
        lb = self.advance()
        members = []
        while not self.at_eof() and not self.at(b"}"):
            before = self.i
            if self.at(b","):
                self.advance()
                continue
            member = self.parse_object_member(pattern)
            if member is not None:
                members.append(member)
            if self.i == before:
                members.append(self.error_to({b"}", b","}))
        rb = self.eat(b"}")
        kind = "object_pattern" if pattern else "object"
        return self.node(kind, members, lb.start,
                         rb.end if rb else (members[-1].end if members else lb.end))

    def parse_object_member(self, pattern: bool) -> Node | None:
        tok = self.peek()
        if tok.text == b"...":
            dots = self.advance()
            inner = self.parse_assignment_expr()
            return self.node("spread_element", [inner] if inner else [],
                             dots.start, inner.end if inner else dots.end)
        # method shorthand: async/get/set/* name(
        probe = 0
        while self.peek(probe).kind == "ident" and \
                self.peek(probe).text in (b"async", b"get", b"set") and \
                self.peek(probe + 1).text not in (b",", b":", b"}", b"("):
            probe += 1
        if self.peek(probe).text == b"*":
            probe += 1
        name_tok = self.peek(probe)
        after = self.peek(probe + 1)
        if name_tok.kind in ("ident", "keyword", "string", "number") and after.text == b"(":
            for _ in range(probe):
                self.advance()
            name = self.parse_property_name()
            kids = [name] if name else []
            params = self.parse_formal_parameters()
            if params:
                params.role = "parameters"
                kids.append(params)
            if self.ts and self.eat(b":"):
                t = self.parse_type()
                if t:
                    kids.append(t)
            if self.at(b"{"):
                body = self.parse_block()
                body.role = "body"
                kids.append(body)
            return self.node("method_definition", kids, tok.start,
                             kids[-1].end if kids else tok.end)
        name = self.parse_property_name()
        if name is None:
            if tok.text == b"[":
                return None
            return None
        if self.eat(b":"):
            value = self.parse_assignment_expr()
            kids = [name] + ([value] if value else [])
            name.role = "key"
            if value:
                value.role = "value"
            return self.node("pair", kids, name.start, kids[-1].end)
        if self.eat(b"="):
            value = self.parse_assignment_expr()
            kids = [Node("shorthand_property_identifier", name.start, name.end)]
            if value:
                kids.append(value)
            return self.node("object_assignment_pattern", kids, name.start, kids[-1].end)
        return Node("shorthand_property_identifier", name.start, name.end)


def _shift(node: Node, delta: int) -> None:
    for n in node.walk():
        n.start += delta
        n.end += delta


def parse_ecmascript(source: bytes, typescript: bool = False) -> SyntaxTree:
    return Parser(source, typescript=typescript).parse()
