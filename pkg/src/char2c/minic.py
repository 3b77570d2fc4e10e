"""Lexer, parser and interpreter for the restricted C subset the corpus lives in.

The subset: one main function (int or void), int scalars and 1-D fixed-size
arrays, if/else, for, while, return, blocks, the usual integer operators,
and scanf/printf with %d. Lines starting with # are skipped wholesale, so
'#include <stdio.h>' is tolerated. check_syntax never raises on any input;
run_program reports faults (overflow, bad index, exhausted input, ...)
through its outcome instead of throwing.
"""

from dataclasses import dataclass

INT_MIN = -(1 << 63)
INT_MAX = (1 << 63) - 1

KEYWORDS = {"int", "void", "if", "else", "for", "while", "return"}
BUILTINS = {"scanf", "printf"}

_TWO_CHAR_OPS = ("||", "&&", "==", "!=", "<=", ">=", "++", "--", "+=", "-=")
_ONE_CHAR_OPS = set("=<>+-*/%!&")
_PUNCT = set("(){}[],;")
_WHITESPACE = set(" \t\r\n\v\f")

_MAX_EXPR_DEPTH = 64
_MAX_STMT_DEPTH = 128


class MiniCError(Exception):
    """Lex/parse/semantic failure with a byte offset into the source."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.message = message
        self.offset = offset


class LexError(MiniCError):
    pass


class ParseError(MiniCError):
    pass


class SemanticError(MiniCError):
    pass


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str     # kw | id | int | str | op | punct | eof
    lexeme: str   # raw source slice
    offset: int   # byte offset of the first character
    value: str | None = None  # decoded content, string literals only

_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", '"': '"', "0": "\0"}


def lex(text: str) -> list[Token]:
    """Longest-match tokenization; trivia (spaces, comments, #-lines) skipped."""
    toks: list[Token] = []
    i = 0
    bpos = 0  # byte offset of text[i]
    n = len(text)
    line_blank = True  # only whitespace seen since the last newline

    def advance(k: int = 1):
        nonlocal i, bpos
        for _ in range(k):
            bpos += len(text[i].encode("utf-8"))
            i += 1

    while i < n:
        ch = text[i]
        if ch in _WHITESPACE:
            if ch == "\n":
                line_blank = True
            advance()
            continue
        if ch == "#" and line_blank:
            while i < n and text[i] != "\n":
                advance()
            continue
        line_blank = False
        if ch == "/" and i + 1 < n and text[i + 1] == "/":
            while i < n and text[i] != "\n":
                advance()
            continue
        if ch == "/" and i + 1 < n and text[i + 1] == "*":
            start = bpos
            advance(2)
            while True:
                if i >= n:
                    raise LexError("unterminated block comment", start)
                if text[i] == "*" and i + 1 < n and text[i + 1] == "/":
                    advance(2)
                    break
                advance()
            continue
        start = bpos
        if ch.isascii() and (ch.isalpha() or ch == "_"):
            j = i
            while j < n and text[j].isascii() and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            advance(j - i)
            toks.append(Token("kw" if word in KEYWORDS else "id", word, start))
            continue
        if ch.isascii() and ch.isdigit():
            j = i
            while j < n and text[j].isascii() and text[j].isdigit():
                j += 1
            lit = text[i:j]
            advance(j - i)
            toks.append(Token("int", lit, start))
            continue
        if ch == '"':
            j = i + 1
            decoded = []
            while True:
                if j >= n or text[j] == "\n":
                    raise LexError("unterminated string literal", start)
                c = text[j]
                if c == '"':
                    j += 1
                    break
                if c == "\\":
                    if j + 1 >= n or text[j + 1] not in _ESCAPES:
                        raise LexError("unsupported escape sequence in string", start)
                    decoded.append(_ESCAPES[text[j + 1]])
                    j += 2
                    continue
                decoded.append(c)
                j += 1
            raw = text[i:j]
            advance(j - i)
            toks.append(Token("str", raw, start, value="".join(decoded)))
            continue
        two = text[i:i + 2]
        if two in _TWO_CHAR_OPS:
            advance(2)
            toks.append(Token("op", two, start))
            continue
        if ch in _ONE_CHAR_OPS:
            advance()
            toks.append(Token("op", ch, start))
            continue
        if ch in _PUNCT:
            advance()
            toks.append(Token("punct", ch, start))
            continue
        raise LexError(f"illegal character {ch!r}", start)
    toks.append(Token("eof", "", bpos))
    return toks


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass
class IntLit:
    value: int
    offset: int

@dataclass
class Var:
    name: str
    offset: int

@dataclass
class Index:
    name: str
    index: "Expr"
    offset: int

@dataclass
class Assign:
    target: "Expr"  # Var or Index
    op: str         # = | += | -=
    value: "Expr"
    offset: int

@dataclass
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    offset: int

@dataclass
class Unary:
    op: str  # - | !
    operand: "Expr"
    offset: int

@dataclass
class Postfix:
    op: str  # ++ | --
    target: "Expr"  # Var or Index
    offset: int

@dataclass
class Call:
    name: str       # scanf | printf
    fmt: str        # decoded format string
    args: list
    offset: int

Expr = IntLit | Var | Index | Assign | Binary | Unary | Postfix | Call

@dataclass
class Declarator:
    name: str
    size: int | None     # None for scalars
    init: Expr | None
    offset: int

@dataclass
class Decl:
    declarators: list[Declarator]
    offset: int

@dataclass
class Block:
    items: list
    offset: int

@dataclass
class EmptyStmt:
    offset: int

@dataclass
class If:
    cond: Expr
    then_stmt: object
    else_stmt: object | None
    offset: int

@dataclass
class For:
    init: object | None  # Decl | Expr | None
    cond: Expr | None
    step: Expr | None
    body: object
    offset: int

@dataclass
class While:
    cond: Expr
    body: object
    offset: int

@dataclass
class Return:
    value: Expr | None
    offset: int

@dataclass
class ExprStmt:
    expr: Expr
    offset: int

@dataclass
class Program:
    ret_void: bool  # True for 'void main'
    body: Block
    offset: int


@dataclass
class SyntaxReport:
    valid: bool
    error_offset: int | None = None
    message: str | None = None


# ---------------------------------------------------------------------------
# Parser (with scope resolution and scanf/printf arity checks)
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0
        self.scopes: list[dict[str, tuple[str, int | None]]] = []
        self.ret_void = False
        self.expr_depth = 0
        self.stmt_depth = 0

    # --- token helpers ---

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def at(self, kind: str, lexeme: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (lexeme is None or tok.lexeme == lexeme)

    def expect(self, kind: str, lexeme: str | None = None, what: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind == kind and (lexeme is None or tok.lexeme == lexeme):
            self.pos += 1
            return tok
        expected = what or (repr(lexeme) if lexeme else kind)
        found = repr(tok.lexeme) if tok.kind != "eof" else "end of input"
        raise ParseError(f"expected {expected}, found {found}", tok.offset)

    # --- scopes ---

    def declare(self, name: str, kind: str, size: int | None, offset: int):
        scope = self.scopes[-1]
        if name in scope:
            raise SemanticError(f"redeclaration of {name!r} in the same scope", offset)
        scope[name] = (kind, size)

    def resolve(self, name: str, offset: int) -> tuple[str, int | None]:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        raise SemanticError(f"undeclared identifier {name!r}", offset)

    # --- grammar ---

    def parse_program(self) -> Program:
        tok = self.peek()
        if tok.kind == "kw" and tok.lexeme in ("int", "void"):
            self.next()
        else:
            found = repr(tok.lexeme) if tok.kind != "eof" else "end of input"
            raise ParseError(f"expected 'int' or 'void' at start of program, found {found}",
                             tok.offset)
        self.ret_void = tok.lexeme == "void"
        name = self.expect("id", what="'main'")
        if name.lexeme != "main":
            raise ParseError(f"expected 'main', found {name.lexeme!r}", name.offset)
        self.expect("punct", "(")
        if self.at("kw", "void"):
            self.next()
        self.expect("punct", ")")
        body = self.parse_block()
        end = self.peek()
        if end.kind != "eof":
            raise ParseError(f"unexpected trailing input {end.lexeme!r} after main", end.offset)
        return Program(self.ret_void, body, tok.offset)

    def parse_block(self) -> Block:
        open_tok = self.expect("punct", "{")
        self.scopes.append({})
        items = []
        while not self.at("punct", "}"):
            if self.peek().kind == "eof":
                raise ParseError("expected '}' before end of input", self.peek().offset)
            if self.at("kw", "int"):
                items.append(self.parse_decl())
            else:
                items.append(self.parse_stmt())
        self.next()
        self.scopes.pop()
        return Block(items, open_tok.offset)

    def parse_decl(self, need_semicolon: bool = True) -> Decl:
        kw = self.expect("kw", "int")
        declarators = [self.parse_declarator()]
        while self.at("punct", ","):
            self.next()
            declarators.append(self.parse_declarator())
        if need_semicolon:
            self.expect("punct", ";")
        return Decl(declarators, kw.offset)

    def parse_declarator(self) -> Declarator:
        name = self.expect("id", what="identifier")
        if name.lexeme in BUILTINS:
            raise SemanticError(f"cannot declare a variable named {name.lexeme!r}", name.offset)
        size = None
        if self.at("punct", "["):
            self.next()
            lit = self.expect("int", what="array size (integer literal)")
            size = int(lit.lexeme)
            if size < 1:
                raise SemanticError("array size must be a positive integer literal", lit.offset)
            if size > INT_MAX:
                raise SemanticError("array size out of range", lit.offset)
            self.expect("punct", "]")
        init = None
        if self.at("op", "="):
            eq = self.next()
            if size is not None:
                raise SemanticError("array initializers are not supported", eq.offset)
            init = self.parse_expr()
        self.declare(name.lexeme, "array" if size is not None else "scalar", size, name.offset)
        return Declarator(name.lexeme, size, init, name.offset)

    def parse_stmt(self):
        self.stmt_depth += 1
        if self.stmt_depth > _MAX_STMT_DEPTH:
            raise ParseError("statement nesting too deep", self.peek().offset)
        try:
            tok = self.peek()
            if tok.kind == "punct" and tok.lexeme == "{":
                return self.parse_block()
            if tok.kind == "punct" and tok.lexeme == ";":
                self.next()
                return EmptyStmt(tok.offset)
            if tok.kind == "kw":
                if tok.lexeme == "if":
                    return self.parse_if()
                if tok.lexeme == "for":
                    return self.parse_for()
                if tok.lexeme == "while":
                    return self.parse_while()
                if tok.lexeme == "return":
                    return self.parse_return()
                if tok.lexeme == "else":
                    raise ParseError("'else' without a matching 'if'", tok.offset)
                if tok.lexeme in ("int", "void"):
                    raise ParseError(f"declaration not allowed here", tok.offset)
            expr = self.parse_expr()
            self.expect("punct", ";")
            return ExprStmt(expr, tok.offset)
        finally:
            self.stmt_depth -= 1

    def parse_if(self) -> If:
        kw = self.expect("kw", "if")
        self.expect("punct", "(")
        cond = self.parse_expr()
        self.expect("punct", ")")
        then_stmt = self.parse_stmt()
        else_stmt = None
        if self.at("kw", "else"):
            self.next()
            else_stmt = self.parse_stmt()
        return If(cond, then_stmt, else_stmt, kw.offset)

    def parse_for(self) -> For:
        kw = self.expect("kw", "for")
        self.expect("punct", "(")
        self.scopes.append({})  # a for-init declaration scopes over the whole loop
        init = None
        if not self.at("punct", ";"):
            if self.at("kw", "int"):
                init = self.parse_decl(need_semicolon=False)
            else:
                init = self.parse_expr()
        self.expect("punct", ";")
        cond = None if self.at("punct", ";") else self.parse_expr()
        self.expect("punct", ";")
        step = None if self.at("punct", ")") else self.parse_expr()
        self.expect("punct", ")")
        body = self.parse_stmt()
        self.scopes.pop()
        return For(init, cond, step, body, kw.offset)

    def parse_while(self) -> While:
        kw = self.expect("kw", "while")
        self.expect("punct", "(")
        cond = self.parse_expr()
        self.expect("punct", ")")
        return While(cond, self.parse_stmt(), kw.offset)

    def parse_return(self) -> Return:
        kw = self.expect("kw", "return")
        value = None
        if not self.at("punct", ";"):
            value = self.parse_expr()
            if self.ret_void:
                raise SemanticError("void main cannot return a value", kw.offset)
        self.expect("punct", ";")
        return Return(value, kw.offset)

    # --- expressions ---

    def parse_expr(self) -> Expr:
        self.expr_depth += 1
        if self.expr_depth > _MAX_EXPR_DEPTH:
            raise ParseError("expression nesting too deep", self.peek().offset)
        try:
            return self.parse_assignment()
        finally:
            self.expr_depth -= 1

    def parse_assignment(self) -> Expr:
        left = self.parse_or()
        tok = self.peek()
        if tok.kind == "op" and tok.lexeme in ("=", "+=", "-="):
            self.next()
            self.require_lvalue(left, tok.offset)
            right = self.parse_assignment()
            return Assign(left, tok.lexeme, right, tok.offset)
        return left

    def require_lvalue(self, expr: Expr, offset: int):
        if isinstance(expr, Index):
            return
        if isinstance(expr, Var):
            kind, _ = self.resolve(expr.name, expr.offset)
            if kind == "array":
                raise SemanticError(f"array {expr.name!r} is not assignable as a whole", offset)
            return
        raise SemanticError("assignment target is not a variable or array element", offset)

    def _binary_level(self, ops: tuple[str, ...], sub):
        left = sub()
        while self.peek().kind == "op" and self.peek().lexeme in ops:
            tok = self.next()
            left = Binary(tok.lexeme, left, sub(), tok.offset)
        return left

    def parse_or(self):
        return self._binary_level(("||",), self.parse_and)

    def parse_and(self):
        return self._binary_level(("&&",), self.parse_eq)

    def parse_eq(self):
        return self._binary_level(("==", "!="), self.parse_rel)

    def parse_rel(self):
        return self._binary_level(("<", ">", "<=", ">="), self.parse_add)

    def parse_add(self):
        return self._binary_level(("+", "-"), self.parse_mul)

    def parse_mul(self):
        return self._binary_level(("*", "/", "%"), self.parse_unary)

    def parse_unary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "op" and tok.lexeme in ("-", "!"):
            self.expr_depth += 1
            if self.expr_depth > _MAX_EXPR_DEPTH:
                raise ParseError("expression nesting too deep", tok.offset)
            try:
                self.next()
                return Unary(tok.lexeme, self.parse_unary(), tok.offset)
            finally:
                self.expr_depth -= 1
        return self.parse_postfix()

    def parse_postfix(self) -> Expr:
        expr = self.parse_primary()
        while True:
            tok = self.peek()
            if tok.kind == "punct" and tok.lexeme == "[":
                self.next()
                index = self.parse_expr()
                self.expect("punct", "]")
                if not isinstance(expr, Var):
                    raise SemanticError("only a named array can be subscripted", tok.offset)
                kind, _ = self.resolve(expr.name, expr.offset)
                if kind != "array":
                    raise SemanticError(f"subscripted variable {expr.name!r} is not an array", tok.offset)
                expr = Index(expr.name, index, tok.offset)
            elif tok.kind == "op" and tok.lexeme in ("++", "--"):
                self.next()
                self.require_lvalue(expr, tok.offset)
                expr = Postfix(tok.lexeme, expr, tok.offset)
            else:
                return expr

    def parse_primary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "int":
            self.next()
            value = int(tok.lexeme)
            if value > INT_MAX:
                raise SemanticError("integer literal out of range", tok.offset)
            return IntLit(value, tok.offset)
        if tok.kind == "id":
            if tok.lexeme in BUILTINS:
                return self.parse_call()
            self.next()
            if self.at("punct", "("):
                raise SemanticError(f"unknown function {tok.lexeme!r}; only scanf and printf exist",
                                    tok.offset)
            kind, _ = self.resolve(tok.lexeme, tok.offset)
            if kind == "array" and not self.at("punct", "["):
                raise SemanticError(f"array {tok.lexeme!r} used without a subscript", tok.offset)
            return Var(tok.lexeme, tok.offset)
        if tok.kind == "punct" and tok.lexeme == "(":
            self.next()
            expr = self.parse_expr()
            self.expect("punct", ")")
            return expr
        found = repr(tok.lexeme) if tok.kind != "eof" else "end of input"
        raise ParseError(f"expected an expression, found {found}", tok.offset)

    def parse_call(self) -> Call:
        name = self.next()  # scanf | printf
        self.expect("punct", "(")
        fmt_tok = self.expect("str", what="format string literal")
        fmt = fmt_tok.value or ""
        args = []
        while self.at("punct", ","):
            self.next()
            if name.lexeme == "scanf":
                amp = self.expect("op", "&", what="'&' before a scanf target")
                args.append(self.parse_scanf_target(amp.offset))
            else:
                args.append(self.parse_expr())
        self.expect("punct", ")")
        n_spec = self._check_format(name.lexeme, fmt, fmt_tok.offset)
        if n_spec != len(args):
            raise SemanticError(
                f"{name.lexeme} format has {n_spec} %d specifier(s) but {len(args)} argument(s)",
                name.offset)
        return Call(name.lexeme, fmt, args, name.offset)

    def parse_scanf_target(self, offset: int) -> Expr:
        name = self.expect("id", what="variable name after '&'")
        kind, _ = self.resolve(name.lexeme, name.offset)
        if self.at("punct", "["):
            self.next()
            index = self.parse_expr()
            self.expect("punct", "]")
            if kind != "array":
                raise SemanticError(f"subscripted variable {name.lexeme!r} is not an array", name.offset)
            return Index(name.lexeme, index, name.offset)
        if kind == "array":
            raise SemanticError(f"scanf target must be a scalar or array element, got array {name.lexeme!r}",
                                name.offset)
        return Var(name.lexeme, name.offset)

    def _check_format(self, func: str, fmt: str, offset: int) -> int:
        n_spec = 0
        i = 0
        while i < len(fmt):
            if fmt[i] == "%":
                if i + 1 < len(fmt) and fmt[i + 1] == "d":
                    n_spec += 1
                    i += 2
                    continue
                raise SemanticError(f"unsupported format directive in {func} (only %d)", offset)
            if func == "scanf" and fmt[i] not in " \t\n":
                raise SemanticError("scanf format may contain only %d and whitespace", offset)
            i += 1
        return n_spec


def parse(tokens: list[Token]) -> Program:
    return _Parser(tokens).parse_program()


def parse_text(text: str) -> Program:
    return parse(lex(text))


def check_syntax(text: str) -> SyntaxReport:
    """Lex + parse, reported instead of raised; never crashes on any input."""
    try:
        parse_text(text)
        return SyntaxReport(True)
    except MiniCError as e:
        return SyntaxReport(False, e.offset, e.message)
    except RecursionError:
        return SyntaxReport(False, 0, "input too deeply nested")


# ---------------------------------------------------------------------------
# Interpreter
# ---------------------------------------------------------------------------

@dataclass
class RunOutcome:
    status: str   # ok | runtime-error | step-limit
    stdout: str
    steps: int
    error: str = ""
    error_offset: int | None = None


class _Fault(Exception):
    def __init__(self, message: str, offset: int):
        self.message = message
        self.offset = offset


class _StepLimit(Exception):
    pass


class _Halt(Exception):
    pass


class _Interp:
    def __init__(self, stdin_text: str, step_limit: int):
        self.tokens = stdin_text.split()
        self.next_token = 0
        self.step_limit = step_limit
        self.steps = 0
        self.out: list[str] = []
        self.scopes: list[dict] = []

    def tick(self):
        self.steps += 1
        if self.steps > self.step_limit:
            raise _StepLimit()

    def lookup(self, name: str):
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        raise AssertionError(f"unresolved name {name} escaped the parser")

    def store(self, name: str, value):
        for scope in reversed(self.scopes):
            if name in scope:
                scope[name] = value
                return
        raise AssertionError(f"unresolved name {name} escaped the parser")

    @staticmethod
    def check_range(value: int, offset: int) -> int:
        if value < INT_MIN or value > INT_MAX:
            raise _Fault("integer overflow", offset)
        return value

    # --- statements ---

    def exec_block(self, block: Block):
        self.scopes.append({})
        try:
            for item in block.items:
                self.exec_item(item)
        finally:
            self.scopes.pop()

    def exec_item(self, node):
        self.tick()
        match node:
            case Decl():
                for d in node.declarators:
                    if d.size is not None:
                        if d.size > 1_000_000:
                            raise _Fault(f"array of {d.size} elements exceeds the interpreter cap", d.offset)
                        self.scopes[-1][d.name] = [None] * d.size
                    else:
                        value = self.eval(d.init) if d.init is not None else None
                        self.scopes[-1][d.name] = value
            case Block():
                self.exec_block(node)
            case EmptyStmt():
                pass
            case ExprStmt():
                self.eval(node.expr)
            case If():
                if self.eval(node.cond) != 0:
                    self.exec_item(node.then_stmt)
                elif node.else_stmt is not None:
                    self.exec_item(node.else_stmt)
            case While():
                while self.eval(node.cond) != 0:
                    self.exec_item(node.body)
            case For():
                self.scopes.append({})
                try:
                    if isinstance(node.init, Decl):
                        self.exec_item(node.init)
                    elif node.init is not None:
                        self.eval(node.init)
                    while node.cond is None or self.eval(node.cond) != 0:
                        self.exec_item(node.body)
                        if node.step is not None:
                            self.eval(node.step)
                finally:
                    self.scopes.pop()
            case Return():
                if node.value is not None:
                    self.eval(node.value)
                raise _Halt()
            case _:
                raise AssertionError(f"unknown statement node {node!r}")

    # --- expressions ---

    def load(self, target) -> int:
        """Read an lvalue's current value; uninitialized reads are faults."""
        if isinstance(target, Var):
            value = self.lookup(target.name)
            if isinstance(value, list):
                raise _Fault(f"array {target.name!r} used as a value", target.offset)
            if value is None:
                raise _Fault(f"use of uninitialized variable {target.name!r}", target.offset)
            return value
        arr, idx = self.locate(target)
        value = arr[idx]
        if value is None:
            raise _Fault(f"use of uninitialized element {target.name}[{idx}]", target.offset)
        return value

    def locate(self, target: Index):
        arr = self.lookup(target.name)
        if not isinstance(arr, list):
            raise _Fault(f"subscripted variable {target.name!r} is not an array", target.offset)
        idx = self.eval(target.index)
        if not 0 <= idx < len(arr):
            raise _Fault(f"array index out of bounds: {target.name}[{idx}], size {len(arr)}",
                         target.offset)
        return arr, idx

    def assign(self, target, value: int):
        if isinstance(target, Var):
            self.store(target.name, value)
        else:
            arr, idx = self.locate(target)
            arr[idx] = value

    def eval(self, node) -> int:
        self.tick()
        match node:
            case IntLit():
                return node.value
            case Var() | Index():
                return self.load(node)
            case Assign():
                if node.op == "=":
                    value = self.eval(node.value)
                else:
                    old = self.load(node.target)
                    rhs = self.eval(node.value)
                    value = old + rhs if node.op == "+=" else old - rhs
                    value = self.check_range(value, node.offset)
                self.assign(node.target, value)
                return value
            case Binary():
                return self.eval_binary(node)
            case Unary():
                value = self.eval(node.operand)
                if node.op == "-":
                    return self.check_range(-value, node.offset)
                return 1 if value == 0 else 0
            case Postfix():
                old = self.load(node.target)
                delta = 1 if node.op == "++" else -1
                self.assign(node.target, self.check_range(old + delta, node.offset))
                return old
            case Call():
                return self.eval_call(node)
            case _:
                raise AssertionError(f"unknown expression node {node!r}")

    def eval_binary(self, node: Binary) -> int:
        op = node.op
        if op == "&&":
            if self.eval(node.left) == 0:
                return 0
            return 1 if self.eval(node.right) != 0 else 0
        if op == "||":
            if self.eval(node.left) != 0:
                return 1
            return 1 if self.eval(node.right) != 0 else 0
        a = self.eval(node.left)
        b = self.eval(node.right)
        if op == "+":
            return self.check_range(a + b, node.offset)
        if op == "-":
            return self.check_range(a - b, node.offset)
        if op == "*":
            return self.check_range(a * b, node.offset)
        if op in ("/", "%"):
            if b == 0:
                raise _Fault("division by zero" if op == "/" else "modulo by zero", node.offset)
            q = abs(a) // abs(b)
            if (a < 0) != (b < 0):
                q = -q
            if op == "/":
                return self.check_range(q, node.offset)
            return self.check_range(a - b * q, node.offset)
        if op == "<":
            return 1 if a < b else 0
        if op == ">":
            return 1 if a > b else 0
        if op == "<=":
            return 1 if a <= b else 0
        if op == ">=":
            return 1 if a >= b else 0
        if op == "==":
            return 1 if a == b else 0
        if op == "!=":
            return 1 if a != b else 0
        raise AssertionError(f"unknown operator {op}")

    def eval_call(self, node: Call) -> int:
        n_spec = node.fmt.count("%d")
        if n_spec != len(node.args):
            raise _Fault(f"{node.name} format has {n_spec} %d specifier(s) but "
                         f"{len(node.args)} argument(s)", node.offset)
        if node.name == "scanf":
            for target in node.args:
                if self.next_token >= len(self.tokens):
                    raise _Fault("scanf: input exhausted", node.offset)
                raw = self.tokens[self.next_token]
                self.next_token += 1
                if not _is_int_token(raw):
                    raise _Fault(f"scanf: invalid integer token {raw!r}", node.offset)
                value = int(raw)
                if value < INT_MIN or value > INT_MAX:
                    raise _Fault(f"scanf: input value {raw} out of range", node.offset)
                self.assign(target, value)
            return len(node.args)
        # printf
        values = [self.eval(a) for a in node.args]
        pieces = []
        i = 0
        k = 0
        while i < len(node.fmt):
            if node.fmt[i] == "%" and i + 1 < len(node.fmt) and node.fmt[i + 1] == "d":
                pieces.append(str(values[k]))
                k += 1
                i += 2
            else:
                pieces.append(node.fmt[i])
                i += 1
        text = "".join(pieces)
        self.out.append(text)
        return len(text)


def _is_int_token(raw: str) -> bool:
    body = raw[1:] if raw and raw[0] in "+-" else raw
    return body.isascii() and body.isdigit() and len(body) > 0


def run_program(ast: Program, stdin_text: str, step_limit: int = 1_000_000) -> RunOutcome:
    """Deterministically evaluate main against the given stdin.

    Faults (overflow, bad index, exhausted input, ...) and the step limit are
    reported in the outcome, never raised.
    """
    if step_limit < 1:
        raise ValueError("step_limit must be >= 1")
    interp = _Interp(stdin_text, step_limit)
    try:
        interp.exec_block(ast.body)
        return RunOutcome("ok", "".join(interp.out), interp.steps)
    except _Halt:
        return RunOutcome("ok", "".join(interp.out), interp.steps)
    except _Fault as f:
        return RunOutcome("runtime-error", "".join(interp.out), interp.steps,
                          f.message, f.offset)
    except _StepLimit:
        return RunOutcome("step-limit", "".join(interp.out), step_limit,
                          "step limit reached")


def run_source(text: str, stdin_text: str, step_limit: int = 1_000_000) -> RunOutcome:
    """parse_text + run_program; lex/parse/semantic errors still raise MiniCError."""
    return run_program(parse_text(text), stdin_text, step_limit)
