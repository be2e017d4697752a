"""SnipLang front end: lexer, parser, static validation and pretty printer.

Grammar::

    program := "fn" IDENT "(" [param ("," param)*] ")" "->" type block
    param   := IDENT ":" type
    type    := "int" | "bool" | "[int]"
    block   := "{" stmt* "}"
    stmt    := "let" IDENT "=" expr ";" | IDENT "=" expr ";"
             | IDENT "[" expr "]" "=" expr ";"
             | "if" expr block ["else" block]
             | "while" expr block
             | "for" IDENT "in" expr ".." expr block
             | "return" expr ";"

Binary operators, loosest first: ``||``, ``&&``, comparisons, ``+ -``,
``* / %``; all left-associative.  Unary ``-`` and ``!`` bind tightest.
Integer division truncates toward zero and ``%`` takes the sign of the
dividend.  Arrays are values: ``let b = a;`` copies.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

from .nodes import (
    Assign,
    Binary,
    BoolLit,
    Expr,
    For,
    If,
    Index,
    IndexAssign,
    IntLit,
    Len,
    Let,
    Name,
    Param,
    Program,
    Return,
    SnipType,
    Sorted,
    Stmt,
    Unary,
    While,
)

KEYWORDS = {
    "fn", "let", "if", "else", "while", "for", "in", "return",
    "true", "false", "int", "bool", "len", "sorted",
}

# longest match first
_PUNCT = [
    "->", "..", "==", "!=", "<=", ">=", "&&", "||",
    "(", ")", "{", "}", "[", "]", ",", ";", ":", "=", "<", ">",
    "+", "-", "*", "/", "%", "!",
]

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n\f\v]+)"
    r"|(?P<comment>//[^\n]*)"
    r"|(?P<int>[0-9]+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<punct>" + "|".join(re.escape(p) for p in _PUNCT) + ")"
)

BINARY_PRECEDENCE = {
    "||": 1,
    "&&": 2,
    "==": 3, "!=": 3, "<": 3, "<=": 3, ">": 3, ">=": 3,
    "+": 4, "-": 4,
    "*": 5, "/": 5, "%": 5,
}
UNARY_PRECEDENCE = 6


class SnipSyntaxError(Exception):
    def __init__(self, message: str, pos: Tuple[int, int]):
        super().__init__(f"{pos[0]}:{pos[1]}: {message}")
        self.message = message
        self.pos = pos


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "ident", "kw", "punct", "eof"
    text: str
    pos: Tuple[int, int]


def tokenize(text: str) -> List[Token]:
    tokens = []
    line, line_start, i = 1, 0, 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise SnipSyntaxError(f"unexpected character {text[i]!r}", (line, i - line_start + 1))
        kind = m.lastgroup
        value = m.group()
        pos = (line, i - line_start + 1)
        if kind == "ident" and value in KEYWORDS:
            kind = "kw"
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, value, pos))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = i + value.rindex("\n") + 1
        i = m.end()
    tokens.append(Token("eof", "", (line, i - line_start + 1)))
    return tokens


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def _describe(self, tok: Token) -> str:
        return "end of input" if tok.kind == "eof" else repr(tok.text)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("kw", "punct") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise SnipSyntaxError(f"expected {text!r}, found {self._describe(self.tok)}", self.tok.pos)
        return self.advance()

    def advance(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            raise SnipSyntaxError(f"expected identifier, found {self._describe(self.tok)}", self.tok.pos)
        return self.advance()

    def program(self) -> Program:
        self.expect("fn")
        name = self.ident().text
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.param())
            while self.at(","):
                self.advance()
                params.append(self.param())
        self.expect(")")
        self.expect("->")
        ret = self.type_()
        body = self.block()
        if self.tok.kind != "eof":
            raise SnipSyntaxError(f"unexpected {self._describe(self.tok)} after function body", self.tok.pos)
        return Program(name, tuple(params), ret, body)

    def param(self) -> Param:
        name = self.ident().text
        self.expect(":")
        return Param(name, self.type_())

    def type_(self) -> SnipType:
        if self.at("int"):
            self.advance()
            return SnipType.INT
        if self.at("bool"):
            self.advance()
            return SnipType.BOOL
        if self.at("["):
            self.advance()
            self.expect("int")
            self.expect("]")
            return SnipType.INT_ARRAY
        raise SnipSyntaxError(f"expected a type, found {self._describe(self.tok)}", self.tok.pos)

    def block(self) -> Tuple[Stmt, ...]:
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise SnipSyntaxError("unterminated block, expected '}'", self.tok.pos)
            stmts.append(self.stmt())
        self.advance()
        return tuple(stmts)

    def stmt(self) -> Stmt:
        pos = self.tok.pos
        if self.at("let"):
            self.advance()
            name = self.ident().text
            self.expect("=")
            value = self.expr()
            self.expect(";")
            return Let(name, value, pos)
        if self.at("if"):
            self.advance()
            cond = self.expr()
            then = self.block()
            orelse = None
            if self.at("else"):
                self.advance()
                orelse = self.block()
            return If(cond, then, orelse, pos)
        if self.at("while"):
            self.advance()
            cond = self.expr()
            return While(cond, self.block(), pos)
        if self.at("for"):
            self.advance()
            var = self.ident().text
            self.expect("in")
            lo = self.expr()
            self.expect("..")
            hi = self.expr()
            return For(var, lo, hi, self.block(), pos)
        if self.at("return"):
            self.advance()
            value = self.expr()
            self.expect(";")
            return Return(value, pos)
        if self.tok.kind == "ident":
            name = self.advance().text
            if self.at("["):
                self.advance()
                index = self.expr()
                self.expect("]")
                self.expect("=")
                value = self.expr()
                self.expect(";")
                return IndexAssign(name, index, value, pos)
            self.expect("=")
            value = self.expr()
            self.expect(";")
            return Assign(name, value, pos)
        raise SnipSyntaxError(f"expected a statement, found {self._describe(self.tok)}", pos)

    def expr(self, min_prec: int = 1) -> Expr:
        left = self.unary()
        while self.tok.kind == "punct" and BINARY_PRECEDENCE.get(self.tok.text, 0) >= min_prec:
            op_tok = self.advance()
            prec = BINARY_PRECEDENCE[op_tok.text]
            right = self.expr(prec + 1)
            left = Binary(op_tok.text, left, right, op_tok.pos)
        return left

    def unary(self) -> Expr:
        if self.at("-") or self.at("!"):
            op_tok = self.advance()
            return Unary(op_tok.text, self.unary(), op_tok.pos)
        return self.primary()

    def primary(self) -> Expr:
        tok = self.tok
        if tok.kind == "int":
            self.advance()
            return IntLit(int(tok.text), tok.pos)
        if self.at("true") or self.at("false"):
            self.advance()
            return BoolLit(tok.text == "true", tok.pos)
        if self.at("len") or self.at("sorted"):
            self.advance()
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Len(arg, tok.pos) if tok.text == "len" else Sorted(arg, tok.pos)
        if self.at("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        if tok.kind == "ident":
            self.advance()
            if self.at("["):
                self.advance()
                index = self.expr()
                self.expect("]")
                return Index(tok.text, index, tok.pos)
            return Name(tok.text, tok.pos)
        raise SnipSyntaxError(f"expected an expression, found {self._describe(tok)}", tok.pos)


# -- static validation ------------------------------------------------------


class _Scope:
    def __init__(self, parent: Optional["_Scope"] = None):
        self.parent = parent
        self.names: Dict[str, Tuple[SnipType, bool]] = {}

    def lookup(self, name: str) -> Optional[Tuple[SnipType, bool]]:
        scope = self
        while scope is not None:
            if name in scope.names:
                return scope.names[name]
            scope = scope.parent
        return None

    def declare(self, name: str, type_: SnipType, pos, loop_var: bool = False) -> None:
        if self.lookup(name) is not None:
            raise SnipSyntaxError(f"'{name}' is already declared in an enclosing scope", pos)
        self.names[name] = (type_, loop_var)


_ARITH = {"+", "-", "*", "/", "%"}
_ORDER = {"<", "<=", ">", ">="}
_EQUALITY = {"==", "!="}
_LOGIC = {"&&", "||"}


def _type_of(e: Expr, scope: _Scope) -> SnipType:
    if isinstance(e, IntLit):
        return SnipType.INT
    if isinstance(e, BoolLit):
        return SnipType.BOOL
    if isinstance(e, Name):
        entry = scope.lookup(e.ident)
        if entry is None:
            raise SnipSyntaxError(f"undeclared identifier {e.ident}", e.pos)
        return entry[0]
    if isinstance(e, Index):
        entry = scope.lookup(e.array)
        if entry is None:
            raise SnipSyntaxError(f"undeclared identifier {e.array}", e.pos)
        if entry[0] is not SnipType.INT_ARRAY:
            raise SnipSyntaxError(f"cannot index '{e.array}' of type {entry[0]}", e.pos)
        _expect(e.index, SnipType.INT, scope, "array index")
        return SnipType.INT
    if isinstance(e, Len):
        _expect(e.arg, SnipType.INT_ARRAY, scope, "len() argument")
        return SnipType.INT
    if isinstance(e, Sorted):
        _expect(e.arg, SnipType.INT_ARRAY, scope, "sorted() argument")
        return SnipType.INT_ARRAY
    if isinstance(e, Unary):
        want = SnipType.INT if e.op == "-" else SnipType.BOOL
        _expect(e.operand, want, scope, f"operand of unary '{e.op}'")
        return want
    if isinstance(e, Binary):
        if e.op in _ARITH or e.op in _ORDER:
            _expect(e.left, SnipType.INT, scope, f"left operand of '{e.op}'")
            _expect(e.right, SnipType.INT, scope, f"right operand of '{e.op}'")
            return SnipType.INT if e.op in _ARITH else SnipType.BOOL
        if e.op in _LOGIC:
            _expect(e.left, SnipType.BOOL, scope, f"left operand of '{e.op}'")
            _expect(e.right, SnipType.BOOL, scope, f"right operand of '{e.op}'")
            return SnipType.BOOL
        lt = _type_of(e.left, scope)
        rt = _type_of(e.right, scope)
        if lt is not rt:
            raise SnipSyntaxError(f"'{e.op}' compares {lt} with {rt}", e.pos)
        return SnipType.BOOL
    raise TypeError(f"not an expression: {e!r}")


def _expect(e: Expr, want: SnipType, scope: _Scope, what: str) -> None:
    got = _type_of(e, scope)
    if got is not want:
        raise SnipSyntaxError(f"{what} must be {want}, found {got}", getattr(e, "pos", (0, 0)))


def _check_block(stmts, scope: _Scope, ret: SnipType) -> bool:
    """Type-check a block in a fresh child scope; True if every path returns."""
    inner = _Scope(scope)
    returns = False
    for s in stmts:
        returns = _check_stmt(s, inner, ret) or returns
    return returns


def _check_stmt(s: Stmt, scope: _Scope, ret: SnipType) -> bool:
    if isinstance(s, Let):
        t = _type_of(s.value, scope)
        scope.declare(s.name, t, s.pos)
        return False
    if isinstance(s, Assign):
        entry = scope.lookup(s.name)
        if entry is None:
            raise SnipSyntaxError(f"undeclared identifier {s.name}", s.pos)
        if entry[1]:
            raise SnipSyntaxError(f"cannot assign to loop variable '{s.name}'", s.pos)
        _expect(s.value, entry[0], scope, f"value assigned to '{s.name}'")
        return False
    if isinstance(s, IndexAssign):
        entry = scope.lookup(s.array)
        if entry is None:
            raise SnipSyntaxError(f"undeclared identifier {s.array}", s.pos)
        if entry[0] is not SnipType.INT_ARRAY:
            raise SnipSyntaxError(f"cannot index '{s.array}' of type {entry[0]}", s.pos)
        _expect(s.index, SnipType.INT, scope, "array index")
        _expect(s.value, SnipType.INT, scope, "array element")
        return False
    if isinstance(s, If):
        _expect(s.cond, SnipType.BOOL, scope, "if condition")
        then_ret = _check_block(s.then, scope, ret)
        else_ret = _check_block(s.orelse, scope, ret) if s.orelse is not None else False
        return then_ret and else_ret
    if isinstance(s, While):
        _expect(s.cond, SnipType.BOOL, scope, "while condition")
        _check_block(s.body, scope, ret)
        return False
    if isinstance(s, For):
        _expect(s.lo, SnipType.INT, scope, "range start")
        _expect(s.hi, SnipType.INT, scope, "range end")
        loop_scope = _Scope(scope)
        loop_scope.declare(s.var, SnipType.INT, s.pos, loop_var=True)
        _check_block(s.body, loop_scope, ret)
        return False
    if isinstance(s, Return):
        _expect(s.value, ret, scope, "return value")
        return True
    raise TypeError(f"not a statement: {s!r}")


def validate(program: Program) -> None:
    """Raise SnipSyntaxError if the program breaks a static rule."""
    scope = _Scope()
    for p in program.params:
        scope.declare(p.name, p.type, (1, 1))
    if not _check_block(program.body, scope, program.return_type):
        raise SnipSyntaxError("missing return on some path", (1, 1))


# -- public entry points ----------------------------------------------------


@dataclass(frozen=True)
class SourceSnippet:
    id: str
    text: str


@dataclass(frozen=True)
class Valid:
    program: Program


@dataclass(frozen=True)
class Invalid:
    reason: str


ValidationVerdict = Union[Valid, Invalid]


def parse_program(text: str) -> Program:
    """Parse and validate, raising SnipSyntaxError on failure."""
    program = Parser(text).program()
    validate(program)
    return program


def parse(snippet: Union[SourceSnippet, str]) -> ValidationVerdict:
    text = snippet.text if isinstance(snippet, SourceSnippet) else snippet
    try:
        return Valid(parse_program(text))
    except SnipSyntaxError as exc:
        return Invalid(str(exc))
    except RecursionError:
        return Invalid("1:1: program nested too deeply")


# -- pretty printer ---------------------------------------------------------


def format_expr(e: Expr, parent_prec: int = 0) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, Name):
        return e.ident
    if isinstance(e, Index):
        return f"{e.array}[{format_expr(e.index)}]"
    if isinstance(e, Len):
        return f"len({format_expr(e.arg)})"
    if isinstance(e, Sorted):
        return f"sorted({format_expr(e.arg)})"
    if isinstance(e, Unary):
        return f"{e.op}{format_expr(e.operand, UNARY_PRECEDENCE)}"
    if isinstance(e, Binary):
        prec = BINARY_PRECEDENCE[e.op]
        # left-associative: a right operand at the same level needs parens
        text = f"{format_expr(e.left, prec)} {e.op} {format_expr(e.right, prec + 1)}"
        return f"({text})" if prec < parent_prec else text
    raise TypeError(f"not an expression: {e!r}")


def _format_block(stmts, indent: int) -> List[str]:
    lines = []
    for s in stmts:
        lines.extend(_format_stmt(s, indent))
    return lines


def _format_stmt(s: Stmt, indent: int) -> List[str]:
    pad = "    " * indent
    if isinstance(s, Let):
        return [f"{pad}let {s.name} = {format_expr(s.value)};"]
    if isinstance(s, Assign):
        return [f"{pad}{s.name} = {format_expr(s.value)};"]
    if isinstance(s, IndexAssign):
        return [f"{pad}{s.array}[{format_expr(s.index)}] = {format_expr(s.value)};"]
    if isinstance(s, Return):
        return [f"{pad}return {format_expr(s.value)};"]
    if isinstance(s, If):
        lines = [f"{pad}if {format_expr(s.cond)} {{"]
        lines += _format_block(s.then, indent + 1)
        if s.orelse is not None:
            lines.append(f"{pad}}} else {{")
            lines += _format_block(s.orelse, indent + 1)
        lines.append(f"{pad}}}")
        return lines
    if isinstance(s, While):
        return [f"{pad}while {format_expr(s.cond)} {{", *_format_block(s.body, indent + 1), f"{pad}}}"]
    if isinstance(s, For):
        head = f"{pad}for {s.var} in {format_expr(s.lo)}..{format_expr(s.hi)} {{"
        return [head, *_format_block(s.body, indent + 1), f"{pad}}}"]
    raise TypeError(f"not a statement: {s!r}")


def pretty_print(program: Program) -> str:
    params = ", ".join(f"{p.name}: {p.type}" for p in program.params)
    lines = [f"fn {program.name}({params}) -> {program.return_type} {{"]
    lines += _format_block(program.body, 1)
    lines.append("}")
    return "\n".join(lines) + "\n"
