"""AST node types for SnipLang.

Nodes are frozen dataclasses, so programs are immutable and hashable.
Source positions are carried for diagnostics but excluded from equality,
which makes structural comparison (e.g. after a print/parse round trip)
independent of formatting.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union


class SnipType(enum.Enum):
    INT = "int"
    BOOL = "bool"
    INT_ARRAY = "[int]"

    def __str__(self) -> str:
        return self.value


Pos = Tuple[int, int]
_NOPOS: Pos = (0, 0)


def _pos():
    return field(default=_NOPOS, compare=False, repr=False)


# -- expressions ------------------------------------------------------------


@dataclass(frozen=True)
class IntLit:
    value: int
    pos: Pos = _pos()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    pos: Pos = _pos()


@dataclass(frozen=True)
class Name:
    ident: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Index:
    array: str
    index: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Len:
    arg: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Sorted:
    arg: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Unary:
    op: str  # "-" or "!"
    operand: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    pos: Pos = _pos()


Expr = Union[IntLit, BoolLit, Name, Index, Len, Sorted, Unary, Binary]


# -- statements -------------------------------------------------------------


@dataclass(frozen=True)
class Let:
    name: str
    value: Expr
    pos: Pos = _pos()


@dataclass(frozen=True)
class Assign:
    name: str
    value: Expr
    pos: Pos = _pos()


@dataclass(frozen=True)
class IndexAssign:
    array: str
    index: Expr
    value: Expr
    pos: Pos = _pos()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: Tuple["Stmt", ...]
    orelse: Optional[Tuple["Stmt", ...]] = None
    pos: Pos = _pos()


@dataclass(frozen=True)
class While:
    cond: Expr
    body: Tuple["Stmt", ...]
    pos: Pos = _pos()


@dataclass(frozen=True)
class For:
    var: str
    lo: Expr
    hi: Expr
    body: Tuple["Stmt", ...]
    pos: Pos = _pos()


@dataclass(frozen=True)
class Return:
    value: Expr
    pos: Pos = _pos()


Stmt = Union[Let, Assign, IndexAssign, If, While, For, Return]


@dataclass(frozen=True)
class Param:
    name: str
    type: SnipType


@dataclass(frozen=True)
class Program:
    name: str
    params: Tuple[Param, ...]
    return_type: SnipType
    body: Tuple[Stmt, ...]

    @property
    def signature(self) -> Tuple[Tuple[SnipType, ...], SnipType]:
        """Parameter and return types; names do not take part."""
        return tuple(p.type for p in self.params), self.return_type
