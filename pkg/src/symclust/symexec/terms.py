"""Hash-consed symbolic terms over program inputs.

Every term is interned, so structurally equal terms are the same object
and equality is identity.  Constructors fold constants and apply a few
local rewrites; they never change the meaning of a term.

All operations are total: division by zero yields 0 and an out-of-range
select yields 0.  The symbolic executor forks explicit error paths before
any such value could be observed, so these fill-ins never reach an outcome.
That lets compiled terms be evaluated eagerly with shared subterms.
"""

from __future__ import annotations

import weakref
from typing import Callable, Dict, FrozenSet, List, Sequence, Tuple

from ..interp import trunc_div, trunc_mod

_INTERN: "weakref.WeakValueDictionary[tuple, Term]" = weakref.WeakValueDictionary()


class Term:
    __slots__ = ("op", "args", "_vars", "_compiled", "__weakref__")

    op: str
    args: tuple

    def __new__(cls, op: str, args: tuple):
        # bool and int constants must stay distinct (True == 1 in Python)
        key = (op, args, type(args[0]) if op == "const" else None)
        term = _INTERN.get(key)
        if term is None:
            term = object.__new__(cls)
            term.op = op
            term.args = args
            term._vars = None
            term._compiled = None
            _INTERN[key] = term
        return term

    def __reduce__(self):
        return (Term, (self.op, self.args))

    @property
    def is_const(self) -> bool:
        return self.op == "const"

    @property
    def value(self):
        return self.args[0]

    @property
    def free_vars(self) -> FrozenSet[str]:
        if self._vars is None:
            stack = [self]
            while stack:
                node = stack[-1]
                if node._vars is not None:
                    stack.pop()
                elif node.op == "var":
                    node._vars = frozenset(node.args)
                elif node.op == "const":
                    node._vars = frozenset()
                else:
                    pending = [c for c in _children(node) if c._vars is None]
                    if pending:
                        stack.extend(pending)
                    else:
                        acc: FrozenSet[str] = frozenset()
                        for c in _children(node):
                            acc |= c._vars
                        node._vars = acc
                        stack.pop()
        return self._vars

    def __repr__(self) -> str:
        return render(self)


def _children(t: Term) -> List[Term]:
    if t.op in ("select", "sorted_at"):
        return [*t.args[0], t.args[1]] if t.op == "select" else list(t.args[0])
    return [a for a in t.args if isinstance(a, Term)]


def const(v) -> Term:
    return Term("const", (v,))


def var(name: str) -> Term:
    return Term("var", (name,))


TRUE = const(True)
FALSE = const(False)
ZERO = const(0)
ONE = const(1)

_NEGATED = {"lt": "ge", "ge": "lt", "le": "gt", "gt": "le", "eq": "ne", "ne": "eq"}

_FOLD: Dict[str, Callable] = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: trunc_div(a, b) if b else 0,
    "mod": lambda a, b: trunc_mod(a, b) if b else 0,
    "lt": lambda a, b: a < b,
    "le": lambda a, b: a <= b,
    "gt": lambda a, b: a > b,
    "ge": lambda a, b: a >= b,
    "eq": lambda a, b: a == b,
    "ne": lambda a, b: a != b,
}


def binop(op: str, a: Term, b: Term) -> Term:
    if a.is_const and b.is_const:
        return const(_FOLD[op](a.value, b.value))
    if op == "add":
        if a is ZERO:
            return b
        if b is ZERO:
            return a
        # keep constants on the right and fold (x + c1) + c2
        if a.is_const:
            a, b = b, a
        if b.is_const and a.op == "add" and a.args[1].is_const:
            return binop("add", a.args[0], const(a.args[1].value + b.value))
    elif op == "sub":
        if b is ZERO:
            return a
        if a is b:
            return ZERO
        if b.is_const:
            return binop("add", a, const(-b.value))
    elif op == "mul":
        if a is ONE:
            return b
        if b is ONE:
            return a
        if a is ZERO or b is ZERO:
            return ZERO
    elif op in ("eq", "le", "ge") and a is b:
        return TRUE
    elif op in ("ne", "lt", "gt") and a is b:
        return FALSE
    return Term(op, (a, b))


def add(a, b):
    return binop("add", a, b)


def sub(a, b):
    return binop("sub", a, b)


def mul(a, b):
    return binop("mul", a, b)


def neg(a: Term) -> Term:
    if a.is_const:
        return const(-a.value)
    if a.op == "neg":
        return a.args[0]
    return Term("neg", (a,))


def not_(a: Term) -> Term:
    if a.is_const:
        return const(not a.value)
    if a.op == "not":
        return a.args[0]
    if a.op in _NEGATED:
        return Term(_NEGATED[a.op], a.args)
    return Term("not", (a,))


def and_(a: Term, b: Term) -> Term:
    if a is FALSE or b is FALSE:
        return FALSE
    if a is TRUE:
        return b
    if b is TRUE or a is b:
        return a
    return Term("and", (a, b))


def or_(a: Term, b: Term) -> Term:
    if a is TRUE or b is TRUE:
        return TRUE
    if a is FALSE:
        return b
    if b is FALSE or a is b:
        return a
    return Term("or", (a, b))


def ite(c: Term, a: Term, b: Term) -> Term:
    if c.is_const:
        return a if c.value else b
    if a is b:
        return a
    if a is TRUE and b is FALSE:
        return c
    if a is FALSE and b is TRUE:
        return not_(c)
    return Term("ite", (c, a, b))


def select(elems: Tuple[Term, ...], index: Term) -> Term:
    if index.is_const:
        i = index.value
        return elems[i] if 0 <= i < len(elems) else ZERO
    if elems and all(e is elems[0] for e in elems):
        return elems[0]
    return Term("select", (tuple(elems), index))


def sorted_elems(elems: Tuple[Term, ...]) -> Tuple[Term, ...]:
    if all(e.is_const for e in elems):
        return tuple(const(v) for v in sorted(e.value for e in elems))
    return tuple(Term("sorted_at", (tuple(elems), j)) for j in range(len(elems)))


def conj(terms: Sequence[Term]) -> Term:
    acc = TRUE
    for t in terms:
        acc = and_(acc, t)
    return acc


def disj(terms: Sequence[Term]) -> Term:
    acc = FALSE
    for t in terms:
        acc = or_(acc, t)
    return acc


# -- compilation to Python closures ------------------------------------------

_PY_BINOP = {
    "add": "+", "sub": "-", "mul": "*",
    "lt": "<", "le": "<=", "gt": ">", "ge": ">=", "eq": "==", "ne": "!=",
}


def _sdiv(a, b):
    return trunc_div(a, b) if b else 0


def _smod(a, b):
    return trunc_mod(a, b) if b else 0


def _ssel(elems, i):
    return elems[i] if 0 <= i < len(elems) else 0


_GLOBALS = {"_sdiv": _sdiv, "_smod": _smod, "_ssel": _ssel, "_sorted": sorted}


def compile_term(term: Term, slots: Dict[str, int]) -> Callable[[list], object]:
    """Compile ``term`` to ``f(values)`` where ``values[slots[name]]`` binds a var.

    Shared subterms are computed once.  Results are cached per slot layout.
    """
    key = tuple(sorted(slots.items()))
    cache = term._compiled
    if cache is None:
        cache = term._compiled = {}
    fn = cache.get(key)
    if fn is not None:
        return fn

    names: Dict[int, str] = {}
    lines: List[str] = []

    def emit(t: Term) -> str:
        # iterative post-order to survive very deep terms
        stack = [(t, False)]
        while stack:
            node, ready = stack.pop()
            if id(node) in names:
                continue
            if node.op == "const":
                names[id(node)] = repr(node.value)
                continue
            if node.op == "var":
                names[id(node)] = f"v[{slots[node.args[0]]}]"
                continue
            if not ready:
                stack.append((node, True))
                for child in _children(node):
                    if id(child) not in names:
                        stack.append((child, False))
                continue
            names[id(node)] = _emit_node(node, names, lines)
        return names[id(t)]

    result = emit(term)
    body = "\n".join(f"    {line}" for line in lines)
    src = f"def _f(v):\n{body}\n    return {result}\n"
    scope: Dict[str, object] = {}
    exec(src, dict(_GLOBALS), scope)
    fn = scope["_f"]
    cache[key] = fn
    return fn


def _emit_node(node: Term, names: Dict[int, str], lines: List[str]) -> str:
    n = lambda t: names[id(t)]  # noqa: E731
    op = node.op
    if op in _PY_BINOP:
        expr = f"({n(node.args[0])} {_PY_BINOP[op]} {n(node.args[1])})"
    elif op == "div":
        expr = f"_sdiv({n(node.args[0])}, {n(node.args[1])})"
    elif op == "mod":
        expr = f"_smod({n(node.args[0])}, {n(node.args[1])})"
    elif op == "neg":
        expr = f"(-{n(node.args[0])})"
    elif op == "not":
        expr = f"(not {n(node.args[0])})"
    elif op == "and":
        expr = f"({n(node.args[0])} and {n(node.args[1])})"
    elif op == "or":
        expr = f"({n(node.args[0])} or {n(node.args[1])})"
    elif op == "ite":
        c, a, b = node.args
        expr = f"({n(a)} if {n(c)} else {n(b)})"
    elif op == "select":
        elems, idx = node.args
        expr = f"_ssel(({''.join(n(e) + ', ' for e in elems)}), {n(idx)})"
    elif op == "sorted_at":
        elems, j = node.args
        expr = f"_sorted(({''.join(n(e) + ', ' for e in elems)}))[{j}]"
    else:
        raise ValueError(f"unknown term op {op}")
    name = f"t{len(lines)}"
    lines.append(f"{name} = {expr}")
    return name


# -- rendering ----------------------------------------------------------------

_RENDER_OP = {
    "add": "+", "sub": "-", "mul": "*", "div": "/", "mod": "%",
    "lt": "<", "le": "<=", "gt": ">", "ge": ">=", "eq": "==", "ne": "!=",
    "and": "&&", "or": "||",
}


def render(t: Term, top: bool = False) -> str:
    """Infix text of a term; ``top`` drops the outermost parentheses."""
    op = t.op
    if op == "const":
        v = t.value
        return ("true" if v else "false") if isinstance(v, bool) else str(v)
    if op == "var":
        return t.args[0]
    if op in _RENDER_OP:
        text = f"{render(t.args[0])} {_RENDER_OP[op]} {render(t.args[1])}"
        return text if top else f"({text})"
    if op == "neg":
        return f"-{render(t.args[0])}"
    if op == "not":
        return f"!{render(t.args[0])}"
    if op == "ite":
        c, a, b = t.args
        return f"ite({render(c)}, {render(a)}, {render(b)})"
    if op == "select":
        elems, idx = t.args
        return f"[{', '.join(render(e) for e in elems)}][{render(idx)}]"
    if op == "sorted_at":
        elems, j = t.args
        return f"sorted([{', '.join(render(e) for e in elems)}])[{j}]"
    raise ValueError(f"unknown term op {op}")
