"""Hypothesis strategies that build well-typed SnipLang programs as source text.

Names are globally fresh, so shadowing never occurs.  Loops are either
``for`` over small ranges or ``while`` loops driven by a fresh counter, so
every generated program terminates quickly.  Errors (index and division)
are deliberately reachable.
"""

from __future__ import annotations

from typing import List, Tuple

from hypothesis import strategies as st

SIGNATURES = {
    "int_int": [("x", "int"), ("y", "int")],
    "int_arr": [("x", "int"), ("a", "[int]")],
    "arr": [("a", "[int]")],
    "bool_int": [("b", "bool"), ("x", "int")],
}

_ARITH = ["+", "-", "*", "/", "%"]
_CMP = ["<", "<=", ">", ">=", "==", "!="]


class _Gen:
    def __init__(self, draw, params, ret: str):
        self.draw = draw
        self.ret = ret
        self.counter = 0
        # (name, type, assignable)
        self.scope: List[Tuple[str, str, bool]] = [(n, t, True) for n, t in params]

    def fresh(self, prefix: str) -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"

    def names(self, t: str, assignable: bool = False) -> List[str]:
        return [n for n, ty, ok in self.scope if ty == t and (ok or not assignable)]

    def int_expr(self, depth: int) -> str:
        d = self.draw
        options = ["lit"]
        if self.names("int"):
            options += ["var", "var"]
        if self.names("[int]"):
            options += ["len", "index"]
        if depth > 0:
            options += ["bin", "bin", "neg"]
        kind = d(st.sampled_from(options))
        if kind == "lit":
            return str(d(st.integers(-3, 3)))
        if kind == "var":
            return d(st.sampled_from(self.names("int")))
        if kind == "len":
            arr = d(st.sampled_from(self.names("[int]")))
            return f"len({arr})"
        if kind == "index":
            arr = d(st.sampled_from(self.names("[int]")))
            return f"{arr}[{self.int_expr(max(depth - 1, 0))}]"
        if kind == "neg":
            return f"-({self.int_expr(depth - 1)})"
        op = d(st.sampled_from(_ARITH))
        return f"({self.int_expr(depth - 1)} {op} {self.int_expr(depth - 1)})"

    def bool_expr(self, depth: int) -> str:
        d = self.draw
        options = ["cmp", "cmp", "lit"]
        if self.names("bool"):
            options.append("var")
        if depth > 0:
            options += ["and", "or", "not"]
        kind = d(st.sampled_from(options))
        if kind == "lit":
            return d(st.sampled_from(["true", "false"]))
        if kind == "var":
            return d(st.sampled_from(self.names("bool")))
        if kind == "cmp":
            op = d(st.sampled_from(_CMP))
            return f"{self.int_expr(max(depth - 1, 0))} {op} {self.int_expr(max(depth - 1, 0))}"
        if kind == "not":
            return f"!({self.bool_expr(depth - 1)})"
        op = "&&" if kind == "and" else "||"
        return f"({self.bool_expr(depth - 1)} {op} {self.bool_expr(depth - 1)})"

    def expr(self, t: str, depth: int) -> str:
        if t == "int":
            return self.int_expr(depth)
        if t == "bool":
            return self.bool_expr(depth)
        arrays = self.names("[int]")
        return self.draw(st.sampled_from(arrays + [f"sorted({a})" for a in arrays]))

    def block(self, depth: int, indent: int, must_return: bool) -> List[str]:
        d = self.draw
        saved = len(self.scope)
        pad = "    " * indent
        lines: List[str] = []
        for _ in range(d(st.integers(0, 3))):
            kinds = ["let", "assign"]
            if self.names("[int]", assignable=True):
                kinds.append("store")
            if depth > 0:
                kinds += ["if", "for", "while"]
            kind = d(st.sampled_from(kinds))
            if kind == "let":
                t = d(st.sampled_from(["int", "int", "bool"] + (["[int]"] if self.names("[int]") else [])))
                name = self.fresh("v")
                lines.append(f"{pad}let {name} = {self.expr(t, 2)};")
                self.scope.append((name, t, True))
            elif kind == "assign":
                targets = [(n, t) for n, t, ok in self.scope if ok]
                name, t = d(st.sampled_from(targets))
                lines.append(f"{pad}{name} = {self.expr(t, 2)};")
            elif kind == "store":
                arr = d(st.sampled_from(self.names("[int]", assignable=True)))
                lines.append(f"{pad}{arr}[{self.int_expr(1)}] = {self.int_expr(2)};")
            elif kind == "if":
                lines.append(f"{pad}if {self.bool_expr(2)} {{")
                lines += self.block(depth - 1, indent + 1, d(st.booleans()))
                if d(st.booleans()):
                    lines.append(f"{pad}}} else {{")
                    lines += self.block(depth - 1, indent + 1, d(st.booleans()))
                lines.append(f"{pad}}}")
            elif kind == "for":
                var = self.fresh("i")
                lo = self.int_expr(0)
                hi = self.int_expr(1)
                lines.append(f"{pad}for {var} in {lo}..{hi} {{")
                self.scope.append((var, "int", False))
                lines += self.block(depth - 1, indent + 1, False)
                self.scope.pop()
                lines.append(f"{pad}}}")
            else:
                k = self.fresh("k")
                lines.append(f"{pad}let {k} = 0;")
                lines.append(f"{pad}while {k} < {d(st.integers(0, 3))} && {self.bool_expr(1)} {{")
                lines.append(f"{pad}    {k} = {k} + 1;")
                # the counter must stay untouched inside the body
                self.scope.append((k, "int", False))
                lines += self.block(depth - 1, indent + 1, False)
                self.scope.pop()
                self.scope.append((k, "int", False))
                lines.append(f"{pad}}}")
        if must_return:
            lines.append(f"{pad}return {self.expr(self.ret, 2)};")
        del self.scope[saved:]
        return lines


@st.composite
def program_sources(draw, signature: str = None, ret: str = None, depth: int = 2) -> str:
    sig = signature or draw(st.sampled_from(sorted(SIGNATURES)))
    params = SIGNATURES[sig]
    ret = ret or draw(st.sampled_from(["int", "int", "bool"]))
    gen = _Gen(draw, params, ret)
    body = gen.block(depth, 1, True)
    header = ", ".join(f"{n}: {t}" for n, t in params)
    return f"fn f({header}) -> {ret} {{\n" + "\n".join(body) + "\n}\n"


@st.composite
def program_pairs(draw, depth: int = 2) -> Tuple[str, str]:
    sig = draw(st.sampled_from(sorted(SIGNATURES)))
    ret = draw(st.sampled_from(["int", "bool"]))
    return draw(program_sources(sig, ret, depth)), draw(program_sources(sig, ret, depth))
