"""Bounded symbolic execution of SnipLang programs.

Array lengths are never symbolic: execution is split up front into one run
per combination of array lengths (a *shape*), so every array is a tuple of
element terms.  Scalar inputs and array elements are symbolic.

Branches fork the path constraint.  Each live path carries a witness input
that satisfies its constraint; at a fork the side the witness takes is
feasible for free and the other side is checked with the solver, so
infeasible paths are dropped as soon as they appear.  An ``if`` whose two
sides both fall through without forking further is merged into
if-then-else terms instead of doubling the path count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ..interp import ErrorKind, Errored, Outcome, Returned, Value
from ..nodes import (
    Assign,
    Binary,
    BoolLit,
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
    Unary,
    While,
)
from . import terms as T
from .domain import InputDomain, Shape, elem_name, flatten, layout, shape_of, shapes
from .solver import Deadline, Solver
from .terms import Term

SymValue = Union[Term, Tuple[Term, ...]]

DEFAULT_UNROLL_CAP = 32
DEFAULT_TRACE_CAP = 4096


@dataclass(frozen=True)
class Trace:
    shape: Shape
    constraint: Tuple[Term, ...]
    kind: str  # "return", "error" or "unknown"
    value: Optional[SymValue] = None
    error: Optional[ErrorKind] = None


@dataclass(frozen=True)
class TraceSet:
    params: Tuple[Param, ...]
    names: Tuple[str, ...]
    dom: InputDomain
    traces: Tuple[Trace, ...]
    complete: bool
    truncated: bool = False

    @property
    def has_unknown(self) -> bool:
        return any(t.kind == "unknown" for t in self.traces)

    def locate(self, inputs: Sequence[Value]) -> List[Trace]:
        """Traces whose constraint the concrete input satisfies."""
        inputs = [tuple(v) if isinstance(v, list) else v for v in inputs]
        shape = shape_of(inputs)
        slots, _ = layout(self.params, shape, self.dom)
        flat = flatten(inputs)
        return [
            t for t in self.traces
            if t.shape == shape and all(_holds(c, slots, flat) for c in t.constraint)
        ]

    def predict(self, inputs: Sequence[Value]) -> Optional[Outcome]:
        """Outcome the traces predict for a concrete input; None for an unknown path."""
        inputs = [tuple(v) if isinstance(v, list) else v for v in inputs]
        hits = self.locate(inputs)
        if len(hits) != 1:
            raise ValueError(f"input {inputs} lies on {len(hits)} traces")
        trace = hits[0]
        if trace.kind == "unknown":
            return None
        if trace.kind == "error":
            return Errored(trace.error)
        slots, _ = layout(self.params, trace.shape, self.dom)
        return Returned(concretize(trace.value, slots, flatten(inputs)))

    def describe(self, trace: Trace) -> str:
        conds = [f"len({n})=={k}" for n, k in zip(self.names, trace.shape) if k is not None]
        conds += [self._rename(T.render(c, top=True)) for c in trace.constraint]
        if trace.kind == "return":
            if isinstance(trace.value, tuple):
                out = "[" + ", ".join(self._rename(T.render(v)) for v in trace.value) + "]"
            else:
                out = self._rename(T.render(trace.value))
        elif trace.kind == "error":
            out = f"error: {trace.error}"
        else:
            out = "unknown"
        return f"({' && '.join(conds) or 'true'}) -> {out}"

    def _rename(self, text: str) -> str:
        # longest index first so $1 does not clobber $10
        for i in sorted(range(len(self.names)), reverse=True):
            text = text.replace(f"${i}", self.names[i])
        return text


def _holds(term: Term, slots: Dict[str, int], flat: list) -> bool:
    if term.is_const:
        return bool(term.value)
    return bool(T.compile_term(term, slots)(flat))


def concretize(value: SymValue, slots: Dict[str, int], flat: list) -> Value:
    if isinstance(value, tuple):
        return tuple(_concrete(v, slots, flat) for v in value)
    return _concrete(value, slots, flat)


def _concrete(term: Term, slots, flat):
    if term.is_const:
        return term.value
    return T.compile_term(term, slots)(flat)


def canonical_params(params: Sequence[Param]) -> Tuple[Param, ...]:
    """Positional symbol names, so traces of differently named programs line up."""
    return tuple(Param(f"${i}", p.type) for i, p in enumerate(params))


class TraceCapHit(Exception):
    pass


class _State:
    __slots__ = ("env", "pc", "wit")

    def __init__(self, env: Dict[str, SymValue], pc: Tuple[Term, ...], wit: list):
        self.env = env
        self.pc = pc
        self.wit = wit

    def bind(self, name: str, value: SymValue) -> "_State":
        env = dict(self.env)
        env[name] = value
        return _State(env, self.pc, self.wit)


_ARITH = {"+": "add", "-": "sub", "*": "mul", "/": "div", "%": "mod"}
_COMPARE = {"<": "lt", "<=": "le", ">": "gt", ">=": "ge"}


class _Explorer:
    def __init__(self, program: Program, dom: InputDomain, unroll_cap: int, trace_cap: int, deadline: Deadline):
        self.program = program
        self.params = canonical_params(program.params)
        self.dom = dom
        self.unroll_cap = unroll_cap
        self.trace_cap = trace_cap
        self.deadline = deadline
        self.solver = Solver(self.params, dom, deadline)
        self.traces: List[Trace] = []
        self.shape: Shape = ()

    # -- bookkeeping ------------------------------------------------------

    def emit(self, st: _State, kind: str, value=None, error=None) -> None:
        if len(self.traces) >= self.trace_cap:
            raise TraceCapHit()
        self.traces.append(Trace(self.shape, st.pc, kind, value, error))

    def fork(self, st: _State, cond: Term) -> List[Tuple[bool, _State]]:
        if cond.is_const:
            return [(bool(cond.value), st)]
        here = self.solver.holds(cond, self.shape, st.wit)
        out = []
        for branch in (True, False):
            pc = st.pc + ((cond if branch else T.not_(cond)),)
            if branch == here:
                wit = st.wit
            else:
                wit = self.solver.solve(pc, self.shape)
                if wit is None:
                    continue
            out.append((branch, _State(st.env, pc, wit)))
        return out

    def guard(self, st: _State, ok: Term, error: ErrorKind) -> List[_State]:
        """Fork on a safety condition, emitting the error side as a trace."""
        out = []
        for holds, s in self.fork(st, ok):
            if holds:
                out.append(s)
            else:
                self.emit(s, "error", error=error)
        return out

    # -- expressions ------------------------------------------------------

    def expr(self, e, st: _State) -> List[Tuple[SymValue, _State]]:
        t = type(e)
        if t is IntLit or t is BoolLit:
            return [(T.const(e.value), st)]
        if t is Name:
            return [(st.env[e.ident], st)]
        if t is Binary:
            if e.op in ("&&", "||"):
                return self.logical(e, st)
            out = []
            for a, s1 in self.expr(e.left, st):
                for b, s2 in self.expr(e.right, s1):
                    out.extend(self.binary(e.op, a, b, s2))
            return out
        if t is Unary:
            return [
                (T.neg(v) if e.op == "-" else T.not_(v), s)
                for v, s in self.expr(e.operand, st)
            ]
        if t is Index:
            arr = st.env[e.array]
            out = []
            for i, s1 in self.expr(e.index, st):
                ok = T.and_(T.binop("ge", i, T.ZERO), T.binop("lt", i, T.const(len(arr))))
                for s2 in self.guard(s1, ok, ErrorKind.INDEX_OUT_OF_BOUNDS):
                    out.append((T.select(arr, i), s2))
            return out
        if t is Len:
            return [(T.const(len(v)), s) for v, s in self.expr(e.arg, st)]
        if t is Sorted:
            return [(T.sorted_elems(v), s) for v, s in self.expr(e.arg, st)]
        raise TypeError(f"not an expression: {e!r}")

    def binary(self, op: str, a: SymValue, b: SymValue, st: _State):
        if op in _ARITH:
            name = _ARITH[op]
            if name in ("div", "mod"):
                states = self.guard(st, T.binop("ne", b, T.ZERO), ErrorKind.DIVISION_BY_ZERO)
                return [(T.binop(name, a, b), s) for s in states]
            return [(T.binop(name, a, b), st)]
        if op in _COMPARE:
            return [(T.binop(_COMPARE[op], a, b), st)]
        eq = _equal(a, b)
        return [(eq if op == "==" else T.not_(eq), st)]

    def logical(self, e: Binary, st: _State):
        is_and = e.op == "&&"
        out = []
        for left, s1 in self.expr(e.left, st):
            if left.is_const:
                if left.value != is_and:  # short-circuit
                    out.append((left, s1))
                else:
                    out.extend(self.expr(e.right, s1))
                continue
            # the right operand runs only where `goes_on` holds
            goes_on = left if is_and else T.not_(left)
            branches = self.fork(s1, goes_on)
            if len(branches) == 1:
                runs, s2 = branches[0]
                if runs:
                    out.extend(self.expr(e.right, s2))
                else:
                    out.append((T.const(not is_and), s2))
                continue
            (_, s_run), (_, s_stop) = branches
            before = len(self.traces)
            rights = self.expr(e.right, s_run)
            if len(self.traces) == before and len(rights) == 1 and rights[0][1].pc == s_run.pc:
                # right side neither forked nor failed: fold into a single term
                r = rights[0][0]
                out.append((T.and_(left, r) if is_and else T.or_(left, r), s1))
            else:
                out.append((T.const(not is_and), s_stop))
                out.extend(rights)
        return out

    # -- statements -------------------------------------------------------

    def block(self, stmts, st: _State) -> List[_State]:
        outer = st.env.keys()
        states = [st]
        for s in stmts:
            self.deadline.check()
            nxt: List[_State] = []
            for state in states:
                nxt.extend(self.stmt(s, state))
            if len(nxt) > self.trace_cap:
                raise TraceCapHit()
            states = nxt
            if not states:
                break
        return [_State({k: v for k, v in s.env.items() if k in outer}, s.pc, s.wit) for s in states]

    def stmt(self, s, st: _State) -> List[_State]:
        t = type(s)
        if t is Let or t is Assign:
            return [s1.bind(s.name, v) for v, s1 in self.expr(s.value, st)]
        if t is IndexAssign:
            out = []
            for i, s1 in self.expr(s.index, st):
                for v, s2 in self.expr(s.value, s1):
                    arr = s2.env[s.array]
                    ok = T.and_(T.binop("ge", i, T.ZERO), T.binop("lt", i, T.const(len(arr))))
                    for s3 in self.guard(s2, ok, ErrorKind.INDEX_OUT_OF_BOUNDS):
                        if i.is_const:
                            new = arr[:i.value] + (v,) + arr[i.value + 1:]
                        else:
                            new = tuple(T.ite(T.binop("eq", i, T.const(j)), v, old) for j, old in enumerate(arr))
                        out.append(s3.bind(s.array, new))
            return out
        if t is If:
            return self.if_stmt(s, st)
        if t is While:
            return self.while_stmt(s, st)
        if t is For:
            return self.for_stmt(s, st)
        if t is Return:
            for v, s1 in self.expr(s.value, st):
                self.emit(s1, "return", value=v)
            return []
        raise TypeError(f"not a statement: {s!r}")

    def if_stmt(self, s: If, st: _State) -> List[_State]:
        out: List[_State] = []
        orelse = s.orelse or ()
        for cond, s1 in self.expr(s.cond, st):
            branches = self.fork(s1, cond)
            if len(branches) == 1:
                taken, s2 = branches[0]
                out.extend(self.block(s.then if taken else orelse, s2))
                continue
            (_, s_then), (_, s_else) = branches
            before = len(self.traces)
            then_states = self.block(s.then, s_then)
            else_states = self.block(orelse, s_else)
            mergeable = (
                len(self.traces) == before
                and len(then_states) == 1
                and len(else_states) == 1
                and then_states[0].pc == s_then.pc
                and else_states[0].pc == s_else.pc
            )
            if mergeable:
                a, b = then_states[0].env, else_states[0].env
                env = {k: _merge(cond, a[k], b[k]) for k in a}
                out.append(_State(env, s1.pc, s1.wit))
            else:
                out.extend(then_states)
                out.extend(else_states)
        return out

    def while_stmt(self, s: While, st: _State) -> List[_State]:
        exits: List[_State] = []
        active = [st]
        k = 0
        while active:
            nxt: List[_State] = []
            for state in active:
                for cond, s1 in self.expr(s.cond, state):
                    for holds, s2 in self.fork(s1, cond):
                        if not holds:
                            exits.append(s2)
                        elif k >= self.unroll_cap:
                            self.emit(s2, "unknown")
                        else:
                            nxt.extend(self.block(s.body, s2))
            if len(nxt) + len(exits) > self.trace_cap:
                raise TraceCapHit()
            active = nxt
            k += 1
        return exits

    def for_stmt(self, s: For, st: _State) -> List[_State]:
        exits: List[_State] = []
        for lo, s1 in self.expr(s.lo, st):
            for hi, s2 in self.expr(s.hi, s1):
                active = [s2]
                k = 0
                while active:
                    nxt: List[_State] = []
                    index = T.add(lo, T.const(k))
                    for state in active:
                        for holds, s3 in self.fork(state, T.binop("lt", index, hi)):
                            if not holds:
                                exits.append(s3)
                            elif k >= self.unroll_cap:
                                self.emit(s3, "unknown")
                            else:
                                body_states = self.block(s.body, s3.bind(s.var, index))
                                nxt.extend(body_states)
                    if len(nxt) + len(exits) > self.trace_cap:
                        raise TraceCapHit()
                    active = nxt
                    k += 1
        return [
            _State({k: v for k, v in x.env.items() if k != s.var}, x.pc, x.wit)
            for x in exits
        ]

    # -- driver -----------------------------------------------------------

    def run(self) -> TraceSet:
        truncated = False
        try:
            for shape in shapes(self.params, self.dom):
                self.shape = shape
                env: Dict[str, SymValue] = {}
                for i, (p, n) in enumerate(zip(self.params, shape)):
                    if p.type is SnipType.INT_ARRAY:
                        env[self.program.params[i].name] = tuple(T.var(elem_name(p.name, j)) for j in range(n))
                    else:
                        env[self.program.params[i].name] = T.var(p.name)
                _, domains = self.solver.layout(shape)
                start = _State(env, (), [d[0] for d in domains])
                leftover = self.block(self.program.body, start)
                if leftover:
                    raise AssertionError("validated program fell through")
        except TraceCapHit:
            truncated = True
        complete = not truncated and not any(t.kind == "unknown" for t in self.traces)
        return TraceSet(
            params=self.params,
            names=tuple(p.name for p in self.program.params),
            dom=self.dom,
            traces=tuple(self.traces),
            complete=complete,
            truncated=truncated,
        )


def _equal(a: SymValue, b: SymValue) -> Term:
    if isinstance(a, tuple):
        if len(a) != len(b):
            return T.FALSE
        return T.conj([T.binop("eq", x, y) for x, y in zip(a, b)])
    return T.binop("eq", a, b)


def _merge(cond: Term, a: SymValue, b: SymValue) -> SymValue:
    if isinstance(a, tuple):
        return tuple(T.ite(cond, x, y) for x, y in zip(a, b))
    return T.ite(cond, a, b)


def sym_execute(
    program: Program,
    dom: InputDomain = InputDomain(),
    unroll_cap: int = DEFAULT_UNROLL_CAP,
    trace_cap: int = DEFAULT_TRACE_CAP,
    deadline: Optional[Deadline] = None,
) -> TraceSet:
    """Explore every path of ``program`` over ``dom`` up to the given caps.

    Raises TimeBudgetExceeded if ``deadline`` passes during exploration.
    """
    if unroll_cap <= 0 or trace_cap <= 0:
        raise ValueError("unroll_cap and trace_cap must be positive")
    return _Explorer(program, dom, unroll_cap, trace_cap, deadline or Deadline(None)).run()
