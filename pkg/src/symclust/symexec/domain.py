"""Bounded input domains and the canonical input ordering.

Inputs are ordered parameter by parameter.  Integers are ordered by
magnitude with the positive value first (0, 1, -1, 2, -2, ...), booleans
false before true, and arrays by length and then element-wise.  Both the
symbolic checker and the brute-force oracle report the smallest
counterexample under this ordering, so their answers coincide.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from ..interp import Value
from ..nodes import Param, SnipType

Shape = Tuple[Optional[int], ...]


@dataclass(frozen=True)
class InputDomain:
    int_bound: int = 8
    max_array_len: int = 4
    array_elem_bound: int = 4

    def __post_init__(self):
        if min(self.int_bound, self.max_array_len, self.array_elem_bound) < 0:
            raise ValueError("input domain bounds must be nonnegative")


def ordered_ints(bound: int) -> List[int]:
    out = [0]
    for k in range(1, bound + 1):
        out += [k, -k]
    return out


def int_rank(x: int) -> int:
    return 2 * x - 1 if x > 0 else -2 * x


def input_key(inputs: Sequence[Value]) -> tuple:
    key = []
    for v in inputs:
        if isinstance(v, bool):
            key.append(int(v))
        elif isinstance(v, int):
            key.append(int_rank(v))
        else:
            key.append((len(v), tuple(int_rank(x) for x in v)))
    return tuple(key)


def shapes(params: Sequence[Param], dom: InputDomain) -> List[Shape]:
    """Every combination of array lengths, scalars marked None."""
    per_param = [
        range(dom.max_array_len + 1) if p.type is SnipType.INT_ARRAY else [None]
        for p in params
    ]
    return [tuple(s) for s in itertools.product(*per_param)]


def elem_name(array: str, i: int) -> str:
    return f"{array}[{i}]"


def layout(params: Sequence[Param], shape: Shape, dom: InputDomain) -> Tuple[Dict[str, int], List[list]]:
    """Solver variable slots and their ordered domains for one shape."""
    slots: Dict[str, int] = {}
    domains: List[list] = []
    ints = ordered_ints(dom.int_bound)
    elems = ordered_ints(dom.array_elem_bound)
    for p, n in zip(params, shape):
        if p.type is SnipType.INT_ARRAY:
            for i in range(n):
                slots[elem_name(p.name, i)] = len(domains)
                domains.append(elems)
        else:
            slots[p.name] = len(domains)
            domains.append(ints if p.type is SnipType.INT else [False, True])
    return slots, domains


def shape_of(inputs: Sequence[Value]) -> Shape:
    return tuple(len(v) if isinstance(v, tuple) else None for v in inputs)


def flatten(inputs: Sequence[Value]) -> list:
    flat: list = []
    for v in inputs:
        if isinstance(v, tuple):
            flat.extend(v)
        else:
            flat.append(v)
    return flat


def unflatten(flat: Sequence, params: Sequence[Param], shape: Shape) -> List[Value]:
    out: List[Value] = []
    i = 0
    for p, n in zip(params, shape):
        if p.type is SnipType.INT_ARRAY:
            out.append(tuple(flat[i:i + n]))
            i += n
        else:
            out.append(flat[i])
            i += 1
    return out


def domain_size(params: Sequence[Param], dom: InputDomain) -> int:
    total = 1
    for p in params:
        if p.type is SnipType.INT:
            total *= 2 * dom.int_bound + 1
        elif p.type is SnipType.BOOL:
            total *= 2
        else:
            e = 2 * dom.array_elem_bound + 1
            total *= sum(e ** n for n in range(dom.max_array_len + 1))
    return total


def enumerate_inputs(params: Sequence[Param], dom: InputDomain) -> Iterator[List[Value]]:
    """All inputs in the domain, in canonical order."""
    per_param = []
    ints = ordered_ints(dom.int_bound)
    elems = ordered_ints(dom.array_elem_bound)
    for p in params:
        if p.type is SnipType.INT:
            per_param.append(ints)
        elif p.type is SnipType.BOOL:
            per_param.append([False, True])
        else:
            arrays = []
            for n in range(dom.max_array_len + 1):
                arrays.extend(itertools.product(elems, repeat=n))
            per_param.append(arrays)
    for combo in itertools.product(*per_param):
        yield list(combo)
