"""Benchmark dataset documents.

A dataset is one JSON object with a ``problems`` array.  Each problem lists
its entry signature, candidate responses (with log-probabilities, token
counts and optional follow-up responses), test cases and the id of the
top-ranked response.  Snippets that fail to parse do not make a dataset
invalid; they are kept and later clustered as singletons.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import jsonschema

from ..errors import DatasetError
from ..interp import TestCase, Value, value_matches
from ..lang import Invalid, SourceSnippet, parse
from ..metrics import ResponseProb
from ..nodes import Program, SnipType

_TYPE_ENUM = ["int", "bool", "[int]"]

_RESPONSE_FIELDS = {
    "id": {"type": "string", "minLength": 1},
    "source": {"type": "string"},
    "logprob": {"type": "number"},
    "tokens": {"type": "integer", "minimum": 1},
}

SCHEMA = {
    "type": "object",
    "required": ["problems"],
    "properties": {
        "problems": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "entry", "responses", "tests", "top_ranked"],
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "difficulty": {"type": "string"},
                    "entry": {
                        "type": "object",
                        "required": ["name", "params", "return"],
                        "properties": {
                            "name": {"type": "string"},
                            "params": {
                                "type": "array",
                                "items": {
                                    "type": "object",
                                    "required": ["name", "type"],
                                    "properties": {
                                        "name": {"type": "string"},
                                        "type": {"enum": _TYPE_ENUM},
                                    },
                                },
                            },
                            "return": {"enum": _TYPE_ENUM},
                        },
                    },
                    "responses": {
                        "type": "array",
                        "minItems": 1,
                        "items": {
                            "type": "object",
                            "required": ["id", "source", "logprob", "tokens"],
                            "properties": {
                                **_RESPONSE_FIELDS,
                                "followups": {
                                    "type": "array",
                                    "items": {
                                        "type": "object",
                                        "required": ["id", "source", "logprob", "tokens"],
                                        "properties": _RESPONSE_FIELDS,
                                    },
                                },
                            },
                        },
                    },
                    "tests": {
                        "type": "array",
                        "minItems": 1,
                        "items": {
                            "type": "object",
                            "required": ["input", "expected"],
                            "properties": {"input": {"type": "array"}},
                        },
                    },
                    "top_ranked": {"type": "string"},
                },
            },
        }
    },
}


@dataclass(frozen=True)
class Response:
    snippet: SourceSnippet
    prob: ResponseProb
    followups: Tuple["Response", ...] = ()

    @property
    def id(self) -> str:
        return self.snippet.id


@dataclass(frozen=True)
class Signature:
    name: str
    params: Tuple[Tuple[str, SnipType], ...]
    returns: SnipType

    def matches(self, program: Program) -> bool:
        return program.signature == (tuple(t for _, t in self.params), self.returns)


@dataclass(frozen=True)
class ProblemRecord:
    id: str
    signature: Signature
    responses: Tuple[Response, ...]
    tests: Tuple[TestCase, ...]
    top_ranked: str
    difficulty: Optional[str] = None

    def response(self, rid: str) -> Response:
        for r in self.responses:
            if r.id == rid:
                return r
        raise KeyError(rid)

    @property
    def has_followups(self) -> bool:
        return all(r.followups for r in self.responses)


@dataclass
class ParsedSnippet:
    id: str
    program: Optional[Program]
    reason: Optional[str] = None


def parse_against(snippet: SourceSnippet, signature: Signature) -> ParsedSnippet:
    """Parse a response; a valid program with the wrong signature counts as invalid."""
    verdict = parse(snippet)
    if isinstance(verdict, Invalid):
        return ParsedSnippet(snippet.id, None, verdict.reason)
    if not signature.matches(verdict.program):
        return ParsedSnippet(snippet.id, None, "signature does not match the problem entry")
    return ParsedSnippet(snippet.id, verdict.program)


def _path(parts: Sequence[Union[str, int]]) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def _decode_value(raw, t: SnipType, where: str) -> Value:
    value = tuple(raw) if isinstance(raw, list) else raw
    if not value_matches(value, t):
        raise DatasetError(f"{where}: expected a value of type {t}, got {raw!r}")
    return value


def _response(raw: dict) -> Response:
    snippet = SourceSnippet(raw["id"], raw["source"])
    prob = ResponseProb(raw["id"], float(raw["logprob"]), int(raw["tokens"]))
    followups = tuple(_response(f) for f in raw.get("followups", ()))
    return Response(snippet, prob, followups)


def decode(doc, origin: str = "<dataset>") -> List[ProblemRecord]:
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        raise DatasetError(f"{origin}: {_path(list(exc.absolute_path))}: {exc.message}") from None

    records = []
    seen_problems = set()
    for pi, raw in enumerate(doc["problems"]):
        where = f"{origin}: $.problems[{pi}]"
        if raw["id"] in seen_problems:
            raise DatasetError(f"{where}.id: duplicate problem id {raw['id']!r}")
        seen_problems.add(raw["id"])
        entry = raw["entry"]
        signature = Signature(
            entry["name"],
            tuple((p["name"], SnipType(p["type"])) for p in entry["params"]),
            SnipType(entry["return"]),
        )
        responses = tuple(_response(r) for r in raw["responses"])
        ids = [r.id for r in responses] + [f.id for r in responses for f in r.followups]
        dups = sorted({x for x in ids if ids.count(x) > 1})
        if dups:
            raise DatasetError(f"{where}.responses: duplicate response ids {', '.join(dups)}")
        if raw["top_ranked"] not in {r.id for r in responses}:
            raise DatasetError(f"{where}.top_ranked: {raw['top_ranked']!r} is not a response id")
        tests = []
        for ti, case in enumerate(raw["tests"]):
            twhere = f"{where}.tests[{ti}]"
            if len(case["input"]) != len(signature.params):
                raise DatasetError(
                    f"{twhere}.input: expected {len(signature.params)} values, got {len(case['input'])}"
                )
            inputs = tuple(
                _decode_value(v, t, f"{twhere}.input[{k}]")
                for k, (v, (_, t)) in enumerate(zip(case["input"], signature.params))
            )
            tests.append(TestCase(inputs, _decode_value(case["expected"], signature.returns, f"{twhere}.expected")))
        records.append(
            ProblemRecord(raw["id"], signature, responses, tuple(tests), raw["top_ranked"], raw.get("difficulty"))
        )
    return records


def load_dataset(path: Union[str, Path]) -> List[ProblemRecord]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise DatasetError(f"{path}: cannot read: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return decode(doc, str(path))
