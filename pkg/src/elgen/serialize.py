"""Text and JSON forms of rings, elements, words, witnesses and traces."""
from __future__ import annotations

import ast
import dataclasses
import json
import re
import sys
from fractions import Fraction
from typing import Any

from .errors import ParseError
from .matgroup import ElementaryGenerator, ElementaryWord, PrincipalIdeal, SquareMatrix, WPair
from .ring import LocalizedRing, RingElement, make_ring, poly_to_text

# witnesses carry exact integers with far more than 4300 digits
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

_RING_RE = re.compile(r"^\s*order\s*:\s*(?P<poly>[^;]+?)\s*(;\s*invert\s*:\s*(?P<inv>.*?))?\s*$")
_ELEM_RE = re.compile(r"^\s*num\s*=\s*(?P<num>\[[^\]]*\])\s*;\s*den\s*=\s*(?P<den>\{[^}]*\})\s*$")


def describe_ring(ring: LocalizedRing) -> str:
    inv = [list(v) if ring.k > 1 else v[0] for v in ring.s_vectors]
    return f"order: {poly_to_text(ring.poly)}; invert: {json.dumps(inv, separators=(',', ':'))}"


def parse_ring(text: str) -> LocalizedRing:
    """Parse `order: x^2-2; invert: [2,3]`."""
    m = _RING_RE.match(text or "")
    if not m:
        raise ParseError(f"malformed ring descriptor {text!r}")
    inv: Any = []
    if m.group("inv"):
        try:
            inv = ast.literal_eval(m.group("inv"))
        except (ValueError, SyntaxError) as exc:
            raise ParseError(f"malformed invert list {m.group('inv')!r}") from exc
        if not isinstance(inv, (list, tuple)):
            raise ParseError("invert must be a list")
    try:
        return make_ring(m.group("poly"), inv)
    except ParseError:
        raise
    except Exception as exc:
        raise ParseError(str(exc)) from exc


def format_element(x: RingElement) -> str:
    num, exps = x.ring.s_exponents(x)
    den = ", ".join(f"{i}: {e}" for i, e in sorted(exps.items()))
    return f"num=[{','.join(str(c) for c in num)}]; den={{{den}}}"


def parse_element(ring: LocalizedRing, text: str) -> RingElement:
    """Accepts the `num=[..]; den={..}` form, an integer, a fraction or a coordinate list."""
    if isinstance(text, RingElement):
        return ring(text)
    s = str(text).strip()
    try:
        m = _ELEM_RE.match(s)
        if m:
            num = ast.literal_eval(m.group("num"))
            den = ast.literal_eval(m.group("den"))
            return ring.from_s_exponents([int(c) for c in num], {int(k): int(v) for k, v in den.items()})
        if s.startswith("["):
            return ring([int(c) for c in ast.literal_eval(s)])
        if "/" in s:
            return ring(Fraction(s))
        return ring(int(s))
    except ParseError:
        raise
    except Exception as exc:
        raise ParseError(f"cannot parse element {text!r}: {exc}") from exc


def parse_matrix(ring: LocalizedRing, text: str) -> SquareMatrix:
    """A matrix given as a nested list literal of integers, fractions (quoted) or coordinate lists."""
    try:
        rows = ast.literal_eval(text) if isinstance(text, str) else text
        return SquareMatrix(ring, [[parse_element(ring, _entry_text(x)) for x in r] for r in rows])
    except ParseError:
        raise
    except Exception as exc:
        raise ParseError(f"cannot parse matrix {text!r}: {exc}") from exc


def _entry_text(x) -> str:
    if isinstance(x, list):
        return json.dumps(x)
    return str(x)


def to_jsonable(obj: Any) -> Any:
    """Recursively convert library objects to JSON-ready values."""
    if isinstance(obj, RingElement):
        return format_element(obj)
    if isinstance(obj, LocalizedRing):
        return describe_ring(obj)
    if isinstance(obj, ElementaryGenerator):
        return {"i": obj.i, "j": obj.j, "value": to_jsonable(obj.value)}
    if isinstance(obj, ElementaryWord):
        return [to_jsonable(g) for g in obj.letters]
    if isinstance(obj, SquareMatrix):
        return [[to_jsonable(x) for x in r] for r in obj.rows]
    if isinstance(obj, PrincipalIdeal):
        return {"generator": to_jsonable(obj.generator)}
    if isinstance(obj, WPair):
        return {"a": to_jsonable(obj.a), "b": to_jsonable(obj.b)}
    if isinstance(obj, Fraction):
        return str(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {}
        for f in dataclasses.fields(obj):
            if f.name == "ring" or not f.compare:
                continue
            out[f.name] = to_jsonable(getattr(obj, f.name))
        return out
    if isinstance(obj, dict):
        if obj and all(isinstance(k, tuple) and len(k) == 2 for k in obj):
            # formal product of symbols
            items = [{"a": to_jsonable(a), "b": to_jsonable(b), "exponent": e} for (a, b), e in obj.items()]
            return sorted(items, key=lambda d: (d["a"], d["b"]))
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if hasattr(obj, "fq") and hasattr(obj, "r"):
        return list(obj.r)
    return obj


def dumps(report: Any) -> str:
    """Deterministic JSON: sorted keys, fixed separators."""
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2, ensure_ascii=False)


def trace_from_json(data: dict):
    """Rebuild a DerivationTrace from its JSON form (see to_jsonable)."""
    from .mennicke import DerivationStep, DerivationTrace

    ring = parse_ring(data["ring"])
    q = parse_element(ring, data["q"])

    def product(items) -> dict:
        out: dict = {}
        for it in items:
            key = (parse_element(ring, it["a"]), parse_element(ring, it["b"]))
            out[key] = out.get(key, 0) + int(it["exponent"])
        return out

    def param(v):
        if isinstance(v, str):
            return parse_element(ring, v)
        if isinstance(v, list):
            return tuple((parse_element(ring, a), int(e)) for a, e in v)
        return v

    steps = []
    for s in data["steps"]:
        params = {k: param(v) for k, v in s["params"].items()}
        steps.append(DerivationStep(s["rule"], params, int(s.get("multiplicity", 1))))
    return DerivationTrace(ring, q, product(data.get("start", [])), tuple(steps),
                           product(data.get("end", [])), bool(data.get("principal", True)))


def trace_to_json(tr) -> dict:
    steps = []
    for s in tr.steps:
        params = {}
        for k, v in s.params.items():
            if isinstance(v, tuple):
                params[k] = [[format_element(a), e] for a, e in v]
            else:
                params[k] = to_jsonable(v)
        steps.append({"rule": s.rule, "params": params, "multiplicity": s.multiplicity})
    return {
        "ring": describe_ring(tr.ring),
        "q": format_element(tr.q),
        "principal": tr.principal,
        "start": to_jsonable(tr.start) if tr.start else [],
        "end": to_jsonable(tr.end) if tr.end else [],
        "steps": steps,
    }
