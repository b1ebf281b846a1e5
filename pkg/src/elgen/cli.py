"""Command-line entry point: `elgen <command> ...` emitting deterministic JSON reports.

Exit codes: 0 ok, 2 parse or precondition error, 3 verification failure,
4 search budget exhausted.
"""
from __future__ import annotations

import argparse
import ast
import json
import sys
import time
from typing import Any, Callable

from . import mennicke, serialize, suites
from .errors import BudgetExceeded, ElgenError, ParseError, SearchExhausted
from .factor import (
    field_factorize, steinberg_rewrite, unit_conj_factorize, validate_unit_conj, vaserstein_reduce,
    whitehead_h_factor,
)
from .matgroup import (
    E, ElementaryWord, SquareMatrix, as_generator, diag_h, evaluate_word, in_level, is_congruence,
)
from .props.conj import build_conj_data, validate_conj_data
from .props.exp import exp_witness, validate_exp_witness
from .props.gen import gen_witness, validate_gen_witness
from .props.unit import serre_level, serre_unit, unit_prop_unit
from .quotient import FiniteQuotient, QuotientRing
from .search import torsion_units, unit_generators

EXIT_OK, EXIT_PARSE, EXIT_VERIFY, EXIT_SEARCH = 0, 2, 3, 4
DEFAULT_RING = "order: x-1; invert: []"


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse already exits 2; keep the message on stderr
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


# ------------------------------------------------------------------ helpers
def _ring(args):
    return serialize.parse_ring(args.ring)


def _elem(ring, text, name: str):
    if text is None:
        raise ParseError(f"--{name} is required")
    return serialize.parse_element(ring, text)


def _report(args, inputs: dict, outputs: Any, verified: bool) -> dict:
    return {
        "command": args.command_echo,
        "inputs": inputs,
        "outputs": outputs,
        "verified": bool(verified),
        "budget": args.budget,
        "seed": args.seed,
    }


def _letters_from_text(ring, text: str):
    try:
        raw = ast.literal_eval(text)
    except (ValueError, SyntaxError) as exc:
        raise ParseError(f"cannot parse letters {text!r}") from exc
    out = []
    for item in raw:
        if len(item) != 3:
            raise ParseError(f"letter {item!r} must be [i, j, value]")
        i, j, v = item
        out.append(E(int(i), int(j), serialize.parse_element(ring, serialize._entry_text(v))))
    return out


# ----------------------------------------------------------------- commands
def cmd_ring_check(args) -> dict:
    ring = _ring(args)
    out: dict[str, Any] = {
        "descriptor": serialize.describe_ring(ring),
        "degree": ring.k,
        "discriminant": ring.order.field.discriminant,
        "gamma": ring.order.gamma,
        "torsion_units": torsion_units(ring),
        "unit_generators": unit_generators(ring),
    }
    verified = serialize.parse_ring(out["descriptor"]) == ring
    if args.element is not None:
        x = serialize.parse_element(ring, args.element)
        out["element"] = x
        out["is_unit"] = x.is_unit()
        verified = verified and serialize.parse_element(ring, serialize.format_element(x)) == x
    return _report(args, {"ring": args.ring, "element": args.element}, out, verified)


def cmd_factor(args) -> dict:
    ring = _ring(args)
    inputs = {"ring": args.ring, "mode": args.mode, "matrix": args.matrix, "q": args.q,
              "q_deep": args.q_deep, "u": args.u, "word": args.word, "letter": args.letter, "n": args.n}
    mode = args.mode
    if mode == "field":
        q = _elem(ring, args.q, "q")
        qr = QuotientRing(FiniteQuotient(ring, q))
        T = serialize.parse_matrix(qr, args.matrix) if args.matrix else SquareMatrix.identity(qr, args.n)
        w = field_factorize(T)
        ok = evaluate_word(w) == T
        letters = [{"i": g.i, "j": g.j, "value": list(g.value.r)} for g in w.letters]
        out = {"word": letters, "length": len(w)}
    elif mode == "vaserstein":
        q, qd = _elem(ring, args.q, "q"), _elem(ring, args.q_deep, "q-deep")
        T = serialize.parse_matrix(ring, args.matrix)
        w = vaserstein_reduce(T, q, qd)
        prod = T * evaluate_word(w)
        levels = [in_level(g, q) for g in w.letters]
        ok = is_congruence(prod, qd) and all(levels)
        out = {"word": w, "length": len(w), "letter_in_level": levels}
    elif mode == "whitehead":
        q, u = _elem(ring, args.q, "q"), _elem(ring, args.u, "u")
        w = whitehead_h_factor(u, q)
        levels = [in_level(g, q) for g in w.letters]
        ok = evaluate_word(w) == diag_h(ring, u) and all(levels)
        out = {"word": w, "length": len(w), "letter_in_level": levels}
    elif mode == "unitconj":
        q = _elem(ring, args.q, "q")
        T = serialize.parse_matrix(ring, args.matrix)
        f = unit_conj_factorize(T, q, budget=args.budget or 10**5)
        levels = [in_level(g, q) for g in f.factors]
        ok = not validate_unit_conj(f) and len(f.factors) == 5 and all(levels)
        w = ElementaryWord(ring, 2, f.factors)
        out = {"word": w, "length": len(w), "letter_in_level": levels, "a_prime": f.a_prime,
               "t": f.t, "t_prime": f.t_prime}
    elif mode == "steinberg":
        q = _elem(ring, args.q, "q")
        n = args.n
        g = ElementaryWord(ring, n, _letters_from_text(ring, args.word or "[]"))
        (x,) = _letters_from_text(ring, args.letter or "[]") or (None,)
        if x is None:
            raise ParseError("--letter is required")
        w = steinberg_rewrite(g, x, q)
        G = evaluate_word(g)
        target = evaluate_word(g.inverse()) * x.matrix(ring, n) * G
        levels = [in_level(h, q) for h in w.letters]
        ok = evaluate_word(w) == target and all(levels)
        out = {"word": w, "length": len(w), "letter_in_level": levels}
    else:
        raise ParseError(f"unknown mode {mode!r}")
    return _report(args, inputs, out, ok)


def cmd_identities(args) -> dict:
    ring = _ring(args)
    res = suites.identity_suite(ring, args.trials, args.seed)
    ok = all(c["fail"] == 0 for c in res["counts"].values())
    return _report(args, {"ring": args.ring, "trials": args.trials}, res, ok)


def cmd_survey(args) -> dict:
    ring = _ring(args)
    q = _elem(ring, args.q, "q")
    res = suites.survey(ring, args.n, q, args.radius, args.budget or 10**6)
    ok = sum(res["histogram"].values()) == res["reached"]
    return _report(args, {"ring": args.ring, "n": args.n, "q": args.q, "radius": args.radius}, res, ok)


def cmd_mennicke_certify(args) -> dict:
    ring = _ring(args)
    q, a, b = _elem(ring, args.q, "q"), _elem(ring, args.a, "a"), _elem(ring, args.b, "b")
    tr = mennicke.certify_trivial(ring, q, a, b, budget=args.budget or mennicke.BFS_BUDGET)
    data = serialize.trace_to_json(tr)
    report = mennicke.validate_trace(serialize.trace_from_json(data))
    out = {"trace": data, "steps": len(tr.steps), "validation": {"ok": report.ok, "reason": report.reason}}
    return _report(args, {"ring": args.ring, "q": args.q, "a": args.a, "b": args.b}, out, report.ok)


def cmd_mennicke_validate(args) -> dict:
    try:
        text = sys.stdin.read() if args.trace == "-" else open(args.trace, encoding="utf-8").read()
        data = json.loads(text)
    except (OSError, ValueError) as exc:
        raise ParseError(f"cannot read trace: {exc}") from exc
    if "outputs" in data and "trace" in data.get("outputs", {}):
        data = data["outputs"]["trace"]
    try:
        tr = serialize.trace_from_json(data)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed trace: {exc}") from exc
    report = mennicke.validate_trace(tr)
    out = {"ok": report.ok, "failed_step": report.failed_step, "reason": report.reason}
    return _report(args, {"trace": args.trace}, out, report.ok)


def cmd_witness(args) -> dict:
    ring = _ring(args)
    kind = args.kind
    inputs = {"ring": args.ring, "q": args.q, "a": args.a, "b": args.b, "t": args.t, "matrix": args.matrix}
    if kind == "gen":
        a, b = _elem(ring, args.a, "a"), _elem(ring, args.b, "b")
        w = gen_witness(ring, a, b, args.t, **_budget(args))
        ok = not validate_gen_witness(w)
        out: Any = w
    elif kind == "exp":
        q, a, b = _elem(ring, args.q, "q"), _elem(ring, args.a, "a"), _elem(ring, args.b, "b")
        w = exp_witness(ring, q, a, b, **_budget(args))
        tr = mennicke.exponent_kill(ring, q, a, b, w)
        failures = validate_exp_witness(w)
        report = mennicke.validate_trace(tr)
        ok = not failures and report.ok
        out = {"witness": w, "trace": serialize.trace_to_json(tr), "failures": failures}
    elif kind == "unit":
        q = _elem(ring, args.q, "q")
        u = unit_prop_unit(ring, q)
        ok = u.is_unit() and as_generator(ring, q).divides(u - 1) and not (u**4).is_one()
        out = {"u": u}
    elif kind == "conj":
        q = _elem(ring, args.q, "q")
        d = build_conj_data(ring, q, **_budget(args))
        failures = validate_conj_data(d)
        ok = not failures
        out = {"data": d, "failures": failures}
    elif kind == "serre":
        T = serialize.parse_matrix(ring, args.matrix)
        u = serre_unit(ring, T)
        level = serre_level(ring, T)
        c = T[1, 0]
        ok = u is None or (u.is_unit() and c.divides(u * u - 1) and not (u**4).is_one())
        out = {"u": u, "level": level}
    else:
        raise ParseError(f"unknown witness kind {kind!r}")
    return _report(args, inputs, out, ok)


def _budget(args) -> dict:
    return {"budget": args.budget} if args.budget else {}


# ------------------------------------------------------------------- parser
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ring", default=DEFAULT_RING, help="ring descriptor, e.g. 'order: x^2-2; invert: [2]'")
    common.add_argument("--q", help="level element")
    common.add_argument("--seed", type=int, default=0, help="seed for every random choice")
    common.add_argument("--budget", type=int, default=None, help="search budget override")
    common.add_argument("--json", action="store_true", help="JSON output (the default)")
    common.add_argument("--table", action="store_true", help="human-readable summary instead of JSON")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings")

    p = _Parser(prog="elgen", description="Elementary generation toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ring = sub.add_parser("ring", help="ring descriptors")
    rsub = ring.add_subparsers(dest="action", required=True, parser_class=_Parser)
    chk = rsub.add_parser("check", parents=[common], help="parse a descriptor and report invariants")
    chk.add_argument("--element")
    chk.set_defaults(func=cmd_ring_check)

    fac = sub.add_parser("factor", parents=[common], help="elementary factorizations")
    fac.add_argument("--mode", required=True, choices=["field", "vaserstein", "whitehead", "unitconj", "steinberg"])
    fac.add_argument("--matrix")
    fac.add_argument("--q-deep", dest="q_deep")
    fac.add_argument("--u")
    fac.add_argument("--n", type=int, default=2)
    fac.add_argument("--word", help="conjugator letters as [[i, j, value], ...]")
    fac.add_argument("--letter", help="single letter [[i, j, value]]")
    fac.set_defaults(func=cmd_factor)

    ids = sub.add_parser("identities", parents=[common], help="randomized identity suite")
    ids.add_argument("--trials", type=int, default=100)
    ids.set_defaults(func=cmd_identities)

    men = sub.add_parser("mennicke", help="Mennicke symbol traces")
    msub = men.add_subparsers(dest="action", required=True, parser_class=_Parser)
    cert = msub.add_parser("certify", parents=[common])
    cert.add_argument("--a", required=True)
    cert.add_argument("--b", required=True)
    cert.set_defaults(func=cmd_mennicke_certify)
    val = msub.add_parser("validate", parents=[common])
    val.add_argument("--trace", required=True, help="JSON file, or - for stdin")
    val.set_defaults(func=cmd_mennicke_validate)

    wit = sub.add_parser("witness", help="ring-property witnesses")
    wsub = wit.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    for kind in ("gen", "exp", "unit", "conj", "serre"):
        w = wsub.add_parser(kind, parents=[common])
        w.add_argument("--a")
        w.add_argument("--b")
        w.add_argument("--t", type=int, default=2)
        w.add_argument("--matrix")
        w.set_defaults(func=cmd_witness)

    sur = sub.add_parser("survey", parents=[common], help="word-length table over a finite quotient")
    sur.add_argument("--n", type=int, default=2)
    sur.add_argument("--radius", type=int, default=None)
    sur.set_defaults(func=cmd_survey)
    return p


def _table(report: dict) -> str:
    lines = [f"command : {report['command']}", f"verified: {report['verified']}"]
    outputs = serialize.to_jsonable(report["outputs"])
    if isinstance(outputs, dict):
        for k in sorted(outputs):
            v = json.dumps(outputs[k], sort_keys=True)
            lines.append(f"{k:<16}{v if len(v) <= 100 else v[:97] + '...'}")
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.command_echo = " ".join(["elgen"] + argv)
    start = time.perf_counter()
    func: Callable = args.func
    try:
        report = func(args)
    except (SearchExhausted, BudgetExceeded) as exc:
        print(f"elgen: search exhausted: {exc}", file=sys.stderr)
        return EXIT_SEARCH
    except (ElgenError, ValueError, TypeError) as exc:
        print(f"elgen: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if args.timings:
        report["timings"] = {"seconds": round(time.perf_counter() - start, 6)}
    print(_table(report) if args.table else serialize.dumps(report))
    return EXIT_OK if report["verified"] else EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
