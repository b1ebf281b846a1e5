"""Proof-producing calculus for Mennicke symbols.

A symbol [b over a] at level q is keyed by the pair (a, b) of W(qA).  Since
the image of a Mennicke symbol is abelian, a formal product is a dict
{(a, b): exponent}.  Each DerivationStep names a rule whose left and right
sides are formal products that are equal in C(q); applying the step with
multiplicity m adds m * (rhs - lhs) to the running product, so the value in
C(q) never changes.  validate_trace recomputes every side condition with
exact arithmetic and never trusts the producer.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

from .errors import InvalidWitness, NotInW, SearchExhausted
from .matgroup import (
    SquareMatrix,
    WPair,
    as_generator,
    complete_to_sl2,
    in_w,
    is_congruence,
    nearest_quotient,
    normalize_generator,
)
from .quotient import FiniteQuotient
from .ring import LocalizedRing, RingElement
from .search import coordinate_shells, torsion_units, unit_generators

Product = dict  # {(a, b): exponent}
BFS_BUDGET = 10**5


# ------------------------------------------------------------------ data
@dataclass(frozen=True)
class DerivationStep:
    rule: str
    params: dict
    multiplicity: int = 1


@dataclass(frozen=True)
class DerivationTrace:
    ring: LocalizedRing
    q: RingElement
    start: dict
    steps: tuple
    end: dict = field(default_factory=dict)
    principal: bool = True


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    failed_step: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def symbol(a, b) -> tuple:
    return (a, b)


def add_products(*terms: tuple[int, Product]) -> Product:
    out: dict = {}
    for m, prod in terms:
        for key, e in prod.items():
            out[key] = out.get(key, 0) + m * e
    return {k: v for k, v in out.items() if v}


# ----------------------------------------------------------------- rules
class RuleError(Exception):
    pass


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise RuleError(msg)


def _in_sl(M: SquareMatrix, q: RingElement) -> bool:
    return M.det().is_one() and is_congruence(M, q)


def _ms1a(ring, q, p, principal):
    a, b, t = p["a"], p["b"], p["t"]
    _need(q.divides(t), "t is not in qA")
    return {(a, b): 1}, {(a, b + t * a): 1}


def _ms1b(ring, q, p, principal):
    a, b, t = p["a"], p["b"], p["t"]
    return {(a, b): 1}, {(a + t * b, b): 1}


def _ms2a(ring, q, p, principal):
    a, b1, b2 = p["a"], p["b1"], p["b2"]
    return add_products((1, {(a, b1): 1}), (1, {(a, b2): 1})), {(a, b1 * b2): 1}


def _ms2b(ring, q, p, principal):
    _need(principal, "MS2b needs a principal level ideal")
    b, factors = p["b"], p["factors"]
    _need(len(factors) > 0, "empty factor list")
    lhs: dict = {}
    prod = ring.one
    for a, e in factors:
        _need(isinstance(e, int) and e >= 1, "exponents must be positive integers")
        lhs[(a, b)] = lhs.get((a, b), 0) + e
        prod = prod * a**e
    return lhs, {(prod, b): 1}


def _swap(rule: Callable) -> Callable:
    def inner(ring, q, p, principal):
        lhs, rhs = rule(ring, q, p, principal)
        return rhs, lhs
    return inner


def _b1a(ring, q, p, principal):
    a, b = p["a"], p["b"]
    return {(a, b): 1}, {(a, b * (1 - a)): 1}


def _unit_term(ring, q, p, principal):
    a, b, u = p["a"], p["b"], p["u"]
    _need(u.is_unit(), "u is not a unit")
    _need(b.divides(a - u) or a.divides(b - u), "neither a = u mod bA nor b = u mod aA")
    return {(a, b): 1}, {}


def _inv(ring, q, p, principal):
    a, b, c, d = p["a"], p["b"], p["c"], p["d"]
    _need(_in_sl(SquareMatrix(ring, [[a, b], [c, d]]), q), "matrix is not in SL(2, A; q)")
    return add_products((1, {(a, b): 1}), (1, {(a, c): 1})), {}


def _sq(ring, q, p, principal):
    _need(principal, "the squaring rule needs a principal level ideal")
    a, b, c, d, f, g = (p[x] for x in "abcdfg")
    M = SquareMatrix(ring, [[a, b], [c, d]])
    N = SquareMatrix(ring, [[f + g * a, g * b], [g * c, f + g * d]])
    _need(_in_sl(M, q), "matrix is not in SL(2, A; q)")
    _need(_in_sl(N, q), "f Id + g M is not in SL(2, A; q)")
    w = f + g * a
    return {(w, b * g): 2}, {(w, b): 2}


def _prodinv(ring, q, p, principal):
    a1, a2, b, c, d = p["a1"], p["a2"], p["b"], p["c"], p["d"]
    _need(_in_sl(SquareMatrix(ring, [[a2, b], [c, d]]), q), "matrix is not in SL(2, A; q)")
    lhs = {(a1 * a2, b): 1}
    rhs = add_products((1, {(a2, b): 1}), (1, {(1 + a2 * d * (a1 - 1), a2 * b * (1 - a1)): 1}))
    return lhs, rhs


RULES: dict[str, Callable] = {
    "MS1a": _ms1a,
    "MS1b": _ms1b,
    "MS2a-merge": _ms2a,
    "MS2a-split": _swap(_ms2a),
    "MS2b-merge": _ms2b,
    "MS2b-split": _swap(_ms2b),
    "B1A": _b1a,
    "UNIT-TERM": _unit_term,
    "INV": _inv,
    "SQ": _sq,
    "PRODINV": _prodinv,
}


def rule_sides(ring: LocalizedRing, q: RingElement, step: DerivationStep, principal: bool = True):
    """(lhs, rhs) of a step after checking its side conditions; raises RuleError."""
    if step.rule not in RULES:
        raise RuleError(f"unknown rule {step.rule}")
    if not isinstance(step.multiplicity, int):
        raise RuleError("multiplicity must be an integer")
    lhs, rhs = RULES[step.rule](ring, q, step.params, principal)
    for a, b in itertools.chain(lhs, rhs):
        if not in_w(ring, q, a, b):
            raise RuleError(f"({a!r}, {b!r}) is not in W(q)")
    return lhs, rhs


def validate_trace(tr: DerivationTrace) -> ValidationReport:
    """Replay every step from the start product and compare with the end."""
    ring, q = tr.ring, tr.q
    current = add_products((1, tr.start))
    for key in itertools.chain(tr.start, tr.end):
        if not in_w(ring, q, *key):
            return ValidationReport(False, None, f"endpoint symbol {key!r} is not in W(q)")
    for idx, step in enumerate(tr.steps):
        try:
            lhs, rhs = rule_sides(ring, q, step, tr.principal)
        except RuleError as exc:
            return ValidationReport(False, idx, str(exc))
        except (NotInW, KeyError, TypeError, ValueError) as exc:
            return ValidationReport(False, idx, f"malformed step: {exc}")
        current = add_products((1, current), (step.multiplicity, rhs), (-step.multiplicity, lhs))
    if current != add_products((1, tr.end)):
        return ValidationReport(False, len(tr.steps), "end product does not match")
    return ValidationReport(True)


# ----------------------------------------------------------- certify_trivial
def _size(x: RingElement) -> int:
    if x.is_zero():
        return 0
    return int(abs(normalize_generator(x).norm()))


def _centered(fq: FiniteQuotient, x: RingElement) -> RingElement:
    """A small representative of x modulo the quotient's ideal."""
    r = fq.image(x)
    if fq.k == 1:
        n = fq.basis[0][0]
        v = r[0]
        if 2 * v > n:
            v -= n
        return fq.ring(v)
    m = fq.modulus
    r = x - nearest_quotient(x, m) * m
    basis = [fq.ring([int(i == j) for i in range(fq.k)]) * m for j in range(fq.k)]
    best = (abs(r.norm()), r)
    improved = True
    while improved:
        improved = False
        for v in basis:
            for cand in (best[1] + v, best[1] - v):
                n = abs(cand.norm())
                if n < best[0]:
                    best, improved = (n, cand), True
    return best[1]


def _candidate_units(ring: LocalizedRing) -> list[RingElement]:
    out = list(torsion_units(ring))
    for g in unit_generators(ring):
        for e in (1, -1, 2, -2):
            for t in torsion_units(ring):
                out.append(t * g**e)
    seen, uniq = set(), []
    for u in out:
        if u not in seen:
            seen.add(u)
            uniq.append(u)
    return uniq


def _unit_step(a: RingElement, b: RingElement, units) -> DerivationStep | None:
    if a.is_unit():
        return DerivationStep("UNIT-TERM", {"a": a, "b": b, "u": a})
    if b.is_zero():
        return None
    if b.is_unit():
        return DerivationStep("UNIT-TERM", {"a": a, "b": b, "u": b})
    for u in units:
        if b.divides(a - u) or a.divides(b - u):
            return DerivationStep("UNIT-TERM", {"a": a, "b": b, "u": u})
    return None


def _euclid(ring, q, qt, a, b, steps) -> tuple[RingElement, RingElement]:
    """Greedy reduction; returns the pair where no move shrinks the entries."""
    while True:
        if a.is_unit() or b.is_zero() or b.is_unit():
            return a, b
        sa, sb = _size(a), _size(b)
        if sa > sb:
            a2 = _centered(FiniteQuotient(ring, b), a)
            if _size(a2) < sa:
                steps.append(DerivationStep("MS1b", {"a": a, "b": b, "t": (a2 - a).exact_div(b)}))
                a = a2
                continue
        b2 = _centered(FiniteQuotient(ring, qt * a), b)
        if _size(b2) < sb:
            steps.append(DerivationStep("MS1a", {"a": a, "b": b, "t": (b2 - b).exact_div(a)}))
            b = b2
            continue
        # stuck: move a to a neighbouring representative if that lets b shrink enough
        best = None
        for t in _flip_multipliers(ring):
            a2 = a + t * b
            if a2.is_zero():
                continue
            b2 = _centered(FiniteQuotient(ring, qt * a2), b)
            score = _size(a2) + _size(b2)
            if score < sa + sb and (best is None or score < best[0]):
                best = (score, t, a2, b2)
        if best is None:
            return a, b
        _, t, a2, b2 = best
        steps.append(DerivationStep("MS1b", {"a": a, "b": b, "t": t}))
        if b2 != b:
            steps.append(DerivationStep("MS1a", {"a": a2, "b": b, "t": (b2 - b).exact_div(a2)}))
        a, b = a2, b2


def _flip_multipliers(ring: LocalizedRing) -> list[RingElement]:
    out = []
    for u in torsion_units(ring):
        for c in (1, 2):
            out.append(u * c)
    return out


def _bfs(ring, q, qt, a, b, units, budget) -> list[DerivationStep]:
    """Shortest move sequence to a pair closed by UNIT-TERM."""
    limit = 4 * max(_size(a), _size(b), _size(qt), 2) ** 2
    small = [ring(t) for t in (1, -1, 2, -2)]
    start = (a, b)
    parent: dict = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        x, y = node
        fin = _unit_step(x, y, units)
        if fin is not None:
            path = [fin]
            while parent[node] is not None:
                node, step = parent[node]
                path.append(step)
            return path[::-1]
        moves = [DerivationStep("MS1b", {"a": x, "b": y, "t": t}) for t in small]
        moves += [DerivationStep("MS1a", {"a": x, "b": y, "t": qt * t}) for t in small]
        moves.append(DerivationStep("B1A", {"a": x, "b": y}))
        for mv in moves:
            p = mv.params
            if mv.rule == "MS1b":
                nxt = (x + p["t"] * y, y)
            elif mv.rule == "MS1a":
                nxt = (x, y + p["t"] * x)
            else:
                nxt = (x, y * (1 - x))
            if nxt in parent or _size(nxt[0]) > limit or _size(nxt[1]) > limit:
                continue
            parent[nxt] = (node, mv)
            if len(parent) > budget:
                raise SearchExhausted("Mennicke BFS", budget)
            queue.append(nxt)
    raise SearchExhausted("Mennicke BFS", len(parent))


def certify_trivial(ring: LocalizedRing, q, a, b, budget: int = BFS_BUDGET) -> DerivationTrace:
    """A validated trace from [b over a] to the empty product."""
    q = as_generator(ring, q)
    pair = WPair(ring, q, a, b)
    a, b = pair.a, pair.b
    qt = normalize_generator(q)
    steps: list[DerivationStep] = []
    x, y = _euclid(ring, q, qt, a, b, steps)
    units = _candidate_units(ring)
    fin = _unit_step(x, y, units)
    if fin is not None:
        steps.append(fin)
    else:
        steps.extend(_bfs(ring, q, qt, x, y, units, budget))
    tr = DerivationTrace(ring, q, {(a, b): 1}, tuple(steps), {})
    report = validate_trace(tr)
    if not report:
        raise AssertionError(f"certificate failed validation: {report}")
    return tr


def inverse_chain(ring: LocalizedRing, q, a, b, c, d) -> DerivationTrace:
    """[b over a][c over a] -> 1 using only MS moves, B1A and UNIT-TERM."""
    q = as_generator(ring, q)
    a, b, c, d = (ring(x) for x in (a, b, c, d))
    if not _in_sl(SquareMatrix(ring, [[a, b], [c, d]]), q):
        raise NotInW("matrix is not in SL(2, A; q)")
    bc = b * c
    steps = [
        DerivationStep("MS2a-merge", {"a": a, "b1": b, "b2": c}),
        DerivationStep("B1A", {"a": a, "b": bc}),
        DerivationStep("MS1a", {"a": a, "b": bc * (1 - a), "t": -d * (1 - a)}),
        DerivationStep("MS1b", {"a": a, "b": a - 1, "t": ring(-1)}),
        DerivationStep("UNIT-TERM", {"a": ring.one, "b": a - 1, "u": ring.one}),
    ]
    return DerivationTrace(ring, q, add_products((1, {(a, b): 1}), (1, {(a, c): 1})), tuple(steps), {})


def prodinv_sides(ring: LocalizedRing, q, a1, a2, b, c, d) -> tuple[WPair, WPair, WPair]:
    """The three pairs of the multiplicative-inverse identity, checked by matrix product."""
    q = as_generator(ring, q)
    a1, a2, b, c, d = (ring(x) for x in (a1, a2, b, c, d))
    left = WPair(ring, q, a1 * a2, b)
    right = WPair(ring, q, a2, b)
    M2 = SquareMatrix(ring, [[a2, b], [c, d]])
    if not _in_sl(M2, q):
        raise NotInW("completion is not in SL(2, A; q)")
    M1 = complete_to_sl2(left)
    P = M1 * M2.inverse_sl2()
    out = WPair(ring, q, P[0, 0], P[0, 1])
    expected = (1 + a2 * d * (a1 - 1), a2 * b * (1 - a1))
    if (out.a, out.b) != expected:
        raise AssertionError("top row of the product is not the stated pair")
    return left, right, out


# ------------------------------------------------------------ exponent kill
def exponent_kill(ring: LocalizedRing, q, a, b, w) -> DerivationTrace:
    """A trace proving [b over a]^(-t) = 1 from an EXP witness."""
    from .props.exp import validate_exp_witness

    q = as_generator(ring, q)
    a, b = ring(a), ring(b)
    if w.a != a or w.b != b or w.q != q:
        raise InvalidWitness("witness is for a different pair")
    failures = validate_exp_witness(w)
    if failures:
        raise InvalidWitness("; ".join(failures))
    t = w.t
    start = {(a, b): -t}
    if b.is_zero():
        step = DerivationStep("UNIT-TERM", {"a": a, "b": b, "u": a}, -t)
        tr = DerivationTrace(ring, q, start, (step,), {})
        _check(tr)
        return tr
    ap, c, d = w.a_prime, w.c, w.d
    steps: list[DerivationStep] = []
    if ap != a:
        steps.append(DerivationStep("MS1b", {"a": a, "b": b, "t": (ap - a).exact_div(b)}, -t))
    steps.append(DerivationStep("INV", {"a": ap, "b": b, "c": c, "d": d}, -t))
    # t [c over a'] -> [c over a'^t] -> [c over prod w_i^2] -> sum 2 [c over w_i]
    ws = [fi + gi * ap for fi, gi in zip(w.f, w.g)]
    steps.append(DerivationStep("MS2b-merge", {"b": c, "factors": ((ap, t),)}))
    power = ap**t
    target = ring.one
    for wi in ws:
        target = target * wi * wi
    if target != power:
        steps.append(DerivationStep("MS1b", {"a": power, "b": c, "t": (target - power).exact_div(c)}))
    steps.append(DerivationStep("MS2b-split", {"b": c, "factors": tuple((wi, 2) for wi in ws)}))
    for i, wi in enumerate(ws):
        fi, gi, bi, di, ui = w.f[i], w.g[i], w.b_primes[i], w.d_primes[i], w.u[i]
        if wi.is_one():
            # the split left [c over 1]^2 behind
            steps.append(DerivationStep("UNIT-TERM", {"a": wi, "b": c, "u": wi}, 2))
            continue
        transposed = {"a": ap, "b": c, "c": bi, "d": di, "f": fi, "g": gi}
        steps.append(DerivationStep("SQ", transposed, -1))
        steps.append(DerivationStep("INV", {"a": wi, "b": c * gi, "c": bi * gi, "d": fi + gi * di}, 2))
        steps.append(DerivationStep("SQ", {"a": ap, "b": bi, "c": c, "d": di, "f": fi, "g": gi}, -1))
        if wi != ui:
            steps.append(DerivationStep("MS1b", {"a": wi, "b": bi, "t": (ui - wi).exact_div(bi)}, -2))
        steps.append(DerivationStep("UNIT-TERM", {"a": ui, "b": bi, "u": ui}, -2))
    tr = DerivationTrace(ring, q, start, tuple(steps), {})
    _check(tr)
    return tr


def _check(tr: DerivationTrace) -> None:
    report = validate_trace(tr)
    if not report:
        raise AssertionError(f"generated trace failed validation: {report}")


# ---------------------------------------------------------- rank witness
@dataclass(frozen=True)
class RankCertificate:
    ring: LocalizedRing
    q: RingElement
    pairs: tuple
    p: int
    t: int
    a_primes: tuple
    y: RingElement
    h: RingElement
    alpha: RingElement
    beta: RingElement
    exponents: tuple
    trace: DerivationTrace


def _crt(ring: LocalizedRing, residues: list[tuple[RingElement, RingElement]]) -> RingElement:
    """x = r_j mod m_j for pairwise coprime nonzero moduli, reduced mod their product."""
    total = ring.one
    for _, m in residues:
        total = total * m
    x = ring.zero
    for r, m in residues:
        other = total.exact_div(m) if not m.is_unit() else total * m.inverse()
        fq = FiniteQuotient(ring, m)
        inv = fq.inverse(fq.image(other))
        if inv is None:
            raise ValueError("moduli are not coprime")
        x = x + r * other * fq.lift(inv)
    return _centered(FiniteQuotient(ring, total), x) if not total.is_unit() else ring.zero


def _coprime_shift_list(ring, pairs) -> list[RingElement]:
    chosen: list[RingElement] = []
    for pr in pairs:
        if pr.b.is_zero():
            cand = pr.a
            ok = all(_coprime(ring, cand, o) for o in chosen)
            if not ok:
                raise SearchExhausted("pairwise coprime shifts (b = 0 leaves no freedom)", 0)
            chosen.append(cand)
            continue
        done = False
        for shell in coordinate_shells(ring.k):
            found = []
            for j in shell:
                cand = pr.a + ring(list(j)) * pr.b
                if cand.is_zero():
                    continue
                if all(_coprime(ring, cand, o) for o in chosen):
                    found.append(cand)
            if found:
                chosen.append(min(found, key=lambda x: (_size(x), x.den, x.num)))
                done = True
                break
            if len(chosen) > 50:
                break
        if not done:
            raise SearchExhausted("pairwise coprime shifts", 0)
    return chosen


def _coprime(ring, x, y) -> bool:
    from .matgroup import unimodular
    return unimodular(ring, x, y)


def rank_witness(ring: LocalizedRing, q, pairs, p: int, t: int, r: int = 1) -> RankCertificate:
    """Exponents e (not all 0 mod p) with prod [b_i over a_i]^e_i = [hq over beta]^p."""
    from .props.gen import gen_witness

    q = as_generator(ring, q)
    if t % p:
        raise ValueError("p must divide t")
    pairs = tuple(pr if isinstance(pr, WPair) else WPair(ring, q, *pr) for pr in pairs)
    if len(pairs) != r + 1:
        raise ValueError("need r + 1 pairs")
    a_primes = _coprime_shift_list(ring, pairs)
    residues = [(ring.one, q)] + [(pr.b, ap) for pr, ap in zip(pairs, a_primes) if not ap.is_unit()]
    y = _crt(ring, residues) if not q.is_unit() or len(residues) > 1 else ring.one
    modulus = q
    for ap in a_primes:
        modulus = modulus * ap
    h = gen_witness(ring, y, modulus, t).h
    fq = FiniteQuotient(ring, h)
    units = fq.units()
    pth = {}
    for u in units:
        pth.setdefault(fq.pow(u, p), u)
    images = [fq.image(ap) for ap in a_primes]
    exps = None
    order = sorted(itertools.product(range(p), repeat=r + 1), key=lambda e: (sum(e), tuple(-x for x in e)))
    for e in order:
        if not any(e):
            continue
        val = fq.one
        for img, ei in zip(images, e):
            val = fq.mul(val, fq.pow(img, ei))
        if val in pth:
            exps = e
            alpha = fq.lift(pth[val])
            break
    if exps is None:
        raise SearchExhausted("discrete-log exponents", len(order))
    beta = _crt(ring, [(alpha, h), (ring.one, q)]) if not q.is_unit() else alpha
    hq = h * q
    prod = ring.one
    for ap, ei in zip(a_primes, exps):
        prod = prod * ap**ei
    assert hq.divides(beta**p - prod) and (modulus).divides(h - y)
    # trace: sum e_i [b_i over a_i]  ->  p [hq over beta]
    steps: list[DerivationStep] = []
    start: dict = {}
    for pr, ap, ei in zip(pairs, a_primes, exps):
        if ei == 0:
            continue
        start = add_products((1, start), (ei, {(pr.a, pr.b): 1}))
        if ap != pr.a:
            steps.append(DerivationStep("MS1b", {"a": pr.a, "b": pr.b, "t": (ap - pr.a).exact_div(pr.b)}, ei))
        steps.append(DerivationStep("UNIT-TERM", {"a": ap, "b": q, "u": ring.one}, -ei))
        steps.append(DerivationStep("MS2a-merge", {"a": ap, "b1": pr.b, "b2": q}, ei))
        if pr.b * q != hq:
            steps.append(DerivationStep("MS1a", {"a": ap, "b": pr.b * q, "t": (hq - pr.b * q).exact_div(ap)}, ei))
    factors = tuple((ap, ei) for ap, ei in zip(a_primes, exps) if ei)
    steps.append(DerivationStep("MS2b-merge", {"b": hq, "factors": factors}))
    if beta**p != prod:
        steps.append(DerivationStep("MS1b", {"a": prod, "b": hq, "t": (beta**p - prod).exact_div(hq)}))
    steps.append(DerivationStep("MS2b-split", {"b": hq, "factors": ((beta, p),)}))
    tr = DerivationTrace(ring, q, start, tuple(steps), {(beta, hq): p})
    _check(tr)
    return RankCertificate(ring, q, pairs, p, t, tuple(a_primes), y, h, alpha, beta, tuple(exps), tr)
