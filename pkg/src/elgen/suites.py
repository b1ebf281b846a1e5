"""Seeded random instances and the batch checks shared by the CLI and tests."""
from __future__ import annotations

import random
from typing import Any

from .factor import (
    a2_sides, a3_conjugation, a4_conjugation, length_histogram, minimal_word_lengths,
    whitehead_h_factor,
)
from .matgroup import E, diag_h, evaluate_word, in_level, normalize_generator
from .quotient import FiniteQuotient, unit_exponent
from .ring import LocalizedRing, RingElement
from .search import torsion_units, unit_generators

IDENTITIES = ("A1", "A2", "A3", "A4")


def random_element(ring: LocalizedRing, rng: random.Random, bound: int = 6) -> RingElement:
    return ring([rng.randint(-bound, bound) for _ in range(ring.k)])


def random_nonunit(ring: LocalizedRing, rng: random.Random, bound: int = 6) -> RingElement:
    while True:
        x = random_element(ring, rng, bound)
        if not x.is_zero() and not x.is_unit():
            return x
        bound += 1  # small boxes can consist of units only, e.g. over Z[1/6]


def random_unit(ring: LocalizedRing, rng: random.Random, max_exp: int = 3) -> RingElement:
    u = rng.choice(torsion_units(ring))
    for g in unit_generators(ring):
        u = u * g ** rng.randint(-max_exp, max_exp)
    return u


def _check_a1(ring, rng) -> tuple[bool, dict]:
    q = random_nonunit(ring, rng, 4)
    u = random_unit(ring, rng) ** unit_exponent(ring, q * q)
    w = whitehead_h_factor(u, q)
    ok = evaluate_word(w) == diag_h(ring, u) and len(w) == 4
    ok = ok and all(in_level(g, q) for g in w.letters)
    return ok, {"q": q, "u": u}


def _check_a2(ring, rng) -> tuple[bool, dict]:
    u = random_unit(ring, rng)
    lhs, rhs = a2_sides(u)
    return lhs == rhs, {"u": u}


def _check_a3(ring, rng) -> tuple[bool, dict]:
    u = random_unit(ring, rng)
    x = random_element(ring, rng)
    letter = a3_conjugation(u, x)
    H = diag_h(ring, u)
    expected = H.inverse_sl2() * E(2, 1, x).matrix(ring, 2) * H
    return letter.matrix(ring, 2) == expected, {"u": u, "x": x}


def _check_a4(ring, rng) -> tuple[bool, dict]:
    while True:
        y, z = random_element(ring, rng, 4), random_element(ring, rng, 4)
        delta = 1 + y * z
        if not delta.is_zero():
            break
    u = random_unit(ring, rng)
    if not delta.is_unit():
        u = u ** unit_exponent(ring, delta)
    if rng.random() < 0.5:
        u = -u
    w, word = a4_conjugation(y, z, u)
    ok = evaluate_word(word) == E(2, 1, -w * y).matrix(ring, 2) and delta * w == u * u - 1
    return ok, {"y": y, "z": z, "u": u}


_CHECKS = {"A1": _check_a1, "A2": _check_a2, "A3": _check_a3, "A4": _check_a4}


def identity_suite(ring: LocalizedRing, trials: int, seed: int) -> dict[str, Any]:
    """Run every identity on `trials` fresh instances; exceptions count as failures."""
    rng = random.Random(seed)
    counts = {name: {"pass": 0, "fail": 0} for name in IDENTITIES}
    failures = []
    for trial in range(trials):
        for name in IDENTITIES:
            try:
                ok, inst = _CHECKS[name](ring, rng)
            except Exception as exc:  # a crash is a failed instance, reported below
                ok, inst = False, {"error": repr(exc)}
            counts[name]["pass" if ok else "fail"] += 1
            if not ok:
                failures.append({"identity": name, "trial": trial, "instance": inst})
    return {"counts": counts, "failures": failures, "trials": trials, "seed": seed}


def survey(ring: LocalizedRing, n: int, q, radius: int | None = None, budget: int = 10**6) -> dict[str, Any]:
    """BFS word-length table for E(n, A/qA) under all elementary generators."""
    fq = FiniteQuotient(ring, q)
    lengths = minimal_word_lengths(fq, n, radius, budget)
    hist = length_histogram(lengths)
    return {
        "quotient_size": fq.size,
        "reached": len(lengths),
        "histogram": {str(k): v for k, v in hist.items()},
        "max_length": max(hist) if hist else 0,
    }


def random_w_pair(ring: LocalizedRing, q: RingElement, rng: random.Random, bound: int = 30,
                  with_denominators: bool = False):
    """A random (a, b) in W(qA), optionally scaled by S-units to create denominators."""
    from .matgroup import in_w

    qt = normalize_generator(q)
    while True:
        a = 1 + qt * random_element(ring, rng, bound)
        b = qt * random_element(ring, rng, bound)
        if with_denominators and ring.s_generators:
            s = rng.choice(ring.s_generators)
            a = 1 + (a - 1) * s.inverse() ** rng.randint(0, 2)
            b = b * s.inverse() ** rng.randint(0, 2)
        if in_w(ring, q, a, b):
            return a, b
