"""Bounded searches: units of infinite order, primes in progressions, coprime shifts."""
from __future__ import annotations

import itertools
import math
from typing import Iterator

import sympy

from .errors import NoInfiniteUnits, NotCoprime, SearchExhausted
from .quotient import FiniteQuotient
from .ring import LocalizedRing, RingElement, is_root_of_unity

PRIME_BUDGET = 10**6
PELL_BUDGET = 10**5


# ---------------------------------------------------------------- units
def _pell_unit(d: int, budget: int) -> tuple[int, int]:
    """Fundamental solution of x^2 - d y^2 = +-1 by continued fractions."""
    a0 = math.isqrt(d)
    m, den, a = 0, 1, a0
    p_prev, p = 1, a0
    q_prev, q = 0, 1
    for _ in range(budget):
        if p * p - d * q * q in (1, -1):
            return p, q
        m = den * a - m
        den = (d - m * m) // den
        a = (a0 + m) // den
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    raise SearchExhausted("Pell continued fraction", budget)


def _real_quadratic_unit(ring: LocalizedRing, budget: int) -> RingElement:
    c0, c1 = ring.poly[0], ring.poly[1]
    disc = c1 * c1 - 4 * c0
    if c1 == 0 and disc > 0:
        x, y = _pell_unit(-c0, budget)
        u = ring((x, y))
    else:
        # theta = (-c1 + sqrt(disc)) / 2; search x + y*theta with norm +-1
        u = None
        for radius in range(1, budget):
            cands = []
            for y in range(1, radius + 1):
                for x in range(-radius, radius + 1):
                    if max(abs(x), y) != radius:
                        continue
                    cand = ring((x, y))
                    if abs(cand.norm()) == 1:
                        cands.append(cand)
            if cands:
                u = min(cands, key=lambda c: (c.num[1], c.num[0]))
                break
        if u is None:
            raise SearchExhausted("unit search", budget)
    # normalise to the unit > 1 under the real embedding
    root = (-c1 + math.sqrt(disc)) / 2
    candidates = [u, -u, u.inverse(), -u.inverse()]
    return max(candidates, key=lambda v: v.num[0] + v.num[1] * root)


def fundamental_unit_search(ring: LocalizedRing, budget: int = PELL_BUDGET) -> RingElement:
    """A unit of A of infinite multiplicative order."""
    for s in ring.s_generators:
        if not is_root_of_unity(s):
            return s
    if ring.k == 2:
        c0, c1 = ring.poly[0], ring.poly[1]
        if c1 * c1 - 4 * c0 > 0:
            return _real_quadratic_unit(ring, budget)
    if ring.k == 1 or ring.k == 2:
        raise NoInfiniteUnits(repr(ring))
    raise NoInfiniteUnits(f"no unit search implemented for degree {ring.k}")


def unit_generators(ring: LocalizedRing) -> list[RingElement]:
    """Generators of a finite-index subgroup of A^x, torsion omitted."""
    gens = [s for s in ring.s_generators if not is_root_of_unity(s)]
    if ring.k == 2:
        c0, c1 = ring.poly[0], ring.poly[1]
        if c1 * c1 - 4 * c0 > 0:
            gens.append(_real_quadratic_unit(ring, PELL_BUDGET))
    return gens


def torsion_units(ring: LocalizedRing) -> list[RingElement]:
    """Roots of unity in B (bounded search over small coordinates)."""
    out = []
    for vec in itertools.product(range(-1, 2), repeat=ring.k):
        x = ring(list(vec))
        if not x.is_zero() and is_root_of_unity(x):
            out.append(x)
    return sorted(out, key=lambda v: v.num)


# -------------------------------------------------------------- maximality
def is_maximal_principal(h: RingElement) -> bool:
    """Whether hB is a maximal ideal of B (h in B)."""
    if h.den != 1:
        raise ValueError("maximality is decided in the order")
    n = int(abs(h.norm()))
    if n <= 1:
        return False
    if sympy.isprime(n):
        return True
    ring = h.ring
    fac = sympy.factorint(n)
    if len(fac) != 1:
        return False
    (p, j), = fac.items()
    if j > ring.k:
        return False
    if not h.divides(ring(p)) or ring(p).exact_div(h).den != 1:
        return False
    x = sympy.Symbol("x")
    f = sympy.Poly(sum(sympy.Integer(c) * x**i for i, c in enumerate(ring.poly)), x, modulus=p)
    g = sympy.Poly(sum(sympy.Integer(c) * x**i for i, c in enumerate(h.num)), x, modulus=p)
    common = sympy.gcd(f, g)
    return common.degree() == j and common.is_irreducible


# ---------------------------------------------------------- enumeration
def coordinate_shells(k: int, start: int = 0) -> Iterator[list[tuple[int, ...]]]:
    """Integer vectors grouped by max-norm radius 0, 1, 2, ..."""
    radius = start
    while True:
        if radius == 0:
            yield [(0,) * k]
        else:
            shell = [v for v in itertools.product(range(-radius, radius + 1), repeat=k)
                     if max(abs(c) for c in v) == radius]
            yield shell
        radius += 1


def prime_in_progression(a: RingElement, b: RingElement, budget: int = PRIME_BUDGET) -> RingElement:
    """h = a + t*b with hB maximal and Norm(h) > 0.

    Candidates are scanned by the max-norm of t, and within a shell by |Norm(h)|
    and then lexicographically.
    """
    ring = a.ring
    if a.den != 1 or b.den != 1:
        raise ValueError("prime search works in the order")
    if b.is_zero():
        raise ValueError("b must be nonzero")
    base = ring.base_order_ring
    a0 = base(list(a.num))
    b0 = base(list(b.num))
    seen = 0
    for shell in coordinate_shells(ring.k):
        found = []
        for t in shell:
            seen += 1
            h = a0 + base(list(t)) * b0
            nm = h.norm()
            if nm <= 0:
                continue
            if is_maximal_principal(h):
                found.append(h)
        if found:
            best = min(found, key=lambda h: (abs(h.norm()), h.num))
            return ring(list(best.num))
        if seen > budget:
            raise SearchExhausted("prime in progression", budget)
    raise AssertionError("unreachable")


def coprime_shift(ring: LocalizedRing, a: RingElement, b: RingElement, budget: int = PRIME_BUDGET) -> RingElement:
    """a0 in B with a0 = a mod bA and a0 B + b gamma^2 B = B."""
    a, b = ring(a), ring(b)
    if b.is_zero():
        raise ValueError("b must be nonzero")
    fq = FiniteQuotient(ring, b)
    if not fq.is_unit(fq.image(a)):
        raise NotCoprime(f"{a!r} and {b!r} are not coprime")
    lift = fq.image(a)
    # b cleared of denominators
    bb = b
    while bb.den != 1:
        bb = bb * ring.sigma
    base = ring.base_order_ring
    gamma = ring.order.gamma
    target = FiniteQuotient(base, base(list(bb.num)) * gamma * gamma, localize=False)
    seen = 0
    for shell in coordinate_shells(ring.k):
        cands = []
        for coeffs in shell:
            seen += 1
            vec = list(lift)
            for c, row in zip(coeffs, fq.basis):
                for j in range(ring.k):
                    vec[j] += c * row[j]
            if target.is_unit(target.reduce(vec)):
                cands.append(ring(vec))
        if cands:
            return min(cands, key=lambda x: (abs(x.norm()), x.num))
        if seen > budget:
            raise SearchExhausted("coprime shift", budget)
    raise AssertionError("unreachable")
