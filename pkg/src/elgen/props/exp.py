"""EXP(2(8k)!, 2) witnesses and the exponent-avoiding search behind them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..errors import BudgetExceeded, NotInW, SearchExhausted
from ..lattice import det, xgcd
from ..matgroup import (
    SquareMatrix, WPair, complete_to_sl2, is_congruence, normalize_generator, span_power,
    unimodular,
)
from ..quotient import FiniteQuotient, element_order_mod, unit_exponent
from ..ring import LocalizedRing, RingElement
from ..search import coordinate_shells

SEARCH_BUDGET = 10**5


def big_factorial(ring: LocalizedRing) -> int:
    return math.factorial(8 * ring.k)


def f_prime_candidates(ring: LocalizedRing, f, g, n: int, h, budget: int = SEARCH_BUDGET):
    """Valid f' = f + j g (j in B) shell by shell, each shell sorted as in f_prime_search."""
    f, g, h = ring(f), ring(g), ring(h)
    K = big_factorial(ring)
    seen = 0
    for shell in coordinate_shells(ring.k):
        found = []
        for j in shell:
            seen += 1
            cand = f + ring(list(j)) * g
            if cand.is_zero() or cand.norm() <= 0 or cand.is_unit():
                continue
            if not unimodular(ring, cand, h):
                continue
            if K % math.gcd(unit_exponent(ring, cand), n):
                continue
            found.append(cand)
        yield from sorted(found, key=lambda x: (abs(x.norm()), x.den, x.num))
        if seen > budget:
            raise SearchExhausted("f' search", budget)


def f_prime_search(ring: LocalizedRing, f, g, n: int, h, budget: int = SEARCH_BUDGET) -> RingElement:
    """f' = f + j g (j in B) with gcd(e(f'A), n) | (8k)! and f'A + hA = A.

    Candidates are scanned by the max-norm of j; zero, units and elements of
    non-positive norm are skipped, and ties go to the smallest |Norm| and then
    the coordinates.
    """
    return next(f_prime_candidates(ring, f, g, n, h, budget))


def norm_image_size(p: int, r: int, ring: LocalizedRing, budget: int = 10**6) -> int:
    """Size of the image of U(p^r B) -> U(p^r Z) induced by the norm."""
    base = ring.base_order_ring
    mod = p**r
    fq = FiniteQuotient(base, mod, localize=False)
    if fq.size > budget:
        raise BudgetExceeded(f"quotient of size {fq.size} exceeds budget {budget}")
    image = set()
    for x in fq.elements(budget):
        # x is a unit mod p^r exactly when multiplication by x has determinant prime to p
        n = det(base.mult_matrix(x))
        if n % p:
            image.add(n % mod)
    return len(image)


@dataclass(frozen=True)
class ExpWitness:
    ring: LocalizedRing
    q: RingElement
    a: RingElement
    b: RingElement
    t: int
    a_prime: RingElement
    c: RingElement
    d: RingElement
    u: tuple
    f: tuple
    g: tuple
    b_primes: tuple
    d_primes: tuple
    side: dict = field(default_factory=dict, compare=False)

    @property
    def ell(self) -> int:
        return len(self.u)


def _bezout_balanced(e1: int, e2: int, target: int) -> tuple[int, int]:
    """t1, t2 with e1 t1 + e2 t2 = target, keeping max(|e1 t1|, |e2 t2|) small."""
    g, s, _ = xgcd(e1, e2)
    if target % g:
        raise ValueError("gcd does not divide the target")
    step = e2 // g
    t1 = s * (target // g)
    # e1*t1 moves in steps of e1*e2/g; aim for e1*t1 near target/2
    lcm = e1 * step
    shift = round((target / 2 - e1 * t1) / lcm) if lcm else 0
    best = None
    for k in (shift - 1, shift, shift + 1):
        c1 = t1 + k * step
        c2 = (target - e1 * c1) // e2
        key = max(abs(e1 * c1), abs(e2 * c2))
        if best is None or key < best[0]:
            best = (key, c1, c2)
    return best[1], best[2]


def exp_witness(ring: LocalizedRing, q, a, b, budget: int = SEARCH_BUDGET) -> ExpWitness:
    """Witness data for EXP(2(8k)!, 2) at the pair (a, b) of W(qA)."""
    q, a, b = ring(q), ring(a), ring(b)
    if q.is_zero():
        raise ValueError("q must be nonzero")
    pair = WPair(ring, q, a, b)
    K = big_factorial(ring)
    t = 2 * K
    one, zero = ring.one, ring.zero
    T = complete_to_sl2(pair)
    c, d = T[1, 0], T[1, 1]
    if b.is_zero() or a.is_zero():
        f1, g1 = span_power(T, t // 2)
        u1 = a ** (t // 2) if b.is_zero() else one
        w = ExpWitness(ring, q, a, b, t, a, c, d, (u1, one), (f1, one), (g1, zero),
                       (b, b), (d, d), {"path": "b = 0" if b.is_zero() else "a = 0"})
    else:
        qt = normalize_generator(q)
        b0 = b.exact_div(qt)
        alpha1 = element_order_mod(a, b)
        bp = f_prime_search(ring, b0, a, alpha1, q, budget=budget)
        alpha2 = unit_exponent(ring, bp)
        t1, t2 = _bezout_balanced(alpha1, alpha2, K)
        b2 = bp * qt
        d2 = d + (b2 - b) * c / a
        M2 = SquareMatrix(ring, [[a, b2], [c, d2]])
        f1, g1 = span_power(T, alpha1 * t1)
        f2, g2 = span_power(M2, alpha2 * t2)
        side = {"path": "general", "b0": b0, "alpha1": alpha1, "alpha2": alpha2,
                "t1": t1, "t2": t2, "b_search": bp}
        w = ExpWitness(ring, q, a, b, t, a, c, d, (one, one), (f1, f2), (g1, g2),
                       (b, b2), (d, d2), side)
    failures = validate_exp_witness(w)
    if failures:
        raise AssertionError("; ".join(failures))
    return w


def validate_exp_witness(w: ExpWitness) -> list[str]:
    """Recheck the six defining conditions; returns the list of failures."""
    ring, q = w.ring, w.q
    bad = []
    try:
        WPair(ring, q, w.a, w.b)
    except NotInW:
        bad.append("(a, b) is not in W(qA)")
        return bad
    ap, c = w.a_prime, w.c

    def in_sl(M: SquareMatrix) -> bool:
        return M.det().is_one() and is_congruence(M, q)

    if not w.b.divides(ap - w.a):
        bad.append("(1) a' is not a modulo bA")
    if not in_sl(SquareMatrix(ring, [[ap, w.b], [c, w.d]])):
        bad.append("(2) [[a', b], [c, d]] is not in SL(2, A; qA)")
    prod = ring.one
    for i in range(w.ell):
        Mi = SquareMatrix(ring, [[ap, w.b_primes[i]], [c, w.d_primes[i]]])
        if not in_sl(Mi):
            bad.append(f"(3) matrix {i + 1} is not in SL(2, A; qA)")
            continue
        fi, gi = w.f[i], w.g[i]
        N = SquareMatrix(ring, [[fi + gi * ap, gi * w.b_primes[i]], [gi * c, fi + gi * w.d_primes[i]]])
        if not in_sl(N):
            bad.append(f"(4) f Id + g M for index {i + 1} is not in SL(2, A; qA)")
        val = fi + gi * ap
        prod = prod * val * val
        if not w.u[i].is_unit():
            bad.append(f"(6) u_{i + 1} is not a unit")
        elif not w.b_primes[i].divides(val - w.u[i]):
            bad.append(f"(6) f + g a' is not u_{i + 1} modulo b'_{i + 1}")
    if not c.divides(prod - ap ** w.t):
        bad.append("(5) product of squares is not (a')^t modulo cA")
    return bad
