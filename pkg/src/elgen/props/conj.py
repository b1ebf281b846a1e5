"""Membership in the set M_q, its sum decompositions, and signed six-prime sums."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import sympy
from sympy.ntheory.modular import crt

from ..errors import NotInRing, SearchExhausted
from ..lattice import solve_combination
from ..matgroup import as_generator
from ..quotient import element_order_mod
from ..ring import LocalizedRing, RingElement
from ..search import fundamental_unit_search, torsion_units, unit_generators

MSET_BUDGET = 10**5
PRIME_BUDGET = 400
ENLARGE_BUDGET = 10**4


@dataclass(frozen=True)
class ConjMWitness:
    y: RingElement
    z: RingElement
    u1: RingElement
    u2: RingElement


def validate_mset_witness(w: ConjMWitness, q) -> list[str]:
    ring = w.y.ring
    q = as_generator(ring, q)
    bad = []
    if not q.divides(w.y):
        bad.append("y is not in qA")
    try:
        ring(w.z)
    except NotInRing:
        bad.append("z is not in A")
        return bad
    if not (q.divides(w.z - 1) or q.divides(w.z + 1)):
        bad.append("z is not +-1 modulo qA")
    if not (w.u1.is_unit() and w.u2.is_unit()):
        bad.append("u1, u2 must be units")
    if 1 + w.y * w.z * w.u1 * w.u1 != w.u2 * w.u2:
        bad.append("1 + y z u1^2 != u2^2")
    return bad


# ------------------------------------------------------------- membership
def _vectors_with_l1(dim: int, total: int):
    if dim == 0:
        if total == 0:
            yield ()
        return
    for first in range(-total, total + 1):
        for rest in _vectors_with_l1(dim - 1, total - abs(first)):
            yield (first,) + rest


def _unit(gens, torsion, vec):
    u = torsion
    for g, e in zip(gens, vec):
        u = u * g**e
    return u


def mset_membership(ring: LocalizedRing, q, y, budget: int = MSET_BUDGET) -> ConjMWitness:
    """(z, u1, u2) with 1 + y z u1^2 = u2^2 and z = +-1 mod qA.

    Pairs of units are scanned by the total size of their exponent vectors
    over the torsion-free generators; torsion is tried at every step.
    """
    q, y = as_generator(ring, q), ring(y)
    if not q.divides(y):
        raise ValueError("y must lie in qA")
    one = ring.one
    if y.is_zero():
        return ConjMWitness(y, one, one, one)
    gens = unit_generators(ring)
    torsion = sorted(torsion_units(ring), key=lambda x: x != one)
    # torsion elements with distinct squares suffice
    tors = []
    for t in torsion:
        if all(t * t != s * s for s in tors):
            tors.append(t)
    g = len(gens)
    tried = 0
    for total in itertools.count():
        if g == 0 and total > 0:
            break
        # non-negative exponents first, then lexicographic
        shell = sorted(_vectors_with_l1(2 * g, total),
                       key=lambda v: (sum(-x for x in v if x < 0), tuple(-x for x in v)))
        for vec in shell:
            for t1, t2 in itertools.product(tors, repeat=2):
                tried += 1
                if tried > budget:
                    raise SearchExhausted("M_q membership", budget)
                u1 = _unit(gens, t1, vec[:g])
                u2 = _unit(gens, t2, vec[g:])
                z = (u2 * u2 - 1)._field_div(y * u1 * u1)
                try:
                    z = ring(z)
                except NotInRing:
                    continue
                if q.divides(z - 1) or q.divides(z + 1):
                    return ConjMWitness(y, z, u1, u2)
    raise SearchExhausted("M_q membership", tried)


# ------------------------------------------------------------- six primes
@dataclass(frozen=True)
class SixPrimeDecomposition:
    t: int
    r: int
    m: int
    primes: tuple

    def check(self) -> bool:
        p = self.primes
        return (len(p) == 6 and all(sympy.isprime(x) and x % self.m == self.r % self.m for x in p)
                and p[0] + p[1] + p[2] - p[3] - p[4] - p[5] == self.t)


def _triple_key(triple):
    return (triple[0], triple)


def six_prime_decompose(t: int, r: int, m: int, budget: int = PRIME_BUDGET) -> SixPrimeDecomposition:
    """t = p1 + p2 + p3 - p4 - p5 - p6 with every p_i prime and = r mod m.

    Finds the smallest triple sum s with s - t also a triple sum, using only
    sums that are already complete for the primes enumerated so far.  Each
    triple is the one with the smallest largest prime, listed descending.
    """
    if m < 1 or math.gcd(r, m) != 1:
        raise ValueError("need m >= 1 and gcd(r, m) = 1")
    if t % m:
        raise ValueError("t must be a multiple of m")
    if t < 0:
        d = six_prime_decompose(-t, r, m, budget)
        return SixPrimeDecomposition(t, r, m, d.primes[3:] + d.primes[:3])
    primes: list[int] = []
    sums: dict[int, tuple] = {}
    n = r % m or m
    while len(primes) < budget:
        while not sympy.isprime(n):
            n += m
        p, n = n, n + m
        primes.append(p)
        for i, a in enumerate(primes):
            for b in primes[i:]:
                trip = tuple(sorted((p, a, b), reverse=True))
                s = sum(trip)
                if s not in sums or _triple_key(trip) < _triple_key(sums[s]):
                    sums[s] = trip
        complete = 2 * primes[0] + p
        for s in sorted(x for x in sums if x <= complete):
            if s - t in sums:
                d = SixPrimeDecomposition(t, r, m, sums[s] + sums[s - t])
                assert d.check()
                return d
    raise SearchExhausted("six-prime decomposition", budget)


# --------------------------------------------------------- CONJ data
@dataclass(frozen=True)
class ConjData:
    ring: LocalizedRing
    q_input: RingElement
    q: int
    e: int
    t: int
    a: int
    D: tuple
    b: RingElement
    u: RingElement
    y: RingElement
    q_prime: RingElement
    q_double: RingElement
    n0: int
    n1: int
    r: int
    m: int

    @property
    def modulus(self) -> RingElement:
        """q' m q'': every element of this ideal is a sum of at most 6 |D| elements of M_q."""
        return self.q_prime * self.m * self.q_double


def _strip_unit_primes(ring: LocalizedRing, n: int) -> int:
    for p in sympy.factorint(n):
        if ring(p).is_unit():
            while n % p == 0:
                n //= p
    return n


def _strip_primes_of(n: int, Q: int) -> int:
    """n with every prime factor of Q removed."""
    for p in sympy.primefactors(Q):
        while n % p == 0:
            n //= p
    return n


def _power_basis(ring: LocalizedRing) -> list[RingElement]:
    return [ring([int(i == j) for i in range(ring.k)]) for j in range(ring.k)]


def _t_for(Q: int, e: int, limit: int) -> tuple[int, int] | None:
    for t in range(2, min(Q * Q, limit)):
        if math.gcd(t, Q) != 1:
            continue
        v = pow(t, e, Q * Q) - 1
        if v % Q == 0 and math.gcd(v // Q, Q) == 1:
            return t, (v // Q) % Q
    return None


def _spans(ring: LocalizedRing, D, target_gen: RingElement) -> bool:
    """Whether the Z-span of D contains target_gen * B."""
    vecs = [d.num for d in D]
    return all(solve_combination(vecs, (target_gen * e).num) is not None for e in _power_basis(ring))


def build_conj_data(ring: LocalizedRing, q, budget: int = ENLARGE_BUDGET) -> ConjData:
    """q', q'', r, m and D such that p d q'' lies in M_q for primes p = r mod m."""
    q_in = as_generator(ring, q)
    if q_in.is_zero():
        raise ValueError("q must be nonzero")
    u0 = fundamental_unit_search(ring)
    k = ring.k
    cleared = q_in
    while cleared.den != 1:
        cleared = cleared * ring.sigma
    q0 = _strip_unit_primes(ring, int(abs(cleared.norm())))
    disc = abs(ring.order.field.discriminant)
    gamma = ring.order.gamma
    base = math.lcm(q0, disc, gamma)
    chosen = None
    for mult in range(1, budget):
        if _strip_unit_primes(ring, mult) != mult:
            continue
        Q = base * mult
        e = int(sympy.reduced_totient(Q)) if Q > 1 else 1
        if e % math.factorial(k):
            continue
        found = _t_for(Q, e, budget)
        if found:
            chosen = (Q, e, *found)
            break
    if chosen is None:
        raise SearchExhausted("enlarging q", budget)
    Q, e, t, a = chosen
    te = ring(t ** (e - 1))
    basis = _power_basis(ring)
    full_D = [te * a] + [te * (a + Q * d0) for d0 in basis]
    q_prime = te * Q
    D = None
    for size in range(1, len(full_D) + 1):
        for sub in itertools.combinations(full_D, size):
            if _spans(ring, sub, q_prime):
                D = tuple(sub)
                break
        if D:
            break
    b = te * a
    for d0 in basis:
        b = b * (a + Q * d0)
    u0b = u0
    while u0b.den != 1:
        u0b = u0b * ring.sigma
    if not u0b.is_unit():
        u0b = u0
    u = u0b ** element_order_mod(u0b, ring(Q * Q) * b)
    y = u * u - 1
    q_double = ring(Q) * y / (u * u)
    ny = int(abs(y.norm()))
    n0 = _strip_primes_of(ny, Q)
    n1 = ny // n0
    m = ny if ny % 2 == 0 else 2 * ny
    mods, rems = [Q * Q, n0], [t % (Q * Q), 1 % n0]
    if Q % 2 and n0 % 2:
        mods.append(2)
        rems.append(1)
    r, _ = crt(mods, rems)
    data = ConjData(ring, q_in, Q, e, t, a, D, b, u, y, q_prime, q_double, n0, n1, int(r), m)
    failures = validate_conj_data(data)
    if failures:
        raise AssertionError("; ".join(failures))
    return data


def validate_conj_data(d: ConjData) -> list[str]:
    ring, Q = d.ring, d.q
    bad = []
    if not d.q_input.divides(ring(Q)):
        bad.append("enlarged q is not a multiple of the input")
    if d.e % math.factorial(ring.k) or (Q > 1 and d.e != int(sympy.reduced_totient(Q))):
        bad.append("e is not the exponent of U(qZ) or k! does not divide it")
    if Q % abs(ring.order.field.discriminant) or Q % ring.order.gamma:
        bad.append("q is not divisible by the discriminant and the index witness")
    if (pow(d.t, d.e) - 1 - d.a * Q) % (Q * Q) or math.gcd(d.a, Q) != 1:
        bad.append("t^e - 1 != a q modulo q^2 with gcd(a, q) = 1")
    if not all(x.divides(d.b) for x in d.D):
        bad.append("an element of D does not divide b")
    if math.gcd(int(abs(d.b.norm())), Q) != 1:
        bad.append("b is not coprime to q")
    if not _spans(ring, d.D, d.q_prime):
        bad.append("the span of D does not contain q'B")
    if not d.u.is_unit() or (d.u * d.u).is_one():
        bad.append("u must be a unit with u^2 != 1")
    if not (ring(Q * Q) * d.b).divides(d.u - 1):
        bad.append("u is not 1 modulo q^2 b A")
    if d.y != d.u * d.u - 1 or d.q_double != ring(Q) * d.y / (d.u * d.u):
        bad.append("y or q'' is inconsistent")
    ny = int(abs(d.y.norm()))
    if d.n0 * d.n1 != ny or math.gcd(d.n0, Q) != 1 or _strip_primes_of(d.n1, Q) != 1:
        bad.append("bad split of Norm(y)")
    if (d.r - d.t) % (Q * Q) or (d.r - 1) % d.n0 or math.gcd(d.r, d.m) != 1 or d.m % ny:
        bad.append("r or m violates its congruences")
    return bad


# ------------------------------------------------------- decomposition
def _prime_witness(d: ConjData, p: int, elt: RingElement) -> ConjMWitness:
    """Witness for Y = p * elt * q'' with u1 = 1 and u2 a power of u."""
    ring = d.ring
    Y = ring(p) * elt * d.q_double
    exponent = p**d.e - 1
    order = element_order_mod(d.u, Y * Q_of(d))
    j = exponent % order or order
    u2 = d.u**j
    z = (u2 * u2 - 1).exact_div(Y)
    return ConjMWitness(Y, z, ring.one, u2)


def Q_of(d: ConjData) -> RingElement:
    return d.ring(d.q)


def _negate(w: ConjMWitness) -> ConjMWitness:
    return ConjMWitness(-w.y, -w.z, w.u1, w.u2)


def _scale(w: ConjMWitness, s: RingElement) -> ConjMWitness:
    """Witness for y / s^2."""
    return ConjMWitness(w.y / (s * s), w.z, w.u1 * s, w.u2)


def mset_sum_decompose(d: ConjData, target) -> list[ConjMWitness]:
    """At most 6 |D| elements of M_q (with witnesses) summing to target."""
    ring = d.ring
    target = ring(target)
    if target.is_zero():
        return []
    w = target.exact_div(d.modulus)
    n = ring.saturation_exponent(w.num, w.den)
    s = ring.sigma**n if n else ring.one
    bvec = w * s * s
    lhs = (d.q_prime * bvec).num
    coeffs = solve_combination([x.num for x in d.D], lhs)
    if coeffs is None:
        raise AssertionError("span of D does not reach q'b")
    out = []
    for ci, di in zip(coeffs, d.D):
        if ci == 0:
            continue
        six = six_prime_decompose(ci * d.m, d.r, d.m)
        for idx, p in enumerate(six.primes):
            wit = _prime_witness(d, p, di)
            if idx >= 3:
                wit = _negate(wit)
            out.append(_scale(wit, s) if n else wit)
    total = ring.zero
    for wit in out:
        total = total + wit.y
    assert total == target
    return out
