"""GEN(t, 1) witnesses: a prime h = a mod b whose unit group mod t-th powers is cyclic."""
from __future__ import annotations

from dataclasses import dataclass

from ..quotient import DEFAULT_BUDGET, FiniteQuotient, Residue
from ..ring import LocalizedRing, RingElement
from ..search import PRIME_BUDGET, coprime_shift, is_maximal_principal, prime_in_progression


@dataclass(frozen=True)
class GenWitness:
    ring: LocalizedRing
    a: RingElement
    b: RingElement
    t: int
    h: RingElement
    unit_count: int
    quotient_order: int
    generator: Residue


def _clear(x: RingElement) -> RingElement:
    ring = x.ring
    while x.den != 1:
        x = x * ring.sigma
    return x


def cyclic_quotient_generator(fq: FiniteQuotient, t: int, budget: int = DEFAULT_BUDGET):
    """(|U|, |U/U^t|, g) with g generating U/U^t, or None when no single unit does.

    Brute force: the subgroup of t-th powers is listed and each unit's coset
    order is computed directly.
    """
    units = fq.units(budget)
    powers = {fq.pow(u, t) for u in units}
    target = len(units) // len(powers)
    for u in units:
        x, m = u, 1
        while x not in powers:
            x = fq.mul(x, u)
            m += 1
        if m == target:
            return len(units), target, u
    return None


def gen_witness(ring: LocalizedRing, a, b, t: int, budget: int = PRIME_BUDGET) -> GenWitness:
    """h = a mod bA with hB maximal and U(hA)/U(hA)^t cyclic."""
    a, b = ring(a), ring(b)
    if t < 1:
        raise ValueError("t must be positive")
    a0 = coprime_shift(ring, a, b, budget)
    gamma = ring.order.gamma
    modulus = _clear(b) * gamma * gamma
    h = prime_in_progression(a0, modulus, budget)
    found = cyclic_quotient_generator(FiniteQuotient(ring, h), t)
    if found is None:
        raise AssertionError(f"U({h!r})/U^{t} is not cyclic")
    w = GenWitness(ring, a, b, t, h, *found)
    failures = validate_gen_witness(w)
    if failures:
        raise AssertionError("; ".join(failures))
    return w


def validate_gen_witness(w: GenWitness) -> list[str]:
    bad = []
    ring = w.ring
    if not w.b.divides(w.h - w.a):
        bad.append("h is not a modulo bA")
    if w.h.den == 1 and not is_maximal_principal(ring.base_order_ring(list(w.h.num))):
        bad.append("hB is not maximal")
    fq = FiniteQuotient(ring, w.h)
    units = fq.units()
    if len(units) != w.unit_count:
        bad.append("unit count mismatch")
        return bad
    powers = {fq.pow(u, w.t) for u in units}
    # the cosets of the generator must cover U
    covered = set()
    x = fq.one
    for _ in range(w.quotient_order):
        covered.update(fq.mul(x, p) for p in powers)
        x = fq.mul(x, w.generator)
    if len(covered) != len(units):
        bad.append("the generator does not generate U/U^t")
    if len(units) // len(powers) != w.quotient_order:
        bad.append("quotient order mismatch")
    return bad
