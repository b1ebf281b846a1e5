"""Units congruent to 1 and the level ideals they produce."""
from __future__ import annotations

from ..errors import DegenerateEntry
from ..matgroup import PrincipalIdeal, SquareMatrix, as_generator
from ..quotient import element_order_mod, unit_exponent
from ..ring import LocalizedRing, RingElement
from ..search import fundamental_unit_search, torsion_units, unit_generators


def unit_prop_unit(ring: LocalizedRing, q) -> RingElement:
    """A unit u = 1 mod qA with u^4 != 1, as u0^e(qA) for an infinite-order u0."""
    q = as_generator(ring, q)
    if q.is_zero():
        raise ValueError("q must be nonzero")
    u0 = fundamental_unit_search(ring)
    u = u0 ** unit_exponent(ring, q)
    assert q.divides(u - 1) and not (u**4).is_one()
    return u


def serre_unit(ring: LocalizedRing, T: SquareMatrix) -> RingElement | None:
    """First available unit u with u^2 = 1 mod cA and u^4 != 1, else None."""
    c = T[1, 0]
    if c.is_zero():
        raise DegenerateEntry("lower-left entry is zero; conjugate T first")
    for g in unit_generators(ring) + torsion_units(ring):
        o = element_order_mod(g, c)
        u = g ** (o // 2) if o % 2 == 0 else g**o
        if not (u**4).is_one():
            assert c.divides(u * u - 1)
            return u
    return None


def serre_level(ring: LocalizedRing, T: SquareMatrix) -> PrincipalIdeal:
    """The ideal (u^4 - 1)A for the unit found by serre_unit; zero if none exists."""
    u = serre_unit(ring, T)
    if u is None:
        return PrincipalIdeal(ring, ring.zero)
    return PrincipalIdeal(ring, u**4 - 1)

