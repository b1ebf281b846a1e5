from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from elgen.errors import (
    NoInfiniteUnits, NotAUnit, NotInRing, NotIrreducible, NotMonic, ParseError, RingMismatch,
    ZeroModulus,
)
from elgen.quotient import FiniteQuotient, element_order_mod, unit_exponent, unit_group
from elgen.ring import is_root_of_unity, make_order, make_ring, norm, parse_poly
from elgen.search import (
    coprime_shift, fundamental_unit_search, prime_in_progression, torsion_units, unit_generators,
)
from elgen.serialize import parse_ring

Z = parse_ring("order: x-1; invert: []")
Z2 = parse_ring("order: x-1; invert: [2]")
Z6 = parse_ring("order: x-1; invert: [2,3]")
ZI = parse_ring("order: x^2+1; invert: []")
ZSQ2 = parse_ring("order: x^2-2; invert: []")
ZSQ5 = parse_ring("order: x^2-5; invert: []")
ZI_HALF = parse_ring("order: x^2+1; invert: [2]")


# ---------------------------------------------------------------- oracles
@pytest.mark.parametrize("poly,gamma", [("x", 1), ("x^2+1", 1), ("x^2-5", 2)])
def test_index_witness(poly, gamma):
    assert make_order(poly).gamma == gamma


def test_degree_one_order_is_integers():
    assert make_order("x").degree == 1


def test_norm_examples():
    assert norm(Z(1)) == 1
    assert ZI([3, 4]).norm() == 25
    assert ZSQ2([0, 1]).norm() == -2


def test_rejects_bad_polynomials():
    with pytest.raises(NotMonic):
        make_order("2*x^2+1")
    with pytest.raises(NotIrreducible):
        make_order("x^2-1")
    with pytest.raises(ParseError):
        parse_poly("x^^2")


@pytest.mark.parametrize("ring,q,size", [(Z, 1, 1), (Z2, 6, 3), (Z2, 5, 5), (ZI, 3, 9), (ZI, 2, 4)])
def test_quotient_sizes(ring, q, size):
    assert FiniteQuotient(ring, q).size == size


def test_zero_modulus_rejected():
    with pytest.raises(ZeroModulus):
        FiniteQuotient(Z, 0)


@pytest.mark.parametrize("n,exponent,ngens", [(2, 1, 0), (7, 6, 1), (8, 2, 2)])
def test_unit_group_of_integers_mod_n(n, exponent, ngens):
    g = unit_group(FiniteQuotient(Z, n))
    assert g.exponent == exponent
    assert len(g.generators) == ngens


def test_unit_exponent_matches_unit_group():
    for ring, q in ((ZI, 3), (ZI, 5), (ZSQ2, 7), (ZI, ZI([1, 1]) * 3)):
        assert unit_exponent(ring, q) == unit_group(FiniteQuotient(ring, q)).exponent


def test_element_orders():
    assert element_order_mod(Z(2), Z(7)) == 3
    assert element_order_mod(Z2(3), Z2(5)) == 4
    assert element_order_mod(Z(1), Z(9)) == 1


def test_fundamental_units():
    assert fundamental_unit_search(Z2) == 2
    assert fundamental_unit_search(ZSQ2) == ZSQ2([1, 1])
    with pytest.raises(NoInfiniteUnits):
        fundamental_unit_search(ZI)
    with pytest.raises(NoInfiniteUnits):
        fundamental_unit_search(Z)


def test_torsion_and_generators():
    assert sorted(x.num for x in torsion_units(ZI)) == sorted([(1, 0), (-1, 0), (0, 1), (0, -1)])
    assert unit_generators(Z6) == [Z6(2), Z6(3)]
    assert all(is_root_of_unity(u) for u in torsion_units(ZI))
    assert not is_root_of_unity(ZSQ2([1, 1]))


def test_prime_in_progression():
    assert prime_in_progression(Z(1), Z(4)) == 5
    assert prime_in_progression(Z(3), Z(4)) == 3
    h = prime_in_progression(ZI(1), ZI(3))
    # any prime of Z[i] that is 1 mod 3 is acceptable; this search finds -2 - 3i (norm 13)
    assert ZI(3).divides(h - 1)
    assert abs(h.norm()) == 13


def test_coprime_shift():
    assert coprime_shift(Z, Z(3), Z(4)) == 3
    a0 = coprime_shift(Z2, Z2(Fraction(1, 2)), Z2(3))
    assert Z2(3).divides(a0 - Fraction(1, 2))
    a0 = coprime_shift(ZSQ5, ZSQ5(1), ZSQ5([0, 1]))
    assert ZSQ5([0, 1]).divides(a0 - 1)
    assert abs(a0.norm()) % 2 == 1


def test_membership_and_mismatch():
    with pytest.raises(NotInRing):
        Z(Fraction(1, 3))
    assert Z2(Fraction(3, 8)) * 8 == 3
    with pytest.raises(RingMismatch):
        Z2(1) + Z6(1)
    with pytest.raises(NotAUnit):
        Z(5).inverse()


def test_unit_detection_with_denominators():
    assert Z6(Fraction(2, 3)).is_unit()
    assert not Z6(5).is_unit()
    assert ZI_HALF([1, 1]).is_unit()  # 1 + i divides 2


def test_make_ring_accepts_lists():
    assert make_ring([-2, 0, 1], [2]) == parse_ring("order: x^2-2; invert: [2]")


# ------------------------------------------------------------- properties
def _elements(ring, bound=20, max_exp=3):
    coords = st.lists(st.integers(-bound, bound), min_size=ring.k, max_size=ring.k)
    exps = st.integers(0, max_exp)
    if not ring.s_generators:
        return coords.map(ring)
    return st.tuples(coords, exps).map(lambda t: ring(t[0]) * ring.sigma.inverse() ** t[1])


RING_CASES = [Z2, ZI, ZSQ2, ZI_HALF]


@pytest.mark.parametrize("ring", RING_CASES, ids=repr)
@given(data=st.data())
def test_ring_axioms(ring, data):
    x, y, z = (data.draw(_elements(ring)) for _ in range(3))
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    assert x - x == ring.zero and x * ring.one == x


@pytest.mark.parametrize("ring", RING_CASES, ids=repr)
@given(data=st.data())
def test_norm_is_multiplicative(ring, data):
    x, y = data.draw(_elements(ring)), data.draw(_elements(ring))
    assert (x * y).norm() == x.norm() * y.norm()


@pytest.mark.parametrize("ring", RING_CASES, ids=repr)
@given(data=st.data())
def test_exact_division_roundtrip(ring, data):
    x, y = data.draw(_elements(ring)), data.draw(_elements(ring))
    if y.is_zero():
        return
    assert (x * y).exact_div(y) == x
    assert y.divides(x * y)


@pytest.mark.parametrize("ring,q", [(Z2, 15), (ZI, 6), (ZSQ2, 7), (ZI_HALF, 5)], ids=str)
@given(data=st.data())
def test_quotient_map_is_a_homomorphism(ring, q, data):
    fq = FiniteQuotient(ring, q)
    x, y = data.draw(_elements(ring)), data.draw(_elements(ring))
    assert fq.image(x + y) == fq.add(fq.image(x), fq.image(y))
    assert fq.image(x * y) == fq.mul(fq.image(x), fq.image(y))
    assert fq.contains(x - fq.lift(fq.image(x)))


@pytest.mark.parametrize("ring,q", [(Z, 12), (ZI, 5), (ZSQ2, 3)], ids=str)
def test_unit_exponent_kills_every_unit(ring, q):
    fq = FiniteQuotient(ring, q)
    e = unit_exponent(ring, q)
    assert all(fq.pow(u, e) == fq.one for u in fq.units())
