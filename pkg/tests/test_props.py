import dataclasses
import math

import pytest
import sympy
from hypothesis import assume, given, strategies as st

from elgen.errors import DegenerateEntry, NoInfiniteUnits
from elgen.matgroup import SquareMatrix
from elgen.props.conj import (
    ConjMWitness, build_conj_data, mset_membership, mset_sum_decompose, six_prime_decompose,
    validate_conj_data, validate_mset_witness,
)
from elgen.props.exp import exp_witness, f_prime_search, norm_image_size, validate_exp_witness
from elgen.props.gen import gen_witness, validate_gen_witness
from elgen.props.sr1 import check_sr1
from elgen.props.unit import serre_level, serre_unit, unit_prop_unit
from elgen.quotient import FiniteQuotient
from elgen.serialize import parse_ring

Z = parse_ring("order: x-1; invert: []")
Z2 = parse_ring("order: x-1; invert: [2]")
Z6 = parse_ring("order: x-1; invert: [2,3]")
ZI = parse_ring("order: x^2+1; invert: []")
ZSQ2 = parse_ring("order: x^2-2; invert: []")


# -------------------------------------------------------------------- GEN
def test_gen_over_integers():
    w = gen_witness(Z, 1, 4, 2)
    assert w.h == 5 and w.unit_count == 4 and w.quotient_order == 2
    assert validate_gen_witness(w) == []


def test_gen_over_gaussian_integers():
    w = gen_witness(ZI, 1, 3, 2)
    assert ZI(3).divides(w.h - 1) and abs(w.h.norm()) == 13
    assert w.unit_count == 12 and validate_gen_witness(w) == []


def test_gen_tampered_generator():
    w = gen_witness(Z, 1, 4, 2)
    fq = FiniteQuotient(Z, w.h)
    square = fq.pow(w.generator, 2)
    assert validate_gen_witness(dataclasses.replace(w, generator=square))


@given(a=st.integers(1, 40), b=st.integers(2, 40), t=st.sampled_from([2, 3]))
def test_gen_random_integer_pairs(a, b, t):
    assume(math.gcd(a, b) == 1)
    w = gen_witness(Z, a, b, t)
    assert sympy.isprime(int(abs(w.h.num[0]))) and (w.h - a).num[0] % b == 0
    assert validate_gen_witness(w) == []


# -------------------------------------------------------------------- EXP
def test_exp_b_zero_path():
    w = exp_witness(Z2, 3, 4, 0)
    assert w.side["path"] == "b = 0" and w.t == 80640
    assert validate_exp_witness(w) == []


def test_exp_general_path():
    w = exp_witness(Z2, 3, 4, 3)
    assert w.side["path"] == "general" and w.side["b_search"] == 5
    s = w.side
    assert s["alpha1"] * s["t1"] + s["alpha2"] * s["t2"] == w.t // 2
    assert validate_exp_witness(w) == []


def test_exp_tamper_is_reported():
    w = exp_witness(Z2, 3, 4, 3)
    assert validate_exp_witness(dataclasses.replace(w, c=w.c + 3))
    assert validate_exp_witness(dataclasses.replace(w, g=(w.g[0] + 1,) + w.g[1:]))


@pytest.mark.parametrize("p,r,ring,size", [(7, 1, Z, 6), (3, 2, ZI, 6), (5, 2, ZSQ2, 20)])
def test_norm_image_size(p, r, ring, size):
    assert norm_image_size(p, r, ring) == size


@given(p=st.sampled_from([2, 3, 5, 7, 11]), r=st.integers(1, 3))
def test_norm_image_over_integers_is_the_unit_group(p, r):
    assert norm_image_size(p, r, Z) == (p - 1) * p ** (r - 1)


def test_f_prime_search_over_integers():
    assert f_prime_search(Z, 1, 4, 256, 1) == 5


# ------------------------------------------------------------------- units
def test_unit_prop_unit_examples():
    assert unit_prop_unit(Z2, 3) == 4
    assert unit_prop_unit(ZSQ2, 2) == ZSQ2([3, 2])
    with pytest.raises(NoInfiniteUnits):
        unit_prop_unit(Z, 3)


@pytest.mark.parametrize("q", [3, 5, 7, 9, 15])
def test_unit_prop_unit_properties(q):
    u = unit_prop_unit(Z2, q)
    assert u.is_unit() and Z2(q).divides(u - 1) and not (u**4).is_one()


def test_serre_level_example():
    T = SquareMatrix(Z2, [[1, 0], [3, 1]])
    assert serre_unit(Z2, T) == 2
    assert serre_level(Z2, T).generator == 15
    with pytest.raises(DegenerateEntry):
        serre_level(Z2, SquareMatrix.identity(Z2, 2))


def test_serre_level_without_infinite_units_is_zero():
    assert serre_level(Z, SquareMatrix(Z, [[1, 0], [3, 1]])).is_zero()


# ------------------------------------------------------------------ M_q sets
@pytest.mark.parametrize("ring,q,y", [(Z, 3, 0), (Z2, 3, 3), (Z6, 5, 5)], ids=str)
def test_mset_membership_examples(ring, q, y):
    w = mset_membership(ring, q, y)
    assert w.y == y and validate_mset_witness(w, q) == []


def test_mset_witness_tamper():
    w = mset_membership(Z6, 5, 5)
    assert validate_mset_witness(dataclasses.replace(w, z=w.z + 1), 5)
    assert validate_mset_witness(ConjMWitness(Z6(5), Z6(1), Z6(5), Z6(1)), 5)


def test_six_prime_examples():
    assert six_prime_decompose(0, 1, 4).primes == (5,) * 6
    assert six_prime_decompose(24, 1, 4).primes == (13, 13, 13, 5, 5, 5)
    with pytest.raises(ValueError):
        six_prime_decompose(3, 1, 4)
    with pytest.raises(ValueError):
        six_prime_decompose(4, 2, 4)


@given(k=st.integers(-40, 40), rm=st.sampled_from([(1, 4), (3, 4), (1, 6), (7, 10), (5, 12)]))
def test_six_prime_random(k, rm):
    r, m = rm
    d = six_prime_decompose(k * m, r, m)
    assert d.check() and d.t == k * m


def test_conj_data_over_dyadic_rationals():
    d = build_conj_data(Z2, 3)
    assert d.q == 3 and validate_conj_data(d) == []
    assert mset_sum_decompose(d, 0) == []


@pytest.mark.parametrize("multiple", [1, -2, 5])
def test_mset_sum_decompose(multiple):
    d = build_conj_data(Z2, 3)
    target = d.modulus * multiple
    parts = mset_sum_decompose(d, target)
    assert 0 < len(parts) <= 6 * len(d.D)
    assert all(validate_mset_witness(w, 3) == [] for w in parts)
    total = Z2(0)
    for w in parts:
        total = total + w.y
    assert total == target


# --------------------------------------------------------------------- SR1
@pytest.mark.parametrize("ring,q", [(Z, 2), (Z, 6), (Z, 12), (ZI, 5), (ZI, 3), (ZSQ2, 4)], ids=str)
def test_finite_quotients_have_stable_range_one(ring, q):
    # every finite commutative ring is semilocal, hence of stable range one
    assert check_sr1(FiniteQuotient(ring, q))
