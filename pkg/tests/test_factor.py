from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from elgen.errors import (
    BadIdealPair, DimensionTooSmall, LevelTooLow, NoInfiniteUnits, NotAField, NotAUnit,
    NotCongruent, NotInVas,
)
from elgen.factor import (
    a2_sides, a3_conjugation, a4_conjugation, field_factorize, h_word, length_histogram,
    minimal_word_lengths, sr1_witness, steinberg_rewrite, unit_conj_factorize, validate_unit_conj,
    vaserstein_reduce, whitehead_h_factor,
)
from elgen.matgroup import E, ElementaryWord, SquareMatrix, diag_h, evaluate_word, in_level, is_congruence
from elgen.quotient import FiniteQuotient, QuotientRing
from elgen.serialize import parse_ring

Z = parse_ring("order: x-1; invert: []")
Z2 = parse_ring("order: x-1; invert: [2]")
Z3 = parse_ring("order: x-1; invert: [3]")
ZI = parse_ring("order: x^2+1; invert: []")


def fmat(p, rows):
    qr = QuotientRing(FiniteQuotient(Z, p))
    return SquareMatrix(qr, [[qr((x,)) for x in r] for r in rows])


# ------------------------------------------------------------------ field
def test_field_identity_gives_empty_word():
    assert len(field_factorize(fmat(5, [[1, 0], [0, 1]]))) == 0


def test_field_swap_over_f2():
    w = field_factorize(fmat(2, [[0, 1], [1, 0]]))
    assert [(g.i, g.j, g.value.r) for g in w.letters] == [(1, 2, (1,)), (2, 1, (1,)), (1, 2, (1,))]


def test_field_diagonal_over_f5():
    T = fmat(5, [[2, 0], [0, 3]])
    w = field_factorize(T)
    assert evaluate_word(w) == T and len(w) == 4
    dist = minimal_word_lengths(FiniteQuotient(Z, 5), 2)
    assert dist[tuple(tuple(x.r for x in r) for r in T.rows)] == 4


def test_field_requires_a_field():
    with pytest.raises(NotAField):
        field_factorize(fmat(6, [[1, 0], [0, 1]]))


def test_bfs_group_orders():
    for p in (2, 3):
        hist = length_histogram(minimal_word_lengths(FiniteQuotient(Z, p), 2))
        assert sum(hist.values()) == p * (p * p - 1)


def test_sr1_witness_examples():
    fq6 = FiniteQuotient(Z, 6)
    assert sr1_witness(fq6, (1,), (3,)) == (0,)
    assert sr1_witness(fq6, (2,), (3,)) == (1,)
    assert sr1_witness(FiniteQuotient(Z, 5), (0,), (2,)) == (1,)


# ------------------------------------------------------------- Vaserstein
def test_vaserstein_example():
    T = SquareMatrix(Z, [[5, 2], [2, 1]])
    w = vaserstein_reduce(T, 2, 16)
    assert is_congruence(T * evaluate_word(w), Z(16))
    assert all(in_level(g, Z(2)) for g in w.letters)
    assert len(vaserstein_reduce(SquareMatrix.identity(Z, 2), 2, 16)) == 0


def test_vaserstein_preconditions():
    with pytest.raises(NotInVas):
        vaserstein_reduce(SquareMatrix(Z, [[3, 2], [4, 3]]), 2, 16)
    with pytest.raises(BadIdealPair):
        vaserstein_reduce(SquareMatrix(Z, [[5, 2], [2, 1]]), 2, 6)


# ------------------------------------------------------------ identities
def test_whitehead_example():
    w = whitehead_h_factor(Z3(9), 2)
    assert [g.value for g in w.letters] == [2, 4, Z3(Fraction(-2, 9)), -36]
    assert evaluate_word(w) == diag_h(Z3, Z3(9))
    assert evaluate_word(whitehead_h_factor(Z3(1), 2)) == SquareMatrix.identity(Z3, 2)
    with pytest.raises(NotAUnit):
        whitehead_h_factor(Z(5), 2)


def test_a3_examples():
    assert a3_conjugation(Z2(1), Z2(5)) == E(2, 1, Z2(5))
    assert a3_conjugation(Z2(2), Z2(3)) == E(2, 1, Z2(12))
    assert a3_conjugation(Z(-1), Z(7)) == E(2, 1, Z(7))


def test_a4_examples():
    w, word = a4_conjugation(Z2(3), Z2(1), Z2(2))
    assert w == Z2(Fraction(3, 4))
    assert evaluate_word(word) == E(2, 1, Z2(Fraction(-9, 4))).matrix(Z2, 2)
    w, word = a4_conjugation(Z(1), Z(1), Z(-1))
    assert w == 0 and evaluate_word(word) == SquareMatrix.identity(Z, 2)


@given(e=st.integers(-6, 6))
def test_a2_holds_for_powers_of_two(e):
    lhs, rhs = a2_sides(Z2(2) ** e)
    assert lhs == rhs


@given(e=st.integers(-5, 5))
def test_h_word_evaluates_to_diagonal(e):
    u = Z2(2) ** e
    assert evaluate_word(h_word(u)) == diag_h(Z2, u)


# ------------------------------------------------------ unit conjugation
def test_unit_conj_example():
    T = SquareMatrix(Z2, [[4, 3], [9, 7]])
    f = unit_conj_factorize(T, 3)
    assert len(f.factors) == 5 and validate_unit_conj(f) == []
    assert [(g.i, g.j) for g in f.factors] == [(2, 1), (2, 1), (1, 2), (2, 1), (1, 2)]


def test_unit_conj_identity_has_zero_factors():
    f = unit_conj_factorize(SquareMatrix.identity(Z2, 2), 3)
    assert all(g.value.is_zero() for g in f.factors)


def test_unit_conj_preconditions():
    with pytest.raises(NoInfiniteUnits):
        unit_conj_factorize(SquareMatrix(Z, [[4, 3], [9, 7]]), 3)
    with pytest.raises(NotCongruent):
        unit_conj_factorize(SquareMatrix(Z2, [[4, 3], [9, 7]]), 5)


def test_tampered_unit_conj_is_rejected():
    f = unit_conj_factorize(SquareMatrix(Z2, [[4, 3], [9, 7]]), 3)
    bad = type(f)(**{**f.__dict__, "factors": f.factors[:4] + (E(1, 2, Z2(3)),)})
    assert validate_unit_conj(bad)


# ------------------------------------------------------------- Steinberg
def test_steinberg_commuting_case():
    g = ElementaryWord(Z, 3, (E(1, 3, Z(1)),))
    w = steinberg_rewrite(g, E(1, 2, Z(4)), 2)
    assert evaluate_word(w) == E(1, 2, Z(4)).matrix(Z, 3)


def test_steinberg_empty_conjugator():
    w = steinberg_rewrite(ElementaryWord(Z, 3), E(1, 2, Z(4)), 2)
    assert [(g.i, g.j, g.value) for g in w.letters] == [(1, 2, 4)]


def test_steinberg_opposite_letter():
    g = ElementaryWord(Z, 3, (E(2, 1, Z(1)),))
    w = steinberg_rewrite(g, E(1, 2, Z(4)), 2)
    G = evaluate_word(g)
    assert evaluate_word(w) == evaluate_word(g.inverse()) * E(1, 2, Z(4)).matrix(Z, 3) * G
    assert all(in_level(h, Z(2)) for h in w.letters)


def test_steinberg_preconditions():
    with pytest.raises(DimensionTooSmall):
        steinberg_rewrite(ElementaryWord(Z, 2), E(1, 2, Z(4)), 2)
    with pytest.raises(LevelTooLow):
        steinberg_rewrite(ElementaryWord(Z, 3), E(1, 2, Z(2)), 2)


PAIRS = [(i, j) for i in range(1, 4) for j in range(1, 4) if i != j]
letters = st.tuples(st.sampled_from(PAIRS), st.lists(st.integers(-3, 3), min_size=2, max_size=2))


@given(g=st.lists(letters, max_size=4), x=letters)
def test_steinberg_over_gaussian_integers(g, x):
    q = ZI([1, 1])
    word = ElementaryWord(ZI, 3, tuple(E(i, j, ZI(v)) for (i, j), v in g))
    (i, j), v = x
    letter = E(i, j, ZI(v) * q * q)
    w = steinberg_rewrite(word, letter, q)
    target = evaluate_word(word.inverse()) * letter.matrix(ZI, 3) * evaluate_word(word)
    assert evaluate_word(w) == target
    assert all(in_level(h, q) for h in w.letters)
