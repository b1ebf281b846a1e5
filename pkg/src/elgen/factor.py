"""Constructive factorizations into elementary matrices.

Covers Gaussian elimination over finite fields, the congruence reduction for
SL(2) modulo a deeper ideal, the four diagonal/conjugation identities, the
five-letter unit-conjugation factorization and Steinberg rewriting for n >= 3.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterator

from .errors import (
    BadIdealPair, BudgetExceeded, DimensionTooSmall, ImproperIdeal, LevelTooLow,
    NotAField, NotAUnit, NotCongruent, NotDeterminantOne, NotDivisible, NotInVas,
    NotUnimodular,
)
from .lattice import xgcd
from .matgroup import (
    E, ElementaryGenerator, ElementaryWord, SquareMatrix, as_generator, diag_h,
    evaluate_word, is_congruence, left_apply, normalize_generator,
)
from .quotient import FiniteQuotient, QuotientRing, Residue, unit_exponent
from .ring import LocalizedRing, RingElement
from .search import fundamental_unit_search


def _nonzero(letters) -> list[ElementaryGenerator]:
    return [g for g in letters if not g.value.is_zero()]


# ------------------------------------------------------------ field case
def field_factorize(T: SquareMatrix) -> ElementaryWord:
    """Write T in SL(n, F) as a word in elementary matrices.

    T's entries live in a QuotientRing whose quotient is a field.
    """
    ring = T.ring
    fq = ring.fq
    if not fq.is_field():
        raise NotAField(repr(fq))
    if not T.det() == 1:
        raise NotDeterminantOne(repr(T))
    n = T.n
    rows = [list(r) for r in T.rows]
    ops: list[ElementaryGenerator] = []

    def apply(g: ElementaryGenerator) -> None:
        left_apply(rows, g)
        ops.append(g)

    for j in range(n - 1):
        if not rows[j][j] == 1:
            below = next((i for i in range(j + 1, n) if not rows[i][j].is_zero()), None)
            if below is None:
                # pivot is a nonzero non-one; copy it below first
                apply(E(j + 2, j + 1, ring.one))
                below = j + 1
            lam = (ring.one - rows[j][j]) * rows[below][j].inverse()
            apply(E(j + 1, below + 1, lam))
        for i in range(n):
            if i != j and not rows[i][j].is_zero():
                apply(E(i + 1, j + 1, -rows[i][j]))
    j = n - 1
    for i in range(n - 1):
        if not rows[i][j].is_zero():
            apply(E(i + 1, j + 1, -rows[i][j]))
    # ops_m ... ops_1 T = Id, so T = ops_1^-1 ... ops_m^-1
    return ElementaryWord(ring, n, tuple(g.inverse() for g in ops))


def _generators(fq: FiniteQuotient, n: int) -> list[tuple[int, int, Residue]]:
    values = [r for r in fq.elements() if any(r)]
    return [(i, j, v) for i in range(n) for j in range(n) if i != j for v in values]


def minimal_word_lengths(fq: FiniteQuotient, n: int, radius: int | None = None,
                         budget: int = 10**6) -> dict[tuple, int]:
    """BFS distances from Id in the Cayley graph of E(n, A/qA).

    Keys are matrices as tuples of residue rows; generators are all E_ij(v)
    with v a nonzero residue.
    """
    gens = _generators(fq, n)
    zero, one = fq.zero, fq.one
    start = tuple(tuple(one if r == c else zero for c in range(n)) for r in range(n))
    dist = {start: 0}
    queue = deque([start])
    while queue:
        m = queue.popleft()
        d = dist[m]
        if radius is not None and d >= radius:
            continue
        for i, j, v in gens:
            rows = [list(r) for r in m]
            for r in rows:
                if any(r[i]):
                    r[j] = fq.add(r[j], fq.mul(r[i], v))
            key = tuple(tuple(r) for r in rows)
            if key not in dist:
                dist[key] = d + 1
                if len(dist) > budget:
                    raise BudgetExceeded(f"more than {budget} group elements")
                queue.append(key)
    return dist


def length_histogram(lengths: dict[tuple, int]) -> dict[int, int]:
    hist: dict[int, int] = {}
    for v in lengths.values():
        hist[v] = hist.get(v, 0) + 1
    return dict(sorted(hist.items()))


def sl_elements(fq: FiniteQuotient, n: int) -> Iterator[SquareMatrix]:
    """All determinant-one n x n matrices over a small quotient (n = 2 only by brute force)."""
    ring = QuotientRing(fq)
    els = list(fq.elements())
    if n != 2:
        raise ValueError("exhaustive enumeration is only provided for n = 2")
    for a in els:
        for b in els:
            for c in els:
                for d in els:
                    det = fq.sub(fq.mul(a, d), fq.mul(b, c))
                    if det == fq.one:
                        yield SquareMatrix(ring, [[a, b], [c, d]])


# ----------------------------------------------------------- stable range
def sr1_witness(fq: FiniteQuotient, a: Residue, b: Residue) -> Residue:
    """First t (in enumeration order) with a + b*t a unit."""
    for t in fq.elements():
        if fq.is_unit(fq.add(a, fq.mul(b, t))):
            return t
    raise NotUnimodular(f"({a}, {b}) does not generate the unit ideal")


# -------------------------------------------------------- SL(2) reduction
def _in_vas(T: SquareMatrix, q: RingElement) -> bool:
    (a, b), (c, d) = T.rows
    q2 = q * q
    return q2.divides(a - 1) and q2.divides(d - 1) and q.divides(b) and q.divides(c)


def vaserstein_reduce(T: SquareMatrix, q, q_deep) -> ElementaryWord:
    """Word w over LU(2, q) with T * eval(w) = Id modulo q_deep."""
    ring = T.ring
    q = as_generator(ring, q)
    qd = as_generator(ring, q_deep)
    if T.n != 2:
        raise ValueError("2 x 2 matrices only")
    if qd.is_zero() or q.is_zero():
        raise BadIdealPair("ideals must be nonzero")
    if not (q * q).divides(qd):
        raise BadIdealPair(f"({qd!r}) is not contained in ({q!r})^2")
    if not T.det().is_one():
        raise NotDeterminantOne(repr(T))
    if not _in_vas(T, q):
        raise NotInVas(repr(T))
    fq = FiniteQuotient(ring, qd)
    qt = normalize_generator(q)
    rows = [list(r) for r in T.rows]
    letters: list[ElementaryGenerator] = []

    def right(g: ElementaryGenerator) -> None:
        if g.value.is_zero():
            return
        for r in rows:
            r[g.j - 1] = r[g.j - 1] + r[g.i - 1] * g.value
        # adjacent letters at the same position merge
        if letters and (letters[-1].i, letters[-1].j) == (g.i, g.j):
            merged = letters.pop().value + g.value
            if not merged.is_zero():
                letters.append(E(g.i, g.j, merged))
        else:
            letters.append(g)

    # make the top-left entry a unit modulo q_deep
    a_res = fq.image(rows[0][0])
    if not fq.is_unit(a_res):
        t0 = sr1_witness(fq, a_res, fq.image(qt * rows[0][1]))
        right(E(2, 1, qt * fq.lift(t0)))
    a = rows[0][0]
    inv = fq.lift(fq.inverse(fq.image(a)))
    right(E(1, 2, -inv * rows[0][1]))
    if not fq.contains(rows[0][0] - 1):
        a = rows[0][0]
        inv = fq.lift(fq.inverse(fq.image(a)))
        y = (a - 1).exact_div(qt)
        right(E(1, 2, inv * qt))
        right(E(2, 1, -y))
        right(E(1, 2, -qt))
    right(E(2, 1, -rows[1][0]))
    w = ElementaryWord(ring, 2, tuple(letters))
    if not is_congruence(T * evaluate_word(w), qd):
        raise AssertionError("reduction failed to reach the deeper congruence subgroup")
    return w


# ------------------------------------------------------- unit identities
def whitehead_h_factor(u, q) -> ElementaryWord:
    """Four letters E12(x) E21(y) E12(-x/u) E21(-u y) evaluating to diag(u, 1/u)."""
    ring = u.ring if isinstance(u, RingElement) else None
    if ring is None:
        raise TypeError("u must be a ring element")
    q = as_generator(ring, q)
    if not u.is_unit():
        raise NotAUnit(repr(u))
    if not (q * q).divides(u - 1):
        raise NotCongruent(f"{u!r} is not 1 modulo ({q!r})^2")
    if (u - 1).is_zero():
        x = y = ring.zero
    else:
        x = normalize_generator(q)
        y = (u - 1).exact_div(x)
    uinv = u.inverse()
    return ElementaryWord(ring, 2, (E(1, 2, x), E(2, 1, y), E(1, 2, -uinv * x), E(2, 1, -u * y)))


def a2_sides(u: RingElement) -> tuple[SquareMatrix, SquareMatrix]:
    """Both sides of E12(1) H(u) E12(1 - u^-2) E12(-1) = H(u)."""
    ring = u.ring
    H = diag_h(ring, u)
    lhs = E(1, 2, ring.one).matrix(ring, 2) * H * E(1, 2, 1 - u.inverse() ** 2).matrix(ring, 2) \
        * E(1, 2, -ring.one).matrix(ring, 2)
    return lhs, H


def a3_conjugation(u: RingElement, x) -> ElementaryGenerator:
    """H(u)^-1 E21(x) H(u) as a single letter."""
    ring = u.ring
    x = ring(x)
    if not u.is_unit():
        raise NotAUnit(repr(u))
    out = E(2, 1, x * u * u)
    H = diag_h(ring, u)
    if H.inverse_sl2() * E(2, 1, x).matrix(ring, 2) * H != out.matrix(ring, 2):
        raise AssertionError("conjugation identity failed")
    return out


def h_word(u: RingElement) -> ElementaryWord:
    """diag(u, 1/u) as six letters: w(u) w(-1) with w(v) = E12(v) E21(-1/v) E12(v)."""
    ring = u.ring
    one = ring.one
    return ElementaryWord(ring, 2, (E(1, 2, u), E(2, 1, -u.inverse()), E(1, 2, u),
                                     E(1, 2, -one), E(2, 1, one), E(1, 2, -one)))


def m_word(y: RingElement, z: RingElement) -> ElementaryWord:
    ring = y.ring
    one = ring.one
    return ElementaryWord(ring, 2, (E(1, 2, z - 1), E(1, 2, one), E(2, 1, y), E(1, 2, -one)))


def a4_conjugation(y, z, u: RingElement) -> tuple[RingElement, ElementaryWord]:
    """(w, word) with word = M(y,z) H(u)^-1 E12(c) M(y,z)^-1 H(u) = E21(-w y)."""
    ring = u.ring
    y, z = ring(y), ring(z)
    if not u.is_unit():
        raise NotAUnit(repr(u))
    delta = 1 + y * z
    if delta.is_zero():
        raise NotDivisible("1 + yz is zero")
    w = (u * u - 1).exact_div(delta)
    c = w * (1 - z + y * z)
    M = m_word(y, z)
    out = M + h_word(u.inverse()) + ElementaryWord(ring, 2, (E(1, 2, c),)) + M.inverse() + h_word(u)
    if evaluate_word(out) != E(2, 1, -w * y).matrix(ring, 2):
        raise AssertionError("identity A4 failed")
    return w, out


# ------------------------------------------------- unit conjugation (x = 5)
@dataclass(frozen=True)
class UnitConjFactorization:
    u: RingElement
    u0: RingElement
    T: SquareMatrix
    q: RingElement
    factors: tuple
    a_prime: RingElement
    z: RingElement
    t: int
    t_prime: int
    e1: int
    e2: int
    x: RingElement
    y: RingElement
    x_prime: RingElement
    y_prime: RingElement

    @property
    def big_exponent(self) -> int:
        return math.factorial(8 * self.T.ring.k)


UNIT_CONJ_CANDIDATES = 40
MAX_UNIT_POWER_BITS = 10**8


def _bezout_target(e1: int, e2: int, target: int) -> tuple[int, int]:
    """(t, t2) with t*e1 + t2*e2 = target, balancing |t*e1| against |t2*e2|."""
    g, s, _ = xgcd(e1, e2)
    if target % g:
        raise ValueError("gcd does not divide the target")
    m = e2 // g
    t = (s * (target // g)) % m if m else 0
    if m:
        # every solution is t + k*m; aim for t*e1 close to target/2
        k0 = (target // 2 - t * e1) // (m * e1) if e1 else 0
        t = min((t + k * m for k in (k0, k0 + 1)),
                key=lambda c: (max(abs(c * e1), abs(target - c * e1)), c))
    t2 = (target - t * e1) // e2
    return t, t2


def _power_cost(e1: int, e2: int, K: int) -> int:
    t, t2 = _bezout_target(e1, e2, K)
    return max(abs(t * e1), abs(t2 * e2))


def unit_conj_factorize(T: SquareMatrix, q, budget: int = 10**5) -> UnitConjFactorization:
    """Five letters with H(u0)^-1 T H(u0) = E1 T E2 E3 E4 E5.

    Among the first few admissible a' the one with the smallest unit powers
    u^(t e1), u^(t' e2) is used; powers beyond MAX_UNIT_POWER_BITS raise
    BudgetExceeded rather than exhausting memory.
    """
    from .props.exp import f_prime_candidates

    ring: LocalizedRing = T.ring
    q = as_generator(ring, q)
    if q.is_zero() or q.is_unit():
        raise ImproperIdeal(f"({q!r}) must be proper and nonzero")
    if not is_congruence(T, q):
        raise NotCongruent(f"{T!r} is not congruent to Id modulo ({q!r})")
    u = fundamental_unit_search(ring)
    K = math.factorial(8 * ring.k)
    (a, b), (c, d) = T.rows
    e1 = unit_exponent(ring, a)
    if b.is_zero():
        a_prime = a
    else:
        best = None
        for i, cand in enumerate(f_prime_candidates(ring, a, b * b, e1, ring.one, budget=budget)):
            cost = _power_cost(e1, unit_exponent(ring, cand), K)
            if best is None or cost < best[0]:
                best = (cost, cand)
            if i + 1 >= UNIT_CONJ_CANDIDATES or cost <= K:
                break
        a_prime = best[1]
    z = (a_prime - a).exact_div(b * b) if not b.is_zero() else ring.zero
    e2 = unit_exponent(ring, a_prime)
    t, t2 = _bezout_target(e1, e2, K)
    unit_bits = max(max(abs(x) for x in u.num).bit_length(), u.den.bit_length(), 1)
    if max(abs(t * e1), abs(t2 * e2)) * unit_bits > MAX_UNIT_POWER_BITS:
        raise BudgetExceeded(f"unit powers u^{t * e1}, u^{t2 * e2} exceed {MAX_UNIT_POWER_BITS} bits")
    v = u ** (t * e1)
    v2 = u ** (t2 * e2)
    x = (v * v - 1).exact_div(a)
    y = (v.inverse() ** 2 - 1).exact_div(a)
    xp = (v2 * v2 - 1).exact_div(a_prime)
    yp = (v2.inverse() ** 2 - 1).exact_div(a_prime)
    cp = c + d * z * b
    v2sq = v2 * v2
    v2sq_inv = v2sq.inverse()
    factors = (
        E(2, 1, x * c * v2sq + xp * cp),
        E(2, 1, z * b),
        E(1, 2, yp * b),
        E(2, 1, -z * b * v2sq),
        E(1, 2, y * b * v2sq_inv),
    )
    out = UnitConjFactorization(u, u ** K, T, q, factors, a_prime, z, t, t2, e1, e2, x, y, xp, yp)
    failures = validate_unit_conj(out)
    if failures:
        raise AssertionError("; ".join(failures))
    return out


def validate_unit_conj(f: UnitConjFactorization) -> list[str]:
    """Recheck every side condition; returns the list of failures."""
    ring = f.T.ring
    K = math.factorial(8 * ring.k)
    (a, b), (c, d) = f.T.rows
    bad = []
    if len(f.factors) != 5:
        bad.append("exactly five factors expected")
    if f.u0 != f.u ** K:
        bad.append("u0 is not u^(8k)!")
    if not f.q.divides(a - 1) or not f.q.divides(b) or not f.q.divides(c):
        bad.append("T is not congruent to Id")
    if not (b * b).divides(f.a_prime - a) or f.a_prime != a + f.z * b * b:
        bad.append("a' is not a + z b^2")
    if K % math.gcd(f.e1, f.e2):
        bad.append("gcd(e1, e2) does not divide (8k)!")
    if f.t * f.e1 + f.t_prime * f.e2 != K:
        bad.append("Bezout identity fails")
    v = f.u ** (f.t * f.e1)
    if v * v != 1 + a * f.x or v.inverse() ** 2 != 1 + a * f.y:
        bad.append("x, y do not match u^(+-2 t e1)")
    for g in f.factors:
        if not f.q.divides(g.value):
            bad.append(f"{g!r} is not in LU(2, q)")
    u0 = f.u0
    u0sq = u0 * u0
    lhs = SquareMatrix(ring, [[a, b * u0sq.inverse()], [c * u0sq, d]])
    rhs = f.factors[0].matrix(ring, 2) * f.T
    for g in f.factors[1:]:
        rhs = rhs * g.matrix(ring, 2)
    if lhs != rhs:
        bad.append("product identity fails")
    return bad


# ------------------------------------------------------ Steinberg rewriting
def _conj_letter(L: ElementaryGenerator, h: ElementaryGenerator) -> list[ElementaryGenerator] | None:
    """h^-1 L h as level-preserving letters, or None in the non-commuting hard case."""
    i, j, v = L.i, L.j, L.value
    k, l, a = h.i, h.j, h.value
    if l != i and k != j:
        return [L]
    if l == i and k != j:
        return [L, E(k, j, -a * v)]
    if k == j and l != i:
        return [L, E(i, l, a * v)]
    return None


def _commutator(X: list, Y: list) -> list[ElementaryGenerator]:
    return X + Y + [g.inverse() for g in reversed(X)] + [g.inverse() for g in reversed(Y)]


def _third_index(n: int, avoid: set) -> int:
    return next(m for m in range(1, n + 1) if m not in avoid)


def _split(value: RingElement, qt: RingElement) -> tuple[RingElement, RingElement]:
    return qt, value.exact_div(qt)


def _hard_last(L: ElementaryGenerator, h: ElementaryGenerator, n: int, qt) -> list:
    # E_ji(-b) E_ij(xy) E_ji(b) = [E_im(x) E_jm(-bx), E_mj(y) E_mi(by)]
    i, j = L.i, L.j
    b = h.value
    x, y = _split(L.value, qt)
    m = _third_index(n, {i, j})
    X = [E(i, m, x), E(j, m, -b * x)]
    Y = [E(m, j, y), E(m, i, b * y)]
    return _commutator(X, Y)


def _suslin(L: ElementaryGenerator, suffix: list, ring, n: int, qt) -> list:
    """G^-1 E_ij(v) G for G = eval(suffix), as letters of level qt."""
    G = evaluate_word(ElementaryWord(ring, n, tuple(suffix)))
    Ginv = evaluate_word(ElementaryWord(ring, n, tuple(suffix)).inverse())
    i, j, v = L.i - 1, L.j - 1, L.value
    u = [Ginv[r, i] for r in range(n)]
    w = [G[j, r] for r in range(n)]
    s = [G[i, r] for r in range(n)]
    out: list[ElementaryGenerator] = []
    for k in range(n):
        for l in range(k + 1, n):
            c = v * (w[k] * s[l] - w[l] * s[k])
            if c.is_zero():
                continue
            for m in range(n):
                if m in (k, l):
                    continue
                out += [E(m + 1, k + 1, c * u[m] * u[l]), E(m + 1, l + 1, -c * u[m] * u[k])]
            x, y = _split(c, qt)
            m = _third_index(n, {k + 1, l + 1})
            X = [E(k + 1, m, x * u[k]), E(l + 1, m, x * u[l])]
            Y = [E(m, k + 1, y * u[l]), E(m, l + 1, -y * u[k])]
            out += _commutator(X, Y)
    return out


def steinberg_rewrite(g: ElementaryWord, x: ElementaryGenerator, q) -> ElementaryWord:
    """A word over LU(n, q) equal to g^-1 x g, for x in LU(n, q^2)."""
    ring, n = g.ring, g.n
    if n < 3:
        raise DimensionTooSmall("Steinberg rewriting needs n >= 3")
    q = as_generator(ring, q)
    if not (q * q).divides(x.value):
        raise LevelTooLow(f"{x!r} is not in LU(n, q^2)")
    qt = normalize_generator(q) if not q.is_zero() else q
    letters = list(g.letters)

    def conj(L: ElementaryGenerator, pos: int) -> list:
        if L.value.is_zero():
            return []
        if pos == len(letters):
            return [L]
        h = letters[pos]
        if h.value.is_zero():
            return conj(L, pos + 1)
        easy = _conj_letter(L, h)
        if easy is not None:
            out = []
            for M in easy:
                out += conj(M, pos + 1)
            return out
        if qt.is_zero():
            return []
        if pos == len(letters) - 1:
            return _hard_last(L, h, n, qt)
        return _suslin(L, letters[pos:], ring, n, qt)

    out = ElementaryWord(ring, n, tuple(_nonzero(conj(x, 0))))
    target = evaluate_word(g.inverse()) * x.matrix(ring, n) * evaluate_word(g)
    if evaluate_word(out) != target:
        raise AssertionError("Steinberg rewriting produced a wrong word")
    return out
