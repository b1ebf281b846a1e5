"""Square matrices over A, elementary words, congruence levels and W(q)."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .errors import NotDeterminantOne, NotInW
from .quotient import FiniteQuotient
from .ring import LocalizedRing, RingElement


# ------------------------------------------------------------------ ideals
@dataclass(frozen=True)
class PrincipalIdeal:
    ring: LocalizedRing
    generator: RingElement

    def contains(self, x) -> bool:
        return self.generator.divides(self.ring(x))

    def is_zero(self) -> bool:
        return self.generator.is_zero()

    def is_whole(self) -> bool:
        return self.generator.is_unit()

    def __repr__(self) -> str:
        return f"({self.generator!r})"


def as_generator(ring: LocalizedRing, q) -> RingElement:
    if isinstance(q, PrincipalIdeal):
        return q.generator
    return ring(q)


def _round_fraction(x: Fraction) -> int:
    return math.floor(x + Fraction(1, 2))


def nearest_quotient(a: RingElement, b: RingElement) -> RingElement:
    """Coordinatewise rounding of a/b computed in the field (b nonzero)."""
    q = a._field_div(b)
    return a.ring([_round_fraction(Fraction(c, q.den)) for c in q.num])


def _strip_s(x: RingElement) -> RingElement:
    ring = x.ring
    for s in ring.s_generators:
        chunk = 1
        while chunk:
            y = x._field_div(s**chunk)
            if y.den != 1:
                chunk //= 2
                continue
            x = y
            chunk *= 2
    return x


def normalize_generator(x: RingElement) -> RingElement:
    """A canonical-looking associate: integral, S-free, positive when k = 1."""
    if x.is_zero():
        return x
    ring = x.ring
    if x.den != 1:
        x = x * ring.sigma ** ring.saturation_exponent(x.num, x.den)
    x = _strip_s(x)
    if ring.k == 1 and x.num[0] < 0:
        x = -x
    return x


def ideal_gcd(ring: LocalizedRing, elements: Iterable) -> RingElement | None:
    """A generator of the ideal spanned by ``elements``, or None if Euclid stalls."""
    elems = [normalize_generator(ring(e)) for e in elements]
    elems = [e for e in elems if not e.is_zero()]
    if not elems:
        return ring.zero
    if ring.k == 1:
        g = 0
        for e in elems:
            g = math.gcd(g, e.num[0])
        return normalize_generator(ring(g))
    g = elems[0]
    for e in elems[1:]:
        a, b = g, e
        while not b.is_zero():
            q = nearest_quotient(a, b)
            r = a - q * b
            if abs(r.norm()) >= abs(b.norm()):
                return None
            a, b = b, r
        g = normalize_generator(a)
    if all(g.divides(e) for e in elems):
        return g
    return None


# ----------------------------------------------------------------- matrices
class SquareMatrix:
    """An n x n matrix with entries in a commutative ring (or quotient adapter)."""

    __slots__ = ("ring", "n", "rows")

    def __init__(self, ring: Any, rows: Sequence[Sequence[Any]]):
        self.ring = ring
        self.n = len(rows)
        if any(len(r) != self.n for r in rows):
            raise ValueError("matrix must be square")
        self.rows = tuple(tuple(ring(x) for x in r) for r in rows)

    @classmethod
    def identity(cls, ring: Any, n: int) -> "SquareMatrix":
        return cls(ring, [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, SquareMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(repr(x) for x in r) + "]" for r in self.rows) + "]"

    def __mul__(self, other: "SquareMatrix") -> "SquareMatrix":
        cols = list(zip(*other.rows))
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = self.ring.zero
                for x, y in zip(r, c):
                    if not x.is_zero() and not y.is_zero():
                        acc = acc + x * y
                row.append(acc)
            out.append(row)
        return SquareMatrix(self.ring, out)

    def transpose(self) -> "SquareMatrix":
        return SquareMatrix(self.ring, list(zip(*self.rows)))

    def det(self):
        return _det(self.ring, [list(r) for r in self.rows])

    def is_identity(self) -> bool:
        return all((x.is_one() if hasattr(x, "is_one") else x == 1) if i == j else x.is_zero()
                   for i, r in enumerate(self.rows) for j, x in enumerate(r))

    def inverse_sl2(self) -> "SquareMatrix":
        (a, b), (c, d) = self.rows
        return SquareMatrix(self.ring, [[d, -b], [-c, a]])

    def scaled(self, s) -> "SquareMatrix":
        return SquareMatrix(self.ring, [[s * x for x in r] for r in self.rows])

    def plus(self, other: "SquareMatrix") -> "SquareMatrix":
        return SquareMatrix(self.ring, [[x + y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def with_rows(self, rows) -> "SquareMatrix":
        return SquareMatrix(self.ring, rows)


def _det(ring, m: list[list[Any]]):
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = ring.zero
    for j in range(n):
        if m[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _det(ring, minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def diag_h(ring: LocalizedRing, u: RingElement) -> SquareMatrix:
    """H(u) = diag(u, u^-1)."""
    return SquareMatrix(ring, [[u, 0], [0, u.inverse()]])


# ------------------------------------------------------- elementary words
@dataclass(frozen=True)
class ElementaryGenerator:
    i: int
    j: int
    value: Any

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("elementary generator needs i != j")
        if self.i < 1 or self.j < 1:
            raise ValueError("indices start at 1")

    def inverse(self) -> "ElementaryGenerator":
        return ElementaryGenerator(self.i, self.j, -self.value)

    def matrix(self, ring: Any, n: int) -> SquareMatrix:
        rows = [[ring.one if r == c else ring.zero for c in range(n)] for r in range(n)]
        rows[self.i - 1][self.j - 1] = self.value
        return SquareMatrix(ring, rows)

    def __repr__(self) -> str:
        return f"E{self.i}{self.j}({self.value!r})"


def E(i: int, j: int, value) -> ElementaryGenerator:
    return ElementaryGenerator(i, j, value)


@dataclass(frozen=True)
class ElementaryWord:
    ring: Any
    n: int
    letters: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        for g in self.letters:
            if max(g.i, g.j) > self.n:
                raise ValueError(f"letter {g!r} does not fit dimension {self.n}")

    def __len__(self) -> int:
        return len(self.letters)

    def __add__(self, other: "ElementaryWord") -> "ElementaryWord":
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        return ElementaryWord(self.ring, self.n, self.letters + other.letters)

    def inverse(self) -> "ElementaryWord":
        return ElementaryWord(self.ring, self.n, tuple(g.inverse() for g in reversed(self.letters)))

    def __repr__(self) -> str:
        return "·".join(repr(g) for g in self.letters) or "()"


def word(ring: Any, n: int, letters: Iterable[ElementaryGenerator]) -> ElementaryWord:
    return ElementaryWord(ring, n, tuple(letters))


@dataclass(frozen=True)
class ConjugatedWord:
    letters: tuple  # pairs (conjugator word, generator)

    def evaluate(self, ring: Any, n: int) -> SquareMatrix:
        out = SquareMatrix.identity(ring, n)
        for g, e in self.letters:
            out = out * evaluate_word(g.inverse()) * e.matrix(ring, n) * evaluate_word(g)
        return out


def right_apply(rows: list[list[Any]], g: ElementaryGenerator) -> None:
    """rows := rows * E_ij(v): column j += v * column i."""
    i, j, v = g.i - 1, g.j - 1, g.value
    if v.is_zero():
        return
    for r in rows:
        if not r[i].is_zero():
            r[j] = r[j] + r[i] * v


def left_apply(rows: list[list[Any]], g: ElementaryGenerator) -> None:
    """rows := E_ij(v) * rows: row i += v * row j."""
    i, j, v = g.i - 1, g.j - 1, g.value
    if v.is_zero():
        return
    rows[i] = [x + v * y if not y.is_zero() else x for x, y in zip(rows[i], rows[j])]


def evaluate_word(w: ElementaryWord) -> SquareMatrix:
    ring = w.ring
    rows = [[ring.one if r == c else ring.zero for c in range(w.n)] for r in range(w.n)]
    for g in w.letters:
        right_apply(rows, g)
    return SquareMatrix(ring, rows)


def word_length(w: ElementaryWord) -> int:
    return len(w.letters)


def in_level(g: ElementaryGenerator, q: RingElement) -> bool:
    return q.divides(g.value)


def is_congruence(T: SquareMatrix, q) -> bool:
    """Whether T = Id modulo qA (T must have determinant 1)."""
    ring = T.ring
    q = as_generator(ring, q)
    if not T.det().is_one():
        raise NotDeterminantOne(repr(T))
    for i, r in enumerate(T.rows):
        for j, x in enumerate(r):
            y = x - ring.one if i == j else x
            if not q.divides(y):
                return False
    return True


# -------------------------------------------------------------------- W(q)
@dataclass(frozen=True)
class WPair:
    ring: LocalizedRing
    q: RingElement
    a: RingElement
    b: RingElement

    def __post_init__(self):
        ring = self.ring
        for name in ("q", "a", "b"):
            object.__setattr__(self, name, ring(getattr(self, name)))
        if not in_w(ring, self.q, self.a, self.b):
            raise NotInW(f"({self.a!r}, {self.b!r}) is not in W({self.q!r})")


def unimodular(ring: LocalizedRing, a: RingElement, b: RingElement) -> bool:
    """Whether aA + bA = A."""
    if b.is_zero():
        return a.is_unit()
    if a.is_zero():
        return b.is_unit()
    fq = FiniteQuotient(ring, b)
    return fq.is_unit(fq.image(a))


def in_w(ring: LocalizedRing, q: RingElement, a: RingElement, b: RingElement) -> bool:
    return q.divides(a - 1) and q.divides(b) and unimodular(ring, a, b)


def _bezout_inverse(ring: LocalizedRing, a: RingElement, b: RingElement) -> RingElement:
    """x with a*x = 1 mod bA (b nonzero)."""
    fq = FiniteQuotient(ring, b)
    inv = fq.inverse(fq.image(a))
    if inv is None:
        raise NotInW("pair is not unimodular")
    return fq.lift(inv)


def complete_to_sl2(p: WPair) -> SquareMatrix:
    """[[a, b], [c, d]] in SL(2, A; q) extending the top row of p."""
    ring, q, a, b = p.ring, p.q, p.a, p.b
    if b.is_zero():
        return SquareMatrix(ring, [[a, b], [0, a.inverse()]])
    x = _bezout_inverse(ring, a, b)
    d = x
    c = (a * x - 1).exact_div(b)
    # shift by t = -c so that c becomes divisible by q and d = 1 mod q
    c, d = c * (1 - a), d - c * b
    step_c, step_d = q * a, q * b
    if not step_c.is_zero():
        s0 = nearest_quotient(-c, step_c)
        best = None
        for delta in itertools.product((-1, 0, 1), repeat=ring.k):
            s = s0 + ring(list(delta))
            cc = c + s * step_c
            key = (abs(cc.norm()), cc.den, cc.num)
            if best is None or key < best[0]:
                best = (key, cc, d + s * step_d)
        c, d = best[1], best[2]
    return SquareMatrix(ring, [[a, b], [c, d]])


def level_ideal(X: Sequence[SquareMatrix]):
    """Ideal of off-diagonal entries and diagonal differences.

    Returns a PrincipalIdeal when a generator can be found, else the list of
    generators.
    """
    if not X:
        raise ValueError("level ideal of an empty set")
    ring = X[0].ring
    gens = []
    for T in X:
        n = T.n
        for i in range(n):
            for j in range(n):
                if i != j:
                    gens.append(T[i, j])
        for i in range(n):
            for j in range(i + 1, n):
                gens.append(T[i, i] - T[j, j])
    gens = [g for g in gens if not g.is_zero()]
    g = ideal_gcd(ring, gens)
    if g is None:
        return gens
    return PrincipalIdeal(ring, g)


# ------------------------------------------------- powers in span{Id, M}
def span_power(M: SquareMatrix, m: int) -> tuple[Any, Any]:
    """(f, g) with M^m = f Id + g M, for a 2 x 2 matrix of determinant 1."""
    ring = M.ring
    tr = M[0, 0] + M[1, 1]

    def mul(x, y):
        f1, g1 = x
        f2, g2 = y
        gg = g1 * g2
        return f1 * f2 - gg, f1 * g2 + g1 * f2 + tr * gg

    base = (ring.zero, ring.one)
    if m < 0:
        base = (tr, -ring.one)  # M^-1 = tr Id - M
        m = -m
    result = (ring.one, ring.zero)
    while m:
        if m & 1:
            result = mul(result, base)
        m >>= 1
        if m:
            base = mul(base, base)
    return result


def span_coefficients(N: SquareMatrix, M: SquareMatrix) -> tuple[Any, Any]:
    """Solve N = f Id + g M directly from the entries (N assumed to lie in the span)."""
    if not M[0, 1].is_zero():
        g = N[0, 1] / M[0, 1]
    elif not M[1, 0].is_zero():
        g = N[1, 0] / M[1, 0]
    elif not (M[0, 0] - M[1, 1]).is_zero():
        g = (N[0, 0] - N[1, 1]) / (M[0, 0] - M[1, 1])
    else:
        return N[0, 0], M.ring.zero
    return N[0, 0] - g * M[0, 0], g


def matrix_power(M: SquareMatrix, m: int) -> SquareMatrix:
    """M^m by repeated squaring (SL(2) inverse for negative m)."""
    if m < 0:
        M = M.inverse_sl2()
        m = -m
    result = SquareMatrix.identity(M.ring, M.n)
    base = M
    while m:
        if m & 1:
            result = result * base
        m >>= 1
        if m:
            base = base * base
    return result
