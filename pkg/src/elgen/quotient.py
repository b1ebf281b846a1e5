"""Finite quotients A/qA, their unit groups and multiplicative orders."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import sympy
from sympy.ntheory import n_order
from sympy.functions.combinatorial.numbers import reduced_totient

from . import lattice
from .errors import BudgetExceeded, NotAUnitModulo, NotInRing, ZeroModulus
from .ring import LocalizedRing, RingElement

Residue = tuple  # coordinate tuple reduced modulo the kernel lattice

DEFAULT_BUDGET = 10**6


def _clear_denominator(x: RingElement) -> RingElement:
    """An element of B generating the same A-ideal as x."""
    n = x.ring.saturation_exponent(x.num, x.den)
    if n is None:
        raise NotInRing(repr(x))
    return x * x.ring.sigma**n


def _strip_primes(n: int, s: int) -> int:
    while True:
        g = math.gcd(n, s)
        if g == 1:
            return n
        n //= g


class FiniteQuotient:
    """A/qA realised as B modulo the lattice B ∩ qA.

    With ``localize=False`` the quotient is B/qB (q must lie in B).
    """

    def __init__(self, ring: LocalizedRing, modulus, *, localize: bool = True):
        modulus = ring(modulus)
        if modulus.is_zero():
            raise ZeroModulus("quotient by the zero ideal")
        self.ring = ring
        self.modulus = modulus
        self.localize = localize and bool(ring.s_vectors)
        k = ring.k
        self.k = k
        if self.localize:
            qb = _clear_denominator(modulus)
        else:
            if modulus.den != 1:
                raise NotInRing("modulus must lie in the order")
            qb = modulus
        if k == 1:
            n = abs(qb.num[0])
            if self.localize:
                n = _strip_primes(n, ring.sigma_vec[0])
            self.basis: list[tuple[int, ...]] = [(n,)]
        else:
            cols = lattice.transpose(ring.mult_matrix(qb.num))
            basis = lattice.hnf(cols, k)
            if self.localize:
                Msig = ring.mult_matrix(ring.sigma_vec)
                while True:
                    nxt = lattice.preimage(Msig, basis, k)
                    if nxt == basis:
                        break
                    basis = nxt
            self.basis = basis
        self.size = math.prod(row[i] for i, row in enumerate(self.basis))
        self._radices = tuple(row[i] for i, row in enumerate(self.basis))

    def __repr__(self) -> str:
        return f"FiniteQuotient({self.ring!r} / {self.modulus!r}, size={self.size})"

    # residues -------------------------------------------------------------
    @property
    def zero(self) -> Residue:
        return (0,) * self.k

    @cached_property
    def one(self) -> Residue:
        return self.reduce((1,) + (0,) * (self.k - 1))

    def reduce(self, vec: Sequence[int]) -> Residue:
        if self.k == 1:
            return (vec[0] % self.basis[0][0],)
        return lattice.reduce_vector(vec, self.basis)

    @cached_property
    def _sigma_inverse(self) -> Residue:
        inv = self.inverse(self.reduce(self.ring.sigma_vec))
        assert inv is not None
        return inv

    def image(self, x) -> Residue:
        x = self.ring(x)
        if x.den == 1:
            return self.reduce(x.num)
        n = self.ring.saturation_exponent(x.num, x.den)
        if n is None:
            raise NotInRing(repr(x))
        if not self.localize:
            raise NotInRing("denominators are not invertible in this quotient")
        b = x * self.ring.sigma**n
        return self.mul(self.reduce(b.num), self.pow(self._sigma_inverse, n))

    def lift(self, r: Residue) -> RingElement:
        return RingElement(self.ring, tuple(r), 1)

    def add(self, a: Residue, b: Residue) -> Residue:
        return self.reduce([x + y for x, y in zip(a, b)])

    def sub(self, a: Residue, b: Residue) -> Residue:
        return self.reduce([x - y for x, y in zip(a, b)])

    def neg(self, a: Residue) -> Residue:
        return self.reduce([-x for x in a])

    def mul(self, a: Residue, b: Residue) -> Residue:
        if self.k == 1:
            return ((a[0] * b[0]) % self.basis[0][0],)
        return self.reduce(self.ring._mul_vec(a, b))

    def pow(self, a: Residue, e: int) -> Residue:
        if e < 0:
            inv = self.inverse(a)
            if inv is None:
                raise NotAUnitModulo(f"{a} is not invertible")
            return self.pow(inv, -e)
        if self.k == 1:
            return (pow(a[0], e, self.basis[0][0]),)
        result = self.one
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result

    def inverse(self, a: Residue) -> Residue | None:
        if self.k == 1:
            n = self.basis[0][0]
            if n == 1:
                return (0,)
            if math.gcd(a[0], n) != 1:
                return None
            return (pow(a[0], -1, n),)
        cols = lattice.transpose(self.ring.mult_matrix(a))
        sol = lattice.solve_combination(cols + list(self.basis), (1,) + (0,) * (self.k - 1))
        if sol is None:
            return None
        return self.reduce(sol[: self.k])

    def is_unit(self, a: Residue) -> bool:
        if self.k == 1:
            return math.gcd(a[0], self.basis[0][0]) == 1
        return self.inverse(a) is not None

    def is_zero(self, a: Residue) -> bool:
        return not any(a)

    def contains(self, x) -> bool:
        """Whether the ring element x lies in the modulus ideal."""
        return self.is_zero(self.image(x))

    # enumeration ------------------------------------------------------------
    def elements(self, budget: int = DEFAULT_BUDGET) -> Iterator[Residue]:
        if self.size > budget:
            raise BudgetExceeded(f"quotient of size {self.size} exceeds budget {budget}")
        radices = self._radices
        k = self.k
        if k == 1:
            for i in range(radices[0]):
                yield (i,)
            return
        idx = [0] * k
        while True:
            yield self.reduce(idx)
            pos = k - 1
            while pos >= 0:
                idx[pos] += 1
                if idx[pos] < radices[pos]:
                    break
                idx[pos] = 0
                pos -= 1
            if pos < 0:
                return

    def units(self, budget: int = DEFAULT_BUDGET) -> list[Residue]:
        return [r for r in self.elements(budget) if self.is_unit(r)]

    def is_field(self, budget: int = DEFAULT_BUDGET) -> bool:
        if self.size < 2:
            return False
        fac = sympy.factorint(self.size)
        if len(fac) != 1:
            return False
        if sympy.isprime(self.size):
            return True
        return all(self.is_unit(r) for r in self.elements(budget) if any(r))

    # multiplicative structure -------------------------------------------------
    @cached_property
    def exponent_multiple(self) -> int:
        """A multiple of the exponent of the unit group, from the size alone."""
        if self.k == 1:
            return int(reduced_totient(self.basis[0][0])) if self.size > 1 else 1
        out = 1
        for p, v in sympy.factorint(self.size).items():
            m = p ** (v - 1) if v > 1 else 1
            for f in range(1, self.k + 1):
                m = math.lcm(m, p**f - 1)
            out = math.lcm(out, m * p)
        return out

    @cached_property
    def _multiple_factors(self) -> dict[int, int]:
        return sympy.factorint(self.exponent_multiple)

    def order(self, a: Residue) -> int:
        """Multiplicative order of a unit residue."""
        if self.size == 1:
            return 1
        if self.k == 1:
            n = self.basis[0][0]
            if math.gcd(a[0], n) != 1:
                raise NotAUnitModulo(f"{a[0]} is not a unit modulo {n}")
            return int(n_order(a[0], n))
        if not self.is_unit(a):
            raise NotAUnitModulo(f"{a} is not a unit")
        one = self.one
        order = self.exponent_multiple
        for ell in self._multiple_factors:
            while order % ell == 0 and self.pow(a, order // ell) == one:
                order //= ell
        return order


def finite_quotient(ring: LocalizedRing, modulus) -> FiniteQuotient:
    return FiniteQuotient(ring, modulus)


@dataclass(frozen=True)
class UnitGroupData:
    quotient: FiniteQuotient
    units: tuple
    exponent: int
    generators: tuple


def _span(fq: FiniteQuotient, gens: Sequence[Residue]) -> set:
    seen = {fq.one}
    frontier = [fq.one]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = fq.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def unit_group(fq: FiniteQuotient, budget: int = DEFAULT_BUDGET) -> UnitGroupData:
    units = fq.units(budget)
    orders = {u: fq.order(u) for u in units}
    exponent = 1
    for o in orders.values():
        exponent = math.lcm(exponent, o)
    ranked = sorted(units, key=lambda u: -orders[u])
    gens: list[Residue] = []
    span = {fq.one}
    for u in ranked:
        if len(span) == len(units):
            break
        if u in span:
            continue
        gens.append(u)
        span = _span(fq, gens)
    return UnitGroupData(fq, tuple(units), exponent, tuple(gens))


def unit_exponent(ring: LocalizedRing, modulus, budget: int = DEFAULT_BUDGET) -> int:
    """e(qA): exponent of the unit group of A/qA."""
    fq = FiniteQuotient(ring, modulus)
    if fq.size == 1:
        return 1
    if ring.k == 1:
        return int(reduced_totient(fq.basis[0][0]))
    units = fq.units(budget)
    e = fq.exponent_multiple
    for ell in fq._multiple_factors:
        # most units fail the test quickly, so this beats computing every order
        while e % ell == 0 and all(fq.pow(u, e // ell) == fq.one for u in units):
            e //= ell
    return e


def element_order_mod(a: RingElement, b) -> int:
    """Least m >= 1 with a^m = 1 modulo bA."""
    fq = FiniteQuotient(a.ring, b)
    r = fq.image(a)
    if not fq.is_unit(r):
        raise NotAUnitModulo(f"{a!r} is not invertible modulo {b!r}")
    return fq.order(r)


class QElem:
    """A residue of a FiniteQuotient with operator arithmetic (for matrices)."""

    __slots__ = ("fq", "r")

    def __init__(self, fq: FiniteQuotient, r: Residue):
        self.fq = fq
        self.r = r

    def _wrap(self, other) -> "QElem":
        if isinstance(other, QElem):
            return other
        return self.fq_ring(other)

    @property
    def fq_ring(self) -> "QuotientRing":
        return QuotientRing(self.fq)

    def __add__(self, o):
        return QElem(self.fq, self.fq.add(self.r, self._wrap(o).r))

    __radd__ = __add__

    def __sub__(self, o):
        return QElem(self.fq, self.fq.sub(self.r, self._wrap(o).r))

    def __rsub__(self, o):
        return QElem(self.fq, self.fq.sub(self._wrap(o).r, self.r))

    def __mul__(self, o):
        return QElem(self.fq, self.fq.mul(self.r, self._wrap(o).r))

    __rmul__ = __mul__

    def __neg__(self):
        return QElem(self.fq, self.fq.neg(self.r))

    def __eq__(self, o):
        if isinstance(o, QElem):
            return self.r == o.r
        if isinstance(o, int):
            return self.r == self.fq.reduce((o,) + (0,) * (self.fq.k - 1))
        return NotImplemented

    def __hash__(self):
        return hash(self.r)

    def __repr__(self):
        return str(self.r[0]) if self.fq.k == 1 else str(list(self.r))

    def is_zero(self) -> bool:
        return not any(self.r)

    def is_unit(self) -> bool:
        return self.fq.is_unit(self.r)

    def inverse(self) -> "QElem":
        inv = self.fq.inverse(self.r)
        if inv is None:
            raise NotAUnitModulo(f"{self!r} is not invertible")
        return QElem(self.fq, inv)

    def exact_div(self, o) -> "QElem":
        return self * self._wrap(o).inverse()

    __truediv__ = exact_div


class QuotientRing:
    """Adapter giving a FiniteQuotient the zero/one/call interface of a ring."""

    def __init__(self, fq: FiniteQuotient):
        self.fq = fq

    def __eq__(self, other):
        return isinstance(other, QuotientRing) and other.fq is self.fq

    def __hash__(self):
        return id(self.fq)

    @property
    def zero(self) -> QElem:
        return QElem(self.fq, self.fq.zero)

    @property
    def one(self) -> QElem:
        return QElem(self.fq, self.fq.one)

    def __call__(self, x) -> QElem:
        if isinstance(x, QElem):
            return x
        if isinstance(x, tuple):
            return QElem(self.fq, self.fq.reduce(x))
        return QElem(self.fq, self.fq.image(x))

    def elements(self, budget: int = DEFAULT_BUDGET):
        return [QElem(self.fq, r) for r in self.fq.elements(budget)]
