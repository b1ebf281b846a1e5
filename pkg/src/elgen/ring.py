"""Monogenic orders Z[theta], their localizations, and exact element arithmetic.

An element is stored as a reduced fraction ``num / den`` with ``num`` an
integer coordinate vector in the power basis 1, theta, ..., theta^(k-1) and
``den`` a positive integer.  That representation is canonical, so equality and
hashing are structural.  The exponent-vector form over the inverted generators
is derived only when serializing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import gmpy2
import sympy

from . import lattice
from .errors import (NotAUnit, NotDivisible, NotInRing, NotIrreducible,
                     NotMonic, ParseError, RingMismatch)

_X = sympy.Symbol("x")
_GMP_BITS = 1 << 14


def _mul(a: int, b: int) -> int:
    """Integer product, via GMP once the operands outgrow CPython's Karatsuba."""
    if a.bit_length() + b.bit_length() < _GMP_BITS:
        return a * b
    return int(gmpy2.mpz(a) * b)


def parse_poly(text: str) -> tuple[int, ...]:
    """Parse ``x^2-2`` style text into coefficients, constant term first."""
    try:
        expr = sympy.parse_expr(text.replace("^", "**"), local_dict={"x": _X})
        poly = sympy.Poly(expr, _X)
    except Exception as exc:  # sympy raises many different types here
        raise ParseError(f"cannot parse polynomial {text!r}") from exc
    coeffs = poly.all_coeffs()[::-1]
    if not all(c.is_integer for c in coeffs):
        raise ParseError(f"polynomial {text!r} has non-integer coefficients")
    return tuple(int(c) for c in coeffs)


def poly_to_text(coeffs: Sequence[int]) -> str:
    expr = sum(sympy.Integer(c) * _X**i for i, c in enumerate(coeffs))
    return str(sympy.Poly(expr, _X).as_expr()).replace("**", "^").replace(" ", "")


@dataclass(frozen=True)
class NumberField:
    poly: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    @cached_property
    def poly_discriminant(self) -> int:
        if self.degree == 1:
            return 1
        expr = sum(sympy.Integer(c) * _X**i for i, c in enumerate(self.poly))
        return int(sympy.discriminant(expr, _X))

    @cached_property
    def discriminant(self) -> int:
        """Field discriminant for k <= 2; for k >= 3 the polynomial one."""
        k = self.degree
        if k == 1:
            return 1
        if k == 2:
            return _fundamental_discriminant(self.poly_discriminant)
        return self.poly_discriminant


def _valuation(n: int, p: int) -> int:
    """Exponent of p in n != 0, by repeated squaring of the divisor."""
    if p == 2:
        return (n & -n).bit_length() - 1
    v = 0
    powers = [p]
    while n % powers[-1] == 0:
        n //= powers[-1]
        v += 1 << (len(powers) - 1)
        powers.append(powers[-1] ** 2)
    for i in range(len(powers) - 1, -1, -1):
        if n % powers[i] == 0:
            n //= powers[i]
            v += 1 << i
    return v


def _squarefree_part(n: int) -> int:
    sign = -1 if n < 0 else 1
    out = 1
    for p, e in sympy.factorint(abs(n)).items():
        if e % 2:
            out *= p
    return sign * out


def _fundamental_discriminant(d: int) -> int:
    s = _squarefree_part(d)
    return s if s % 4 == 1 else 4 * s


@dataclass(frozen=True)
class OrderRing:
    field: NumberField
    gamma: int

    @property
    def degree(self) -> int:
        return self.field.degree

    @property
    def poly(self) -> tuple[int, ...]:
        return self.field.poly


def make_order(poly: Sequence[int] | str, gamma: int | None = None) -> OrderRing:
    """The order Z[theta] for a monic irreducible polynomial."""
    coeffs = parse_poly(poly) if isinstance(poly, str) else tuple(int(c) for c in poly)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    if len(coeffs) < 2:
        raise NotMonic("polynomial must have degree at least 1")
    if coeffs[-1] != 1:
        raise NotMonic(f"leading coefficient is {coeffs[-1]}")
    expr = sum(sympy.Integer(c) * _X**i for i, c in enumerate(coeffs))
    if len(coeffs) > 2 and not sympy.Poly(expr, _X).is_irreducible:
        raise NotIrreducible(poly_to_text(coeffs))
    fld = NumberField(coeffs)
    if gamma is None:
        gamma = _conductor_witness(fld)
    if gamma == 0:
        raise ValueError("conductor witness must be nonzero")
    return OrderRing(fld, abs(int(gamma)))


def _conductor_witness(fld: NumberField) -> int:
    k = fld.degree
    if k == 1:
        return 1
    d = fld.poly_discriminant
    if k == 2:
        return math.isqrt(d // fld.discriminant)
    out = 1
    for p, e in sympy.factorint(abs(d)).items():
        out *= p ** (e // 2)
    return out


class LocalizedRing:
    """A = B_S where B = Z[theta] and S is generated by finitely many elements."""

    def __init__(self, order: OrderRing, s_generators: Iterable = ()):
        self.order = order
        self.k = order.degree
        self.poly = order.poly
        self._powers = self._power_table()
        gens = []
        for g in s_generators:
            vec = self._coerce_vec(g)
            if not any(vec):
                raise ValueError("cannot invert zero")
            gens.append(vec)
        self.s_vectors: tuple[tuple[int, ...], ...] = tuple(gens)
        sigma = (1,) + (0,) * (self.k - 1)
        for g in gens:
            sigma = self._mul_vec(sigma, g)
        self.sigma_vec = sigma
        self._key = (self.poly, self.order.gamma, self.s_vectors)

    # construction helpers -------------------------------------------------
    def _coerce_vec(self, g) -> tuple[int, ...]:
        if isinstance(g, RingElement):
            if g.den != 1:
                raise ValueError("inverted generators must lie in the order")
            return g.num
        if isinstance(g, int):
            return (g,) + (0,) * (self.k - 1)
        vec = tuple(int(c) for c in g)
        if len(vec) > self.k:
            raise ValueError(f"generator {g!r} has too many coordinates")
        return vec + (0,) * (self.k - len(vec))

    def _power_table(self) -> list[tuple[int, ...]]:
        k = self.k
        tail = [-c for c in self.poly[:k]]  # theta^k = sum tail[i] theta^i
        table = []
        cur = [1] + [0] * (k - 1)
        for _ in range(max(2 * k - 1, 1)):
            table.append(tuple(cur))
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                cur = [a + top * t for a, t in zip(cur, tail)]
        return table

    def __eq__(self, other) -> bool:
        return isinstance(other, LocalizedRing) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        inv = [list(v) if self.k > 1 else v[0] for v in self.s_vectors]
        return f"LocalizedRing(order: {poly_to_text(self.poly)}; invert: {inv})"

    # vector arithmetic in B ----------------------------------------------
    def _mul_vec(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        k = self.k
        if k == 1:
            return (_mul(a[0], b[0]),)
        out = [0] * k
        P = self._powers
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if not bj:
                    continue
                c = _mul(ai, bj)
                for t, pt in enumerate(P[i + j]):
                    if pt:
                        out[t] += c * pt
        return tuple(out)

    def mult_matrix(self, v: Sequence[int]) -> list[list[int]]:
        """Integer matrix of multiplication by v (columns are v * theta^j)."""
        k = self.k
        cols = [self._mul_vec(v, self._powers[j]) for j in range(k)]
        return [[cols[j][i] for j in range(k)] for i in range(k)]

    # element construction -------------------------------------------------
    def _make(self, num: Sequence[int], den: int = 1) -> "RingElement":
        num = tuple(num)
        if den < 0:
            num = tuple(-c for c in num)
            den = -den
        if den != 1:
            # unit powers reach millions of bits; GMP keeps gcd and division subquadratic
            g = gmpy2.mpz(den)
            for c in num:
                if g == 1:
                    break
                g = gmpy2.gcd(g, c)
            if g != 1:
                num = tuple(int(gmpy2.divexact(c, g)) for c in num)
                den = int(gmpy2.divexact(den, g))
        return RingElement(self, num, den)

    def from_field(self, num: Sequence[int], den: int = 1) -> "RingElement":
        """Element num/den of K, raising NotInRing unless it lies in A."""
        z = self._make(num, den)
        if not self.contains_fraction(z.num, z.den):
            raise NotInRing(f"{z!r} is not in {self!r}")
        return z

    def __call__(self, x) -> "RingElement":
        if isinstance(x, RingElement):
            if x.ring != self:
                raise RingMismatch("element belongs to a different ring")
            return x
        if isinstance(x, bool):
            raise TypeError("booleans are not ring elements")
        if isinstance(x, int):
            return RingElement(self, (x,) + (0,) * (self.k - 1), 1)
        if isinstance(x, Fraction):
            return self.from_field((x.numerator,) + (0,) * (self.k - 1), x.denominator)
        if isinstance(x, (tuple, list)):
            vec = tuple(int(c) for c in x)
            if len(vec) > self.k:
                raise ValueError(f"too many coordinates in {x!r}")
            return RingElement(self, vec + (0,) * (self.k - len(vec)), 1)
        raise TypeError(f"cannot coerce {x!r}")

    @cached_property
    def zero(self) -> "RingElement":
        return self(0)

    @cached_property
    def one(self) -> "RingElement":
        return self(1)

    @cached_property
    def theta(self) -> "RingElement":
        if self.k == 1:
            return self(-self.poly[0])
        return self((0, 1))

    @cached_property
    def sigma(self) -> "RingElement":
        return RingElement(self, self.sigma_vec, 1)

    @property
    def s_generators(self) -> tuple["RingElement", ...]:
        return tuple(RingElement(self, v, 1) for v in self.s_vectors)

    @property
    def base_order_ring(self) -> "LocalizedRing":
        """B itself, with nothing inverted."""
        if not self.s_vectors:
            return self
        return LocalizedRing(self.order, ())

    # membership -------------------------------------------------------------
    def saturation_exponent(self, num: Sequence[int], den: int) -> int | None:
        """Least N with sigma^N * num/den integral, or None if there is none."""
        if den == 1:
            return 0
        if not self.s_vectors:
            return None
        if self.k == 1:
            n, rest = 0, den
            for p, vs in self._sigma_factors.items():
                vd = _valuation(rest, p)
                rest //= p**vd
                n = max(n, -(-vd // vs))
            return n if rest == 1 else None
        w = tuple(c % den for c in num)
        bound = self.k * den.bit_length() + 1
        for n in range(1, bound + 1):
            w = tuple(c % den for c in self._mul_vec(self.sigma_vec, w))
            if not any(w):
                return n
        return None

    @cached_property
    def _sigma_factors(self) -> dict[int, int]:
        return sympy.factorint(abs(self.sigma_vec[0]))

    def contains_fraction(self, num: Sequence[int], den: int) -> bool:
        return self.saturation_exponent(num, den) is not None

    # serialization helpers ---------------------------------------------------
    def s_exponents(self, z: "RingElement") -> tuple[tuple[int, ...], dict[int, int]]:
        """Write z = b / prod s_i^e_i with b in B, dividing out greedily."""
        n = self.saturation_exponent(z.num, z.den)
        if n is None:
            raise NotInRing(repr(z))
        if n == 0:
            return z.num, {}
        b = z * self.sigma**n
        exps = {i: n for i in range(len(self.s_vectors))}
        for i, s in enumerate(self.s_generators):
            # divide out s in shrinking chunks so huge exponents stay cheap
            chunk = exps[i]
            while exps[i] > 0 and chunk > 0:
                chunk = min(chunk, exps[i])
                q = b._field_div(s**chunk)
                if q.den != 1:
                    chunk //= 2
                    continue
                b = q
                exps[i] -= chunk
        return b.num, {i: e for i, e in exps.items() if e}

    def from_s_exponents(self, num: Sequence[int], exps: dict[int, int]) -> "RingElement":
        z = self(list(num))
        for i, e in exps.items():
            if not 0 <= i < len(self.s_vectors):
                raise ParseError(f"no inverted generator with index {i}")
            s = self.s_generators[i]
            inv = s.inverse()
            z = z * inv**e if e >= 0 else z * s ** (-e)
        return z


def make_ring(poly: Sequence[int] | str, invert: Iterable = (), gamma: int | None = None) -> LocalizedRing:
    return LocalizedRing(make_order(poly, gamma), invert)


class RingElement:
    __slots__ = ("ring", "num", "den", "_hash")

    def __init__(self, ring: LocalizedRing, num: tuple[int, ...], den: int):
        self.ring = ring
        self.num = num
        self.den = den
        self._hash = None

    # basics -----------------------------------------------------------------
    def __repr__(self) -> str:
        if self.ring.k == 1:
            body = str(self.num[0])
        else:
            body = "[" + ",".join(str(c) for c in self.num) + "]"
        return body if self.den == 1 else f"{body}/{self.den}"

    def __eq__(self, other) -> bool:
        if isinstance(other, RingElement):
            return self.num == other.num and self.den == other.den and self.ring == other.ring
        if isinstance(other, int) and not isinstance(other, bool):
            return self.den == 1 and self.num[0] == other and not any(self.num[1:])
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_one(self) -> bool:
        return self.den == 1 and self.num[0] == 1 and not any(self.num[1:])

    def in_order(self) -> bool:
        return self.den == 1

    def sort_key(self) -> tuple:
        return (abs(self.norm()), self.den, self.num)

    # arithmetic ---------------------------------------------------------------
    def _coerce(self, other) -> "RingElement":
        if isinstance(other, RingElement):
            if other.ring is not self.ring and other.ring != self.ring:
                raise RingMismatch("elements of different rings")
            return other
        return self.ring(other)

    def __add__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        if self.den == o.den:
            num = tuple(a + b for a, b in zip(self.num, o.num))
            return self.ring._make(num, self.den)
        num = tuple(_mul(a, o.den) + _mul(b, self.den) for a, b in zip(self.num, o.num))
        return self.ring._make(num, _mul(self.den, o.den))

    __radd__ = __add__

    def __neg__(self):
        return RingElement(self.ring, tuple(-a for a in self.num), self.den)

    def __sub__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        num = self.ring._mul_vec(self.num, o.num)
        return self.ring._make(num, _mul(self.den, o.den))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        if self.ring.k == 1:
            return RingElement(self.ring, (self.num[0] ** e,), self.den ** e)
        result = self.ring.one
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def _field_inverse(self) -> "RingElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        ring = self.ring
        k = ring.k
        if k == 1:
            return ring._make((self.den,), self.num[0])
        M = ring.mult_matrix(self.num)
        d = lattice.det(M)
        # Cramer's rule for M y = e_0
        y = []
        for i in range(k):
            Mi = [row[:] for row in M]
            for r in range(k):
                Mi[r][i] = 1 if r == 0 else 0
            y.append(lattice.det(Mi))
        return ring._make(tuple(c * self.den for c in y), d)

    def _field_div(self, other: "RingElement") -> "RingElement":
        return self * other._field_inverse()

    def inverse(self) -> "RingElement":
        if self.is_zero():
            raise NotAUnit("zero is not a unit")
        inv = self._field_inverse()
        if not self.ring.contains_fraction(inv.num, inv.den):
            raise NotAUnit(f"{self!r} is not a unit")
        return inv

    def is_unit(self) -> bool:
        if self.is_zero():
            return False
        inv = self._field_inverse()
        return self.ring.contains_fraction(inv.num, inv.den)

    def divides(self, other) -> bool:
        o = self._coerce(other)
        if self.is_zero():
            return o.is_zero()
        q = o._field_div(self)
        return self.ring.contains_fraction(q.num, q.den)

    def exact_div(self, other) -> "RingElement":
        o = self._coerce(other)
        if o.is_zero():
            if self.is_zero():
                return self.ring.zero
            raise NotDivisible(f"{self!r} / 0")
        q = self._field_div(o)
        if not self.ring.contains_fraction(q.num, q.den):
            raise NotDivisible(f"{self!r} is not divisible by {o!r}")
        return q

    def __truediv__(self, other):
        return self.exact_div(other)

    def __rtruediv__(self, other):
        return self.ring(other).exact_div(self)

    def norm(self) -> Fraction:
        k = self.ring.k
        if k == 1:
            return Fraction(self.num[0], self.den)
        if k == 2:
            c0, c1 = self.ring.poly[0], self.ring.poly[1]
            a, b = self.num
            n = a * a - c1 * a * b + c0 * b * b
        else:
            n = lattice.det(self.ring.mult_matrix(self.num))
        return Fraction(n, self.den**k)

    def trace_coords(self) -> tuple[int, ...]:
        return self.num


def norm(a: RingElement) -> Fraction:
    return a.norm()


def is_root_of_unity(x: RingElement) -> bool:
    if x.den != 1 or abs(x.norm()) != 1:
        return False
    k = x.ring.k
    limit = 4 * k * k + 6
    p = x
    for _ in range(limit):
        if p.is_one():
            return True
        p = p * x
    return False
