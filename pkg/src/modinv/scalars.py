"""Exact arithmetic in cyclotomic fields Q(zeta_N).

Values are stored as sparse polynomials in zeta_N modulo x^N - 1 and reduced
to the canonical basis modulo the N-th cyclotomic polynomial only when
equality, serialization or hashing-style normal forms are needed.  Mixed-order
arithmetic promotes both operands to the lcm of their orders.  All
coefficients are ``fractions.Fraction``; nothing here ever touches floats
except the display-only ``approx`` helper.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

ORDER_GUARD = 10**6


class OrderGuardError(ValueError):
    """Requested cyclotomic order exceeds the configured guard."""


def _check_order(n: int) -> None:
    if n <= 0:
        raise ValueError("cyclotomic order must be a positive integer")
    if n > ORDER_GUARD:
        raise OrderGuardError(f"cyclotomic order {n} exceeds guard {ORDER_GUARD}")


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (low degree first) of the n-th cyclotomic polynomial."""
    _check_order(n)
    # x^n - 1 divided by the product of Phi_d over proper divisors d | n.
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _exact_div(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


def _exact_div(num: list[int], den: list[int]) -> list[int]:
    # Exact division of integer polynomials, low degree first.
    num = num[:]
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        if c % den[-1] != 0:
            raise ArithmeticError("non-exact polynomial division")
        q = c // den[-1]
        out[i] = q
        if q:
            for j, dj in enumerate(den):
                num[i + j] -= q * dj
    if any(num):
        raise ArithmeticError("non-exact polynomial division")
    return out


def _reduce_mod_phi(terms: dict[int, Fraction], n: int) -> tuple[Fraction, ...]:
    """Canonical length-n coefficient vector of Sum c_k zeta_n^k mod Phi_n."""
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    coeffs = [Fraction(0)] * n
    for k, c in terms.items():
        coeffs[k % n] += c
    for i in range(n - 1, deg - 1, -1):
        c = coeffs[i]
        if c:
            coeffs[i] = Fraction(0)
            for j in range(deg):
                if phi[j]:
                    coeffs[i - deg + j] -= c * phi[j]
    return tuple(coeffs)


class Cyclotomic:
    """An element of Q(zeta_order); immutable."""

    __slots__ = ("order", "_terms", "_canon")
    __hash__ = None  # equality crosses orders; use canonical keys instead

    def __init__(self, order: int, terms: dict[int, Fraction] | None = None):
        _check_order(order)
        clean: dict[int, Fraction] = {}
        if terms:
            for k, c in terms.items():
                c = Fraction(c)
                if c:
                    k %= order
                    acc = clean.get(k)
                    clean[k] = c if acc is None else acc + c
                    if not clean[k]:
                        del clean[k]
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "_canon", None)

    def __setattr__(self, *a):
        raise AttributeError("Cyclotomic values are immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "Cyclotomic":
        return Cyclotomic(1, {})

    @staticmethod
    def one() -> "Cyclotomic":
        return Cyclotomic(1, {0: Fraction(1)})

    @staticmethod
    def from_rational(r) -> "Cyclotomic":
        return Cyclotomic(1, {0: Fraction(r)})

    # -- canonical form ----------------------------------------------------

    def canonical(self) -> tuple[Fraction, ...]:
        """Length-order coefficient vector, reduced modulo Phi_order."""
        if self._canon is None:
            object.__setattr__(self, "_canon", _reduce_mod_phi(self._terms, self.order))
        return self._canon

    def at_order(self, n: int) -> "Cyclotomic":
        """The same value viewed in Q(zeta_n); n must be a multiple of order."""
        if n == self.order:
            return self
        if n % self.order != 0:
            raise ValueError(f"{n} is not a multiple of order {self.order}")
        step = n // self.order
        return Cyclotomic(n, {k * step: c for k, c in self._terms.items()})

    # -- ring operations ---------------------------------------------------

    def _common(self, other: "Cyclotomic") -> tuple["Cyclotomic", "Cyclotomic"]:
        n = lcm(self.order, other.order)
        return self.at_order(n), other.at_order(n)

    @staticmethod
    def _coerce(v) -> "Cyclotomic":
        if isinstance(v, Cyclotomic):
            return v
        if isinstance(v, (int, Fraction)):
            return Cyclotomic.from_rational(v)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._common(other)
        terms = dict(a._terms)
        for k, c in b._terms.items():
            terms[k] = terms.get(k, Fraction(0)) + c
        return Cyclotomic(a.order, terms)

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.order, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._common(other)
        if len(a._terms) > len(b._terms):
            a, b = b, a
        n = a.order
        terms: dict[int, Fraction] = {}
        for k1, c1 in a._terms.items():
            for k2, c2 in b._terms.items():
                k = (k1 + k2) % n
                acc = terms.get(k)
                terms[k] = c1 * c2 if acc is None else acc + c1 * c2
        return Cyclotomic(n, terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Cyclotomic._coerce(other) * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        out = Cyclotomic.one()
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def conj(self) -> "Cyclotomic":
        """Complex conjugate: zeta^k -> zeta^-k."""
        return Cyclotomic(self.order, {-k: c for k, c in self._terms.items()})

    def inverse(self) -> "Cyclotomic":
        if len(self._terms) == 1:
            ((k, c),) = self._terms.items()
            return Cyclotomic(self.order, {-k: 1 / c})
        n = self.order
        canon = list(self.canonical())
        phi = [Fraction(c) for c in cyclotomic_polynomial(n)]
        deg = len(phi) - 1
        r = canon[:deg]
        while r and not r[-1]:
            r.pop()
        if not r:
            raise ZeroDivisionError("inverse of zero")
        u = _poly_invert(r, phi)
        return Cyclotomic(n, {i: c for i, c in enumerate(u) if c})

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.canonical())

    def is_one(self) -> bool:
        return self == Cyclotomic.one()

    def is_rational(self) -> bool:
        c = self.canonical()
        return not any(c[1:])

    def as_rational(self) -> Fraction:
        c = self.canonical()
        if any(c[1:]):
            raise ValueError("value is not rational")
        return c[0]

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.order == other.order:
            return self.canonical() == other.canonical()
        a, b = self._common(other)
        return a.canonical() == b.canonical()

    # -- display and serialization ----------------------------------------

    def approx(self) -> complex:
        """Floating-point embedding (zeta_N = e^(2 pi i / N)); display only."""
        return sum(
            complex(c) * cmath.exp(2j * cmath.pi * k / self.order)
            for k, c in self._terms.items()
        )

    def __repr__(self) -> str:
        if not self._terms:
            return "Cyc(0)"
        parts = []
        for k in sorted(self._terms):
            c = self._terms[k]
            parts.append(f"{c}*z{self.order}^{k}" if k else f"{c}")
        return "Cyc(" + " + ".join(parts) + ")"

    def to_json(self) -> dict:
        return {"N": self.order, "c": [str(c) for c in self.canonical()]}

    @staticmethod
    def from_json(obj: dict) -> "Cyclotomic":
        n = int(obj["N"])
        coeffs = [Fraction(s) for s in obj["c"]]
        if len(coeffs) != n:
            raise ValueError("coefficient list must have exactly N entries")
        return Cyclotomic(n, {i: c for i, c in enumerate(coeffs) if c})


def _poly_invert(r: list[Fraction], phi: list[Fraction]) -> list[Fraction]:
    # Extended Euclid in Q[x]: u*r + v*phi = 1 (phi irreducible so gcd is 1).
    def pdivmod(a: list[Fraction], b: list[Fraction]):
        a = a[:]
        q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
        while len(a) >= len(b) and any(a):
            while a and not a[-1]:
                a.pop()
            if len(a) < len(b):
                break
            f = a[-1] / b[-1]
            d = len(a) - len(b)
            q[d] += f
            for j, bj in enumerate(b):
                a[d + j] -= f * bj
            while a and not a[-1]:
                a.pop()
        return q, a

    old_r, cur_r = phi[:], r[:]
    old_u, cur_u = [Fraction(0)], [Fraction(1)]
    while any(cur_r):
        q, rem = pdivmod(old_r, cur_r)
        old_r, cur_r = cur_r, rem
        # old_u - q*cur_u
        prod = [Fraction(0)] * (len(q) + len(cur_u) - 1)
        for i, qi in enumerate(q):
            if qi:
                for j, uj in enumerate(cur_u):
                    prod[i + j] += qi * uj
        new_u = [Fraction(0)] * max(len(old_u), len(prod))
        for i, c in enumerate(old_u):
            new_u[i] += c
        for i, c in enumerate(prod):
            new_u[i] -= c
        old_u, cur_u = cur_u, new_u
    lead = next(c for c in reversed(old_r) if c)
    if len([c for c in old_r if c]) != 1 or old_r[0] != lead:
        raise ArithmeticError("gcd with cyclotomic polynomial is not constant")
    return [c / lead for c in old_u]


# -- public operations -------------------------------------------------------


def root_of_unity(N: int, k: int) -> Cyclotomic:
    """zeta_N^k in canonical form; the order of the result divides N."""
    _check_order(N)
    k %= N
    if k == 0:
        return Cyclotomic.one()
    g = gcd(N, k)
    return Cyclotomic(N // g, {k // g: Fraction(1)})


def rational_phase(r: Fraction) -> Cyclotomic:
    """e^(2 pi i r) for rational r, as an exact root of unity."""
    r = Fraction(r)
    return root_of_unity(r.denominator, r.numerator)


def sqrt_nonneg_int(n: int) -> Cyclotomic:
    """Positive square root of a nonnegative integer, inside Q(zeta_4n)."""
    if n < 0:
        raise ValueError("negative input")
    if n == 0:
        return Cyclotomic.zero()
    m, f = 1, n
    d = 2
    while d * d <= f:
        while f % (d * d) == 0:
            f //= d * d
            m *= d
        d += 1
    out = Cyclotomic.from_rational(m)
    if f % 2 == 0:
        out = out * _sqrt2()
        f //= 2
    if f > 1:
        out = out * _sqrt_odd_squarefree(f)
    return out


def _sqrt2() -> Cyclotomic:
    return root_of_unity(8, 1) + root_of_unity(8, -1)


def _sqrt_odd_squarefree(f: int) -> Cyclotomic:
    # Quadratic Gauss sum: Sum_k zeta_f^(k^2) equals sqrt(f) for f = 1 mod 4
    # and i*sqrt(f) for f = 3 mod 4.
    g = Cyclotomic(f, {})
    for k in range(f):
        g = g + root_of_unity(f, k * k)
    if f % 4 == 1:
        return g
    return root_of_unity(4, -1) * g


def compare(a: Cyclotomic, b: Cyclotomic) -> bool:
    """True iff a and b are equal as complex numbers (canonical forms agree)."""
    return a == b
