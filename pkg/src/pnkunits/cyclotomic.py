"""Exact arithmetic in cyclotomic number fields.

An element of ``Q(zeta_N)`` is stored in the power basis ``1, zeta, ...,
zeta^(phi(N)-1)`` modulo the N-th cyclotomic polynomial.  Elements of
different levels are lifted to the least common multiple level before any
binary operation, so equality is decidable and canonical across levels.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from numbers import Rational
from typing import Iterable, Sequence, Union

__all__ = ["CyclotomicScalar", "root_of_unity", "zeta", "totient", "cyclotomic_polynomial"]

Number = Union[int, Fraction, "CyclotomicScalar"]


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


@lru_cache(maxsize=None)
def _factorize(n: int) -> tuple[tuple[int, int], ...]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return tuple(out)


@lru_cache(maxsize=None)
def totient(n: int) -> int:
    result = n
    for p, _ in _factorize(n):
        result = result // p * (p - 1)
    return result


@lru_cache(maxsize=None)
def _mobius(n: int) -> int:
    fac = _factorize(n)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise ValueError("level must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _exact_divide(poly, cyclotomic_polynomial(d))
    return tuple(poly)


def _exact_divide(num: list[int], den: Sequence[int]) -> list[int]:
    num = list(num)
    dn = len(den) - 1
    quot = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c:
            quot[i - dn] = c
            for j in range(dn + 1):
                num[i - dn + j] -= c * den[j]
    assert not any(num), "non-exact polynomial division"
    return quot


@lru_cache(maxsize=None)
def _trace_weights(n: int) -> tuple[Fraction, ...]:
    # normalised trace Tr(zeta_n^i) / phi(n) for the power-basis elements
    w = []
    for i in range(totient(n)):
        m = n // gcd(i, n)
        w.append(Fraction(_mobius(m), totient(m)))
    return tuple(w)


def _reduce(poly: list, n: int) -> tuple[Fraction, ...]:
    """Reduce ``sum poly[i] zeta_n^i`` modulo Phi_n (poly is modified)."""
    phi = cyclotomic_polynomial(n)
    d = len(phi) - 1
    for i in range(len(poly) - 1, d - 1, -1):
        c = poly[i]
        if c:
            base = i - d
            for j in range(d):
                pj = phi[j]
                if pj:
                    poly[base + j] -= c * pj
    out = poly[:d]
    if len(out) < d:
        out = out + [0] * (d - len(out))
    return tuple(Fraction(c) for c in out)


class CyclotomicScalar:
    """Element ``sum_i coeffs[i] * zeta_level^i`` of a cyclotomic field."""

    __slots__ = ("_level", "_coeffs", "_hash")

    def __init__(self, level: int, coeffs: Iterable = (0,)):
        if level < 1:
            raise ValueError("level must be a positive integer")
        coeffs = list(coeffs)
        if len(coeffs) > level:
            # fold exponents modulo the level first (zeta^level = 1)
            folded = [0] * level
            for i, c in enumerate(coeffs):
                folded[i % level] += c
            coeffs = folded
        red = _reduce(coeffs, level)
        if len(red) == 1 or not any(red[1:]):
            level, red = 1, (red[0] if red else Fraction(0),)
        self._level = level
        self._coeffs = red
        self._hash = None

    @classmethod
    def _raw(cls, level: int, coeffs: tuple[Fraction, ...]) -> CyclotomicScalar:
        obj = cls.__new__(cls)
        if level != 1 and not any(coeffs[1:]):
            level, coeffs = 1, (coeffs[0],)
        obj._level = level
        obj._coeffs = coeffs
        obj._hash = None
        return obj

    @classmethod
    def from_rational(cls, q: int | Fraction) -> CyclotomicScalar:
        return cls._raw(1, (Fraction(q),))

    @classmethod
    def from_exponent(cls, q: Fraction) -> CyclotomicScalar:
        """The root of unity ``exp(2 pi i q)`` for a rational ``q``."""
        q = Fraction(q) % 1
        return root_of_unity(q.numerator, q.denominator)

    @property
    def level(self) -> int:
        return self._level

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self._coeffs

    def is_zero(self) -> bool:
        return not any(self._coeffs)

    def __bool__(self) -> bool:
        return any(self._coeffs)

    def is_rational(self) -> bool:
        return self._level == 1

    def to_rational(self) -> Fraction:
        if self._level != 1:
            raise ValueError(f"{self} is not rational")
        return self._coeffs[0]

    def lift(self, level: int) -> tuple[Fraction, ...]:
        """Power-basis coordinates of ``self`` at a multiple ``level``."""
        if level % self._level:
            raise ValueError(f"level {level} is not a multiple of {self._level}")
        if level == self._level:
            return self._coeffs
        step = level // self._level
        poly = [0] * ((len(self._coeffs) - 1) * step + 1)
        for i, c in enumerate(self._coeffs):
            poly[i * step] = c
        return _reduce(poly, level)

    @staticmethod
    def _coerce(other) -> CyclotomicScalar | None:
        if isinstance(other, CyclotomicScalar):
            return other
        if isinstance(other, (int, Fraction)) or isinstance(other, Rational):
            return CyclotomicScalar._raw(1, (Fraction(other),))
        return None

    def _common(self, other: CyclotomicScalar):
        if self._level == other._level:
            return self._level, self._coeffs, other._coeffs
        n = _lcm(self._level, other._level)
        return n, self.lift(n), other.lift(n)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n, a, b = self._common(o)
        return CyclotomicScalar._raw(n, tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicScalar._raw(self._level, tuple(-c for c in self._coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o._level == 1:
            q = o._coeffs[0]
            return CyclotomicScalar._raw(self._level, tuple(c * q for c in self._coeffs))
        if self._level == 1:
            q = self._coeffs[0]
            return CyclotomicScalar._raw(o._level, tuple(c * q for c in o._coeffs))
        n, a, b = self._common(o)
        prod = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return CyclotomicScalar._raw(n, _reduce(prod, n))

    __rmul__ = __mul__

    def inverse(self) -> CyclotomicScalar:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        if self._level == 1:
            return CyclotomicScalar._raw(1, (1 / self._coeffs[0],))
        n = self._level
        d = len(self._coeffs)
        # columns: coordinates of self * zeta^j; solve M v = e_0
        cols = []
        for j in range(d):
            poly = [0] * j + list(self._coeffs)
            cols.append(_reduce(poly, n))
        rows = [[cols[j][i] for j in range(d)] + [Fraction(int(i == 0))] for i in range(d)]
        for c in range(d):
            piv = next(r for r in range(c, d) if rows[r][c])
            rows[c], rows[piv] = rows[piv], rows[c]
            inv = 1 / rows[c][c]
            rows[c] = [v * inv for v in rows[c]]
            for r in range(d):
                if r != c and rows[r][c]:
                    f = rows[r][c]
                    rows[r] = [v - f * w for v, w in zip(rows[r], rows[c])]
        return CyclotomicScalar._raw(n, tuple(rows[i][d] for i in range(d)))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, m: int) -> CyclotomicScalar:
        if not isinstance(m, int):
            return NotImplemented
        base = self if m >= 0 else self.inverse()
        m = abs(m)
        result = CyclotomicScalar._raw(1, (Fraction(1),))
        while m:
            if m & 1:
                result = result * base
            base = base * base
            m >>= 1
        return result

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self._level == o._level:
            return self._coeffs == o._coeffs
        _, a, b = self._common(o)
        return a == b

    def __hash__(self) -> int:
        if self._hash is None:
            # normalised trace is independent of the level used to store the element
            w = _trace_weights(self._level)
            self._hash = hash(sum((c * x for c, x in zip(self._coeffs, w)), Fraction(0)))
        return self._hash

    def root_order(self) -> int | None:
        """Multiplicative order if ``self`` is a root of unity, else None."""
        if self.is_zero():
            return None
        bound = _lcm(self._level, 2)
        p = self
        for m in range(1, bound + 1):
            if p == 1:
                return m
            p = p * self
        return None

    def to_complex(self) -> complex:
        import cmath

        z = cmath.exp(2j * cmath.pi / self._level)
        return sum(float(c) * z**i for i, c in enumerate(self._coeffs))

    def __repr__(self) -> str:
        return f"CyclotomicScalar({self._level}, {[str(c) for c in self._coeffs]})"

    def __str__(self) -> str:
        if self._level == 1:
            return str(self._coeffs[0])
        parts = []
        for i, c in enumerate(self._coeffs):
            if not c:
                continue
            if i == 0:
                term = str(c)
            else:
                z = f"ζ{self._level}" + (f"^{i}" if i > 1 else "")
                if c == 1:
                    term = z
                elif c == -1:
                    term = "-" + z
                else:
                    term = f"{c}*{z}" if c.denominator == 1 else f"({c})*{z}"
            parts.append(term)
        s = " + ".join(parts).replace("+ -", "- ")
        return f"({s})" if len(parts) > 1 else s

    def to_json(self) -> dict:
        return {"level": self._level, "coeffs": [str(c) for c in self._coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> CyclotomicScalar:
        return cls(int(data["level"]), [Fraction(c) for c in data["coeffs"]])


@lru_cache(maxsize=4096)
def root_of_unity(j: int, n: int) -> CyclotomicScalar:
    """``zeta_n ** j``."""
    if n < 1:
        raise ValueError("level must be positive")
    j %= n
    poly = [0] * (j + 1)
    poly[j] = 1
    return CyclotomicScalar(n, poly)


def zeta(n: int) -> CyclotomicScalar:
    return root_of_unity(1, n)
