"""Graded-commutative Kunneth algebras with exact cyclotomic coefficients.

A :class:`KunnethAlgebra` is a tensor product of truncated polynomial
algebras ``C[y]/y^r`` (even generators) and exterior algebras (odd
generators, nilpotency order 2).  Monomials are exponent tuples aligned with
the generator order; that order also fixes the Koszul sign convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence

from .cyclotomic import CyclotomicScalar

__all__ = [
    "GeneratorSpec",
    "KunnethAlgebra",
    "AlgebraElement",
    "IncompatibleAlgebraError",
    "Monomial",
    "multiply",
    "power",
    "hilbert_series",
    "euler_characteristic",
    "monomial_product",
]

Monomial = tuple  # tuple[int, ...] of exponents, one per generator

ONE = CyclotomicScalar.from_rational(1)


class IncompatibleAlgebraError(ValueError):
    """Raised when elements of different algebras are combined."""


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    degree: int
    nilorder: int
    block: str

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError(f"generator {self.name}: degree must be positive")
        if self.nilorder < 2:
            raise ValueError(f"generator {self.name}: nilorder must be at least 2")
        if self.degree % 2 and self.nilorder != 2:
            raise ValueError(f"odd generator {self.name} must square to zero (nilorder 2)")

    @property
    def odd(self) -> bool:
        return bool(self.degree % 2)


@dataclass(frozen=True, eq=False)
class KunnethAlgebra:
    generators: tuple[GeneratorSpec, ...]
    block_types: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise ValueError("generator names must be distinct")
        object.__setattr__(self, "block_types", dict(self.block_types))

    def __eq__(self, other) -> bool:
        if not isinstance(other, KunnethAlgebra):
            return NotImplemented
        return self.generators == other.generators and self.block_types == other.block_types

    def __hash__(self) -> int:
        return hash(self.generators)

    @classmethod
    def truncated(cls, specs: Iterable[tuple[str, int, int]], block_per_generator: bool = True):
        """Shortcut: ``[(name, degree, nilorder), ...]`` with one block per generator."""
        gens = [GeneratorSpec(n, d, r, n if block_per_generator else "B") for n, d, r in specs]
        return cls(tuple(gens))

    @property
    def ngens(self) -> int:
        return len(self.generators)

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(g.name for g in self.generators)

    @cached_property
    def index(self) -> dict[str, int]:
        return {g.name: i for i, g in enumerate(self.generators)}

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(g.degree for g in self.generators)

    @cached_property
    def nilorders(self) -> tuple[int, ...]:
        return tuple(g.nilorder for g in self.generators)

    @cached_property
    def odd(self) -> tuple[bool, ...]:
        return tuple(g.odd for g in self.generators)

    @cached_property
    def has_odd(self) -> bool:
        return any(self.odd)

    @cached_property
    def blocks(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for g in self.generators:
            seen.setdefault(g.block, None)
        return tuple(seen)

    @cached_property
    def block_generators(self) -> dict[str, tuple[int, ...]]:
        out: dict[str, list[int]] = {b: [] for b in self.blocks}
        for i, g in enumerate(self.generators):
            out[g.block].append(i)
        return {b: tuple(v) for b, v in out.items()}

    def block_type(self, block: str) -> str:
        """Blocks of equal type may be permuted; by default the type is the generator signature."""
        if block in self.block_types:
            return self.block_types[block]
        sig = tuple((self.generators[i].degree, self.generators[i].nilorder)
                    for i in self.block_generators[block])
        return repr(sig)

    @cached_property
    def strides(self) -> tuple[int, ...]:
        # mixed-radix index of a monomial: sum e_g * stride_g
        out, s = [], 1
        for r in self.nilorders:
            out.append(s)
            s *= r
        return tuple(out)

    @cached_property
    def dimension(self) -> int:
        n = 1
        for r in self.nilorders:
            n *= r
        return n

    @cached_property
    def top_degree(self) -> int:
        return sum((r - 1) * d for r, d in zip(self.nilorders, self.degrees))

    @cached_property
    def top_monomial(self) -> Monomial:
        return tuple(r - 1 for r in self.nilorders)

    def monomial_degree(self, m: Monomial) -> int:
        return sum(e * d for e, d in zip(m, self.degrees))

    def monomial_index(self, m: Monomial) -> int:
        return sum(e * s for e, s in zip(m, self.strides))

    def monomial_from_index(self, idx: int) -> Monomial:
        out = []
        for r in self.nilorders:
            idx, e = divmod(idx, r)
            out.append(e)
        return tuple(out)

    def basis(self) -> Iterator[Monomial]:
        yield from product(*(range(r) for r in self.nilorders))

    @cached_property
    def _by_degree(self) -> dict[int, tuple[Monomial, ...]]:
        out: dict[int, list[Monomial]] = {}
        for m in self.basis():
            out.setdefault(self.monomial_degree(m), []).append(m)
        # fixed monomial order: reverse lexicographic on exponents reads naturally
        return {d: tuple(sorted(v, reverse=True)) for d, v in out.items()}

    def monomials_of_degree(self, d: int) -> tuple[Monomial, ...]:
        return self._by_degree.get(d, ())

    # element constructors
    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, {})

    def one(self) -> AlgebraElement:
        return AlgebraElement(self, {(0,) * self.ngens: ONE})

    def gen(self, name: str) -> AlgebraElement:
        m = [0] * self.ngens
        m[self.index[name]] = 1
        return AlgebraElement(self, {tuple(m): ONE})

    def gens(self) -> tuple[AlgebraElement, ...]:
        return tuple(self.gen(n) for n in self.names)

    def monomial(self, exps: Mapping[str, int] | Sequence[int], coeff=1) -> AlgebraElement:
        if isinstance(exps, Mapping):
            m = [0] * self.ngens
            for k, v in exps.items():
                m[self.index[k]] = v
            exps = m
        m = tuple(exps)
        if len(m) != self.ngens or any(e < 0 for e in m):
            raise ValueError("bad exponent vector")
        if any(e >= r for e, r in zip(m, self.nilorders)):
            return self.zero()
        return AlgebraElement(self, {m: coeff})

    def format_monomial(self, m: Monomial) -> str:
        parts = []
        for name, e in zip(self.names, m):
            if e:
                parts.append(_pretty_name(name) + (_superscript(e) if e > 1 else ""))
        return "·".join(parts) if parts else "1"


_SUB = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")
_SUP = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


def _pretty_name(name: str) -> str:
    stem = name.rstrip("0123456789")
    return stem + name[len(stem):].translate(_SUB)


def _superscript(e: int) -> str:
    return str(e).translate(_SUP)


def monomial_product(alg: KunnethAlgebra, m1: Monomial, m2: Monomial) -> tuple[int, Monomial | None]:
    """Product of two basis monomials as ``(sign, monomial)``; monomial None means zero."""
    out = []
    for a, b, r in zip(m1, m2, alg.nilorders):
        s = a + b
        if s >= r:
            return 0, None
        out.append(s)
    sign = 1
    if alg.has_odd:
        # move each odd factor of m2 left past the odd factors of m1 with larger index
        odd = alg.odd
        count = 0
        seen_m1 = 0
        for i in range(len(m1) - 1, -1, -1):
            if not odd[i]:
                continue
            if m2[i]:
                count += seen_m1
            if m1[i]:
                seen_m1 += 1
        if count % 2:
            sign = -1
    return sign, tuple(out)


def _as_scalar(c) -> CyclotomicScalar:
    if isinstance(c, CyclotomicScalar):
        return c
    return CyclotomicScalar.from_rational(Fraction(c))


class AlgebraElement:
    """Finite combination of basis monomials with nonzero cyclotomic coefficients."""

    __slots__ = ("algebra", "_terms")

    def __init__(self, algebra: KunnethAlgebra, terms: Mapping[Monomial, object]):
        self.algebra = algebra
        clean = {}
        for m, c in terms.items():
            c = _as_scalar(c)
            if c:
                clean[tuple(m)] = c
        self._terms = clean

    @property
    def terms(self) -> dict[Monomial, CyclotomicScalar]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, m: Monomial) -> CyclotomicScalar:
        return self._terms.get(tuple(m), CyclotomicScalar.from_rational(0))

    def support(self) -> list[Monomial]:
        return sorted(self._terms, reverse=True)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def degree(self) -> int | None:
        """Common degree of all monomials, or None if zero or inhomogeneous."""
        degs = {self.algebra.monomial_degree(m) for m in self._terms}
        return degs.pop() if len(degs) == 1 else None

    def _check(self, other: AlgebraElement):
        if other.algebra is not self.algebra and other.algebra != self.algebra:
            raise IncompatibleAlgebraError("elements live in different algebras")

    def __add__(self, other):
        if not isinstance(other, AlgebraElement):
            if isinstance(other, (int, Fraction, CyclotomicScalar)):
                other = self.algebra.one() * other
            else:
                return NotImplemented
        self._check(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out[m] + c if m in out else c
        return AlgebraElement(self.algebra, out)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.algebra, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return multiply(self, other)
        if isinstance(other, (int, Fraction, CyclotomicScalar)):
            c = _as_scalar(other)
            return AlgebraElement(self.algebra, {m: v * c for m, v in self._terms.items()})
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, CyclotomicScalar)):
            return self * other
        return NotImplemented

    def __pow__(self, m: int):
        return power(self, m)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, CyclotomicScalar)):
            other = self.algebra.one() * other
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.algebra == other.algebra and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        return f"AlgebraElement({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for m in self.support():
            c = self._terms[m]
            mono = self.algebra.format_monomial(m)
            if c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            elif mono == "1":
                parts.append(str(c))
            else:
                parts.append(f"{c}·{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> list:
        return [
            {"monomial": {n: e for n, e in zip(self.algebra.names, m) if e},
             "coeff": self._terms[m].to_json()}
            for m in self.support()
        ]


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Graded-commutative product with truncation and Koszul signs."""
    a._check(b)
    alg = a.algebra
    out: dict[Monomial, CyclotomicScalar] = {}
    for m1, c1 in a._terms.items():
        for m2, c2 in b._terms.items():
            sign, m = monomial_product(alg, m1, m2)
            if m is None:
                continue
            c = c1 * c2
            if sign < 0:
                c = -c
            out[m] = out[m] + c if m in out else c
    return AlgebraElement(alg, out)


def power(a: AlgebraElement, m: int) -> AlgebraElement:
    if m < 0:
        raise ValueError("power exponent must be non-negative")
    result = a.algebra.one()
    base = a
    while m:
        if m & 1:
            result = multiply(result, base)
        m >>= 1
        if m:
            base = multiply(base, base)
    return result


def hilbert_series(alg: KunnethAlgebra) -> list[int]:
    coeffs = [1]
    for d, r in zip(alg.degrees, alg.nilorders):
        new = [0] * (len(coeffs) + (r - 1) * d)
        for i, c in enumerate(coeffs):
            if c:
                for e in range(r):
                    new[i + e * d] += c
        coeffs = new
    return coeffs


def euler_characteristic(alg: KunnethAlgebra) -> int:
    return sum(c if d % 2 == 0 else -c for d, c in enumerate(hilbert_series(alg)))
