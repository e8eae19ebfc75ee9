"""Finite groups acting on Kunneth algebras.

Automorphisms act on cohomology by pullback: a generator ``g`` of block ``b``
goes to ``zeta * g'`` where ``g'`` is the corresponding generator of the image
block.  :func:`compose` composes these cohomological operators, so
``apply(compose(a, b), x) == apply(a, apply(b, x))``; for geometric maps
``phi, psi`` the pullback of ``phi o psi`` is ``compose(psi*, phi*)``.

Geometric facts (orders, fixed-point-freeness) are declared, never computed.
Each block component of an automorphism may be recorded as a power of the
declared base automorphism of its factor; freeness of products and of
cyclic block permutations then follows from the declared freeness of those
powers.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Iterable, Mapping, Sequence

import numpy as np

from .algebra import AlgebraElement, KunnethAlgebra, Monomial
from .cyclotomic import CyclotomicScalar

__all__ = [
    "InvalidAutomorphismError",
    "GroupOverflowError",
    "BaseAutomorphism",
    "AutomorphismMeta",
    "ProductAutomorphism",
    "ActionGroup",
    "apply",
    "compose",
    "inverse",
    "group_closure",
    "propagate_freeness",
    "DEFAULT_CAP",
]

DEFAULT_CAP = 10**6

class InvalidAutomorphismError(ValueError):
    pass


class GroupOverflowError(RuntimeError):
    pass


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


@dataclass(frozen=True)
class BaseAutomorphism:
    """A declared automorphism ``f`` of one factor.

    ``rho`` holds, per generator of the factor, the exponent ``q`` such that
    ``f`` scales that generator by ``exp(2 pi i q)``.  ``free_powers`` is the
    set of residues ``a`` (mod ``order``) with ``f^a`` fixed point free, or
    None when unknown.
    """

    name: str
    order: int
    rho: tuple[Fraction, ...]
    free_powers: frozenset[int] | None = None

    def __post_init__(self):
        object.__setattr__(self, "rho", tuple(Fraction(q) % 1 for q in self.rho))
        if self.order < 1:
            raise ValueError("automorphism order must be positive")
        if self.free_powers is not None:
            object.__setattr__(self, "free_powers", frozenset(a % self.order for a in self.free_powers))

    @classmethod
    def acting_freely(cls, name: str, order: int, rho: Sequence[Fraction]) -> BaseAutomorphism:
        """``<f>`` acts freely: every non-trivial power is fixed point free."""
        return cls(name, order, tuple(rho), frozenset(range(1, order)))

    @classmethod
    def with_fixed_points(cls, name: str, order: int, rho: Sequence[Fraction]) -> BaseAutomorphism:
        """``f`` has fixed points, hence so does every power."""
        return cls(name, order, tuple(rho), frozenset())

    @property
    def symplectic_order(self) -> int:
        """Order of the scalar on the first generator (the symplectic order for HK factors)."""
        return self.rho[0].denominator if self.rho else 1

    @property
    def acts_freely(self) -> bool | None:
        if self.free_powers is None:
            return None
        return self.free_powers == frozenset(range(1, self.order))

    def freeness(self, power: int) -> bool | None:
        power %= self.order
        if power == 0:
            return False
        if self.free_powers is None:
            return None
        return power in self.free_powers


@dataclass(frozen=True)
class AutomorphismMeta:
    order: int | None = None
    symplectic_order: int | None = None
    fixed_point_free: bool | None = None
    free_compositions: tuple[tuple[str, ...], ...] = ()


class ProductAutomorphism:
    """Block-preserving permutation of generators with root-of-unity scalars."""

    def __init__(self, algebra: KunnethAlgebra, perm: Sequence[int], exponents: Sequence,
                 powers: Sequence[int | None] | None = None,
                 moduli: Sequence[int | None] | None = None,
                 name: str = "", meta: AutomorphismMeta | None = None, check: bool = True):
        self.algebra = algebra
        self.perm = tuple(int(p) for p in perm)
        self.exponents = tuple(Fraction(q) % 1 for q in exponents)
        nb = len(algebra.blocks)
        self.moduli = tuple(moduli) if moduli is not None else (None,) * nb
        if powers is None:
            powers = (None,) * nb
        self.powers = tuple(None if p is None else (p % m if m else p)
                            for p, m in zip(powers, self.moduli))
        self.name = name
        self.meta = meta
        self._key = None
        if check:
            self._validate()

    def _validate(self):
        alg = self.algebra
        n = alg.ngens
        if len(self.perm) != n or len(self.exponents) != n:
            raise InvalidAutomorphismError("permutation/scalars do not match the generator count")
        if sorted(self.perm) != list(range(n)):
            raise InvalidAutomorphismError("generator map is not a bijection")
        for i, j in enumerate(self.perm):
            gi, gj = alg.generators[i], alg.generators[j]
            if gi.degree != gj.degree or gi.nilorder != gj.nilorder:
                raise InvalidAutomorphismError(f"{gi.name} -> {gj.name} changes degree or nilorder")
        for b, idx in alg.block_generators.items():
            targets = {alg.generators[self.perm[i]].block for i in idx}
            if len(targets) != 1:
                raise InvalidAutomorphismError(f"block {b} is split across several factors")
            t = targets.pop()
            if alg.block_type(t) != alg.block_type(b):
                raise InvalidAutomorphismError(f"block {b} mapped onto non-identical factor {t}")
        if len(self.powers) != len(alg.blocks) or len(self.moduli) != len(alg.blocks):
            raise InvalidAutomorphismError("per-block powers do not match the block count")

    @classmethod
    def identity(cls, algebra: KunnethAlgebra, moduli=None,
                 unknown: Sequence[bool] | None = None) -> ProductAutomorphism:
        """Identity; blocks flagged in ``unknown`` carry no power bookkeeping."""
        nb = len(algebra.blocks)
        unknown = unknown or (False,) * nb
        return cls(algebra, range(algebra.ngens), [0] * algebra.ngens,
                   powers=[None if u else 0 for u in unknown], moduli=moduli, name="id", check=False)

    @classmethod
    def from_map(cls, algebra: KunnethAlgebra, images: Mapping[str, tuple[str, object]],
                 name: str = "", meta: AutomorphismMeta | None = None) -> ProductAutomorphism:
        """Build from ``{generator: (image generator, exponent q)}``; unlisted generators are fixed.

        The exponent ``q`` means the scalar ``exp(2 pi i q)``.
        """
        perm = list(range(algebra.ngens))
        exps = [Fraction(0)] * algebra.ngens
        for src, (dst, q) in images.items():
            perm[algebra.index[src]] = algebra.index[dst]
            exps[algebra.index[src]] = Fraction(q)
        return cls(algebra, perm, exps, name=name, meta=meta)

    @classmethod
    def from_blocks(cls, algebra: KunnethAlgebra, block_map: Mapping[str, str],
                    exponents: Mapping[str, object], powers: Mapping[str, int] | None = None,
                    moduli: Mapping[str, int] | None = None, name: str = "",
                    meta: AutomorphismMeta | None = None) -> ProductAutomorphism:
        """Build from a block permutation, per-generator exponents and per-block powers."""
        perm = list(range(algebra.ngens))
        bg = algebra.block_generators
        for b, t in block_map.items():
            if b not in bg or t not in bg:
                raise InvalidAutomorphismError(f"unknown block in map {b!r} -> {t!r}")
            if len(bg[b]) != len(bg[t]):
                raise InvalidAutomorphismError(f"block {b} mapped onto non-identical factor {t}")
            for i, j in zip(bg[b], bg[t]):
                perm[i] = j
        exps = [Fraction(0)] * algebra.ngens
        for gname, q in exponents.items():
            exps[algebra.index[gname]] = Fraction(q)
        blocks = algebra.blocks
        pw = None
        if powers is not None:
            pw = [powers.get(b, 0) for b in blocks]
        md = None
        if moduli is not None:
            md = [moduli.get(b) for b in blocks]
        return cls(algebra, perm, exps, powers=pw, moduli=md, name=name, meta=meta)

    # derived data
    @cached_property
    def block_perm(self) -> dict[str, str]:
        alg = self.algebra
        return {b: alg.generators[self.perm[idx[0]]].block
                for b, idx in alg.block_generators.items() if idx}

    @cached_property
    def scalars(self) -> dict[str, CyclotomicScalar]:
        return {n: CyclotomicScalar.from_exponent(q) for n, q in zip(self.algebra.names, self.exponents)}

    def key(self) -> tuple:
        if self._key is None:
            self._key = (self.perm, self.exponents, self.powers)
        return self._key

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProductAutomorphism):
            return NotImplemented
        return self.algebra == other.algebra and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def is_identity(self) -> bool:
        return (self.perm == tuple(range(len(self.perm))) and not any(self.exponents)
                and all(p in (0, None) for p in self.powers))

    @cached_property
    def scalar_level(self) -> int:
        n = 1
        for q in self.exponents:
            n = _lcm(n, q.denominator)
        return n

    def cycles(self) -> list[tuple[str, ...]]:
        """Cycles of the block permutation, each starting at its first block in algebra order."""
        bp = self.block_perm
        seen, out = set(), []
        for b in self.algebra.blocks:
            if b in seen or b not in bp:
                continue
            cyc = [b]
            seen.add(b)
            c = bp[b]
            while c != b:
                cyc.append(c)
                seen.add(c)
                c = bp[c]
            out.append(tuple(cyc))
        return out

    def order(self, cap: int = DEFAULT_CAP) -> int:
        ident = ProductAutomorphism.identity(self.algebra, self.moduli,
                                             [p is None for p in self.powers]).key()
        p = self
        for m in range(1, cap + 1):
            if p.key() == ident:
                return m
            p = compose(p, self)
        raise GroupOverflowError(f"element order exceeds cap {cap}")

    def image_of_monomial(self, m: Monomial) -> tuple[Fraction, Monomial]:
        """``(q, m')`` with ``apply(self, m) = exp(2 pi i q) * m'``."""
        alg = self.algebra
        new = [0] * alg.ngens
        q = Fraction(0)
        seq = []
        odd = alg.odd
        for g, e in enumerate(m):
            if e:
                pg = self.perm[g]
                new[pg] = e
                if self.exponents[g]:
                    q += e * self.exponents[g]
                if odd[g]:
                    seq.append(pg)
        if len(seq) > 1:
            inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
            if inv % 2:
                q += Fraction(1, 2)
        return q % 1, tuple(new)

    def __repr__(self) -> str:
        parts = []
        alg = self.algebra
        for i, (p, q) in enumerate(zip(self.perm, self.exponents)):
            if p != i or q:
                s = f"{alg.names[i]}->" + (f"ζ^{q}·" if q else "") + alg.names[p]
                parts.append(s)
        label = f"{self.name}: " if self.name else ""
        return f"<{label}{', '.join(parts) or 'id'}>"


def apply(auto: ProductAutomorphism, a: AlgebraElement) -> AlgebraElement:
    if a.algebra != auto.algebra:
        raise InvalidAutomorphismError("automorphism and element live on different algebras")
    out = {}
    for m, c in a.items():
        q, m2 = auto.image_of_monomial(m)
        out[m2] = c * CyclotomicScalar.from_exponent(q) if q else c
    return AlgebraElement(a.algebra, out)


def compose(a: ProductAutomorphism, b: ProductAutomorphism) -> ProductAutomorphism:
    """Cohomological composite: apply ``b`` first, then ``a``."""
    if a.algebra != b.algebra:
        raise InvalidAutomorphismError("cannot compose automorphisms of different algebras")
    perm = tuple(a.perm[j] for j in b.perm)
    exps = tuple(b.exponents[g] + a.exponents[b.perm[g]] for g in range(len(b.perm)))
    alg = a.algebra
    bidx = {blk: i for i, blk in enumerate(alg.blocks)}
    bperm = b.block_perm
    powers = []
    for i, blk in enumerate(alg.blocks):
        pb = b.powers[i]
        pa = a.powers[bidx[bperm[blk]]] if blk in bperm else 0
        powers.append(None if pa is None or pb is None else pa + pb)
    moduli = tuple(x if x is not None else y for x, y in zip(a.moduli, b.moduli))
    return ProductAutomorphism(alg, perm, exps, powers=powers, moduli=moduli, check=False)


def inverse(a: ProductAutomorphism) -> ProductAutomorphism:
    n = len(a.perm)
    perm = [0] * n
    exps = [Fraction(0)] * n
    for g, pg in enumerate(a.perm):
        perm[pg] = g
        exps[pg] = -a.exponents[g]
    alg = a.algebra
    bidx = {blk: i for i, blk in enumerate(alg.blocks)}
    powers = [None] * len(alg.blocks)
    for i, blk in enumerate(alg.blocks):
        t = a.block_perm.get(blk, blk)
        p = a.powers[i]
        powers[bidx[t]] = None if p is None else -p
    return ProductAutomorphism(alg, perm, exps, powers=powers, moduli=a.moduli, check=False)


class ActionGroup:
    """A finite group of product automorphisms, stored element by element."""

    def __init__(self, algebra: KunnethAlgebra, elements: Sequence[ProductAutomorphism],
                 generators: Sequence[ProductAutomorphism] = ()):
        self.algebra = algebra
        self.elements = tuple(elements)
        self.generators = tuple(generators)
        self._index = {e.key(): i for i, e in enumerate(self.elements)}

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g: ProductAutomorphism) -> bool:
        return g.key() in self._index

    @property
    def identity(self) -> ProductAutomorphism:
        return self.elements[0]

    def index_of(self, g: ProductAutomorphism) -> int:
        return self._index[g.key()]

    @cached_property
    def level(self) -> int:
        """Common level of all scalars (even whenever Koszul signs can occur)."""
        n = 2 if self.algebra.has_odd else 1
        for e in self.elements:
            n = _lcm(n, e.scalar_level)
        return n

    @cached_property
    def kernel_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        L = self.level
        perm = np.array([e.perm for e in self.elements], dtype=np.int64).reshape(len(self), self.algebra.ngens)
        scal = np.array([[int(q * L) for q in e.exponents] for e in self.elements],
                        dtype=np.int64).reshape(len(self), self.algebra.ngens)
        return perm, scal

    def element_orders(self) -> list[int]:
        return [e.order() for e in self.elements]

    @cached_property
    def exponent(self) -> int:
        n = 1
        for m in self.element_orders():
            n = _lcm(n, m)
        return n

    def cyclic_generator(self) -> ProductAutomorphism | None:
        """An element generating the whole group, preferring a declared generator."""
        for g in list(self.generators) + list(self.elements):
            if g.order() == self.order:
                return g
        return None

    def is_cyclic(self) -> bool:
        return self.cyclic_generator() is not None


def group_closure(gens: Iterable[ProductAutomorphism], cap: int = DEFAULT_CAP,
                  algebra: KunnethAlgebra | None = None,
                  moduli: Sequence[int | None] | None = None) -> ActionGroup:
    """All products of the generators; raises GroupOverflowError beyond ``cap`` elements."""
    if cap <= 0:
        raise ValueError("cap must be positive")
    gens = list(gens)
    if algebra is None:
        if not gens:
            raise ValueError("algebra required for an empty generator list")
        algebra = gens[0].algebra
    if moduli is None:
        moduli = gens[0].moduli if gens else None
    for g in gens:
        if g.algebra != algebra:
            raise InvalidAutomorphismError("generators act on different algebras")
    unknown = [any(g.powers[i] is None for g in gens) for i in range(len(algebra.blocks))]
    ident = ProductAutomorphism.identity(algebra, moduli, unknown)
    elements = [ident]
    seen = {ident.key()}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = compose(g, x)
            k = y.key()
            if k not in seen:
                seen.add(k)
                elements.append(y)
                if len(elements) > cap:
                    raise GroupOverflowError(f"group closure exceeded cap of {cap} elements")
                queue.append(y)
    return ActionGroup(algebra, elements, gens)


def propagate_freeness(auto: ProductAutomorphism,
                       base_facts: Mapping[str, BaseAutomorphism]) -> bool | None:
    """Fixed-point-freeness of ``auto`` from declared facts, or None if undecided.

    A product is free iff some cycle component is free, and a cyclic block
    permutation component is free iff its round-trip composite is free.
    ``base_facts`` maps block types (factor labels) to declared base
    automorphisms; a cycle listed in ``auto.meta.free_compositions`` counts as
    free.
    """
    alg = auto.algebra
    declared = set()
    if auto.meta is not None:
        declared = {frozenset(c) for c in auto.meta.free_compositions}
    bidx = {b: i for i, b in enumerate(alg.blocks)}
    verdicts = []
    for cyc in auto.cycles():
        if frozenset(cyc) in declared:
            verdicts.append(True)
            continue
        ps = [auto.powers[bidx[b]] for b in cyc]
        if any(p is None for p in ps):
            verdicts.append(None)
            continue
        total = sum(ps)
        fact = base_facts.get(alg.block_type(cyc[0]))
        if fact is not None:
            verdicts.append(fact.freeness(total))
        else:
            mod = auto.moduli[bidx[cyc[0]]]
            # a trivial round trip is the identity, which has fixed points
            verdicts.append(False if (total % mod if mod else total) == 0 else None)
    if any(v is True for v in verdicts):
        return True
    if all(v is False for v in verdicts):
        return False
    return None
