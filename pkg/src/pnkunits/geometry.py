"""Scenarios: a product of factors, an acting group and declared geometric facts.

A scenario lists factors (hyperkähler, Calabi-Yau, torus), each optionally
carrying a declared base automorphism, and group generators given as a block
permutation plus either per-block powers of the base automorphisms or
explicit generator scalars.  :func:`validate` closes the group, classifies
the invariants and checks the declaration against necessary conditions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Mapping, Sequence

from .action import (
    DEFAULT_CAP,
    ActionGroup,
    AutomorphismMeta,
    BaseAutomorphism,
    InvalidAutomorphismError,
    ProductAutomorphism,
    compose,
    group_closure,
    propagate_freeness,
)
from .algebra import GeneratorSpec, KunnethAlgebra, euler_characteristic
from .cyclotomic import CyclotomicScalar
from .invariants import NONE, PNK, InvariantReport, canonical_character_exponents, classify_unit

__all__ = [
    "ScenarioError",
    "FactorType",
    "Factor",
    "GeneratorDecl",
    "Scenario",
    "Violation",
    "ClassificationReport",
    "cover_algebra",
    "canonical_character",
    "omega_order",
    "canonical_cover",
    "freeness_verdict",
    "validate",
]


class ScenarioError(ValueError):
    """Inconsistent or malformed scenario data."""


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


@dataclass(frozen=True, order=True)
class FactorType:
    """``HK(d)``, ``CY(e)`` or ``Torus(g)``; ``K3`` is ``HK(1)``."""

    kind: str
    param: int

    def __post_init__(self):
        kind = self.kind.upper() if self.kind.lower() != "torus" else "Torus"
        if kind == "K3":
            kind, param = "HK", 1
        else:
            param = self.param
        if kind not in ("HK", "CY", "Torus"):
            raise ScenarioError(f"unknown factor kind {self.kind!r}")
        if not isinstance(param, int) or param < 1:
            raise ScenarioError(f"factor parameter must be a positive integer, got {param!r}")
        if kind == "CY" and param < 3:
            raise ScenarioError("strict Calabi-Yau factors need dimension at least 3")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "param", param)

    @classmethod
    def hk(cls, d: int) -> FactorType:
        return cls("HK", d)

    @classmethod
    def k3(cls) -> FactorType:
        return cls("HK", 1)

    @classmethod
    def cy(cls, e: int) -> FactorType:
        return cls("CY", e)

    @classmethod
    def torus(cls, g: int) -> FactorType:
        return cls("Torus", g)

    @property
    def dimension(self) -> int:
        return 2 * self.param if self.kind == "HK" else self.param

    @property
    def euler(self) -> int:
        if self.kind == "HK":
            return self.param + 1
        if self.kind == "CY":
            return 1 + (-1) ** self.param
        return 0

    @property
    def ngens(self) -> int:
        return self.param if self.kind == "Torus" else 1

    def generator_shapes(self) -> list[tuple[int, int]]:
        """``(degree, nilorder)`` of each generator of the factor."""
        if self.kind == "HK":
            return [(2, self.param + 1)]
        if self.kind == "CY":
            return [(self.param, 2)]
        return [(1, 2)] * self.param

    def __str__(self) -> str:
        if self.kind == "HK" and self.param == 1:
            return "K3"
        return f"{self.kind}({self.param})"

    @classmethod
    def parse(cls, text: str) -> FactorType:
        text = text.strip()
        if text.upper() == "K3":
            return cls.k3()
        if "(" in text and text.endswith(")"):
            kind, _, rest = text[:-1].partition("(")
            return cls(kind, int(rest))
        raise ScenarioError(f"cannot parse factor type {text!r}")


@dataclass(frozen=True)
class Factor:
    label: str
    type: FactorType
    multiplicity: int = 1
    automorphism: BaseAutomorphism | None = None

    def __post_init__(self):
        if not self.label or not self.label[0].isalpha():
            raise ScenarioError(f"factor label {self.label!r} must start with a letter")
        if self.multiplicity < 1:
            raise ScenarioError(f"factor {self.label}: multiplicity must be positive")
        a = self.automorphism
        if a is not None and len(a.rho) != self.type.ngens:
            raise ScenarioError(f"factor {self.label}: automorphism needs {self.type.ngens} scalar(s)")

    @property
    def blocks(self) -> list[str]:
        if self.multiplicity == 1:
            return [self.label]
        return [f"{self.label}{i}" for i in range(1, self.multiplicity + 1)]

    def generator_names(self, block: str) -> list[str]:
        base = block.lower()
        if self.type.ngens == 1:
            return [base]
        sep = "_" if base[-1].isdigit() else ""
        return [f"{base}{sep}{j}" for j in range(1, self.type.ngens + 1)]


@dataclass(frozen=True)
class GeneratorDecl:
    """One group generator.

    ``perm`` maps blocks to blocks (unlisted blocks are fixed).  ``powers``
    gives per-block exponents of the factor's base automorphism; ``scalars``
    gives explicit exponents ``q`` (scalar ``exp(2 pi i q)``) per generator
    name.  At least one of the two must be present.
    """

    perm: Mapping[str, str] = field(default_factory=dict)
    powers: Mapping[str, int] | None = None
    scalars: Mapping[str, Fraction] | None = None
    name: str = ""
    order: int | None = None
    symplectic_order: int | None = None
    fixed_point_free: bool | None = None
    free_compositions: tuple[tuple[str, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "perm", dict(self.perm))
        if self.powers is not None:
            object.__setattr__(self, "powers", dict(self.powers))
        if self.scalars is not None:
            object.__setattr__(self, "scalars", {k: Fraction(v) % 1 for k, v in self.scalars.items()})
        object.__setattr__(self, "free_compositions", tuple(tuple(c) for c in self.free_compositions))

    @property
    def meta(self) -> AutomorphismMeta:
        return AutomorphismMeta(self.order, self.symplectic_order, self.fixed_point_free,
                                self.free_compositions)


@dataclass
class Scenario:
    name: str
    factors: tuple[Factor, ...]
    generators: tuple[GeneratorDecl, ...] = ()
    stack_mode: bool = False
    hypothetical: bool = False
    expected: dict | None = None
    description: str = ""

    def __post_init__(self):
        self.factors = tuple(self.factors)
        self.generators = tuple(self.generators)
        labels = [f.label for f in self.factors]
        if len(set(labels)) != len(labels):
            raise ScenarioError("factor labels must be distinct")
        blocks = [b for f in self.factors for b in f.blocks]
        if len(set(blocks)) != len(blocks):
            raise ScenarioError("block names collide; choose distinct factor labels")
        self._groups: dict[int, ActionGroup] = {}
        self._autos: list[ProductAutomorphism] | None = None

    def __eq__(self, other) -> bool:
        if not isinstance(other, Scenario):
            return NotImplemented
        return (self.name, self.factors, self.generators, self.stack_mode, self.hypothetical,
                self.expected, self.description) == (other.name, other.factors, other.generators,
                                                     other.stack_mode, other.hypothetical,
                                                     other.expected, other.description)

    # structure
    @property
    def dimension(self) -> int:
        return sum(f.type.dimension * f.multiplicity for f in self.factors)

    @property
    def cover_euler(self) -> int:
        out = 1
        for f in self.factors:
            out *= f.type.euler ** f.multiplicity
        return out

    def factor_of_block(self, block: str) -> Factor:
        for f in self.factors:
            if block in f.blocks:
                return f
        raise ScenarioError(f"unknown block {block!r}")

    @property
    def base_facts(self) -> dict[str, BaseAutomorphism]:
        return {f.label: f.automorphism for f in self.factors if f.automorphism is not None}

    @property
    def algebra(self) -> KunnethAlgebra:
        return cover_algebra(self)

    def automorphisms(self) -> list[ProductAutomorphism]:
        if self._autos is None:
            self._autos = [self._build(d) for d in self.generators]
        return self._autos

    def _build(self, decl: GeneratorDecl) -> ProductAutomorphism:
        alg = self.algebra
        blocks = alg.blocks
        for b, t in decl.perm.items():
            if b not in blocks or t not in blocks:
                raise ScenarioError(f"generator {decl.name or '?'}: unknown block in {b!r} -> {t!r}")
        block_map = {b: decl.perm.get(b, b) for b in blocks}
        if sorted(block_map.values()) != sorted(blocks):
            raise ScenarioError(f"generator {decl.name or '?'}: block map is not a bijection")
        if decl.powers is None and decl.scalars is None:
            raise ScenarioError(f"generator {decl.name or '?'}: needs powers or scalars")
        moduli = {}
        for f in self.factors:
            for b in f.blocks:
                moduli[b] = f.automorphism.order if f.automorphism is not None else None
        exps: dict[str, Fraction] = {}
        if decl.powers is not None:
            for b in decl.powers:
                if b not in blocks:
                    raise ScenarioError(f"generator {decl.name or '?'}: unknown block {b!r} in powers")
            for f in self.factors:
                for b in f.blocks:
                    p = decl.powers.get(b, 0)
                    if p and f.automorphism is None:
                        raise ScenarioError(f"block {b}: power given but factor {f.label} has no automorphism")
                    if f.automorphism is not None:
                        for g, r in zip(f.generator_names(b), f.automorphism.rho):
                            exps[g] = (p * r) % 1
        if decl.scalars is not None:
            for g, q in decl.scalars.items():
                if g not in alg.index:
                    raise ScenarioError(f"generator {decl.name or '?'}: unknown generator {g!r}")
                if decl.powers is not None and exps.get(g, Fraction(0)) != q:
                    raise ScenarioError(f"generator {decl.name or '?'}: scalar of {g} disagrees with powers")
                exps[g] = q
        try:
            return ProductAutomorphism.from_blocks(
                alg, block_map, exps,
                powers=None if decl.powers is None else dict(decl.powers),
                moduli=moduli, name=decl.name, meta=decl.meta)
        except InvalidAutomorphismError as e:
            raise ScenarioError(f"generator {decl.name or '?'}: {e}") from e

    def group(self, cap: int = DEFAULT_CAP) -> ActionGroup:
        if cap not in self._groups:
            alg = self.algebra
            moduli = [self.factor_of_block(b).automorphism.order
                      if self.factor_of_block(b).automorphism is not None else None
                      for b in alg.blocks]
            self._groups[cap] = group_closure(self.automorphisms(), cap, algebra=alg, moduli=moduli)
        return self._groups[cap]


def cover_algebra(s: Scenario) -> KunnethAlgebra:
    gens = []
    types = {}
    for f in s.factors:
        for b in f.blocks:
            types[b] = f.label
            for name, (deg, nil) in zip(f.generator_names(b), f.type.generator_shapes()):
                gens.append(GeneratorSpec(name, deg, nil, b))
    return KunnethAlgebra(tuple(gens), types)


def canonical_character(s: Scenario, cap: int = DEFAULT_CAP) -> dict[ProductAutomorphism, CyclotomicScalar]:
    """Scalar by which each group element acts on the top class."""
    G = s.group(cap)
    return {g: CyclotomicScalar.from_exponent(q) for g, q in zip(G, canonical_character_exponents(G))}


def _omega(G: ActionGroup) -> int:
    m = 1
    for q in canonical_character_exponents(G):
        m = _lcm(m, q.denominator)
    return m


def omega_order(s: Scenario, cap: int = DEFAULT_CAP) -> int:
    """Order of the canonical character, i.e. of the canonical bundle of the quotient."""
    return _omega(s.group(cap))


def _decl_from(g: ProductAutomorphism, name: str) -> GeneratorDecl:
    alg = g.algebra
    perm = {b: t for b, t in g.block_perm.items() if b != t}
    powers = None
    if all(p is not None for p in g.powers):
        powers = {b: p for b, p in zip(alg.blocks, g.powers) if p}
    scalars = {n: q for n, q in zip(alg.names, g.exponents) if q}
    return GeneratorDecl(perm=perm, powers=powers, scalars=scalars if powers is None else None,
                         name=name, order=g.order())


def canonical_cover(s: Scenario, cap: int = DEFAULT_CAP) -> Scenario:
    """Scenario whose group is the kernel of the canonical character.

    The cover map to the original quotient has degree ``omega_order(s)``.
    """
    G = s.group(cap)
    chars = canonical_character_exponents(G)
    if all(q == 0 for q in chars):
        return s
    kernel = [g for g, q in zip(G, chars) if q == 0]
    gens: list[ProductAutomorphism] = []
    span = {G.identity.key()}
    for g in kernel:
        if g.key() in span:
            continue
        gens.append(g)
        span = {x.key() for x in group_closure(gens, cap, algebra=G.algebra, moduli=G.identity.moduli)}
    decls = tuple(_decl_from(g, f"k{i + 1}") for i, g in enumerate(gens))
    return Scenario(f"{s.name}-canonical-cover", s.factors, decls, stack_mode=s.stack_mode,
                    hypothetical=s.hypothetical,
                    description=f"canonical cover of {s.name}")


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str

    def to_json(self) -> dict:
        return {"rule": self.rule, "message": self.message}


@dataclass
class ClassificationReport:
    scenario: str
    cover_dim: int
    cover_euler: int
    group_order: int
    invariants: InvariantReport
    omega_order: int
    canonical_cover_order: int
    freeness: bool | None
    stack_mode: bool = False
    hypothetical: bool = False
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def classification(self) -> str:
        return self.invariants.label

    @property
    def invariant_euler(self) -> int:
        return sum(h if d % 2 == 0 else -h for d, h in enumerate(self.invariants.hilbert))

    def summary(self) -> str:
        inv = self.invariants
        if inv.classification == NONE and inv.reason.startswith("generation fails"):
            head = f"classification: none ({inv.reason})"
        else:
            head = inv.label
        return f"{head}; ω order {self.omega_order}"

    def to_json(self) -> dict:
        return {
            "scenario": self.scenario,
            "cover_dim": self.cover_dim,
            "cover_euler": self.cover_euler,
            "group_order": self.group_order,
            "invariants": self.invariants.to_json(),
            "invariant_euler": self.invariant_euler,
            "omega_order": self.omega_order,
            "canonical_cover_order": self.canonical_cover_order,
            "freeness": self.freeness,
            "stack_mode": self.stack_mode,
            "hypothetical": self.hypothetical,
            "violations": [v.to_json() for v in self.violations],
        }


def _powers_of(g: ProductAutomorphism, cap: int) -> list[ProductAutomorphism]:
    out, p = [], g
    for _ in range(g.order(cap) - 1):
        out.append(p)
        p = compose(p, g)
    return out


def freeness_verdict(s: Scenario, cap: int = DEFAULT_CAP) -> bool | None:
    """Does the whole group act freely?  True, False or None (unknown)."""
    G = s.group(cap)
    facts = s.base_facts
    declared_free = set()
    for decl, g in zip(s.generators, s.automorphisms()):
        if decl.fixed_point_free is True:
            declared_free.update(x.key() for x in _powers_of(g, cap))
    verdicts = []
    for g, decl_meta in _with_meta(s, G):
        if g.key() == G.identity.key():
            continue
        if g.key() in declared_free:
            verdicts.append(True)
            continue
        if decl_meta is not None and decl_meta.fixed_point_free is False:
            verdicts.append(False)
            continue
        h = g if decl_meta is None else ProductAutomorphism(
            g.algebra, g.perm, g.exponents, g.powers, g.moduli, meta=decl_meta, check=False)
        verdicts.append(propagate_freeness(h, facts))
    if any(v is False for v in verdicts):
        return False
    if all(v is True for v in verdicts):
        return True
    return None


def _with_meta(s: Scenario, G: ActionGroup):
    metas = {g.key(): d.meta for d, g in zip(s.generators, s.automorphisms())}
    for g in G:
        yield g, metas.get(g.key())


def _check_free_base(f: Factor, a: BaseAutomorphism, where: str) -> list[Violation]:
    out = []
    t = f.type
    if t.kind == "HK":
        if a.symplectic_order != a.order:
            out.append(Violation("HK-free-automorphism",
                                 f"{where}: free automorphism of {t} must be purely non-symplectic "
                                 f"(order {a.order}, symplectic order {a.symplectic_order})"))
        if (t.param + 1) % a.order:
            out.append(Violation("HK-free-automorphism",
                                 f"{where}: order {a.order} of a free automorphism of {t} "
                                 f"must divide {t.param + 1}"))
    elif t.kind == "CY":
        if a.order != 2 or a.rho[0] != Fraction(1, 2):
            out.append(Violation("CY-free-automorphism",
                                 f"{where}: free automorphism of {t} must be a non-symplectic involution"))
    return out


def _rule_a(s: Scenario) -> list[Violation]:
    out = []
    for f in s.factors:
        a = f.automorphism
        if a is not None and a.acts_freely:
            out.extend(_check_free_base(f, a, f"factor {f.label} automorphism {a.name or '?'}"))
    if len(s.factors) == 1 and s.factors[0].multiplicity == 1:
        f = s.factors[0]
        for decl, g in zip(s.generators, s.automorphisms()):
            if decl.fixed_point_free is not True:
                continue
            if f.automorphism is not None and f.automorphism.acts_freely and decl.powers is not None:
                continue  # covered by the factor automorphism check
            m = decl.order or g.order()
            synth = BaseAutomorphism.acting_freely(decl.name or "g", m, list(g.exponents))
            out.extend(_check_free_base(f, synth, f"generator {decl.name or '?'}"))
    return out


def _declared_orders(s: Scenario, cap: int) -> list[Violation]:
    out = []
    alg = s.algebra
    for decl, g in zip(s.generators, s.automorphisms()):
        label = decl.name or "?"
        if decl.order is not None:
            m = g.order(cap)
            if decl.order % m:
                out.append(Violation("declared-order",
                                     f"generator {label}: action of order {m} does not divide declared order {decl.order}"))
        if decl.symplectic_order is not None and alg.ngens and alg.generators[0].degree == 2:
            if g.block_perm.get(alg.blocks[0]) == alg.blocks[0]:
                so = g.exponents[0].denominator
                if so != decl.symplectic_order:
                    out.append(Violation("symplectic-order",
                                         f"generator {label}: scalar on {alg.names[0]} has order {so}, "
                                         f"declared symplectic order {decl.symplectic_order}"))
    return out


def validate(s: Scenario, cap: int = DEFAULT_CAP) -> ClassificationReport:
    G = s.group(cap)
    alg = s.algebra
    inv = classify_unit(G, alg)
    if inv.classification == PNK and any(f.type.kind == "Torus" for f in s.factors):
        inv.classification, inv.n, inv.k = NONE, None, None
        inv.reason = "torus factor has Euler characteristic 0"
    omega = _omega(G)
    violations = _declared_orders(s, cap)
    freeness = None if s.stack_mode else freeness_verdict(s, cap)
    if not s.stack_mode:
        violations += _rule_a(s)
        if freeness is False:
            violations.append(Violation("free-action",
                                        "declared facts give a non-identity element with fixed points"))
        if freeness is True:
            chi_inv = sum(h if d % 2 == 0 else -h for d, h in enumerate(inv.hilbert))
            chi = euler_characteristic(alg)
            if chi != G.order * chi_inv:
                violations.append(Violation("euler-multiplicativity",
                                            f"cover euler {chi} != |G| {G.order} x invariant euler {chi_inv}"))
    return ClassificationReport(
        scenario=s.name,
        cover_dim=s.dimension,
        cover_euler=euler_characteristic(alg),
        group_order=G.order,
        invariants=inv,
        omega_order=omega,
        canonical_cover_order=G.order // omega,
        freeness=freeness,
        stack_mode=s.stack_mode,
        hypothetical=s.hypothetical,
        violations=violations,
    )
