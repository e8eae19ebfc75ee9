"""Construction recipes, each returning a :class:`~pnkunits.geometry.Scenario`.

Every recipe records the unit type it is expected to produce in
``scenario.expected`` so that ``validate`` runs double as assertions.  All
scalars are chosen as the same primitive root for matching factors.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from .action import BaseAutomorphism
from .geometry import Factor, FactorType, GeneratorDecl, Scenario, ScenarioError

__all__ = [
    "RecipeError",
    "KNOWN_ENRIQUES_INDICES",
    "make_enriques",
    "make_product_cover",
    "make_wreath",
    "make_mixed_n2",
    "make_k6",
    "make_symmetric_stack",
    "make_nonexample_product",
    "RECIPES",
    "build_recipe",
]

# indices m for which free purely non-symplectic order-m automorphisms are known to exist
KNOWN_ENRIQUES_INDICES = frozenset({2, 3, 4})


class RecipeError(ScenarioError):
    pass


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise RecipeError(msg)


def _label(n: int, k: int) -> str:
    return f"P^{n}[{k}]-unit"


def _enriques_factor(label: str, n: int, multiplicity: int = 1, name: str = "f") -> Factor:
    f = BaseAutomorphism.acting_freely(name, n + 1, [Fraction(1, n + 1)])
    return Factor(label, FactorType.hk(n), multiplicity, f)


def make_enriques(n: int) -> Scenario:
    """``Y/<f>`` with ``Y`` of type HK(n) and ``f`` free, purely non-symplectic of order n+1."""
    _need(isinstance(n, int) and n >= 1, "enriques needs n >= 1")
    gen = GeneratorDecl(powers={"Y": 1}, name="f", order=n + 1, symplectic_order=n + 1,
                        fixed_point_free=True)
    return Scenario(f"enriques-n{n}", (_enriques_factor("Y", n),), (gen,),
                    hypothetical=n + 1 not in KNOWN_ENRIQUES_INDICES,
                    expected={"classification": "exceptional", "omega_order": n + 1},
                    description=f"strict Enriques variety of index {n + 1}")


def _diagonals(blocks: list[str], n: int, prefix: str) -> list[GeneratorDecl]:
    # f on one block, f^-1 on the next: generates all tuples with exponent sum 0
    return [GeneratorDecl(powers={a: 1, b: -1}, name=f"{prefix}{i + 1}", order=n + 1,
                          fixed_point_free=True)
            for i, (a, b) in enumerate(zip(blocks, blocks[1:]))]


def make_product_cover(n: int, k: int) -> Scenario:
    """``Y^k / {f^a1 x ... x f^ak : sum a_i = 0 mod n+1}``, a P^n[2k]-unit."""
    _need(isinstance(n, int) and n >= 1, "product-cover needs n >= 1")
    _need(isinstance(k, int) and k >= 1, "product-cover needs k >= 1")
    fac = _enriques_factor("Y", n, k)
    return Scenario(f"product-cover-n{n}-k{k}", (fac,), tuple(_diagonals(fac.blocks, n, "d")),
                    hypothetical=n + 1 not in KNOWN_ENRIQUES_INDICES,
                    expected={"classification": _label(n, 2 * k), "omega_order": 1},
                    description=f"product of {k} copies of an index-{n + 1} Enriques cover")


def make_wreath(n: int, k: int) -> Scenario:
    """``(Y^(n+1) x Z_1 x ... x Z_k) / G(Y; Z_1..Z_k)``.

    For ``k >= 1`` the group contains the cyclic shift of the ``Y`` blocks
    twisted by ``f`` on one block and ``g^-1`` on ``Z_1``; for ``k = 0`` only
    shift-free elements satisfy the defining congruence and the group is
    diagonal.
    """
    _need(isinstance(n, int) and n >= 1, "wreath needs n >= 1")
    _need(isinstance(k, int) and k >= 0, "wreath needs k >= 0")
    y = _enriques_factor("Y", n, n + 1)
    factors = [y]
    z_blocks = []
    for j in range(1, k + 1):
        z = _enriques_factor(f"Z{j}", n, 1, name=f"g{j}")
        factors.append(z)
        z_blocks.append(z.label)
    gens = _diagonals(y.blocks, n, "d")
    if k >= 1:
        yb = y.blocks
        shift = {yb[i]: yb[(i + 1) % len(yb)] for i in range(len(yb))}
        gens.append(GeneratorDecl(perm=shift, powers={yb[0]: 1, z_blocks[0]: -1}, name="tau",
                                  order=(n + 1) ** 2, fixed_point_free=True))
        gens += _diagonals(z_blocks, n, "e")
    deg = 2 * (n + 1 + k)
    return Scenario(f"wreath-n{n}-k{k}", tuple(factors), tuple(gens),
                    hypothetical=n + 1 not in KNOWN_ENRIQUES_INDICES,
                    expected={"classification": _label(n, deg), "omega_order": 1},
                    description=f"wreath construction with {k} extra factor(s)")


def _cy_or_k3(e: int) -> FactorType:
    return FactorType.k3() if e == 2 else FactorType.cy(e)


def make_mixed_n2(e: int) -> Scenario:
    """``(Y x Z^2) / <f x g>`` with ``g = (iota x id) o (1 2)``; a P^2[2+e]-unit.

    ``f`` on HK(2) has order 4 and scalar i (and fixed points); ``iota`` is a
    free involution of ``Z`` (K3 when e = 2).  On cohomology the generator
    acts by ``y -> i y``, ``z1 -> z2``, ``z2 -> -z1``.
    """
    _need(isinstance(e, int) and e >= 2, "mixed-n2 needs e >= 2")
    _need(e % 2 == 0, "mixed-n2 needs even e (odd-degree generators anticommute)")
    f = BaseAutomorphism.with_fixed_points("f", 4, [Fraction(1, 4)])
    iota = BaseAutomorphism.acting_freely("iota", 2, [Fraction(1, 2)])
    factors = (Factor("Y", FactorType.hk(2), 1, f), Factor("Z", _cy_or_k3(e), 2, iota))
    gen = GeneratorDecl(perm={"Z1": "Z2", "Z2": "Z1"}, powers={"Y": 1, "Z2": 1}, name="fg",
                        order=4, fixed_point_free=True)
    return Scenario(f"mixed-n2-e{e}", factors, (gen,),
                    expected={"classification": _label(2, 2 + e), "omega_order": 1},
                    description="cover not a product of two hyperkähler fourfolds")


def make_k6(n: int) -> Scenario:
    """``(Y x Y') / <f x f'^2>`` with ``Y`` of type HK(2n) and ``Y'`` of type HK(n).

    ``f`` is free of order 2n+1; ``f'`` carries the inverse scalar, so it has
    the same order, and has fixed points.  Existence is unknown.
    """
    _need(isinstance(n, int) and n >= 1, "k6 needs n >= 1")
    m = 2 * n + 1
    f = BaseAutomorphism.acting_freely("f", m, [Fraction(1, m)])
    fp = BaseAutomorphism.with_fixed_points("fp", m, [Fraction(-1, m)])
    factors = (Factor("Y", FactorType.hk(2 * n), 1, f), Factor("Yp", FactorType.hk(n), 1, fp))
    gen = GeneratorDecl(powers={"Y": 1, "Yp": 2}, name="ffp2", order=m, fixed_point_free=True)
    return Scenario(f"k6-n{n}", factors, (gen,), hypothetical=True,
                    expected={"classification": _label(n, 6), "omega_order": 1},
                    description="hypothetical construction from an index-(2n+1) Enriques variety")


def make_symmetric_stack(n: int, e: int) -> Scenario:
    """``[Z^n / S_n]`` for ``Z`` Calabi-Yau of even dimension e (K3 when e = 2)."""
    _need(isinstance(n, int) and n >= 1, "symmetric-stack needs n >= 1")
    _need(isinstance(e, int) and e >= 2, "symmetric-stack needs e >= 2")
    _need(e % 2 == 0, "symmetric-stack needs even e: for odd e the canonical bundle of the "
                      "stack is not trivial")
    z = Factor("Z", _cy_or_k3(e), n)
    b = z.blocks
    gens = []
    if n >= 2:
        gens.append(GeneratorDecl(perm={b[0]: b[1], b[1]: b[0]}, powers={}, name="s", order=2))
    if n >= 3:
        gens.append(GeneratorDecl(perm={b[i]: b[(i + 1) % n] for i in range(n)}, powers={},
                                  name="c", order=n))
    return Scenario(f"symmetric-stack-n{n}-e{e}", (z,), tuple(gens), stack_mode=True,
                    expected={"classification": _label(n, e), "omega_order": 1},
                    description="symmetric quotient stack")


def make_nonexample_product() -> Scenario:
    """CY(8) x CY(4): Hilbert series of a P^3[4]-unit but not generated in degree 4."""
    factors = (Factor("Z", FactorType.cy(8)), Factor("Zp", FactorType.cy(4)))
    return Scenario("nonexample-cy8-cy4", factors, (),
                    expected={"classification": "none", "omega_order": 1},
                    description="product of strict Calabi-Yau varieties")


RECIPES: dict[str, tuple[Callable[..., Scenario], tuple[str, ...]]] = {
    "enriques": (make_enriques, ("n",)),
    "product-cover": (make_product_cover, ("n", "k")),
    "wreath": (make_wreath, ("n", "k")),
    "mixed-n2": (make_mixed_n2, ("e",)),
    "k6": (make_k6, ("n",)),
    "symmetric-stack": (make_symmetric_stack, ("n", "e")),
    "nonexample": (make_nonexample_product, ()),
}


def build_recipe(name: str, **params: int) -> Scenario:
    if name not in RECIPES:
        raise RecipeError(f"unknown recipe {name!r}; choose from {', '.join(RECIPES)}")
    fn, names = RECIPES[name]
    missing = [p for p in names if params.get(p) is None]
    if missing:
        raise RecipeError(f"recipe {name} needs --{' --'.join(missing)}")
    return fn(*(params[p] for p in names))
