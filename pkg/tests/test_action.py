from __future__ import annotations

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import brute_group_size

from pnkunits.action import (
    BaseAutomorphism,
    GroupOverflowError,
    InvalidAutomorphismError,
    ProductAutomorphism,
    apply,
    compose,
    group_closure,
    inverse,
    propagate_freeness,
)
from pnkunits.algebra import AlgebraElement, GeneratorSpec, KunnethAlgebra, multiply
from pnkunits.constructions import make_mixed_n2
from pnkunits.cyclotomic import zeta

I = zeta(4)

# y on HK(2), z1 and z2 on two K3 blocks of the same type
YZZ = KunnethAlgebra(
    (GeneratorSpec("y", 2, 3, "Y"), GeneratorSpec("z1", 2, 2, "Z1"), GeneratorSpec("z2", 2, 2, "Z2")),
    {"Y": "Y", "Z1": "Z", "Z2": "Z"},
)


def twisted_swap(alg=YZZ):
    # z1 -> z2, z2 -> -z1 (iota x id composed with the swap), y -> i y
    return ProductAutomorphism.from_map(alg, {"y": ("y", Fraction(1, 4)), "z1": ("z2", 0),
                                              "z2": ("z1", Fraction(1, 2))})


def substitute(images: dict, element: AlgebraElement) -> AlgebraElement:
    """Direct substitution: replace each generator by its image and multiply out."""
    alg = element.algebra
    out = alg.zero()
    for m, c in element.items():
        term = alg.one() * c
        for name, e in zip(alg.names, m):
            for _ in range(e):
                term = multiply(term, images[name])
        out = out + term
    return out


def images_of(auto: ProductAutomorphism) -> dict:
    alg = auto.algebra
    return {n: apply(auto, alg.gen(n)) for n in alg.names}


def test_apply_scalar_example():
    alg = KunnethAlgebra.truncated([("y", 2, 3)])
    f = ProductAutomorphism.from_map(alg, {"y": ("y", Fraction(1, 3))})
    y = alg.gen("y")
    assert apply(f, multiply(y, y)) == multiply(y, y) * zeta(3) ** 2


def test_swap_fixes_product():
    alg = KunnethAlgebra((GeneratorSpec("y1", 2, 2, "A"), GeneratorSpec("y2", 2, 2, "B")),
                         {"A": "K", "B": "K"})
    s = ProductAutomorphism.from_blocks(alg, {"A": "B", "B": "A"}, {})
    p = multiply(alg.gen("y1"), alg.gen("y2"))
    assert apply(s, p) == p


def test_module_convention_makes_yz1_plus_i_yz2_invariant():
    """The chosen pullback convention: y -> i y, z1 -> z2, z2 -> -z1."""
    y, z1, z2 = YZZ.gens()
    x = multiply(y, z1) + I * multiply(y, z2)
    g = twisted_swap()
    assert apply(g, x) == x
    # the substitution oracle agrees with apply
    assert substitute(images_of(g), x) == x
    # under the reversed reading (z1 -> -z2, z2 -> z1) the same x is anti-invariant
    h = ProductAutomorphism.from_map(YZZ, {"y": ("y", Fraction(1, 4)), "z1": ("z2", Fraction(1, 2)),
                                           "z2": ("z1", 0)})
    assert apply(h, x) == -x
    alt = multiply(y, z1) - I * multiply(y, z2)
    assert apply(h, alt) == alt


def test_mixed_recipe_uses_the_convention():
    s = make_mixed_n2(2)
    (g,) = s.automorphisms()
    alg = s.algebra
    img = images_of(g)
    assert img["y"] == I * alg.gen("y")
    assert img["z1"] == alg.gen("z2")
    assert img["z2"] == -alg.gen("z1")


def test_twisted_swap_squared_negates_z():
    g = twisted_swap()
    g2 = compose(g, g)
    img = images_of(g2)
    assert img["z1"] == -YZZ.gen("z1")
    assert img["z2"] == -YZZ.gen("z2")
    # two-step substitution oracle
    once = images_of(g)
    for n in YZZ.names:
        assert substitute(once, once[n]) == img[n]


def test_compose_inverse_and_cube():
    alg = KunnethAlgebra.truncated([("y", 2, 3)])
    f = ProductAutomorphism.from_map(alg, {"y": ("y", Fraction(1, 3))})
    assert compose(f, inverse(f)).is_identity()
    assert compose(f, compose(f, f)).is_identity()
    assert f.order() == 3


def test_closure_matches_residue_enumeration():
    alg = KunnethAlgebra((GeneratorSpec("y1", 2, 2, "Y1"), GeneratorSpec("y2", 2, 2, "Y2")),
                         {"Y1": "Y", "Y2": "Y"})
    g = ProductAutomorphism.from_map(alg, {"y1": ("y1", Fraction(1, 3)), "y2": ("y2", Fraction(2, 3))})
    G = group_closure([g])
    assert G.order == 3
    got = {(int(e.exponents[0] * 3), int(e.exponents[1] * 3)) for e in G}
    expected = {(a, b) for a, b in product(range(3), repeat=2) if (a + b) % 3 == 0}
    assert got == expected


def test_trivial_group_and_overflow():
    alg = KunnethAlgebra.truncated([("y", 2, 3)])
    assert group_closure([], algebra=alg).order == 1
    f = ProductAutomorphism.from_map(alg, {"y": ("y", Fraction(1, 7))})
    with pytest.raises(GroupOverflowError):
        group_closure([f], cap=5)
    with pytest.raises(ValueError):
        group_closure([f], cap=0)


def test_wreath_group_order():
    from pnkunits.constructions import make_wreath

    s = make_wreath(2, 1)
    G = s.group()
    assert G.order == 27
    assert brute_group_size(s.automorphisms(), s.algebra) == 27


def test_invalid_permutations_rejected():
    alg = KunnethAlgebra((GeneratorSpec("y", 2, 3, "Y"), GeneratorSpec("z", 2, 2, "Z")),
                         {"Y": "Y", "Z": "Z"})
    with pytest.raises(InvalidAutomorphismError):
        ProductAutomorphism.from_map(alg, {"y": ("z", 0), "z": ("y", 0)})
    with pytest.raises(InvalidAutomorphismError):
        ProductAutomorphism.from_blocks(alg, {"Y": "Z", "Z": "Y"}, {})


def test_propagate_freeness_examples():
    alg = YZZ
    f = BaseAutomorphism.with_fixed_points("f", 4, [Fraction(1, 4)])
    iota = BaseAutomorphism.acting_freely("iota", 2, [Fraction(1, 2)])
    facts = {"Y": f, "Z": iota}
    moduli = {"Y": 4, "Z1": 2, "Z2": 2}
    g = ProductAutomorphism.from_blocks(alg, {"Z1": "Z2", "Z2": "Z1"},
                                        {"y": Fraction(1, 4), "z2": Fraction(1, 2)},
                                        powers={"Y": 1, "Z2": 1}, moduli=moduli)
    # the swap cycle composes to iota, which is free
    assert propagate_freeness(g, facts) is True
    ident = ProductAutomorphism.identity(alg, [4, 2, 2])
    assert propagate_freeness(ident, facts) is False
    # diagonal product: free iff some component is free
    h = ProductAutomorphism.from_blocks(alg, {}, {"y": Fraction(1, 4), "z1": Fraction(1, 2)},
                                        powers={"Y": 1, "Z1": 1}, moduli=moduli)
    assert propagate_freeness(h, facts) is True
    k = ProductAutomorphism.from_blocks(alg, {}, {"y": Fraction(1, 4)}, powers={"Y": 1}, moduli=moduli)
    assert propagate_freeness(k, facts) is False
    unknown = {"Y": BaseAutomorphism("f", 4, (Fraction(1, 4),), None), "Z": iota}
    assert propagate_freeness(k, unknown) is None


# properties

@st.composite
def automorphism_and_elements(draw):
    """Random block-preserving automorphism of K3^m x HK(2) with odd torus generators."""
    m = draw(st.integers(1, 3))
    gens = [GeneratorSpec(f"z{i + 1}", 2, 2, f"Z{i + 1}") for i in range(m)]
    gens.append(GeneratorSpec("y", 2, 3, "Y"))
    gens += [GeneratorSpec("t1", 1, 2, "T1"), GeneratorSpec("t2", 1, 2, "T2")]
    types = {f"Z{i + 1}": "Z" for i in range(m)} | {"Y": "Y", "T1": "T", "T2": "T"}
    alg = KunnethAlgebra(tuple(gens), types)

    def rand_auto():
        zperm = draw(st.permutations(range(m)))
        tperm = draw(st.permutations([0, 1]))
        bmap = {f"Z{i + 1}": f"Z{zperm[i] + 1}" for i in range(m)}
        bmap |= {f"T{i + 1}": f"T{tperm[i] + 1}" for i in range(2)}
        exps = {n: Fraction(draw(st.integers(0, 5)), 6) for n in alg.names}
        return ProductAutomorphism.from_blocks(alg, bmap, exps)

    def rand_elem():
        monos = list(alg.basis())
        chosen = draw(st.lists(st.sampled_from(monos), min_size=1, max_size=4, unique=True))
        return AlgebraElement(alg, {mm: draw(st.integers(-3, 3)) for mm in chosen})

    return alg, rand_auto(), rand_auto(), rand_elem(), rand_elem()


@settings(max_examples=60, deadline=None)
@given(automorphism_and_elements())
def test_apply_is_multiplicative(data):
    alg, s, t, a, b = data
    assert apply(s, multiply(a, b)) == multiply(apply(s, a), apply(s, b))


@settings(max_examples=60, deadline=None)
@given(automorphism_and_elements())
def test_apply_of_composite_applies_second_argument_first(data):
    alg, s, t, a, b = data
    assert apply(compose(s, t), a) == apply(s, apply(t, a))
    assert apply(inverse(s), apply(s, a)) == a


@settings(max_examples=60, deadline=None)
@given(automorphism_and_elements())
def test_apply_matches_substitution(data):
    alg, s, t, a, b = data
    assert apply(s, a) == substitute(images_of(s), a)


@settings(max_examples=30, deadline=None)
@given(automorphism_and_elements())
def test_cyclic_group_preserves_degree_and_divides_exponent(data):
    alg, s, t, a, b = data
    G = group_closure([s])
    assert G.order == s.order()
    exponent = G.exponent
    monos = list(alg.basis())
    for g in G:
        for q in g.exponents:
            assert exponent % q.denominator == 0
        for mono in monos:
            _, img = g.image_of_monomial(mono)
            assert alg.monomial_degree(img) == alg.monomial_degree(mono)
        assert compose(g, inverse(g)).is_identity()
