from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pnkunits.action import BaseAutomorphism, compose
from pnkunits.constructions import make_enriques, make_mixed_n2, make_product_cover, make_wreath
from pnkunits.geometry import (
    Factor,
    FactorType,
    GeneratorDecl,
    Scenario,
    ScenarioError,
    canonical_character,
    canonical_cover,
    cover_algebra,
    freeness_verdict,
    omega_order,
    validate,
)


def rules(report) -> set[str]:
    return {v.rule for v in report.violations}


class TestFactorType:
    def test_k3_is_hk1(self):
        assert FactorType("K3", 7) == FactorType.hk(1)
        assert str(FactorType.k3()) == "K3"
        assert FactorType.k3().euler == 2

    def test_invariants_of_types(self):
        assert FactorType.hk(3).dimension == 6 and FactorType.hk(3).euler == 4
        assert FactorType.cy(4).euler == 2 and FactorType.cy(3).euler == 0
        assert FactorType.torus(2).euler == 0 and FactorType.torus(2).ngens == 2
        assert FactorType.cy(5).generator_shapes() == [(5, 2)]

    def test_rejects_bad_types(self):
        with pytest.raises(ScenarioError):
            FactorType.cy(2)
        with pytest.raises(ScenarioError):
            FactorType("Foo", 1)
        with pytest.raises(ScenarioError):
            FactorType.hk(0)

    @given(st.sampled_from(["HK", "CY", "Torus"]), st.integers(3, 12))
    def test_parse_inverts_str(self, kind, p):
        t = FactorType(kind, p)
        assert FactorType.parse(str(t)) == t


def test_blocks_and_generator_names():
    f = Factor("Y", FactorType.hk(2), 3)
    assert f.blocks == ["Y1", "Y2", "Y3"]
    s = Scenario("s", (f, Factor("Zp", FactorType.cy(4))))
    assert s.algebra.names == ("y1", "y2", "y3", "zp")
    assert s.dimension == 16
    assert s.cover_euler == 3 ** 3 * 2
    assert cover_algebra(s).block_type("Y2") == "Y"


def test_duplicate_labels_rejected():
    with pytest.raises(ScenarioError):
        Scenario("s", (Factor("Y", FactorType.k3()), Factor("Y", FactorType.k3())))


def test_generator_powers_need_an_automorphism():
    s = Scenario("s", (Factor("Y", FactorType.k3()),), (GeneratorDecl(powers={"Y": 1}),))
    with pytest.raises(ScenarioError):
        s.automorphisms()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_canonical_character_is_a_homomorphism(n):
    for s in (make_enriques(n), make_product_cover(n, 2), make_mixed_n2(2)):
        chi = canonical_character(s)
        for g in chi:
            for h in chi:
                assert chi[compose(g, h)] == chi[g] * chi[h]


def test_enriques_omega_and_canonical_cover():
    s = make_enriques(2)
    assert omega_order(s) == 3
    c = canonical_cover(s)
    assert c.group().order == 1
    assert omega_order(c) == 1


def test_canonical_cover_is_idempotent():
    for s in (make_product_cover(2, 2), make_mixed_n2(2), make_wreath(1, 1)):
        assert canonical_cover(s) is s
    s = make_enriques(3)
    c = canonical_cover(s)
    assert canonical_cover(c) is c


@pytest.mark.parametrize("n,k", [(1, 2), (2, 2), (2, 3), (3, 2)])
def test_cover_of_full_product_group_is_the_product_cover(n, k):
    f = BaseAutomorphism.acting_freely("f", n + 1, [Fraction(1, n + 1)])
    y = Factor("Y", FactorType.hk(n), k, f)
    gens = tuple(GeneratorDecl(powers={b: 1}, name=f"f{i}", order=n + 1, fixed_point_free=True)
                 for i, b in enumerate(y.blocks))
    full = Scenario("full", (y,), gens)
    assert full.group().order == (n + 1) ** k
    assert omega_order(full) == n + 1
    cover = canonical_cover(full)
    assert cover.group().order == (n + 1) ** (k - 1)
    got = {g.exponents for g in cover.group()}
    want = {g.exponents for g in make_product_cover(n, k).group()}
    assert got == want


def test_freeness_from_declared_facts():
    assert freeness_verdict(make_enriques(2)) is True
    assert freeness_verdict(make_mixed_n2(2)) is True
    f = BaseAutomorphism("f", 3, (Fraction(1, 3),), None)
    s = Scenario("u", (Factor("Y", FactorType.hk(2), 1, f),), (GeneratorDecl(powers={"Y": 1}),))
    assert freeness_verdict(s) is None


def test_symplectic_free_action_on_hk_is_flagged():
    s = Scenario("bad", (Factor("Y", FactorType.hk(2)),),
                 (GeneratorDecl(scalars={"y": 0}, name="f", order=3, symplectic_order=1,
                                fixed_point_free=True),))
    r = validate(s)
    assert "HK-free-automorphism" in rules(r)
    assert not r.ok


def test_free_factor_automorphism_with_wrong_order():
    f = BaseAutomorphism.acting_freely("f", 2, [Fraction(1, 2)])
    s = Scenario("bad", (Factor("Y", FactorType.hk(2), 1, f),), (GeneratorDecl(powers={"Y": 1}),))
    assert "HK-free-automorphism" in rules(validate(s))


def test_free_cy_automorphism_must_be_non_symplectic_involution():
    iota = BaseAutomorphism.acting_freely("iota", 3, [Fraction(1, 3)])
    s = Scenario("bad", (Factor("Z", FactorType.cy(4), 1, iota),), (GeneratorDecl(powers={"Z": 1}),))
    assert "CY-free-automorphism" in rules(validate(s))


def test_fixed_points_violate_free_action_unless_stack():
    f = BaseAutomorphism.with_fixed_points("f", 3, [Fraction(1, 3)])
    fac = Factor("Y", FactorType.hk(2), 1, f)
    gen = GeneratorDecl(powers={"Y": 1}, name="f", order=3, fixed_point_free=False)
    assert "free-action" in rules(validate(Scenario("q", (fac,), (gen,))))
    r = validate(Scenario("stack", (fac,), (gen,), stack_mode=True))
    assert r.ok and r.freeness is None
    assert r.classification == "exceptional"


def test_declared_order_mismatch():
    f = BaseAutomorphism.acting_freely("f", 3, [Fraction(1, 3)])
    s = Scenario("bad", (Factor("Y", FactorType.hk(2), 1, f),),
                 (GeneratorDecl(powers={"Y": 1}, name="f", order=2, symplectic_order=5),))
    assert {"declared-order", "symplectic-order"} <= rules(validate(s))


def test_euler_multiplicativity_for_free_quotients():
    for s in (make_enriques(2), make_product_cover(2, 3), make_wreath(2, 1), make_mixed_n2(2)):
        r = validate(s)
        assert r.freeness is True
        assert r.cover_euler == r.group_order * r.invariant_euler


def test_torus_factor_forces_none():
    # t1 -> t2, t2 -> -t1 leaves exactly 1 and t1 t2 invariant
    s = Scenario("t", (Factor("T", FactorType.torus(1), 2),),
                 (GeneratorDecl(perm={"T1": "T2", "T2": "T1"}, scalars={"t2": Fraction(1, 2)}),))
    r = validate(s)
    assert r.invariants.hilbert == [1, 0, 1]
    assert r.classification == "none"
    assert "torus" in r.invariants.reason


def test_summary_strings():
    assert validate(make_enriques(2)).summary() == "exceptional; ω order 3"
    assert validate(make_product_cover(2, 2)).summary() == "P^2[4]-unit; ω order 1"


def test_group_cache_and_report_json():
    s = make_wreath(2, 1)
    assert s.group() is s.group()
    j = validate(s).to_json()
    assert j["group_order"] == 27
    assert j["invariants"]["label"] == "P^2[8]-unit"


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(1, 3))
def test_product_cover_group_order_formula(n, k):
    s = make_product_cover(n, k)
    assert s.group().order == (n + 1) ** (k - 1)
