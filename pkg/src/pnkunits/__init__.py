"""Exact cohomology computations for quotients of hyperkähler and Calabi-Yau products."""

from __future__ import annotations

from .action import (
    ActionGroup,
    BaseAutomorphism,
    ProductAutomorphism,
    apply,
    compose,
    group_closure,
    inverse,
    propagate_freeness,
)
from .algebra import (
    AlgebraElement,
    GeneratorSpec,
    KunnethAlgebra,
    euler_characteristic,
    hilbert_series,
    multiply,
    power,
)
from .constructions import (
    make_enriques,
    make_k6,
    make_mixed_n2,
    make_nonexample_product,
    make_product_cover,
    make_symmetric_stack,
    make_wreath,
)
from .cyclotomic import CyclotomicScalar, root_of_unity, zeta
from .enumeration import apply_rules, enumerate_covers, enumerate_decompositions, prime_power_check
from .geometry import (
    Factor,
    FactorType,
    GeneratorDecl,
    Scenario,
    canonical_character,
    canonical_cover,
    cover_algebra,
    omega_order,
    validate,
)
from .invariants import (
    character_eigenspaces,
    classify_unit,
    invariant_basis,
    invariant_hilbert,
    reynolds,
)

__version__ = "0.1.0"

__all__ = [
    "ActionGroup", "AlgebraElement", "BaseAutomorphism", "CyclotomicScalar", "Factor",
    "FactorType", "GeneratorDecl", "GeneratorSpec", "KunnethAlgebra", "ProductAutomorphism",
    "Scenario", "apply", "apply_rules", "canonical_character", "canonical_cover",
    "character_eigenspaces", "classify_unit", "compose", "cover_algebra", "enumerate_covers",
    "enumerate_decompositions", "euler_characteristic", "group_closure", "hilbert_series",
    "invariant_basis", "invariant_hilbert", "inverse", "make_enriques", "make_k6",
    "make_mixed_n2", "make_nonexample_product", "make_product_cover", "make_symmetric_stack",
    "make_wreath", "multiply", "omega_order", "power", "prime_power_check", "propagate_freeness",
    "reynolds", "root_of_unity", "validate", "zeta",
]
