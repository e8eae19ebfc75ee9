"""Invariant subalgebras and classification of the structure-sheaf unit type."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .action import ActionGroup, ProductAutomorphism, apply
from .algebra import AlgebraElement, KunnethAlgebra, Monomial, power
from .cyclotomic import CyclotomicScalar
from .linalg import row_reduce

__all__ = [
    "InvariantReport",
    "NotCyclicError",
    "reynolds",
    "reynolds_direct",
    "invariant_basis",
    "invariant_hilbert",
    "classify_unit",
    "canonical_character_exponents",
    "character_eigenspaces",
    "EXCEPTIONAL",
    "PNK",
    "NONE",
]

EXCEPTIONAL = "exceptional"
PNK = "P^n[k]-unit"
NONE = "none"


class NotCyclicError(ValueError):
    pass


def _twist_residues(G: ActionGroup, s: int) -> np.ndarray | None:
    if s == 0:
        return None
    L = G.level
    return np.array([int(q * L) * s for q in canonical_character_exponents(G)], dtype=np.int64) % L


def _images(G: ActionGroup, monos: Sequence[Monomial], twist=None):
    alg = G.algebra
    perm, scal = G.kernel_arrays
    return kernels.orbit_images(perm, scal, [int(o) for o in alg.odd], alg.strides, G.level,
                                np.array(monos, dtype=np.int64).reshape(len(monos), alg.ngens),
                                twist)


def _row_sums(G: ActionGroup, tgt_row, res_row) -> dict[int, CyclotomicScalar]:
    """Averaged image ``(1/|G|) sum_s zeta^res[s] * m_tgt[s]`` keyed by monomial index."""
    L = G.level
    keys = tgt_row * L + res_row
    uniq, counts = np.unique(keys, return_counts=True)
    acc: dict[int, list[int]] = {}
    for k, c in zip(uniq.tolist(), counts.tolist()):
        t, r = divmod(k, L)
        acc.setdefault(t, [0] * L)[r] += c
    inv = Fraction(1, G.order)
    out = {}
    for t, vec in acc.items():
        c = CyclotomicScalar(L, vec)
        if c:
            out[t] = c * inv
    return out


def _monomial_reynolds(G: ActionGroup, monos: Sequence[Monomial], s: int = 0):
    if not monos:
        return []
    tgt, res = _images(G, monos, _twist_residues(G, s))
    return [_row_sums(G, tgt[b], res[b]) for b in range(len(monos))]


def reynolds(G: ActionGroup, a: AlgebraElement, s: int = 0) -> AlgebraElement:
    """Group average of ``a``; with ``s != 0`` the average is twisted by the canonical character to the power ``s``."""
    alg = a.algebra
    monos = list(a.terms)
    out: dict[Monomial, CyclotomicScalar] = {}
    for m, row in zip(monos, _monomial_reynolds(G, monos, s)):
        c = a.coefficient(m)
        for t, v in row.items():
            mm = alg.monomial_from_index(t)
            out[mm] = out[mm] + c * v if mm in out else c * v
    return AlgebraElement(alg, out)


def reynolds_direct(G: ActionGroup, a: AlgebraElement) -> AlgebraElement:
    """Same average computed element by element with :func:`apply` (reference path)."""
    total = a.algebra.zero()
    for g in G:
        total = total + apply(g, a)
    return total * Fraction(1, G.order)


def _orbit_representatives(G: ActionGroup, monos: Sequence[Monomial], s: int = 0):
    """One averaged row per orbit of degree-d monomials, representatives in monomial order."""
    if not monos:
        return []
    alg = G.algebra
    tgt, res = _images(G, monos, _twist_residues(G, s))
    pos = {alg.monomial_index(m): i for i, m in enumerate(monos)}
    done = np.zeros(len(monos), dtype=bool)
    rows = []
    for b in range(len(monos)):
        if done[b]:
            continue
        for t in np.unique(tgt[b]).tolist():
            done[pos[t]] = True
        rows.append((monos[b], _row_sums(G, tgt[b], res[b])))
    return rows


def invariant_basis(G: ActionGroup, alg: KunnethAlgebra, d: int, s: int = 0) -> list[AlgebraElement]:
    """Row-reduced basis of the degree-``d`` invariants (twisted by ``s`` if given)."""
    if alg != G.algebra:
        raise ValueError("group acts on a different algebra")
    monos = alg.monomials_of_degree(d)
    order = [alg.monomial_index(m) for m in monos]
    rows = [r for _, r in _orbit_representatives(G, monos, s) if r]
    basis = row_reduce(rows, order)
    return [AlgebraElement(alg, {alg.monomial_from_index(k): v for k, v in r.items()}) for r in basis]


def _degree_dimension(G: ActionGroup, alg: KunnethAlgebra, d: int, s: int = 0) -> int:
    return sum(1 for _, r in _orbit_representatives(G, alg.monomials_of_degree(d), s) if r)


def invariant_hilbert(G: ActionGroup, alg: KunnethAlgebra, s: int = 0) -> list[int]:
    if alg != G.algebra:
        raise ValueError("group acts on a different algebra")
    return [_degree_dimension(G, alg, d, s) for d in range(alg.top_degree + 1)]


def canonical_character_exponents(G: ActionGroup) -> list[Fraction]:
    """Per element, the exponent ``q`` with ``g . top = exp(2 pi i q) * top``."""
    top = G.algebra.top_monomial
    return [g.image_of_monomial(top)[0] for g in G]


@dataclass
class InvariantReport:
    hilbert: list[int]
    classification: str
    n: int | None = None
    k: int | None = None
    generator_x: AlgebraElement | None = None
    witnesses: list[AlgebraElement] = field(default_factory=list)
    top_fixed: bool = True
    reason: str = ""

    @property
    def label(self) -> str:
        if self.classification == PNK:
            return f"P^{self.n}[{self.k}]-unit"
        return self.classification

    @property
    def is_spherical(self) -> bool:
        return self.classification == PNK and self.n == 1

    @property
    def is_hyperkahler_unit(self) -> bool:
        return self.classification == PNK and self.k == 2

    def to_json(self) -> dict:
        return {
            "hilbert": self.hilbert,
            "classification": self.classification,
            "label": self.label,
            "n": self.n,
            "k": self.k,
            "x": None if self.generator_x is None else self.generator_x.to_json(),
            "x_text": None if self.generator_x is None else str(self.generator_x),
            "top_fixed": self.top_fixed,
            "reason": self.reason,
        }


def _progression(hilbert: Sequence[int]) -> tuple[int, int] | None:
    """``(n, k)`` if the series is ``1 + t^k + ... + t^{nk}`` with n >= 1."""
    nz = [d for d, h in enumerate(hilbert) if h]
    if any(hilbert[d] != 1 for d in nz) or nz[0] != 0 or len(nz) < 2:
        return None
    k = nz[1]
    if nz != list(range(0, k * len(nz), k)):
        return None
    return len(nz) - 1, k


def classify_unit(G: ActionGroup, alg: KunnethAlgebra) -> InvariantReport:
    hilbert = invariant_hilbert(G, alg)
    top_fixed = all(q == 0 for q in canonical_character_exponents(G))
    if hilbert[0] == 1 and not any(hilbert[1:]):
        return InvariantReport(hilbert, EXCEPTIONAL, top_fixed=top_fixed,
                               reason="invariants are C in degree 0")
    shape = _progression(hilbert)
    if shape is None:
        return InvariantReport(hilbert, NONE, top_fixed=top_fixed,
                               reason="invariant Hilbert series is not 1 + t^k + ... + t^nk")
    n, k = shape
    (x,) = invariant_basis(G, alg, k)
    witnesses = [power(x, i) for i in range(n + 1)]
    report = InvariantReport(hilbert, NONE, n=None, k=None, generator_x=x,
                             witnesses=witnesses, top_fixed=top_fixed)
    for i, w in enumerate(witnesses):
        if w.is_zero():
            report.reason = f"generation fails at x^{i}"
            return report
    if not top_fixed:
        report.reason = "top class is not G-fixed (canonical bundle non-trivial)"
        return report
    report.classification, report.n, report.k = PNK, n, k
    report.reason = f"invariants are C[x]/x^{n + 1} with deg x = {k}"
    return report


def character_eigenspaces(G: ActionGroup, alg: KunnethAlgebra,
                          generator: ProductAutomorphism | None = None) -> dict[int, list[int]]:
    """Hilbert series of each eigenspace of the canonical character.

    Eigenspace ``s`` collects the classes on which every ``g`` acts by
    ``chi(g)^(-s)``, ``chi`` being the scalar on the top class; ``s`` runs over
    ``0 .. ord(chi) - 1``.
    """
    g = generator if generator is not None else G.cyclic_generator()
    if g is None or g.order() != G.order:
        raise NotCyclicError("character eigenspaces need a cyclic group with a generator")
    q = g.image_of_monomial(alg.top_monomial)[0]
    m = q.denominator
    return {s: invariant_hilbert(G, alg, s) for s in range(m)}
