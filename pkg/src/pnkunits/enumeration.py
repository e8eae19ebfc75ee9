"""Case enumeration for universal covers of varieties with P^n[k]-units.

A candidate cover is a multiset of hyperkähler factors HK(d) and strict
Calabi-Yau factors CY(e) of total dimension ``n*k``.  Rules, each a necessary
condition, try to eliminate candidates:

R1  a torus or odd-dimensional Calabi-Yau factor has Euler characteristic 0.
R2  the top class must be a product of n classes of degree k, so every
    Calabi-Yau factor has dimension at most k.
R3  |G| = chi(cover)/(n+1) must be an integer; every orbit of blocks forced
    by the ansatz has size dividing |G|.
R4  the degree-k invariant x is supported on one orbit of monomials, so all
    its monomials share one shape (multiset of factor type and exponent)
    and n of them multiply to the top class.
R5  bipartite K3 / HK(d') supports with d' >= 2 are contradictory: the
    degree-8 coefficient relations force C = 0 for a product of nonzero
    coefficients.
R6  if one orbit N carries a single exponent e and every other class is a
    single block, x^2 splits into two invariant summands when y^(2e) != 0;
    otherwise the orbit of j-subsets of N has size binom(|N|, j) | |G|.

Every elimination carries a structured witness that can be re-checked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb
from typing import Iterator, Sequence

from .geometry import FactorType

__all__ = [
    "EnumerationCapError",
    "Decomposition",
    "Shape",
    "RuleTrace",
    "CoverEntry",
    "CoverReport",
    "enumerate_decompositions",
    "apply_rules",
    "enumerate_covers",
    "prime_power_check",
    "verify_witness",
    "ELIMINATED",
    "KEPT",
    "UNDETERMINED",
    "CONSTRUCTIBLE",
]

ELIMINATED = "eliminated"
KEPT = "kept"
UNDETERMINED = "undetermined"
CONSTRUCTIBLE = "constructible"

DEFAULT_DECOMPOSITION_CAP = 200_000


class EnumerationCapError(RuntimeError):
    pass


def _factor_sort_key(t: FactorType):
    return ({"HK": 0, "CY": 1, "Torus": 2}[t.kind], t.param)


@dataclass(frozen=True)
class Decomposition:
    """Multiset of factor types, stored as sorted ``(type, multiplicity)`` pairs."""

    parts: tuple[tuple[FactorType, int], ...]

    @classmethod
    def of(cls, types: Sequence[FactorType]) -> Decomposition:
        counts: dict[FactorType, int] = {}
        for t in types:
            counts[t] = counts.get(t, 0) + 1
        return cls(tuple(sorted(counts.items(), key=lambda p: _factor_sort_key(p[0]))))

    @classmethod
    def parse(cls, text: str) -> Decomposition:
        return cls.of([FactorType.parse(p) for p in text.replace("x", "×").split("×")])

    @property
    def dimension(self) -> int:
        return sum(t.dimension * m for t, m in self.parts)

    @property
    def euler(self) -> int:
        out = 1
        for t, m in self.parts:
            out *= t.euler ** m
        return out

    def types(self) -> list[FactorType]:
        return [t for t, m in self.parts for _ in range(m)]

    def __str__(self) -> str:
        return "×".join(str(t) for t in self.types())


# Shapes: per type, a sorted tuple of exponents (roles) carried by distinct blocks
Shape = tuple  # tuple[(FactorType, tuple[int, ...]), ...]


def _top_exponent(t: FactorType) -> int:
    return t.param if t.kind == "HK" else 1


def _gen_degree(t: FactorType) -> int:
    return 2 if t.kind == "HK" else t.param


def shape_str(shape: Shape) -> str:
    out = []
    for t, roles in shape:
        out.append(f"{t}:{{{','.join(map(str, roles))}}}")
    return " ".join(out)


@dataclass
class RuleTrace:
    rule: str
    reason: str
    verdict: str
    witness: dict = field(default_factory=dict)
    candidate: str = ""

    def to_json(self) -> dict:
        d = {"rule": self.rule, "reason": self.reason, "verdict": self.verdict, "witness": self.witness}
        if self.candidate:
            d["candidate"] = self.candidate
        return d


# decompositions

def _partitions(total: int, max_part: int) -> Iterator[list[int]]:
    if total == 0:
        yield []
        return
    for p in range(min(total, max_part), 0, -1):
        for rest in _partitions(total - p, p):
            yield [p] + rest


def enumerate_decompositions(n: int, k: int, cap: int = DEFAULT_DECOMPOSITION_CAP) -> list[Decomposition]:
    """All torus-free multisets of HK(d) and CY(e), e even >= 4, with dimension n*k."""
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    total = n * k
    out: set[Decomposition] = set()
    if total % 2:
        return []
    for parts in _partitions(total // 2, total // 2):
        # each half-dimension p is HK(p) or, for p >= 2, CY(2p)
        options = []
        for p in parts:
            opts = [FactorType.hk(p)]
            if p >= 2:
                opts.append(FactorType.cy(2 * p))
            options.append(opts)
        for dec in _choices(options):
            out.add(Decomposition.of(dec))
            if len(out) > cap:
                raise EnumerationCapError(f"more than {cap} decompositions for n={n}, k={k}")
    return sorted(out, key=lambda d: [(_factor_sort_key(t), m) for t, m in d.parts])


def _choices(options):
    if not options:
        yield []
        return
    for o in options[0]:
        for rest in _choices(options[1:]):
            yield [o] + rest


# packing feasibility

@lru_cache(maxsize=None)
def _pack(rounds: int, roles: tuple[int, ...], caps: tuple[int, ...]) -> bool:
    """Can ``rounds`` copies of ``roles`` be placed, each copy on distinct blocks, filling ``caps`` exactly?"""
    if rounds == 0:
        return not any(caps)
    if sum(caps) != rounds * sum(roles):
        return False
    seen = set()
    for new in _place(roles, caps):
        key = tuple(sorted(new, reverse=True))
        if key in seen:
            continue
        seen.add(key)
        if _pack(rounds - 1, roles, key):
            return True
    return False


def _place(roles: tuple[int, ...], caps: tuple[int, ...], used: frozenset = frozenset()):
    if not roles:
        yield caps
        return
    e = roles[0]
    for i, c in enumerate(caps):
        if i not in used and c >= e:
            nc = caps[:i] + (c - e,) + caps[i + 1:]
            yield from _place(roles[1:], nc, used | {i})


def packs(n: int, roles: Sequence[int], blocks: int, top: int) -> bool:
    return _pack(n, tuple(sorted(roles, reverse=True)), (top,) * blocks)


# shapes

def _role_multisets(t: FactorType, blocks: int, max_degree: int) -> list[tuple[int, ...]]:
    top, deg = _top_exponent(t), _gen_degree(t)
    out = []
    for r in range(1, blocks + 1):
        for roles in combinations_with_replacement(range(top, 0, -1), r):
            if sum(roles) * deg <= max_degree:
                out.append(tuple(roles))
    return out


def candidate_shapes(dec: Decomposition, k: int) -> list[Shape]:
    """Degree-k shapes that use every factor type present."""
    parts = list(dec.parts)
    out: list[Shape] = []

    def rec(i: int, left: int, acc: list):
        if i == len(parts):
            if left == 0:
                out.append(tuple(acc))
            return
        t, m = parts[i]
        for roles in _role_multisets(t, m, left):
            rec(i + 1, left - sum(roles) * _gen_degree(t), acc + [(t, roles)])

    rec(0, k, [])
    return out


def _multiset_partitions(items: tuple[int, ...]) -> list[tuple[tuple[int, ...], ...]]:
    """Partitions of a multiset into unordered sub-multisets, deduplicated."""
    result: set = set()

    def rec(rest: tuple[int, ...], blocks: list[tuple[int, ...]]):
        if not rest:
            result.add(tuple(sorted(blocks)))
            return
        x, tail = rest[0], rest[1:]
        for i in range(len(blocks)):
            nb = list(blocks)
            nb[i] = tuple(sorted(nb[i] + (x,), reverse=True))
            rec(tail, nb)
        rec(tail, blocks + [(x,)])

    rec(tuple(items), [])
    return sorted(result)


def _divides(a: int, b: int, what: str) -> dict:
    return {"kind": "divides", "a": a, "b": b, "holds": b % a == 0, "what": what}


# rules

def _r1(dec: Decomposition) -> RuleTrace:
    for t, _ in dec.parts:
        if t.euler == 0:
            return RuleTrace("R1", "factor with vanishing Euler characteristic", ELIMINATED,
                             {"kind": "euler-zero", "factor": str(t), "euler": 0})
    return RuleTrace("R1", "no torus or odd-dimensional Calabi-Yau factor", KEPT)


def _r2(dec: Decomposition, k: int) -> RuleTrace:
    for t, _ in dec.parts:
        if t.kind == "CY" and t.param > k:
            return RuleTrace("R2", "Calabi-Yau class cannot occur in a degree-k class", ELIMINATED,
                             {"kind": "degree-exceeds", "factor": str(t), "degree": t.param, "k": k})
    return RuleTrace("R2", "every generator fits into degree k", KEPT)


def _r3_euler(dec: Decomposition, n: int) -> tuple[RuleTrace, int | None]:
    chi = dec.euler
    w = _divides(n + 1, chi, "n+1 | chi(cover)")
    if not w["holds"]:
        return RuleTrace("R3", "Euler characteristic multiplicativity", ELIMINATED, w), None
    return RuleTrace("R3", "Euler characteristic multiplicativity", KEPT,
                     dict(w, group_order=chi // (n + 1))), chi // (n + 1)


def _class_check(t: FactorType, blocks: int, classes, n: int, order: int) -> dict | None:
    """First failed condition of a role-class partition, or None if it passes."""
    top = _top_exponent(t)
    sizes = []
    for cls in classes:
        num = n * sum(cls)
        if num % top:
            return {"kind": "integral", "num": num, "den": top, "what": f"orbit size for {t} roles {list(cls)}"}
        size = num // top
        if size < len(cls):
            return {"kind": "too-small", "size": size, "roles": list(cls), "factor": str(t)}
        sizes.append(size)
    if sum(sizes) != blocks:
        return {"kind": "block-count", "sizes": sizes, "blocks": blocks, "factor": str(t)}
    for size in sizes:
        if order % size:
            return _divides(size, order, f"orbit of {size} {t} blocks")
    for cls, size in zip(classes, sizes):
        if not packs(n, cls, size, top):
            return {"kind": "packing", "rounds": n, "roles": list(cls), "blocks": size, "top": top,
                    "factor": str(t)}
    return None


def _assignments(shape: Shape, n: int, order: int):
    """All per-type class partitions, each with its failure witness (None = passes)."""
    per_type = []
    for t, roles in shape:
        per_type.append([(t, p) for p in _multiset_partitions(roles)])

    def rec(i, acc):
        if i == len(per_type):
            yield tuple(acc)
            return
        for item in per_type[i]:
            yield from rec(i + 1, acc + [item])

    return rec(0, [])


def _r5(shape: Shape, classes, blocks: dict, n: int) -> dict | None:
    """Bipartite K3 / HK(d') contradiction; returns the witness if it applies."""
    if len(shape) != 2:
        return None
    (t1, r1), (t2, r2) = shape
    if r1 != (1,) or r2 != (1,):
        return None
    k3, other = (t1, t2) if (t1.kind, t1.param) == ("HK", 1) else (t2, t1)
    if (k3.kind, k3.param) != ("HK", 1) or other.kind != "HK" or other.param < 2:
        return None
    if blocks[k3] < 3 or blocks[other] < 2:
        return None
    return _cformula_witness(other)


def _cformula_witness(other: FactorType) -> dict:
    """Replay the three relations among the terms of C symbolically."""
    # c[a][b] for a in {h,i,j} (K3 blocks) and b in {i',j'} (HK blocks)
    T = [("hI", "iI", "jJ"), ("hI", "iJ", "jI"), ("hJ", "iI", "jI")]
    terms = [tuple(sorted(t)) for t in T]

    def ctilde(a, b):  # c_{aI} c_{bJ} + c_{aJ} c_{bI}
        return [(a + "I", b + "J"), (a + "J", b + "I")]

    relations = [("hI", ctilde("i", "j")), ("iI", ctilde("h", "j")), ("jI", ctilde("h", "i"))]
    matrix = []
    for factor, summands in relations:
        expanded = [tuple(sorted((factor,) + s)) for s in summands]
        matrix.append([expanded.count(t) for t in terms])
    det = _det3(matrix)
    return {"kind": "linear-system", "factor": str(other), "terms": ["·".join(t) for t in terms],
            "matrix": matrix, "det": det,
            "conclusion": "relations vanish, terms are nonzero, so C = 0 contradicts C = each term"
            if det != 0 else "relations do not determine the terms"}


def _det3(m) -> int:
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _r6(shape: Shape, classes, blocks: dict, n: int, order: int) -> dict | None:
    """Square splitting / subset orbits for a single multi-block class; witness if eliminated."""
    big = [(t, cls, size) for t, parts in classes for cls, size in parts if size >= 2]
    if len(big) != 1:
        return None
    t, cls, size = big[0]
    if len(cls) != 1:
        return None
    e = cls[0]
    top = _top_exponent(t)
    # remaining part of each monomial: singleton classes, each block carries sum(cls) in x
    rest = [(tt, sum(c)) for tt, parts in classes for c, s in parts if s == 1]

    def rest_power_nonzero(j: int) -> bool:
        return all(j * ex <= _top_exponent(tt) for tt, ex in rest)

    if n >= 2 and 2 * e <= top and rest_power_nonzero(2):
        return {"kind": "square-splits", "factor": str(t), "e": e, "top": top, "blocks": size}
    for j in range(1, min(n, size) + 1):
        if not rest_power_nonzero(j):
            break
        w = _divides(comb(size, j), order, f"orbit of {j}-subsets of {size} {t} blocks")
        if not w["holds"]:
            return dict(w, j=j, n_blocks=size)
    return None


def apply_rules(dec: Decomposition, n: int, k: int) -> list[RuleTrace]:
    """Rule traces in order; the last trace carries the overall verdict."""
    traces = [_r1(dec)]
    if traces[-1].verdict == ELIMINATED:
        return traces
    traces.append(_r2(dec, k))
    if traces[-1].verdict == ELIMINATED:
        return traces
    tr, order = _r3_euler(dec, n)
    traces.append(tr)
    if order is None:
        return traces
    blocks = dict(dec.parts)
    shapes = [s for s in candidate_shapes(dec, k)
              if all(packs(n, roles, blocks[t], _top_exponent(t)) for t, roles in s)]
    if not shapes:
        traces.append(RuleTrace("R4", "no single-shape degree-k ansatz reaches the top class", ELIMINATED,
                                {"kind": "no-shape", "decomposition": str(dec), "n": n, "k": k}))
        return traces
    traces.append(RuleTrace("R4", "single-shape ansatz candidates", KEPT,
                            {"kind": "shapes", "shapes": [shape_str(s) for s in shapes]}))
    survivors = 0
    for shape in shapes:
        for assignment in _assignments(shape, n, order):
            label = shape_str(shape) + " | " + "; ".join(
                f"{t}:" + "+".join("{" + ",".join(map(str, c)) + "}" for c in parts)
                for t, parts in assignment)
            failed = None
            sized = []
            for t, parts in assignment:
                w = _class_check(t, blocks[t], parts, n, order)
                if w is not None:
                    failed = ("R3", "block orbits forced by the ansatz", w)
                    break
                sized.append((t, [(c, n * sum(c) // _top_exponent(t)) for c in parts]))
            if failed is None:
                w = _r5(shape, sized, blocks, n)
                if w is not None:
                    failed = ("R5", "coefficient relations in degree 8 force C = 0", w)
            if failed is None:
                w = _r6(shape, sized, blocks, n, order)
                if w is not None:
                    failed = ("R6", "square of x must not split", w)
            if failed is None:
                survivors += 1
                traces.append(RuleTrace("R6", "no rule eliminates this ansatz", KEPT,
                                        {"kind": "survivor"}, candidate=label))
            else:
                rule, reason, w = failed
                traces.append(RuleTrace(rule, reason, ELIMINATED, w, candidate=label))
    if survivors == 0:
        traces.append(RuleTrace("R*", "every ansatz eliminated", ELIMINATED, {"kind": "all-candidates"}))
    else:
        traces.append(RuleTrace("R*", "kept (undetermined by rule)", KEPT,
                                {"kind": "survivors", "count": survivors}))
    return traces


def verdict(traces: Sequence[RuleTrace]) -> str:
    return traces[-1].verdict


# reports

@dataclass
class CoverEntry:
    decomposition: Decomposition
    traces: list[RuleTrace]
    status: str
    witness: str | None = None
    character_check: dict | None = None

    def to_json(self) -> dict:
        return {
            "decomposition": str(self.decomposition),
            "status": self.status,
            "witness": self.witness,
            "character_check": self.character_check,
            "traces": [t.to_json() for t in self.traces],
        }


@dataclass
class CoverReport:
    n: int
    k: int
    entries: list[CoverEntry]
    prime_power: dict

    def survivors(self) -> list[CoverEntry]:
        return [e for e in self.entries if e.status != ELIMINATED]

    def by_status(self, status: str) -> list[CoverEntry]:
        return [e for e in self.entries if e.status == status]

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "prime_power": self.prime_power,
                "survivors": [str(e.decomposition) for e in self.survivors()],
                "entries": [e.to_json() for e in self.entries]}


def _witness_scenarios(n: int, k: int):
    from .constructions import make_k6, make_mixed_n2, make_product_cover, make_wreath

    out = []
    if k % 2 == 0:
        out.append((f"product-cover n={n} k={k // 2}", lambda: make_product_cover(n, k // 2)))
        m = k // 2 - n - 1
        if m >= 0:
            out.append((f"wreath n={n} k={m}", lambda: make_wreath(n, m)))
    if n == 2 and k >= 4 and k % 2 == 0:
        out.append((f"mixed-n2 e={k - 2}", lambda: make_mixed_n2(k - 2)))
    if k == 6:
        out.append((f"k6 n={n}", lambda: make_k6(n)))
    return out


def _scenario_decomposition(s) -> Decomposition:
    return Decomposition.of([f.type for f in s.factors for _ in range(f.multiplicity)])


def _character_check(s, n: int) -> dict:
    """Orders m, m' of the scalar images on the two factors (both must be >= n+1)."""
    G = s.group()
    alg = s.algebra
    orders = []
    for gi in range(alg.ngens):
        m = 1
        for g in G:
            q = g.exponents[gi]
            m = max(m, q.denominator)
        orders.append(m)
    return {"orders": orders, "required": n + 1, "holds": all(m >= n + 1 for m in orders)}


def enumerate_covers(n: int, k: int, cap: int = DEFAULT_DECOMPOSITION_CAP) -> CoverReport:
    from .geometry import validate

    if n < 2 or k < 4 or k % 2:
        raise ValueError("enumeration needs n >= 2 and even k >= 4")
    witnesses: dict[Decomposition, list] = {}
    for label, make in _witness_scenarios(n, k):
        s = make()
        witnesses.setdefault(_scenario_decomposition(s), []).append((label, s))
    entries = []
    for dec in enumerate_decompositions(n, k, cap):
        traces = apply_rules(dec, n, k)
        if verdict(traces) == ELIMINATED:
            entries.append(CoverEntry(dec, traces, ELIMINATED))
            continue
        entry = CoverEntry(dec, traces, UNDETERMINED)
        for label, s in witnesses.get(dec, []):
            rep = validate(s)
            if rep.invariants.label == f"P^{n}[{k}]-unit" and not rep.violations:
                entry.status, entry.witness = CONSTRUCTIBLE, label
                if len(dec.parts) == 1 and dec.parts[0] == (FactorType.hk(n), 2):
                    entry.character_check = _character_check(s, n)
                break
        entries.append(entry)
    return CoverReport(n, k, entries, prime_power_check(n))


def prime_power_check(n: int) -> dict:
    """Is n+1 a prime power?  Returns the verdict with the factorisation of n+1."""
    if n < 1:
        raise ValueError("n must be positive")
    m, p, fac = n + 1, 2, []
    while p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        if e:
            fac.append([p, e])
        p += 1
    if m > 1:
        fac.append([m, 1])
    return {"n": n, "n_plus_1": n + 1, "factorization": fac, "prime_power": len(fac) == 1}


def verify_witness(w: dict) -> bool:
    """Independently re-check an elimination witness (True if the obstruction is genuine)."""
    kind = w.get("kind")
    if kind == "divides":
        return w["b"] % w["a"] != 0
    if kind == "euler-zero":
        return FactorType.parse(w["factor"]).euler == 0
    if kind == "degree-exceeds":
        return w["degree"] > w["k"]
    if kind == "integral":
        return Fraction(w["num"], w["den"]).denominator != 1
    if kind == "too-small":
        return w["size"] < len(w["roles"])
    if kind == "block-count":
        return sum(w["sizes"]) != w["blocks"]
    if kind == "packing":
        return not _brute_pack(w["rounds"], tuple(w["roles"]), w["blocks"], w["top"])
    if kind == "linear-system":
        return _det3(w["matrix"]) != 0 and FactorType.parse(w["factor"]).param >= 2
    if kind == "square-splits":
        return 2 * w["e"] <= w["top"] and w["blocks"] >= 2
    if kind == "no-shape":
        dec = Decomposition.parse(w["decomposition"])
        return not _brute_shape_exists(dec, w["n"], w["k"])
    if kind == "all-candidates":
        return True
    raise ValueError(f"unknown witness kind {kind!r}")


def _brute_pack(rounds: int, roles: tuple[int, ...], blocks: int, top: int) -> bool:
    # exhaustive search over exponent matrices (rounds x blocks), independent of _pack
    from itertools import permutations, product

    placements = set()
    for perm in permutations(range(blocks), len(roles)):
        row = [0] * blocks
        for e, b in zip(roles, perm):
            row[b] = e
        placements.add(tuple(row))
    placements = sorted(placements)
    for rows in product(placements, repeat=rounds):
        if all(sum(col) == top for col in zip(*rows)):
            return True
    return False


def _brute_shape_exists(dec: Decomposition, n: int, k: int) -> bool:
    # enumerate degree-k exponent vectors over all blocks, group by shape, test a product of n
    from itertools import product

    types = dec.types()
    tops = [_top_exponent(t) for t in types]
    degs = [_gen_degree(t) for t in types]
    by_shape: dict = {}
    for m in product(*(range(t + 1) for t in tops)):
        if sum(e * d for e, d in zip(m, degs)) != k:
            continue
        key = tuple(sorted((str(t), e) for t, e in zip(types, m) if e))
        by_shape.setdefault(key, []).append(m)
    present = {str(t) for t in types}
    for key, monos in by_shape.items():
        if {t for t, _ in key} != present:
            continue
        if _reach(tuple(tops), monos, n):
            return True
    return False


def _reach(target: tuple[int, ...], monos, n: int) -> bool:
    @lru_cache(maxsize=None)
    def go(left: tuple[int, ...], r: int) -> bool:
        if r == 0:
            return not any(left)
        for m in monos:
            if all(a >= b for a, b in zip(left, m)):
                if go(tuple(a - b for a, b in zip(left, m)), r - 1):
                    return True
        return False

    return go(target, n)
