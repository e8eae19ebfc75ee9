"""JSON scenario files.

Scalars are written as ``{"num": a, "den": b}`` meaning ``zeta_b ** a``;
tri-state flags accept ``true``, ``false`` or ``"unknown"``.  Serialization
is canonical: parse followed by serialize reproduces the text exactly.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .action import BaseAutomorphism
from .geometry import Factor, FactorType, GeneratorDecl, Scenario, ScenarioError

__all__ = ["FORMAT_VERSION", "ScenarioParseError", "scenario_to_dict", "scenario_from_dict",
           "dumps", "loads", "load", "dump"]

FORMAT_VERSION = 1


class ScenarioParseError(ScenarioError):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


# writing

def _scalar(q: Fraction) -> dict:
    q = Fraction(q) % 1
    return {"num": q.numerator, "den": q.denominator}


def _free_powers(a: BaseAutomorphism):
    fp = a.free_powers
    if fp is None:
        return None
    if fp == frozenset(range(1, a.order)):
        return "all"
    if not fp:
        return "none"
    return sorted(fp)


def _tri(v: bool | None):
    return "unknown" if v is None else v


def scenario_to_dict(s: Scenario) -> dict:
    factors = []
    for f in s.factors:
        t = f.type
        d: dict[str, Any] = {"label": f.label, "kind": "K3" if str(t) == "K3" else t.kind,
                             "param": t.param, "multiplicity": f.multiplicity}
        if f.automorphism is not None:
            a = f.automorphism
            d["automorphism"] = {"name": a.name, "order": a.order,
                                 "rho": [_scalar(q) for q in a.rho],
                                 "free_powers": _free_powers(a)}
        factors.append(d)
    gens = []
    for g in s.generators:
        d = {"name": g.name, "perm": dict(sorted(g.perm.items()))}
        if g.powers is not None:
            d["powers"] = dict(sorted(g.powers.items()))
        if g.scalars is not None:
            d["scalars"] = {k: _scalar(v) for k, v in sorted(g.scalars.items())}
        d["order"] = g.order
        d["symplectic_order"] = g.symplectic_order
        d["fixed_point_free"] = _tri(g.fixed_point_free)
        d["free_compositions"] = [list(c) for c in g.free_compositions]
        gens.append(d)
    out = {"version": FORMAT_VERSION, "name": s.name}
    if s.description:
        out["description"] = s.description
    out.update({"factors": factors, "generators": gens, "stack_mode": s.stack_mode,
                "hypothetical": s.hypothetical})
    if s.expected is not None:
        out["expected"] = dict(s.expected)
    return out


def dumps(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=2, ensure_ascii=False) + "\n"


def dump(s: Scenario, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(s))


# reading

def _req(d: dict, key: str, where: str):
    if not isinstance(d, dict):
        raise ScenarioParseError(where, "expected an object")
    if key not in d:
        raise ScenarioParseError(f"{where}.{key}" if where else key, "missing field")
    return d[key]


def _int(v, where: str, minimum: int | None = None) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ScenarioParseError(where, f"expected an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ScenarioParseError(where, f"must be at least {minimum}")
    return v


def _opt_int(v, where: str) -> int | None:
    return None if v is None else _int(v, where, 1)


def _read_scalar(v, where: str) -> Fraction:
    if not isinstance(v, dict):
        raise ScenarioParseError(where, "expected {num, den}")
    num = _int(_req(v, "num", where), f"{where}.num")
    den = _int(_req(v, "den", where), f"{where}.den", 1)
    return Fraction(num, den) % 1


def _read_tri(v, where: str) -> bool | None:
    if v is None or v == "unknown":
        return None
    if isinstance(v, bool):
        return v
    raise ScenarioParseError(where, f"expected true, false or \"unknown\", got {v!r}")


def _read_automorphism(d, where: str, ngens: int) -> BaseAutomorphism:
    name = _req(d, "name", where)
    order = _int(_req(d, "order", where), f"{where}.order", 1)
    rho = _req(d, "rho", where)
    if not isinstance(rho, list) or len(rho) != ngens:
        raise ScenarioParseError(f"{where}.rho", f"expected a list of {ngens} scalar(s)")
    qs = [_read_scalar(q, f"{where}.rho[{i}]") for i, q in enumerate(rho)]
    for i, q in enumerate(qs):
        if order % q.denominator:
            raise ScenarioParseError(f"{where}.rho[{i}]", f"scalar order {q.denominator} does not divide {order}")
    fp = d.get("free_powers")
    if fp is None:
        free = None
    elif fp == "all":
        free = frozenset(range(1, order))
    elif fp == "none":
        free = frozenset()
    elif isinstance(fp, list):
        free = frozenset(_int(a, f"{where}.free_powers[{i}]") for i, a in enumerate(fp))
    else:
        raise ScenarioParseError(f"{where}.free_powers", "expected \"all\", \"none\", a list or null")
    return BaseAutomorphism(str(name), order, tuple(qs), free)


def scenario_from_dict(data: dict) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioParseError("", "top level must be an object")
    version = _int(_req(data, "version", ""), "version")
    if version != FORMAT_VERSION:
        raise ScenarioParseError("version", f"unsupported version {version}")
    name = _req(data, "name", "")
    factors = []
    raw = _req(data, "factors", "")
    if not isinstance(raw, list) or not raw:
        raise ScenarioParseError("factors", "expected a non-empty list")
    for i, f in enumerate(raw):
        where = f"factors[{i}]"
        kind = _req(f, "kind", where)
        try:
            if kind == "K3":
                t = FactorType.k3()
            else:
                t = FactorType(str(kind), _int(_req(f, "param", where), f"{where}.param", 1))
            auto = None
            if f.get("automorphism") is not None:
                auto = _read_automorphism(f["automorphism"], f"{where}.automorphism", t.ngens)
            factors.append(Factor(str(_req(f, "label", where)), t,
                                  _int(f.get("multiplicity", 1), f"{where}.multiplicity", 1), auto))
        except ScenarioParseError:
            raise
        except ScenarioError as e:
            raise ScenarioParseError(where, str(e)) from e
    gens = []
    for i, g in enumerate(data.get("generators", [])):
        where = f"generators[{i}]"
        if not isinstance(g, dict):
            raise ScenarioParseError(where, "expected an object")
        perm = g.get("perm", {})
        if not isinstance(perm, dict):
            raise ScenarioParseError(f"{where}.perm", "expected a mapping block -> block")
        powers = g.get("powers")
        if powers is not None:
            if not isinstance(powers, dict):
                raise ScenarioParseError(f"{where}.powers", "expected a mapping block -> integer")
            powers = {str(b): _int(p, f"{where}.powers.{b}") for b, p in powers.items()}
        scalars = g.get("scalars")
        if scalars is not None:
            if not isinstance(scalars, dict):
                raise ScenarioParseError(f"{where}.scalars", "expected a mapping generator -> {num, den}")
            scalars = {str(k): _read_scalar(v, f"{where}.scalars.{k}") for k, v in scalars.items()}
        if powers is None and scalars is None:
            raise ScenarioParseError(where, "needs powers or scalars")
        comps = g.get("free_compositions", [])
        if not isinstance(comps, list) or not all(isinstance(c, list) for c in comps):
            raise ScenarioParseError(f"{where}.free_compositions", "expected a list of block lists")
        gens.append(GeneratorDecl(
            perm={str(a): str(b) for a, b in perm.items()}, powers=powers, scalars=scalars,
            name=str(g.get("name", "")), order=_opt_int(g.get("order"), f"{where}.order"),
            symplectic_order=_opt_int(g.get("symplectic_order"), f"{where}.symplectic_order"),
            fixed_point_free=_read_tri(g.get("fixed_point_free"), f"{where}.fixed_point_free"),
            free_compositions=tuple(tuple(map(str, c)) for c in comps)))
    expected = data.get("expected")
    if expected is not None and not isinstance(expected, dict):
        raise ScenarioParseError("expected", "expected an object")
    try:
        s = Scenario(str(name), tuple(factors), tuple(gens),
                     stack_mode=bool(data.get("stack_mode", False)),
                     hypothetical=bool(data.get("hypothetical", False)),
                     expected=expected, description=str(data.get("description", "")))
        s.automorphisms()  # surface generator errors at parse time
    except ScenarioParseError:
        raise
    except ScenarioError as e:
        raise ScenarioParseError("generators", str(e)) from e
    return s


def loads(text: str) -> Scenario:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioParseError(f"line {e.lineno} column {e.colno}", e.msg) from e
    return scenario_from_dict(data)


def load(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
