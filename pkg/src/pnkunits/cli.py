"""Command-line interface: ``pnkunits {check,construct,enumerate,invariants}``.

Exit codes: 0 success, 1 violations or a mismatch with ``expected``,
2 unreadable input or bad parameters.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from typing import Sequence

from .action import DEFAULT_CAP, GroupOverflowError
from .algebra import _superscript
from .constructions import RECIPES, RecipeError, build_recipe
from .enumeration import ELIMINATED, EnumerationCapError, enumerate_covers
from .geometry import ClassificationReport, ScenarioError, validate
from .invariants import invariant_basis
from .scenario_io import ScenarioParseError, dumps, load

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


def _pretty_powers(text: str) -> str:
    return re.sub(r"x\^(\d+)", lambda m: "x" + _superscript(int(m.group(1))), text)


def _emit_json(obj) -> None:
    print(json.dumps(obj, indent=2, ensure_ascii=False, sort_keys=False))


def _hilbert_text(h: Sequence[int]) -> str:
    terms = []
    for d, c in enumerate(h):
        if c:
            t = "1" if d == 0 else ("t" if d == 1 else f"t^{d}")
            terms.append(t if c == 1 else f"{c}{t}" if d else str(c))
    return " + ".join(terms) or "0"


def format_report(r: ClassificationReport) -> str:
    inv = r.invariants
    tri = {True: "free", False: "not free", None: "unknown"}[r.freeness]
    if r.stack_mode:
        tri = "not required (stack)"
    lines = [
        f"scenario:            {r.scenario}" + ("  [existence-unknown]" if r.hypothetical else ""),
        f"cover dimension:     {r.cover_dim}",
        f"cover euler:         {r.cover_euler}",
        f"group order:         {r.group_order}",
        f"invariant hilbert:   {_hilbert_text(inv.hilbert)}",
        f"invariant euler:     {r.invariant_euler}",
        f"classification:      {inv.label}",
    ]
    if inv.generator_x is not None:
        lines.append(f"x:                   {inv.generator_x}")
    lines += [
        f"reason:              {_pretty_powers(inv.reason)}",
        f"top class fixed:     {'yes' if inv.top_fixed else 'no'}",
        f"omega order:         {r.omega_order}",
        f"canonical cover |K|: {r.canonical_cover_order}",
        f"freeness:            {tri}",
    ]
    if r.violations:
        lines.append("violations:")
        lines += [f"  - [{v.rule}] {v.message}" for v in r.violations]
    else:
        lines.append("violations:          none")
    lines.append(_pretty_powers(r.summary()))
    return "\n".join(lines)


def _load(path: str):
    try:
        if path == "-":
            from .scenario_io import loads

            return loads(sys.stdin.read())
        return load(path)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror or e}") from e
    except ScenarioParseError as e:
        raise UsageError(f"{path}: {e}") from e
    except ScenarioError as e:
        raise UsageError(f"{path}: {e}") from e


def _expected_mismatches(s, r: ClassificationReport) -> list[str]:
    out = []
    exp = s.expected or {}
    if "classification" in exp and exp["classification"] != r.classification:
        out.append(f"expected classification {exp['classification']}, got {r.classification}")
    if "omega_order" in exp and exp["omega_order"] != r.omega_order:
        out.append(f"expected omega order {exp['omega_order']}, got {r.omega_order}")
    return out


def cmd_check(args) -> int:
    s = _load(args.path)
    try:
        r = validate(s, cap=args.cap)
    except GroupOverflowError as e:
        raise UsageError(str(e)) from e
    mismatches = _expected_mismatches(s, r)
    if args.format == "json":
        out = {"schema": SCHEMA_VERSION, "report": r.to_json(), "expected": s.expected,
               "mismatches": mismatches, "summary": r.summary()}
        if not args.quiet:
            _emit_json(out)
    elif not args.quiet:
        print(format_report(r))
        for m in mismatches:
            print(f"mismatch: {m}")
    for m in mismatches:
        print(f"pnkunits: {m}", file=sys.stderr)
    return EXIT_OK if r.ok and not mismatches else EXIT_FAIL


def cmd_construct(args) -> int:
    params = {"n": args.n, "k": args.k, "e": args.e}
    try:
        s = build_recipe(args.recipe, **params)
    except RecipeError as e:
        raise UsageError(str(e)) from e
    sys.stdout.write(dumps(s))
    return EXIT_OK


def cmd_enumerate(args) -> int:
    if args.n < 2 or args.k < 4 or args.k % 2:
        raise UsageError("enumerate needs n >= 2 and even k >= 4 (odd-degree classes anticommute)")
    try:
        rep = enumerate_covers(args.n, args.k)
    except EnumerationCapError as e:
        raise UsageError(str(e)) from e
    if args.format == "json":
        if not args.quiet:
            _emit_json({"schema": SCHEMA_VERSION, **rep.to_json()})
        return EXIT_OK
    if args.quiet:
        return EXIT_OK
    pp = rep.prime_power
    fac = " · ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in pp["factorization"])
    print(f"covers for P^{rep.n}[{rep.k}]-units   (n+1 = {pp['n_plus_1']} = {fac}, "
          f"prime power: {'yes' if pp['prime_power'] else 'no'})")
    width = max(len(str(e.decomposition)) for e in rep.entries)
    for e in rep.entries:
        if e.status == ELIMINATED:
            decisive = [t for t in e.traces if t.verdict == ELIMINATED and t.rule != "R*"]
            note = "; ".join(f"{t.rule} {_witness_text(t.witness)}" for t in decisive[:3])
            if len(decisive) > 3:
                note += f"; … ({len(decisive)} candidates)"
        else:
            note = e.witness or "no witness construction"
            if e.character_check:
                cc = e.character_check
                note += f"; character orders {cc['orders']} >= {cc['required']}: {'ok' if cc['holds'] else 'FAIL'}"
        print(f"{str(e.decomposition):<{width}}  {e.status:<13}  {note}")
    surv = ", ".join(str(e.decomposition) for e in rep.survivors()) or "none"
    print(f"survivors: {surv}")
    return EXIT_OK


def _witness_text(w: dict) -> str:
    kind = w.get("kind")
    if kind == "divides":
        return f"{w['a']} ∤ {w['b']} ({w['what']})"
    if kind == "euler-zero":
        return f"χ({w['factor']}) = 0"
    if kind == "degree-exceeds":
        return f"deg {w['factor']} = {w['degree']} > {w['k']}"
    if kind == "integral":
        return f"{w['num']}/{w['den']} not an integer"
    if kind == "no-shape":
        return "no single-shape ansatz"
    if kind == "linear-system":
        return f"C-relations det {w['det']} ≠ 0"
    if kind == "square-splits":
        return f"x² splits ({w['factor']}, e={w['e']})"
    if kind == "packing":
        return f"roles {w['roles']} cannot fill {w['blocks']} {w['factor']} blocks"
    if kind == "block-count":
        return f"orbit sizes {w['sizes']} ≠ {w['blocks']} blocks"
    if kind == "too-small":
        return f"orbit of size {w['size']} too small"
    return kind or ""


def cmd_invariants(args) -> int:
    s = _load(args.path)
    try:
        G = s.group(args.cap)
    except GroupOverflowError as e:
        raise UsageError(str(e)) from e
    alg = s.algebra
    if args.degree is not None and args.degree < 0:
        raise UsageError("degree must be non-negative")
    degrees = [args.degree] if args.degree is not None else range(alg.top_degree + 1)
    result = {d: invariant_basis(G, alg, d) for d in degrees}
    if args.format == "json":
        if not args.quiet:
            _emit_json({"schema": SCHEMA_VERSION, "scenario": s.name,
                        "basis": {str(d): [b.to_json() for b in v] for d, v in result.items()},
                        "text": {str(d): [str(b) for b in v] for d, v in result.items()}})
        return EXIT_OK
    if not args.quiet:
        for d, basis in result.items():
            if args.degree is None:
                if basis:
                    print(f"degree {d}:")
                    for b in basis:
                        print(f"  {b}")
            else:
                for b in basis:
                    print(b)
    return EXIT_OK


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--format", choices=("table", "json"), default=argparse.SUPPRESS,
                   help="output format (default: table)")
    p.add_argument("--cap", type=int, default=argparse.SUPPRESS,
                   help=f"maximum group size (default: {DEFAULT_CAP})")
    p.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS,
                   help="suppress normal output")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="pnkunits", parents=[common],
                                     description="Exact invariant computations for quotients of "
                                                 "hyperkähler and Calabi-Yau products.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="validate and classify a scenario file")
    p.add_argument("path", help="scenario JSON file ('-' for stdin)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("construct", parents=[common], help="emit a scenario for a recipe")
    p.add_argument("recipe", choices=sorted(RECIPES))
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--e", type=int)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("enumerate", parents=[common], help="case analysis of universal covers")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("invariants", parents=[common], help="list invariant basis elements")
    p.add_argument("path", help="scenario JSON file ('-' for stdin)")
    p.add_argument("--degree", type=int)
    p.set_defaults(func=cmd_invariants)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # argparse reports usage errors with code 2
        return int(e.code) if e.code is not None else EXIT_OK
    args.format = getattr(args, "format", "table")
    args.cap = getattr(args, "cap", DEFAULT_CAP)
    args.quiet = getattr(args, "quiet", False)
    if args.cap <= 0:
        print("pnkunits: --cap must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as e:
        print(f"pnkunits: {e}", file=sys.stderr)
        if args.command == "construct":
            sub = parser._subparsers._group_actions[0].choices[args.command]  # noqa: SLF001
            sub.print_usage(sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
