"""Exact sparse row reduction over cyclotomic fields."""

from __future__ import annotations

from typing import Hashable, Iterable, Mapping, Sequence

from .cyclotomic import CyclotomicScalar

Row = dict  # column key -> CyclotomicScalar, no zero entries


def _axpy(target: Row, factor: CyclotomicScalar, row: Mapping) -> None:
    # target -= factor * row, in place, dropping zeros
    for k, v in row.items():
        nv = target.get(k)
        nv = -(factor * v) if nv is None else nv - factor * v
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)


def row_reduce(rows: Iterable[Mapping[Hashable, CyclotomicScalar]],
               order: Sequence[Hashable]) -> list[Row]:
    """Reduced row echelon basis of the span of ``rows``.

    Pivots are taken at the earliest column in ``order``; each returned row has
    pivot coefficient 1 and the rows are sorted by pivot position.
    """
    pos = {k: i for i, k in enumerate(order)}
    basis: dict[Hashable, Row] = {}
    for r in rows:
        row = {k: v for k, v in r.items() if v}
        for p in [p for p in basis if p in row]:
            c = row.get(p)
            if c:
                _axpy(row, c, basis[p])
        if not row:
            continue
        pivot = min(row, key=pos.__getitem__)
        inv = row[pivot].inverse()
        row = {k: v * inv for k, v in row.items()}
        for p, b in basis.items():
            c = b.get(pivot)
            if c:
                _axpy(b, c, row)
        basis[pivot] = row
    return [basis[p] for p in sorted(basis, key=pos.__getitem__)]


def rank(rows, order) -> int:
    return len(row_reduce(rows, order))


def nullspace(rows: Iterable[Mapping[Hashable, CyclotomicScalar]],
              columns: Sequence[Hashable]) -> list[Row]:
    """Basis of ``{v : sum_k row[k] v[k] = 0 for every row}``."""
    ech = row_reduce(rows, columns)
    pivots = {}
    for r in ech:
        p = next(k for k in columns if k in r)
        pivots[p] = r
    one = CyclotomicScalar.from_rational(1)
    out = []
    for free in columns:
        if free in pivots:
            continue
        v = {free: one}
        for p, r in pivots.items():
            c = r.get(free)
            if c:
                v[p] = -c
        out.append(v)
    return out
