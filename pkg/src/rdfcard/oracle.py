"""Ground truth by brute force: exhaustive query execution and matrix enumeration.

Nothing here shares logic with the estimation path; these functions exist so
tests and `evaluate` can check the fast path against something independent.
They are deliberately exponential and refuse inputs beyond desk scale.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterator, Sequence

from .overlap_probability import CardinalityDistribution
from .query_model import BasicGraphPattern, Bound, NodeRef, TriplePattern
from .rdf_store import MISSING_ID, DirectedPredicate, Direction, Graph, TermId

BindingSet = dict[str, TermId]
"""A total assignment of the query's variable names to term ids."""

_MAX_ROWS = 8
_MAX_COLUMNS = 4


def enumerate_distribution(m: int, columns: Sequence[int]) -> CardinalityDistribution:
    """Distribution of the all-1 row count over every 0/1 matrix with the
    given column sums, by direct enumeration of column fill patterns.

    Refuses m > 8 or more than 4 columns (the state space is the product of
    the per-column binomials).
    """
    if not 0 <= m <= _MAX_ROWS:
        raise ValueError(f"refusing enumeration for m={m} (supported: 0..{_MAX_ROWS})")
    if len(columns) > _MAX_COLUMNS:
        raise ValueError(
            f"refusing enumeration for {len(columns)} columns (max {_MAX_COLUMNS})"
        )
    for c in columns:
        if not 0 <= c <= m:
            raise ValueError(f"column sum {c} outside [0, {m}]")

    full = (1 << m) - 1
    layers = [
        [_row_mask(rows) for rows in combinations(range(m), c)] for c in columns
    ]
    counts = [0] * (m + 1)
    n = len(layers)
    # a row is all-1 iff its bit survives the intersection of every column mask
    if n == 0:
        counts[m] += 1
    elif n == 1:
        for a in layers[0]:
            counts[a.bit_count()] += 1
    elif n == 2:
        for a in layers[0]:
            for b in layers[1]:
                counts[(a & b).bit_count()] += 1
    elif n == 3:
        for a in layers[0]:
            for b in layers[1]:
                ab = a & b
                for c_ in layers[2]:
                    counts[(ab & c_).bit_count()] += 1
    else:
        for a in layers[0]:
            for b in layers[1]:
                ab = a & b
                for c_ in layers[2]:
                    abc = ab & c_
                    for d in layers[3]:
                        counts[(abc & d).bit_count()] += 1

    total = 1
    for c in columns:
        total *= comb(m, c)
    nonzero = [t for t, k in enumerate(counts) if k]
    lo, hi = nonzero[0], nonzero[-1]
    probs = tuple(Fraction(counts[t], total) for t in range(lo, hi + 1))
    return CardinalityDistribution(lo, probs)


def _row_mask(rows: tuple[int, ...]) -> int:
    mask = 0
    for r in rows:
        mask |= 1 << r
    return mask


def execute_bgp(g: Graph, bgp: BasicGraphPattern) -> int:
    """Count distinct total bindings by a backtracking join over the patterns.

    Patterns are joined in a connectivity-preserving order (next pattern
    shares an already-placed node), which only bounds the runtime; the count
    is order-independent. Intended for fixture-scale data.
    """
    assigned: dict[NodeRef, TermId] = {}
    for node in bgp.nodes:
        if isinstance(node, Bound):
            tid = g.term_id(node.term)
            if tid == MISSING_ID:
                return 0
            assigned[node] = tid

    order = _join_order(bgp)
    n = len(order)
    iterators: list[Iterator[tuple[tuple[NodeRef, TermId], ...]] | None] = [None] * n
    applied: list[tuple[tuple[NodeRef, TermId], ...] | None] = [None] * n
    count = 0
    level = 0
    iterators[0] = _match_iter(g, order[0], assigned)
    while level >= 0:
        if applied[level] is not None:
            for node, _ in applied[level]:
                del assigned[node]
            applied[level] = None
        extension = next(iterators[level], None)
        if extension is None:
            iterators[level] = None
            level -= 1
            continue
        for node, value in extension:
            assigned[node] = value
        applied[level] = extension
        if level == n - 1:
            count += 1
        else:
            level += 1
            iterators[level] = _match_iter(g, order[level], assigned)
    return count


def _join_order(bgp: BasicGraphPattern) -> list[TriplePattern]:
    remaining = list(range(len(bgp.patterns)))
    start = next(
        (
            i
            for i in remaining
            if isinstance(bgp.patterns[i].subject, Bound)
            or isinstance(bgp.patterns[i].object, Bound)
        ),
        remaining[0],
    )
    ordered = [start]
    placed = {bgp.patterns[start].subject, bgp.patterns[start].object}
    remaining.remove(start)
    while remaining:
        idx = next(
            i
            for i in remaining
            if bgp.patterns[i].subject in placed or bgp.patterns[i].object in placed
        )
        ordered.append(idx)
        placed.update((bgp.patterns[idx].subject, bgp.patterns[idx].object))
        remaining.remove(idx)
    return [bgp.patterns[i] for i in ordered]


def _match_iter(
    g: Graph, pat: TriplePattern, assigned: dict[NodeRef, TermId]
) -> Iterator[tuple[tuple[NodeRef, TermId], ...]]:
    pid = g.term_id(pat.predicate)
    if pid == MISSING_ID:
        return
    s = assigned.get(pat.subject)
    o = assigned.get(pat.object)
    if s is not None and o is not None:
        if g.has_triple(s, pid, o):
            yield ()
    elif s is not None:
        for v in g.neighbors(s, DirectedPredicate(pid, Direction.FORWARD)):
            yield ((pat.object, v),)
    elif o is not None:
        for v in g.neighbors(o, DirectedPredicate(pid, Direction.INVERSE)):
            yield ((pat.subject, v),)
    else:
        for sv, ov in g.triple_pairs(pid):
            yield ((pat.subject, sv), (pat.object, ov))
